#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mswl/evolution.hpp"

namespace mswl {

struct ModeConfig {
    double r_max = 40.0;
    std::size_t n = 4000;
    double floor = 1e-10;  // Agmon fit uses |w| above floor * max |w|
};

/// s-wave eigenpair H w = -lambda^2 w of H = -Lap + V_lin, unit L^2(R^3) norm.
struct BoundState {
    std::vector<double> r;
    std::vector<double> w;
    double eigenvalue = 0.0;  // -lambda^2
    double lambda = 0.0;
    double decay_rate = 0.0;  // fitted kappa in |w| <= C e^{-kappa r}
    double residual = 0.0;    // ||(H + lambda^2) w||_{L^2}
    double norm_error = 0.0;  // |<w, w> - 1|
    bool agmon_ok = false;    // kappa >= 0.8 lambda
    RadialTable table;

    double operator()(double r) const { return table(r); }
};

/// Every negative s-wave eigenvalue, lowest first. Throws no_bound_state when there is none.
std::vector<BoundState> bound_states(const std::function<double(double)>& V_lin, const ModeConfig& cfg = {});
BoundState bound_state(const std::function<double(double)>& V_lin, const ModeConfig& cfg = {});
/// V + 5 Q^4.
std::function<double(double)> linearized_potential(const StaticState& Q, const RadialPotential& V);

/// Amplitude of one bound state along a run. N = a'' - lambda^2 a from the samples.
struct ModeTrack {
    std::vector<double> times;
    std::vector<double> a;
    std::vector<double> adot;
    std::vector<double> N;
    double lambda = 0.0;
    double growth_rate = 0.0;  // slope of log sqrt(a^2 + (a'/lambda)^2) over the second half
};
ModeTrack make_track(std::vector<double> times, std::vector<double> a, double lambda);

/// a(t) = <h(t), w> for a bound state centered at the origin.
ModeTrack project_static(const SpacetimeField& h, const BoundState& w);
/// b(tau) = <h_L(tau), m> on comoving slices of half-width `extent`.
ModeTrack project_comoving(const SpacetimeField& h, const BoundState& m, const LorentzFrame& frame,
                           double extent = 8.0, double spacing = 0.25);

struct ModePair {
    ModeTrack a, b;
    std::vector<double> remainder_w;  // <h - a w - b m_v, w> at the a samples
    double overlap = 0.0;             // max_t |<w, m_v(t)>|
};
ModePair project_modes(const SpacetimeField& h, const BoundState& w, const BoundState& m, const LorentzFrame& frame,
                       double extent = 8.0);

struct StabilityResult {
    double adot = 0.0;        // the velocity fixed by the condition
    double integral = 0.0;    // int_{t0}^T e^{-lambda (s - t0)} N ds
    double tail_bound = 0.0;  // bound on the truncated part beyond T
};
/// adot(t0) = -lambda a(t0) - int_{t0}^T e^{-lambda (s - t0)} N(s) ds. Throws
/// tail_not_controlled when N does not decay.
StabilityResult stable_initial_velocity(double a0, const std::vector<double>& t, const std::vector<double>& N,
                                        double lambda);
/// int e^{-lambda (s - t0)} N(s) ds over the samples (Simpson on uniform samples).
double weighted_mode_integral(const std::vector<double>& t, const std::vector<double>& N, double lambda);
/// Coefficient of e^{lambda (t - t0)} in the solution of a'' - lambda^2 a = N.
double growth_coefficient(double a0, double adot0, double lambda, const std::vector<double>& t,
                          const std::vector<double>& N);
/// Solution of a'' - lambda^2 a = N at the given times.
std::vector<double> integrate_mode_ode(double a0, double adot0, double lambda, const std::vector<double>& t,
                                       const std::function<double(double)>& N);

/// A bound state of one center and its prescribed amplitude: a(t0) for the
/// static center, b(tau0) with tau0 = t0 / gamma for the moving one.
struct ModeSpec {
    BoundState state;
    double amplitude = 0.0;
};

struct ShootOptions {
    std::size_t max_iters = 20;
    double tol = 1e-8;           // S-norm difference, relative to the first iterate
    double velocity_tol = 1e-8;  // relative change of the shot velocities
    double extent = 8.0;         // comoving projection half-width
    double preshoot_tol = 1e-6;  // velocities settle on the base iterate before h_prev is fed back
};

struct ShootResult {
    IterationTrace trace;
    std::vector<std::vector<double>> adot_history;  // per iterate, one entry per static mode
    std::vector<std::vector<double>> bdot_history;
    std::vector<double> update_ratios;
    std::vector<double> adot, bdot;
    std::vector<ModeTrack> a_tracks, b_tracks;
    WaveState data;  // initial data of the final run
};

/// Data at t0: remainder + sum a_k w_k + sum b_k(tau) m_{k,v}, with the
/// moving modes written as exact comoving mode solutions.
WaveState mode_data(const WaveState& remainder, const std::vector<ModeSpec>& static_modes,
                    const std::vector<double>& adot, const std::vector<ModeSpec>& moving_modes,
                    const std::vector<double>& bdot, const LorentzFrame& frame);

/// Duhamel iteration with the velocities re-fixed by the stability condition
/// after every iterate. Throws shoot_failed when the velocity updates grow.
ShootResult shooting_iteration(const InteractionTerms& terms, const std::vector<ModeSpec>& static_modes,
                               const std::vector<ModeSpec>& moving_modes, const WaveState& remainder,
                               const SolverConfig& cfg, const ShootOptions& opt = {});

void write_mode_track_csv(const std::filesystem::path& path, const ModeTrack& track, const Provenance& prov = {});
nlohmann::ordered_json bound_state_json(const BoundState& b);
nlohmann::ordered_json shoot_json(const ShootResult& r);

}  // namespace mswl

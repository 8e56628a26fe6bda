#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "mswl/interaction.hpp"
#include "mswl/norms.hpp"
#include "mswl/oracle.hpp"

namespace mswl {

struct SolverConfig {
    Grid grid = Grid::axisymmetric(-20.0, 20.0, 20.0, 0.25);
    double cfl = 0.4;              // dt / min spacing
    double sponge_width = 4.0;     // physical width of the damping layer
    double sponge_strength = 3.0;  // peak damping rate, 0 disables the layer
    Boundary boundary = Boundary::dirichlet;
    double t0 = 0.0;
    double T = 10.0;
    std::size_t sample_stride = 1;  // store every k-th step
    double fixed_dt = 0.0;          // overrides cfl when positive
    bool store = true;

    double dt() const;
    void validate() const;
};

/// 𝒱(x, t) = fixed(|x|) + moving(|comoving point|), both radial rest-frame
/// tables. The moving part is evaluated at every step.
struct ChargeTransferPotential {
    std::optional<RadialTable> fixed;
    std::optional<RadialTable> moving;
    LorentzFrame frame;

    double operator()(const Point3& x, double t) const;
};
/// V_j + 5 W_j^4 for both centers.
ChargeTransferPotential linearized_potentials(const SolitonPair& pair);
/// V carried at velocity v. With quintic_source() the boosted static state is
/// an exact traveling solution.
ChargeTransferPotential traveler_potential(const RadialPotential& V, const Velocity& v);

/// Fills out with S(x, t) on the grid; u is the current iterate.
using StepSource = std::function<void(double t, std::span<const double> u, std::span<double> out)>;
/// -u^5 on the current solution.
StepSource quintic_source();
using SampleObserver = std::function<void(double t, std::span<const double> u, std::span<const double> ut)>;

struct RunResult {
    SpacetimeField field;  // ascending time
    WaveState final_state;
    std::vector<double> times;
    std::vector<double> energy;     // staggered discrete free energy (squared norm)
    std::vector<double> norm;       // ||(u, u_t)||_{Hdot^1 x L^2}
    std::vector<double> absorbed;   // sponge dissipation accumulated up to each sample
    std::size_t steps = 0;
};

/// Leapfrog for u_tt + sigma u_t = Lap u - 𝒱 u + S from data.t to cfg.T,
/// forward or backward. The sponge damps in the direction of integration.
RunResult evolve_linear(const WaveState& data, const ChargeTransferPotential& potential, const StepSource& source,
                        const SolverConfig& cfg, const SampleObserver& observer = {});

/// Values of the stored field at time t (cubic in time) on every node.
void time_slice(const SpacetimeField& f, double t, std::span<double> out);

/// S = ±(F1 + F2 + F + N(h_prev)) - a h_prev - h_prev^5 with h_prev taken from
/// the previous iterate (zero when null).
StepSource iteration_source(const InteractionTerms& terms, const Grid& grid, const SpacetimeField* h_prev);
/// Same terms evaluated on the current solution: the full h-equation.
StepSource nonlinear_source(const InteractionTerms& terms, const Grid& grid);

RunResult duhamel_iterate(const SpacetimeField* h_prev, const InteractionTerms& terms, const WaveState& data,
                          const SolverConfig& cfg);

struct BackwardResult {
    RunResult run;
    std::vector<double> times;        // ascending
    std::vector<double> domain_norm;  // ||h(t)|| inside the grid
    std::vector<double> full_norm;    // adds the energy the sponge absorbed on [t, T]
};
/// Zero data at T, integrated back to t1 with the full h-equation.
BackwardResult backward_solve(const InteractionTerms& terms, double T, double t1, const SolverConfig& cfg);

/// ||a||_{L^{5/4}_t L^{5/2}_x} on [t0, t_end] with a power-law tail beyond.
/// Space integrals use local axisymmetric grids around each center.
double eta_norm(const InteractionTerms& terms, double t0, double t_end, double dt, double h = 0.25,
                double extent = 20.0);

struct IterationTrace {
    std::vector<NormReport> reports;
    std::vector<double> differences;  // S-norm of h_{i+1} - h_i
    std::vector<double> ratios;
    double eta = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
    DecayFit decay;
    SpacetimeField final_field;
};

struct IterationOptions {
    std::size_t max_iters = 12;
    double tol = 1e-8;  // relative to the S-norm of the first iterate
    double eta_horizon = 10.0;  // eta evaluated on [t0, eta_horizon * t0]
};
/// Runs duhamel_iterate from h_{-1} = 0. Throws no_contraction when the
/// ratio exceeds 1 three times in a row.
IterationTrace iterate_to_fixed_point(const InteractionTerms& terms, const WaveState& data, const SolverConfig& cfg,
                                      const IterationOptions& opt = {});

struct ScatteringResult {
    WaveState free_data;  // at the first sample
    std::vector<double> times;
    std::vector<double> deficit;
    double initial_norm = 0.0;
};
/// Free backward evolution of the terminal state and the distance of the run
/// from it along the window.
ScatteringResult scattering_profile(const SpacetimeField& h_run, const SolverConfig& cfg);

struct WeightedEnergyReport {
    double sup_energy = 0.0;
    double data_energy = 0.0;
    double weighted = 0.0;
    double weighted_moving = 0.0;
    double constant = 0.0;  // smallest C with sup E <= C (data + weighted [+ moving])
    std::vector<double> l1l2_partial;  // int_{t0}^{t_k} ||H(t)||_{L^2} dt
};
WeightedEnergyReport weighted_energy_check(const SpacetimeField& run, const SpacetimeField& source, double epsilon,
                                           std::optional<Velocity> v = {});

nlohmann::ordered_json iteration_json(const IterationTrace& tr);

}  // namespace mswl

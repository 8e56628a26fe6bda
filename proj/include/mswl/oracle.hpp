#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "mswl/field.hpp"
#include "mswl/lorentz.hpp"

namespace mswl {

struct QuadratureOptions {
    double rel_tol = 1e-12;
    unsigned max_depth = 15;
};

/// I(t) = int <x>^{-7+2 eps} <x - v t>^{-2} dx. The angular integral around
/// the origin is done in closed form, leaving one radial quadrature.
double interaction_integral(double t, const Velocity& v, double epsilon, const QuadratureOptions& q = {});

struct RegionSplit {
    double near_origin = 0.0;   // |x| <= eta t
    double near_mover = 0.0;    // |x - v t| <= eta t
    double far = 0.0;           // both >= eta t
    double total = 0.0;         // I(t)
    bool overlapping = false;   // the first two sets intersect
};
RegionSplit region_split(double t, const Velocity& v, double epsilon, double eta, const QuadratureOptions& q = {});

/// Least squares fit of log y = slope log t + intercept.
struct DecayFit {
    std::vector<double> times;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;  // two standard errors
    double t_lo = 0.0, t_hi = 0.0;
};
DecayFit loglog_fit(const std::vector<double>& t, const std::vector<double>& y);
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

DecayFit interaction_decay_fit(const Velocity& v, double epsilon, double t_lo = 10.0, double t_hi = 1e3,
                               std::size_t n = 25, const QuadratureOptions& q = {});
std::array<DecayFit, 3> region_decay_fits(const Velocity& v, double epsilon, double eta, double t_lo = 10.0,
                                          double t_hi = 1e3, std::size_t n = 25, const QuadratureOptions& q = {});

struct TailRate {
    double value = 0.0;       // (int_{t1}^infty I dt)^{1/2}
    double slope = 0.0;       // fitted exponent used beyond the window
    double window_end = 0.0;
    double tail_fraction = 0.0;
};
/// Quadrature of I over [t1, window * t1], power-law extrapolation beyond.
TailRate tail_rate(double t1, const Velocity& v, double epsilon, double window = 10.0, const QuadratureOptions& q = {});

struct SlabEnergy {
    double flat = 0.0;    // int |grad u|^2 + |u_t|^2 at t = t_ref
    double tilted = 0.0;  // same integrand on t = t_ref + v x1
    double source_l2 = 0.0;
    double bound_flat = 0.0;    // C (tilted + ||F||^2)
    double bound_tilted = 0.0;  // C (flat + ||F||^2)
    double measured_c = 1.0;    // smallest C making both hold
    bool ok = true;
};
/// Energy comparison between the flat slice and the Lorentz-tilted slice.
/// Velocity must point along e1. `source` may be empty.
SlabEnergy slab_energy_compare(const SpacetimeField& field, const SpacetimeField& source, const Velocity& v,
                               double C = 10.0, double t_ref = 0.0);
/// int |grad u|^2 + |u_t|^2 on the slice t = t_ref + slope * x1.
double slice_energy(const SpacetimeField& field, double slope, double t_ref = 0.0);

nlohmann::ordered_json decay_fit_json(const DecayFit& f);

}  // namespace mswl

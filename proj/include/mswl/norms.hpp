#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mswl/field.hpp"
#include "mswl/lorentz.hpp"

namespace mswl {

/// (p, q) with 1/2 = 1/p + 3/q, p = 3, 4, 5.
std::vector<std::pair<double, double>> strichartz_pairs();

/// L^{p,1} quasi-norm of a step function with the given cell measures,
/// p sum_k (mu_k^{1/p} - mu_{k-1}^{1/p}) g*_k over the decreasing rearrangement.
double lorentz_quasinorm(std::span<const double> g, std::span<const double> measure, double p);
double lorentz_quasinorm(const Grid& grid, std::span<const double> g, double p);
/// L^1_{x1} L^{2,1}_{x^1}: transverse L^{2,1} on each x1 slice, summed over slices.
double iterated_quasinorm(const Grid& grid, std::span<const double> g);

struct NormOptions {
    double epsilon = 0.05;
    /// Moving center for the shifted-field (h^S) components.
    std::optional<Velocity> velocity;
    /// Weight exponent of the weighted L^2 norm; default 1/2 + epsilon.
    std::optional<double> weight_exponent;
    bool weight_moving = false;  // center the weight at v t instead of 0
};

struct NormReport {
    std::map<int, double> strichartz;  // keyed by p
    double strichartz_sup = 0.0;
    double reversed = 0.0;
    double reversed_moving = 0.0;
    double moving_coverage = 1.0;
    double weighted = 0.0;
    double I_norm = 0.0;
    double D_norm = 0.0;
    double D_shifted = 0.0;
    double D1_norm = 0.0;
    double D2_norm = 0.0;
    double l2 = 0.0;  // L^2_{t,x}
    double energy = 0.0;  // sup_t ||(u, u_t)||_{Hdot^1 x L^2}
    double energy_min = 0.0;
    double t_lo = 0.0, t_hi = 0.0;

    /// Max of the components defining the S space.
    double s_norm() const;
};

nlohmann::ordered_json norm_report_json(const NormReport& r);

/// Streams uniformly spaced time samples and accumulates every norm
/// component, so long runs need not be stored.
class NormAccumulator {
public:
    NormAccumulator(Grid grid, NormOptions opt = {});

    void add(double t, std::span<const double> u, std::span<const double> ut);
    NormReport report() const;
    std::size_t samples() const { return times_.size(); }

    /// Per-sample traces: energy norm, int |u|^2 dx, weighted int.
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& energy_trace() const { return energy_; }
    const std::vector<double>& weighted_trace() const { return weighted_; }

private:
    struct Trapz {
        double sum = 0.0, first = 0.0, last = 0.0;
        void add(double v, bool initial) {
            if (initial) first = v;
            sum += v;
            last = v;
        }
        double value(double dt, std::size_t n) const { return n < 2 ? 0.0 : dt * (sum - 0.5 * (first + last)); }
    };
    struct NodeTrapz {
        std::vector<double> sum, first, last;
        void resize(std::size_t n) { sum.assign(n, 0.0), first.assign(n, 0.0), last.assign(n, 0.0); }
        void add(std::size_t id, double v, bool initial) {
            if (initial) first[id] = v;
            sum[id] += v;
            last[id] = v;
        }
        std::vector<double> value(double dt, std::size_t n) const;
    };

    Grid grid_;
    NormOptions opt_;
    std::vector<double> times_, energy_, weighted_;
    std::vector<double> weight_;       // <x>^{-3}
    std::vector<double> shift_weight_; // <x>^{-3} on shifted points
    std::array<Trapz, 3> stri_;
    Trapz l2_, weighted_int_;
    NodeTrapz trace2_, trace1_, moving2_;
    std::vector<double> sup_, damped_sup_, damped_shift_sup_;
    std::vector<std::size_t> moving_hits_;
    std::size_t moving_total_ = 0, moving_in_ = 0;
};

/// (int (int |u|^q dx)^{p/q} dt)^{1/p}, trapezoid rule in time.
double mixed_norm(const SpacetimeField& field, double p, double q);

struct ReversedNorm {
    double value = 0.0;
    double coverage = 1.0;  // fraction of ray samples inside the grid
    bool clipped = false;
};
/// sup_x (int |u(x, t)|^2 dt)^{1/2}, or along x + v t.
ReversedNorm reversed_strichartz(const SpacetimeField& field, std::optional<Velocity> moving_velocity = {});

double weighted_L2(const SpacetimeField& field, double epsilon, std::optional<Velocity> center_velocity = {});
/// Explicit weight exponent s: || <x - c t>^s H ||_{L^2_{t,x}}.
double weighted_L2_exponent(const SpacetimeField& field, double s, std::optional<Velocity> center_velocity = {});

using SourceFn = std::function<double(const Point3&, double)>;
/// Per-time int <x - c t>^{2s} |H|^2 dx for a closure over a grid.
std::vector<double> weighted_profile(const SourceFn& H, const Grid& grid, const std::vector<double>& times, double s,
                                     std::optional<Velocity> center_velocity = {});

enum class Composite { I, D, D1, D2 };
Composite parse_composite(const std::string& name);
double composite_norms(const SpacetimeField& G, Composite which, double epsilon = 0.05);

/// G^S(x, t) = G(x + v t, t) sampled on the same grid, zero outside.
SpacetimeField shifted_field(const SpacetimeField& G, const Velocity& v);

NormReport s_report(const SpacetimeField& h, const Velocity& v, double epsilon = 0.05);

}  // namespace mswl

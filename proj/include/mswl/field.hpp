#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "mswl/grid.hpp"

namespace mswl {

/// (u, du/dt) on a grid at one time.
struct WaveState {
    Grid grid;
    std::vector<double> u;
    std::vector<double> ut;
    double t = 0.0;

    static WaveState zero(const Grid& g, double t = 0.0);
    /// sqrt(int |grad u|^2 + |u_t|^2), the Hdot^1 x L^2 norm.
    double energy_norm(Boundary b = Boundary::dirichlet) const;
};

/// Uniformly time-sampled field (u and u_t) on a fixed spatial grid.
class SpacetimeField {
public:
    SpacetimeField() = default;
    SpacetimeField(Grid grid, double t0, double dt);

    const Grid& grid() const { return grid_; }
    std::size_t n_times() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    double t0() const { return t0_; }
    double dt() const { return dt_; }
    double time(std::size_t k) const { return times_[k]; }
    const std::vector<double>& times() const { return times_; }

    /// Appends a sample. The time must continue the uniform sequence.
    void push(double t, std::span<const double> u, std::span<const double> ut);

    std::span<const double> u(std::size_t k) const;
    std::span<const double> ut(std::size_t k) const;
    std::span<double> u_mut(std::size_t k);
    std::span<double> ut_mut(std::size_t k);

    WaveState state(std::size_t k) const;

    /// Cubic interpolation in space and time at grid coordinates; zero
    /// outside the sampled slab.
    double interpolate(const Point3& grid_coords, double t) const;
    double interpolate_ut(const Point3& grid_coords, double t) const;
    bool covers_time(double t) const;

    /// Samples with time in [t_lo, t_hi].
    SpacetimeField window(double t_lo, double t_hi) const;
    SpacetimeField scaled(double factor) const;
    SpacetimeField difference(const SpacetimeField& other) const;

    /// Hdot^1 x L^2 norm at sample k.
    double energy_norm(std::size_t k) const;

private:
    double interpolate_impl(const std::vector<double>& data, const Point3& g, double t) const;

    Grid grid_;
    double t0_ = 0.0;
    double dt_ = 1.0;
    std::vector<double> times_;
    std::vector<double> u_;
    std::vector<double> ut_;
};

/// Builds a field by sampling closures for u and u_t at the given times.
SpacetimeField sample_field(const Grid& grid, double t0, double dt, std::size_t n_times,
                            const std::function<double(const Point3&, double)>& u,
                            const std::function<double(const Point3&, double)>& ut);

// Binary snapshot: little-endian, header {magic "MSWL", version u32, layout
// tag u32, dims 3 x u64, spacings 3 x f64, time f64}, then u and u_t as f64
// in row-major node order.
inline constexpr std::uint32_t snapshot_version = 1;
void write_snapshot(const std::filesystem::path& path, const WaveState& s);
/// The header carries no origin; the caller supplies it.
WaveState read_snapshot(const std::filesystem::path& path, const Point3& origin = {0.0, 0.0, 0.0});

}  // namespace mswl

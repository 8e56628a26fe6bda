#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mswl {

using Point3 = std::array<double, 3>;

// Axisymmetric grids store the (x1, rho) half-plane; rho is the distance to
// the x1 axis. Full 3D grids store (x1, x2, x3).
enum class Layout : std::uint32_t { axisymmetric = 1, full3d = 2 };

enum class Boundary { dirichlet, neumann };

struct GridSpec {
    Layout layout = Layout::axisymmetric;
    std::array<std::size_t, 3> n{1, 1, 1};
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> h{1.0, 1.0, 1.0};
};

/// Uniform node-centred grid. Axisymmetric grids always start at rho = 0
/// and use n[2] == 1.
class Grid {
public:
    Grid() = default;
    explicit Grid(GridSpec spec);

    /// Square cells of size h covering [x1_lo, x1_hi] x [0, rho_hi].
    static Grid axisymmetric(double x1_lo, double x1_hi, double rho_hi, double h);
    /// Cube [-half_width, half_width]^3 with n nodes per side.
    static Grid cube(double half_width, std::size_t n);

    Layout layout() const { return spec_.layout; }
    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return spec_.n[0] * spec_.n[1] * spec_.n[2]; }
    std::size_t n(int d) const { return spec_.n[d]; }
    double spacing(int d) const { return spec_.h[d]; }
    double coord(int d, std::size_t i) const { return spec_.lo[d] + spec_.h[d] * static_cast<double>(i); }
    double hi(int d) const { return coord(d, spec_.n[d] - 1); }

    std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const {
        return (i * spec_.n[1] + j) * spec_.n[2] + k;
    }
    std::array<std::size_t, 3> unravel(std::size_t idx) const;

    /// Representative Cartesian point of a node. For axisymmetric grids this is
    /// (x1, rho, 0).
    Point3 point(std::size_t idx) const;

    /// Control volume of a node (annulus volumes for axisymmetric grids).
    double volume(std::size_t idx) const;
    double total_volume() const;

    /// Discrete Laplacian in conservative (finite-volume) form. The operator
    /// is symmetric with respect to the volume-weighted inner product.
    void laplacian(std::span<const double> u, std::span<double> out,
                   Boundary boundary = Boundary::dirichlet) const;

    /// Sum over edges of the squared difference quotients weighted by the
    /// edge volume; equals <u, -Lap u> for the matching boundary condition.
    double gradient_energy(std::span<const double> u, Boundary boundary = Boundary::dirichlet) const;

    double integrate(std::span<const double> f) const;
    double inner(std::span<const double> a, std::span<const double> b) const;

    /// Map a Cartesian point to grid coordinates (x1, rho, 0) or (x1, x2, x3).
    Point3 to_grid_coords(const Point3& x) const;
    bool contains(const Point3& grid_coords) const;

    /// Tensor-product cubic (4-point Lagrange) interpolation at grid
    /// coordinates. Values outside the grid are zero; the axis is handled by
    /// even reflection in rho.
    double interpolate(std::span<const double> u, const Point3& grid_coords) const;

    std::vector<double> sample(const std::function<double(const Point3&)>& f) const;

private:
    GridSpec spec_{};
};

/// 4-point Lagrange weights for fractional offset s in [0,1) relative to the
/// second of four equispaced nodes.
std::array<double, 4> cubic_weights(double s);

}  // namespace mswl

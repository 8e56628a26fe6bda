#include "mswl/grid.hpp"

#include <cmath>
#include <numbers>

#include "mswl/error.hpp"

namespace mswl {

namespace {
constexpr double pi = std::numbers::pi;
}

Grid::Grid(GridSpec spec) : spec_(spec) {
    for (int d = 0; d < 3; ++d) {
        if (spec_.n[d] == 0) throw Error(ErrorKind::invalid_argument, "grid dimension must be positive");
        if (!(spec_.h[d] > 0.0)) throw Error(ErrorKind::invalid_argument, "grid spacing must be positive");
    }
    if (spec_.layout == Layout::axisymmetric) {
        spec_.n[2] = 1;
        spec_.lo[1] = 0.0;
        spec_.lo[2] = 0.0;
    }
}

Grid Grid::axisymmetric(double x1_lo, double x1_hi, double rho_hi, double h) {
    if (!(x1_hi > x1_lo) || !(rho_hi > 0.0) || !(h > 0.0))
        throw Error(ErrorKind::invalid_argument, "bad axisymmetric grid extent");
    GridSpec s;
    s.layout = Layout::axisymmetric;
    s.n = {static_cast<std::size_t>(std::llround((x1_hi - x1_lo) / h)) + 1,
           static_cast<std::size_t>(std::llround(rho_hi / h)) + 1, 1};
    s.lo = {x1_lo, 0.0, 0.0};
    s.h = {h, h, 1.0};
    return Grid(s);
}

Grid Grid::cube(double half_width, std::size_t n) {
    if (n < 2) throw Error(ErrorKind::invalid_argument, "cube needs at least two nodes per side");
    GridSpec s;
    s.layout = Layout::full3d;
    const double h = 2.0 * half_width / static_cast<double>(n - 1);
    s.n = {n, n, n};
    s.lo = {-half_width, -half_width, -half_width};
    s.h = {h, h, h};
    return Grid(s);
}

std::array<std::size_t, 3> Grid::unravel(std::size_t idx) const {
    const std::size_t k = idx % spec_.n[2];
    const std::size_t rest = idx / spec_.n[2];
    return {rest / spec_.n[1], rest % spec_.n[1], k};
}

Point3 Grid::point(std::size_t idx) const {
    const auto [i, j, k] = unravel(idx);
    if (spec_.layout == Layout::axisymmetric) return {coord(0, i), coord(1, j), 0.0};
    return {coord(0, i), coord(1, j), coord(2, k)};
}

double Grid::volume(std::size_t idx) const {
    if (spec_.layout == Layout::full3d) return spec_.h[0] * spec_.h[1] * spec_.h[2];
    const std::size_t j = unravel(idx)[1];
    const double hr = spec_.h[1];
    const double ring = j == 0 ? pi * 0.25 * hr * hr : 2.0 * pi * static_cast<double>(j) * hr * hr;
    return ring * spec_.h[0];
}

double Grid::total_volume() const {
    if (spec_.layout == Layout::full3d)
        return static_cast<double>(size()) * spec_.h[0] * spec_.h[1] * spec_.h[2];
    const double r_out = hi(1) + 0.5 * spec_.h[1];
    return static_cast<double>(spec_.n[0]) * spec_.h[0] * pi * r_out * r_out;
}

void Grid::laplacian(std::span<const double> u, std::span<double> out, Boundary boundary) const {
    const std::size_t n0 = spec_.n[0], n1 = spec_.n[1], n2 = spec_.n[2];
    const bool neu = boundary == Boundary::neumann;
    const double ih0 = 1.0 / (spec_.h[0] * spec_.h[0]);
    const double ih1 = 1.0 / (spec_.h[1] * spec_.h[1]);

    if (spec_.layout == Layout::axisymmetric) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < n0; ++i) {
            const double* row = u.data() + i * n1;
            const double* left = i > 0 ? u.data() + (i - 1) * n1 : nullptr;
            const double* right = i + 1 < n0 ? u.data() + (i + 1) * n1 : nullptr;
            double* o = out.data() + i * n1;
            for (std::size_t j = 0; j < n1; ++j) {
                const double c = row[j];
                const double l = left ? left[j] : (neu ? c : 0.0);
                const double r = right ? right[j] : (neu ? c : 0.0);
                double lap = (l - 2.0 * c + r) * ih0;
                if (n1 > 1) {
                    if (j == 0) {
                        lap += 4.0 * (row[1] - c) * ih1;
                    } else {
                        const double up = j + 1 < n1 ? row[j + 1] : (neu ? c : 0.0);
                        const double jj = static_cast<double>(j);
                        lap += ((jj + 0.5) * (up - c) - (jj - 0.5) * (c - row[j - 1])) * ih1 / jj;
                    }
                }
                o[j] = lap;
            }
        }
        return;
    }

    const double ih2 = 1.0 / (spec_.h[2] * spec_.h[2]);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            for (std::size_t k = 0; k < n2; ++k) {
                const std::size_t id = index(i, j, k);
                const double c = u[id];
                const double ghost = neu ? c : 0.0;
                const double xm = i > 0 ? u[id - n1 * n2] : ghost;
                const double xp = i + 1 < n0 ? u[id + n1 * n2] : ghost;
                const double ym = j > 0 ? u[id - n2] : ghost;
                const double yp = j + 1 < n1 ? u[id + n2] : ghost;
                const double zm = k > 0 ? u[id - 1] : ghost;
                const double zp = k + 1 < n2 ? u[id + 1] : ghost;
                out[id] = (xm - 2.0 * c + xp) * ih0 + (ym - 2.0 * c + yp) * ih1 + (zm - 2.0 * c + zp) * ih2;
            }
        }
    }
}

double Grid::gradient_energy(std::span<const double> u, Boundary boundary) const {
    const std::size_t n0 = spec_.n[0], n1 = spec_.n[1], n2 = spec_.n[2];
    const bool dir = boundary == Boundary::dirichlet;
    double sum = 0.0;
    if (spec_.layout == Layout::axisymmetric) {
        const double h0 = spec_.h[0];
        const double hr = spec_.h[1];
        for (std::size_t j = 0; j < n1; ++j) {
            const double ring = j == 0 ? pi * 0.25 * hr * hr : 2.0 * pi * static_cast<double>(j) * hr * hr;
            const double w = ring / h0;  // vol / h0^2
            for (std::size_t i = 0; i + 1 < n0; ++i) {
                const double d = u[(i + 1) * n1 + j] - u[i * n1 + j];
                sum += w * d * d;
            }
            if (dir) {
                const double a = u[j], b = u[(n0 - 1) * n1 + j];
                sum += w * (a * a + b * b);
            }
        }
        const double wr = 2.0 * pi * h0;
        for (std::size_t i = 0; i < n0; ++i) {
            const double* row = u.data() + i * n1;
            for (std::size_t j = 0; j + 1 < n1; ++j) {
                const double d = row[j + 1] - row[j];
                sum += wr * (static_cast<double>(j) + 0.5) * d * d;
            }
            if (dir) {
                const double b = row[n1 - 1];
                sum += wr * (static_cast<double>(n1 - 1) + 0.5) * b * b;
            }
        }
        return sum;
    }
    const double vol = spec_.h[0] * spec_.h[1] * spec_.h[2];
    const std::array<std::size_t, 3> stride{n1 * n2, n2, 1};
    for (int d = 0; d < 3; ++d) {
        const double w = vol / (spec_.h[d] * spec_.h[d]);
        for (std::size_t id = 0; id < size(); ++id) {
            const auto ijk = unravel(id);
            if (ijk[d] + 1 < spec_.n[d]) {
                const double diff = u[id + stride[d]] - u[id];
                sum += w * diff * diff;
            } else if (dir) {
                sum += w * u[id] * u[id];
            }
            if (dir && ijk[d] == 0) sum += w * u[id] * u[id];
        }
    }
    return sum;
}

double Grid::integrate(std::span<const double> f) const {
    double s = 0.0;
    for (std::size_t id = 0; id < size(); ++id) s += volume(id) * f[id];
    return s;
}

double Grid::inner(std::span<const double> a, std::span<const double> b) const {
    double s = 0.0;
    for (std::size_t id = 0; id < size(); ++id) s += volume(id) * a[id] * b[id];
    return s;
}

Point3 Grid::to_grid_coords(const Point3& x) const {
    if (spec_.layout == Layout::axisymmetric) return {x[0], std::hypot(x[1], x[2]), 0.0};
    return x;
}

bool Grid::contains(const Point3& g) const {
    const int dims = spec_.layout == Layout::axisymmetric ? 2 : 3;
    for (int d = 0; d < dims; ++d) {
        const double lo = spec_.lo[d];
        if (g[d] < lo - 1e-12 * spec_.h[d] || g[d] > hi(d) + 1e-12 * spec_.h[d]) return false;
    }
    return true;
}

std::array<double, 4> cubic_weights(double s) {
    return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

double Grid::interpolate(std::span<const double> u, const Point3& g) const {
    const bool axi = spec_.layout == Layout::axisymmetric;
    const int dims = axi ? 2 : 3;
    std::array<long, 3> base{0, 0, 0};
    std::array<std::array<double, 4>, 3> w{};
    for (int d = 0; d < dims; ++d) {
        const double q = (g[d] - spec_.lo[d]) / spec_.h[d];
        const double fl = std::floor(q);
        // More than one cell outside: zero field.
        if (fl < -2.0 || fl > static_cast<double>(spec_.n[d]) + 1.0) return 0.0;
        base[d] = static_cast<long>(fl);
        w[d] = cubic_weights(q - fl);
    }
    auto fetch_index = [&](int d, long i) -> long {
        if (axi && d == 1 && i < 0) i = -i;  // even reflection through the axis
        if (i < 0 || i >= static_cast<long>(spec_.n[d])) return -1;
        return i;
    };
    double acc = 0.0;
    if (axi) {
        for (int a = 0; a < 4; ++a) {
            const long i = fetch_index(0, base[0] - 1 + a);
            if (i < 0 || w[0][a] == 0.0) continue;
            double row = 0.0;
            for (int b = 0; b < 4; ++b) {
                const long j = fetch_index(1, base[1] - 1 + b);
                if (j < 0) continue;
                row += w[1][b] * u[index(static_cast<std::size_t>(i), static_cast<std::size_t>(j))];
            }
            acc += w[0][a] * row;
        }
        return acc;
    }
    for (int a = 0; a < 4; ++a) {
        const long i = fetch_index(0, base[0] - 1 + a);
        if (i < 0) continue;
        for (int b = 0; b < 4; ++b) {
            const long j = fetch_index(1, base[1] - 1 + b);
            if (j < 0) continue;
            double line = 0.0;
            for (int c = 0; c < 4; ++c) {
                const long k = fetch_index(2, base[2] - 1 + c);
                if (k < 0) continue;
                line += w[2][c] * u[index(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                          static_cast<std::size_t>(k))];
            }
            acc += w[0][a] * w[1][b] * line;
        }
    }
    return acc;
}

std::vector<double> Grid::sample(const std::function<double(const Point3&)>& f) const {
    std::vector<double> out(size());
    for (std::size_t id = 0; id < size(); ++id) out[id] = f(point(id));
    return out;
}

}  // namespace mswl

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "mswl/error.hpp"
#include "mswl/field.hpp"

using namespace mswl;

TEST_CASE("axisymmetric volumes sum to the cylinder") {
    const Grid g = Grid::axisymmetric(-2.0, 3.0, 4.0, 0.25);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sum += g.volume(i);
    CHECK(sum == doctest::Approx(g.total_volume()).epsilon(1e-12));
    const double r = 4.0 + 0.125;
    CHECK(g.total_volume() == doctest::Approx(std::numbers::pi * r * r * 21 * 0.25));
}

TEST_CASE("laplacian is symmetric in the volume inner product") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    for (const Grid& g : {Grid::axisymmetric(-1.0, 1.0, 1.5, 0.1), Grid::cube(1.0, 9)}) {
        for (Boundary b : {Boundary::dirichlet, Boundary::neumann}) {
            std::vector<double> u(g.size()), w(g.size()), lu(g.size()), lw(g.size());
            for (auto& x : u) x = d(rng);
            for (auto& x : w) x = d(rng);
            g.laplacian(u, lu, b);
            g.laplacian(w, lw, b);
            CHECK(g.inner(u, lw) == doctest::Approx(g.inner(w, lu)).epsilon(1e-11));
            CHECK(g.gradient_energy(u, b) == doctest::Approx(-g.inner(u, lu)).epsilon(1e-11));
        }
    }
}

TEST_CASE("axisymmetric laplacian of a quadratic") {
    // Lap (x^2 + rho^2) = 2 + 4 = 6 away from the boundary, including the axis.
    const Grid g = Grid::axisymmetric(-2.0, 2.0, 2.0, 0.1);
    const auto u = g.sample([](const Point3& p) { return p[0] * p[0] + p[1] * p[1]; });
    std::vector<double> lu(g.size());
    g.laplacian(u, lu);
    for (std::size_t j : {0u, 1u, 5u}) CHECK(lu[g.index(20, j)] == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("cubic interpolation is exact on cubics") {
    const Grid g = Grid::cube(2.0, 17);
    auto f = [](const Point3& p) { return p[0] * p[0] * p[0] - 2 * p[1] * p[2] + p[2] * p[2] * p[0]; };
    const auto u = g.sample(f);
    for (Point3 p : {Point3{0.13, -0.71, 0.4}, Point3{1.1, 0.9, -1.3}})
        CHECK(g.interpolate(u, p) == doctest::Approx(f(p)).epsilon(1e-12));
    CHECK(g.interpolate(u, {9.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("axis reflection in rho interpolation") {
    const Grid g = Grid::axisymmetric(-1.0, 1.0, 1.0, 0.05);
    const auto u = g.sample([](const Point3& p) { return std::cos(p[1]) * (1 + p[0]); });
    CHECK(g.interpolate(u, {0.33, 0.02, 0.0}) == doctest::Approx(std::cos(0.02) * 1.33).epsilon(1e-6));
}

TEST_CASE("spacetime field cubic time interpolation and windows") {
    const Grid g = Grid::cube(1.0, 5);
    auto f = sample_field(g, 1.0, 0.5, 9, [](const Point3& p, double t) { return t * t * t + p[0]; }, nullptr);
    CHECK(f.interpolate(g.to_grid_coords({0.5, 0.0, 0.0}), 2.3) == doctest::Approx(2.3 * 2.3 * 2.3 + 0.5));
    CHECK(f.interpolate({0.0, 0.0, 0.0}, 100.0) == 0.0);
    auto w = f.window(2.0, 3.0);
    CHECK(w.n_times() == 3);
    CHECK(w.t0() == doctest::Approx(2.0));
    CHECK_THROWS_AS(f.push(7.0, f.u(0), f.ut(0)), Error);
}

TEST_CASE("snapshot round trip") {
    const Grid g = Grid::axisymmetric(-1.0, 2.0, 1.0, 0.25);
    WaveState s = WaveState::zero(g, 3.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.u[i] = std::sin(double(i));
        s.ut[i] = double(i) / 7.0;
    }
    const auto path = std::filesystem::temp_directory_path() / "mswl_snapshot_test.bin";
    write_snapshot(path, s);
    const WaveState r = read_snapshot(path, {-1.0, 0.0, 0.0});
    CHECK(r.t == 3.5);
    CHECK(r.grid.n(0) == g.n(0));
    CHECK(r.grid.coord(0, 2) == doctest::Approx(g.coord(0, 2)));
    CHECK(r.u == s.u);
    CHECK(r.ut == s.ut);
    std::filesystem::remove(path);
}

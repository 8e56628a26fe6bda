#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <numbers>

#include "mswl/error.hpp"
#include "mswl/norms.hpp"
#include "mswl/oracle.hpp"

using namespace mswl;

namespace {

// Independent 2D (axis, radius) quadrature of the same integral.
double oracle_2d(double t, double v, double eps) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double s = v * t, k = 0.5 * (-7.0 + 2.0 * eps);
    auto inner = [&](double xi) {
        auto f = [&](double rho) {
            return rho * std::pow(1.0 + xi * xi + rho * rho, k) / (1.0 + (xi - s) * (xi - s) + rho * rho);
        };
        return GK::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-11);
    };
    double total = 0.0;
    const double cuts[] = {-std::numeric_limits<double>::infinity(), -5.0, 0.0, s / 2, s, s + 5.0,
                           std::numeric_limits<double>::infinity()};
    for (int i = 0; i + 1 < 7; ++i)
        if (cuts[i + 1] > cuts[i]) total += GK::integrate(inner, cuts[i], cuts[i + 1], 15, 1e-10);
    return 2.0 * std::numbers::pi * total;
}

const Velocity v05{0.5, 0, 0};

}  // namespace

TEST_CASE("interaction integral at t = 0 is a Beta function") {
    for (double eps : {0.0, 0.05, 0.2}) {
        const double exact = 2.0 * std::numbers::pi * std::beta(1.5, 3.0 - eps);
        CHECK(interaction_integral(0.0, v05, eps) == doctest::Approx(exact).epsilon(1e-6));
    }
}

TEST_CASE("interaction integral matches the 2D oracle") {
    for (double t : {3.0, 10.0, 100.0}) {
        const double a = interaction_integral(t, v05, 0.05), b = oracle_2d(t, 0.5, 0.05);
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
    CHECK(interaction_integral(40.0, {0.3, 0.4, 0}, 0.05) == interaction_integral(40.0, v05, 0.05));
    const double fine = interaction_integral(50.0, v05, 0.05);
    QuadratureOptions coarse;
    coarse.rel_tol = 1e-6;
    CHECK(std::abs(interaction_integral(50.0, v05, 0.05, coarse) / fine - 1.0) < 5e-3);
    CHECK_THROWS_AS(interaction_integral(1.0, {1.2, 0, 0}, 0.05), Error);
}

TEST_CASE("interaction integral properties") {
    const auto t = log_spaced(10.0, 1e3, 12);
    double prev = INFINITY;
    for (double s : t) {
        const double I = interaction_integral(s, v05, 0.05);
        CHECK(I <= prev);
        prev = I;
        double last = 0.0;
        for (double eps : {0.0, 0.05, 0.1, 0.2}) {
            const double J = interaction_integral(s, v05, eps);
            CHECK(J >= last);
            last = J;
        }
    }
    const double still = interaction_integral(1.0, {0, 0, 0}, 0.05);
    for (double s : {10.0, 100.0, 1000.0}) CHECK(interaction_integral(s, {0, 0, 0}, 0.05) == still);
}

TEST_CASE("decay exponent of the interaction integral") {
    const auto start = std::chrono::steady_clock::now();
    const auto fit = interaction_decay_fit(v05, 0.05, 10.0, 1e3, 25);
    const auto regions = region_decay_fits(v05, 0.05, 0.2, 10.0, 1e3, 25);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    MESSAGE("slope " << fit.slope << " +- " << fit.half_width << ", regions " << regions[0].slope << " "
                     << regions[1].slope << " " << regions[2].slope << " in " << secs << " s");
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(0.05));
    for (const auto& r : regions) CHECK(r.slope <= -1.85);
    CHECK(secs < 60.0);
}

TEST_CASE("region split") {
    for (double t : {5.0, 50.0, 500.0}) {
        const auto r = region_split(t, v05, 0.05, 0.2);
        CHECK_FALSE(r.overlapping);
        CHECK(r.near_origin + r.near_mover + r.far >= r.total * (1 - 1e-10));
        CHECK(r.near_origin + r.near_mover + r.far == doctest::Approx(r.total).epsilon(1e-8));
    }
    const auto o = region_split(20.0, v05, 0.05, 0.4);
    CHECK(o.overlapping);
    CHECK(o.near_origin + o.near_mover + o.far >= o.total);
    const auto z = region_split(1e-4, v05, 0.05, 0.2);
    CHECK(z.near_origin < 1e-10 * z.total);
    CHECK(z.near_mover < 1e-10 * z.total);
    CHECK_THROWS(region_split(10.0, v05, 0.05, 0.6));
    CHECK_THROWS(region_split(10.0, v05, 0.05, 0.0));
}

TEST_CASE("tail rate") {
    std::vector<double> t1 = log_spaced(1e2, 1e4, 5), a, b;
    for (double s : t1) {
        a.push_back(tail_rate(s, v05, 0.05).value);
        b.push_back(tail_rate(s, v05, 0.1).value);
    }
    const auto fa = loglog_fit(t1, a), fb = loglog_fit(t1, b);
    MESSAGE("tail slopes " << fa.slope << " " << fb.slope);
    CHECK(fa.slope == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(std::abs(fa.slope - fb.slope) < 0.02);
    const auto r = tail_rate(100.0, v05, 0.05);
    CHECK(r.slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(r.tail_fraction > 0.0);
    CHECK(r.tail_fraction < 0.2);
    try {
        tail_rate(10.0, {0, 0, 0}, 0.05);
        FAIL("expected a non-integrable tail");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::tail_not_controlled);
    }
}

TEST_CASE("log-log fit recovers exact power laws") {
    const auto t = log_spaced(1.0, 100.0, 9);
    std::vector<double> y;
    for (double s : t) y.push_back(3.0 * std::pow(s, -1.25));
    const auto f = loglog_fit(t, y);
    CHECK(f.slope == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.half_width < 1e-10);
}

TEST_CASE("slice energies of a plane wave") {
    const Grid g = Grid::axisymmetric(-5, 5, 3, 0.05);
    const double v = 0.5;
    const auto f = sample_field(
        g, -3.0, 0.01, 601, [](const Point3& x, double t) { return std::sin(x[0] - t); },
        [](const Point3& x, double t) { return -std::cos(x[0] - t); });
    for (double slope : {0.0, v}) {
        std::vector<double> e(g.size());
        for (std::size_t id = 0; id < g.size(); ++id) {
            const double x1 = g.point(id)[0];
            const double c = std::cos(x1 - slope * x1);
            e[id] = 2.0 * c * c;
        }
        CHECK(slice_energy(f, slope) == doctest::Approx(g.integrate(e)).epsilon(2e-3));
    }
    const auto cmp = slab_energy_compare(f, SpacetimeField(), {v, 0, 0});
    CHECK(cmp.ok);
    CHECK(cmp.measured_c >= 1.0);
    CHECK(cmp.measured_c < 10.0);
    CHECK_THROWS_AS(slab_energy_compare(f, SpacetimeField(), {0.8, 0, 0}, 10.0, 0.0), Error);
    const auto zero = slab_energy_compare(f.scaled(0.0), SpacetimeField(), {v, 0, 0});
    CHECK(zero.flat == 0.0);
    CHECK(zero.tilted == 0.0);
}

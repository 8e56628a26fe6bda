#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <Eigen/Dense>

#include "mswl/elliptic.hpp"
#include "mswl/error.hpp"
#include "mswl/radial_operator.hpp"

using namespace mswl;

namespace {

// Fixed-step RK4 shooting on a uniform grid; bisection on the sign of
// u + r u' at r_end.
int rk4_terminal_sign(double depth, double alpha, double r_end, double h) {
    auto f = [depth](double r, double u, double p) {
        return -depth * std::exp(-r * r) * u + std::pow(u, 5) - 2.0 * p / r;
    };
    double r = 1e-4;
    const double s0 = -depth * alpha + std::pow(alpha, 5);
    double u = alpha + s0 * r * r / 6.0, p = s0 * r / 3.0;
    while (r < r_end - 1e-12) {
        const double k1u = p, k1p = f(r, u, p);
        const double k2u = p + 0.5 * h * k1p, k2p = f(r + 0.5 * h, u + 0.5 * h * k1u, p + 0.5 * h * k1p);
        const double k3u = p + 0.5 * h * k2p, k3p = f(r + 0.5 * h, u + 0.5 * h * k2u, p + 0.5 * h * k2p);
        const double k4u = p + h * k3p, k4p = f(r + h, u + h * k3u, p + h * k3p);
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
        p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        r += h;
        if (std::abs(u) > 1e3) return u > 0 ? 1 : -1;
    }
    return u + r * p > 0 ? 1 : -1;
}

double rk4_ground_alpha(double depth, double lo, double hi) {
    const int slo = rk4_terminal_sign(depth, lo, 40.0, 1e-3);
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rk4_terminal_sign(depth, mid, 40.0, 1e-3) == slo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const StaticState& deep_ground() {
    static const StaticState g = find_ground_state(gaussian_well(20.0));
    return g;
}

}  // namespace

TEST_CASE("zero potential and zero alpha give the zero state") {
    const auto s = solve_radial_static(zero_potential(), 0.0);
    CHECK(s.is_zero());
    CHECK(s.far_field_c == 0.0);
    CHECK(s.energy == 0.0);
}

TEST_CASE("free equation with nonzero alpha does not settle") {
    try {
        solve_radial_static(zero_potential(), 0.5);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::shoot_diverged);
        CHECK(std::string(e.what()).find("shoot diverged at r =") != std::string::npos);
    }
    const auto g = find_ground_state(zero_potential());
    CHECK(g.is_zero());
    CHECK(g.tag == "no trapping");
}

TEST_CASE("deep well ground state") {
    const auto& g = deep_ground();
    CHECK(g.nodes == 0);
    CHECK(g.shoot_alpha > 0.0);
    CHECK(g.energy < 0.0);
    CHECK(g.max_residual < 1e-6);
    CHECK(g.far_field_c > 0.0);
    for (double u : g.u) CHECK_FALSE(u < 0.0);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < g.r.size(); ++i)
        if (g.r[i] >= 50.0 && g.r[i] <= 100.0) {
            lo = std::min(lo, g.r[i] * g.u[i]);
            hi = std::max(hi, g.r[i] * g.u[i]);
        }
    CHECK((hi - lo) / hi < 0.01);
    // Independent fixed-step RK4 bisection.
    CHECK(g.shoot_alpha == doctest::Approx(rk4_ground_alpha(20.0, 1.95, 2.8)).epsilon(1e-6));
    // Frozen values of this solver.
    CHECK(g.shoot_alpha == doctest::Approx(2.07039799853).epsilon(1e-8));
    CHECK(g.far_field_c == doctest::Approx(1.371887679).epsilon(1e-6));
    CHECK(g.energy == doctest::Approx(-71.757984).epsilon(1e-5));
}

TEST_CASE("energy functional signs") {
    StaticState bump;
    EllipticConfig cfg;
    cfg.n = 4000;
    bump.r = radial_grid(cfg);
    for (double r : bump.r) {
        bump.u.push_back(std::exp(-r * r));
        bump.du.push_back(-2 * r * std::exp(-r * r));
    }
    const double j = energy_J(bump, zero_potential());
    // 4 pi int (2 r^2 e^{-2r^2} + e^{-6 r^2}/6) r^2 dr
    const double pi = std::acos(-1.0);
    const double exact = 4 * pi * (2 * 3 * std::sqrt(pi / 2) / 32 + std::sqrt(pi / 6) / (4 * 6) / 6);
    CHECK(j > 0.0);
    CHECK(j == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("far field fit") {
    std::vector<double> r, u;
    for (int i = 0; i <= 2000; ++i) {
        r.push_back(0.1 * i);
        u.push_back(1.0 / (1.0 + 0.1 * i));
    }
    const auto ff = far_field_fit(r, u);
    CHECK(ff.c == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(far_field_fit(r, std::vector<double>(r.size(), 0.0)).c == 0.0);
    StaticState s;
    s.r = r;
    for (double x : r) s.u.push_back(std::exp(-x / 20.0) * 1e-3);
    CHECK_THROWS_AS(far_field_coefficient(s), Error);
}

TEST_CASE("far field coefficient matches Richardson extrapolation in R_max") {
    auto c_at = [](double rmax) {
        EllipticConfig cfg;
        cfg.r_max = rmax;
        cfg.n = static_cast<std::size_t>(100 * rmax);
        return find_ground_state(gaussian_well(20.0), cfg).far_field_c;
    };
    const double c50 = c_at(50.0), c100 = c_at(100.0);
    const double c200 = deep_ground().far_field_c;
    // Observed convergence order in R_max is 2.
    const double order = std::log2((c100 - c50) / (c200 - c100));
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
    CHECK(c200 == doctest::Approx((4.0 * c100 - c50) / 3.0).epsilon(1e-3));
}

TEST_CASE("grid halving changes c by less than 1%") {
    EllipticConfig fine;
    fine.n = 40000;
    const auto g2 = find_ground_state(gaussian_well(20.0), fine);
    CHECK(std::abs(g2.far_field_c - deep_ground().far_field_c) < 0.01 * deep_ground().far_field_c);
}

TEST_CASE("dichotomy matches the eigenvalue count") {
    for (double depth : {1.0, 2.0, 3.0, 5.0, 20.0}) {
        const auto V = gaussian_well(depth);
        const auto free = linearization_spectrum(StaticState{}, V);
        const auto g = find_ground_state(V);
        CHECK(g.is_zero() == (free.per_sector[0] == 0));
    }
}

TEST_CASE("tridiagonal operator is symmetric and matches a dense solver") {
    const auto a = radial_hamiltonian([](double r) { return -3.0 * std::exp(-r * r) + 0.1 * r; }, 1, 0.05, 200);
    CHECK(a.lower == a.upper);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(200, 200);
    for (int i = 0; i < 200; ++i) {
        m(i, i) = a.diag[i];
        if (i + 1 < 200) m(i, i + 1) = a.upper[i], m(i + 1, i) = a.lower[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto ev = eigenvalues_below(a, 2.0);
    int dense_count = 0;
    for (int i = 0; i < 200; ++i) dense_count += es.eigenvalues()(i) < 2.0;
    REQUIRE(static_cast<int>(ev.size()) == dense_count);
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(ev[k] == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-9));
    const auto v = inverse_iteration(a, ev[0]);
    const auto av = a.apply(v);
    double res = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) res = std::max(res, std::abs(av[i] - ev[0] * v[i]));
    CHECK(res < 1e-8);
}

TEST_CASE("Poschl-Teller s-wave eigenvalue") {
    // -chi'' - 12 sech^2(r) chi: odd states only, single eigenvalue -4.
    const auto sp = linearization_spectrum(StaticState{}, poschl_teller_well(12.0));
    REQUIRE(sp.per_sector[0] == 1);
    CHECK(sp.sector_eigenvalues[0][0] == doctest::Approx(-4.0).epsilon(1e-3));
    CHECK_FALSE(sp.is_stable);
}

TEST_CASE("free laplacian spectrum and resonance") {
    const auto sp = linearization_spectrum(StaticState{}, zero_potential());
    CHECK(sp.negative_eigenvalues.empty());
    CHECK(sp.zero_resonance_indicator == doctest::Approx(1.0));
    CHECK(sp.is_stable);
    const auto deep = linearization_spectrum(StaticState{}, gaussian_well(20.0));
    CHECK(deep.per_sector[0] >= 1);
    const auto lin = linearization_spectrum(deep_ground(), gaussian_well(20.0));
    CHECK(lin.is_stable == (lin.negative_eigenvalues.empty() && lin.zero_resonance_indicator > 1e-4));
}

TEST_CASE("zero resonance near the s-wave threshold") {
    // Oracle: RK4 zero-energy solution phi'' + 2phi'/r = V phi, A = phi + r phi' at r = 200;
    // bisect the depth where A changes sign.
    auto asymptote = [](double depth) {
        auto f = [depth](double r, double u, double p) { return -depth * std::exp(-r * r) * u - 2.0 * p / r; };
        const double h = 2e-3;
        double r = 1e-4, u = 1.0 - depth * r * r / 6.0, p = -depth * r / 3.0;
        while (r < 200.0 - 1e-9) {
            const double k1u = p, k1p = f(r, u, p);
            const double k2u = p + 0.5 * h * k1p, k2p = f(r + 0.5 * h, u + 0.5 * h * k1u, p + 0.5 * h * k1p);
            const double k3u = p + 0.5 * h * k2p, k3p = f(r + 0.5 * h, u + 0.5 * h * k2u, p + 0.5 * h * k2p);
            const double k4u = p + h * k3p, k4p = f(r + h, u + h * k3u, p + h * k3p);
            u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            p += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            r += h;
        }
        return u + r * p;
    };
    double lo = 2.0, hi = 3.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (asymptote(mid) > 0 ? lo : hi) = mid;
    }
    const auto V = gaussian_well(0.5 * (lo + hi));
    EllipticConfig cfg;
    CHECK(zero_resonance_indicator([&](double r) { return V(r); }, cfg) < 1e-4);
    CHECK(zero_resonance_indicator([](double r) { return -1.0 * std::exp(-r * r); }, cfg) > 0.3);
}

TEST_CASE("potential validation") {
    RadialPotential bad;
    bad.eval = [](double r) { return 1.0 / (1.0 + r * r); };
    CHECK_THROWS_AS(bad.validate(), Error);
    RadialPotential inf;
    inf.eval = [](double r) { return 1.0 / r; };
    CHECK_THROWS_AS(inf.validate(), Error);
    CHECK_NOTHROW(compact_bump(4.0, 2.0).validate());
    CHECK_NOTHROW(poschl_teller_well(4.0).validate());
}

TEST_CASE("static state serialization") {
    const auto dir = std::filesystem::temp_directory_path() / "mswl_elliptic_test";
    std::filesystem::create_directories(dir);
    const auto sp = linearization_spectrum(deep_ground(), gaussian_well(20.0));
    write_static_state(dir / "ground", deep_ground(), &sp);
    std::ifstream csv(dir / "ground.csv");
    std::string first, second;
    std::getline(csv, first);
    std::getline(csv, second);
    CHECK(first.rfind("# mswl", 0) == 0);
    CHECK(second == "r,u,residual");
    std::ifstream js(dir / "ground.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j.at("alpha").get<double>() == doctest::Approx(deep_ground().shoot_alpha));
    CHECK(j.at("stability").contains("is_stable"));
    std::filesystem::remove_all(dir);
}

#include <doctest.h>

#include <cmath>

#include "mswl/error.hpp"
#include "mswl/modes.hpp"

using namespace mswl;

namespace {

std::vector<double> grid_times(double t0, double t1, double dt) {
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    for (std::size_t i = 0; i <= n; ++i) t.push_back(t0 + dt * static_cast<double>(i));
    return t;
}

std::vector<double> apply(const std::vector<double>& t, double (*f)(double)) {
    std::vector<double> y;
    for (double x : t) y.push_back(f(x));
    return y;
}

double e2(double t) { return std::exp(-2.0 * t); }

double depth5(double r) { return -5.0 * std::exp(-r * r); }

}  // namespace

TEST_CASE("deep well bound state invariants") {
    const auto b = bound_state([](double r) { return -20.0 * std::exp(-r * r); });
    CHECK(b.lambda > 0.0);
    CHECK(b.eigenvalue == doctest::Approx(-b.lambda * b.lambda));
    CHECK(b.norm_error < 1e-8);
    CHECK(b.residual < 1e-6);
    CHECK(b.agmon_ok);
    CHECK(b.decay_rate >= 0.8 * b.lambda);
    CHECK(b.w[0] > 0.0);
    // unit norm of the tabulated profile, by independent quadrature
    double s = 0.0;
    const double h = 1e-3;
    for (double r = 0.5 * h; r < 40.0; r += h) s += 4.0 * M_PI * r * r * b(r) * b(r) * h;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(bound_states([](double r) { return -20.0 * std::exp(-r * r); }).size() >= 1);
}

TEST_CASE("spectral shift identity") {
    const auto a = bound_state(depth5);
    const auto b = bound_state([](double r) { return depth5(r) - 0.25; }, ModeConfig{20.0, 2000});
    const auto a20 = bound_state(depth5, ModeConfig{20.0, 2000});
    CHECK(b.eigenvalue == doctest::Approx(a20.eigenvalue - 0.25).epsilon(1e-10));
    CHECK(a.eigenvalue == doctest::Approx(a20.eigenvalue).epsilon(1e-3));
}

TEST_CASE("nonnegative potential has no bound state") {
    try {
        bound_state([](double r) { return std::exp(-r * r); });
        FAIL("expected no_bound_state");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::no_bound_state);
    }
    CHECK_THROWS_AS(bound_state([](double) { return 0.0; }), Error);
}

TEST_CASE("linearized potential adds 5 Q^4") {
    StaticState Q = zero_static_state();
    const auto f = linearized_potential(Q, gaussian_well(5.0));
    CHECK(f(0.3) == doctest::Approx(depth5(0.3)));
}

TEST_CASE("toy stability condition") {
    const auto t = grid_times(0.0, 30.0, 0.01);
    const auto N = apply(t, e2);
    const auto r = stable_initial_velocity(0.0, t, N, 1.0);
    CHECK(r.adot == doctest::Approx(-1.0 / 3.0).epsilon(1e-4));
    CHECK(std::abs(r.adot + 1.0 / 3.0) < 1e-4);
    // literal rebased condition
    CHECK(std::abs(0.0 + r.adot / 1.0 + weighted_mode_integral(t, N, 1.0) / 1.0) < 1e-12);

    // bounded solution (e^{-2t} - e^{-t}) / 3
    const auto a = integrate_mode_ode(0.0, -1.0 / 3.0, 1.0, grid_times(0.0, 10.0, 0.5), [](double s) { return e2(s); });
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double s = 0.5 * static_cast<double>(i);
        CHECK(std::abs(a[i] - (std::exp(-2 * s) - std::exp(-s)) / 3.0) < 1e-9);
    }
    CHECK(growth_coefficient(0.0, 0.0, 1.0, t, N) == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
    CHECK(std::abs(growth_coefficient(0.0, r.adot, 1.0, t, N)) < 1e-6);
}

TEST_CASE("vanishing drive selects the decaying branch") {
    const auto t = grid_times(2.0, 12.0, 0.05);
    const std::vector<double> N(t.size(), 0.0);
    const auto r = stable_initial_velocity(0.7, t, N, 1.5);
    CHECK(r.adot == doctest::Approx(-1.5 * 0.7));
    CHECK(r.tail_bound == 0.0);
    const auto a = integrate_mode_ode(0.7, r.adot, 1.5, t, [](double) { return 0.0; });
    CHECK(a.back() == doctest::Approx(0.7 * std::exp(-1.5 * 10.0)).epsilon(1e-6));
}

TEST_CASE("truncation is monotone within the tail bound") {
    const auto t1 = grid_times(0.0, 6.0, 0.01), t2 = grid_times(0.0, 12.0, 0.01);
    const auto short_run = stable_initial_velocity(0.2, t1, apply(t1, e2), 1.0);
    const auto long_run = stable_initial_velocity(0.2, t2, apply(t2, e2), 1.0);
    CHECK(std::abs(short_run.adot - long_run.adot) <= short_run.tail_bound);
    CHECK(long_run.tail_bound < short_run.tail_bound);
}

TEST_CASE("non-decaying drive is rejected") {
    const auto t = grid_times(0.0, 10.0, 0.1);
    const std::vector<double> N(t.size(), 1.0);
    try {
        stable_initial_velocity(0.0, t, N, 1.0);
        FAIL("expected tail_not_controlled");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::tail_not_controlled);
    }
}

TEST_CASE("growth dichotomy on the toy problem") {
    const double lam = 0.8, a0 = 0.5;
    const auto t = grid_times(0.0, 25.0, 0.01);
    const auto N = apply(t, e2);
    const auto r = stable_initial_velocity(a0, t, N, lam);
    const auto obs = grid_times(0.0, 20.0, 0.1);
    const auto shot = integrate_mode_ode(a0, r.adot, lam, obs, [](double s) { return e2(s); });
    double sup = 0.0;
    for (double x : shot) sup = std::max(sup, std::abs(x));
    CHECK(sup <= 2.0 * a0 + 0.5);  // int |N| = 1/2
    const auto naive = integrate_mode_ode(a0, 0.0, lam, obs, [](double s) { return e2(s); });
    const auto tr = make_track(obs, naive, lam);
    CHECK(tr.growth_rate >= 0.9 * lam);
}

TEST_CASE("track of an exact exponential") {
    const auto t = grid_times(0.0, 5.0, 0.01);
    std::vector<double> a;
    for (double s : t) a.push_back(std::exp(0.6 * s));
    const auto tr = make_track(t, a, 0.6);
    CHECK(tr.growth_rate == doctest::Approx(0.6).epsilon(1e-3));
    for (std::size_t i = 2; i + 2 < tr.N.size(); ++i) CHECK(std::abs(tr.N[i]) < 1e-4 * a[i]);
}

TEST_CASE("projection of a frozen eigenfunction") {
    const auto w = bound_state(depth5);
    const Grid g = Grid::axisymmetric(-20, 30, 20, 0.2);
    SpacetimeField h(g, 40.0, 0.5);
    const auto u = g.sample([&](const Point3& x) { return w(std::sqrt(x[0] * x[0] + x[1] * x[1])); });
    const std::vector<double> z(g.size(), 0.0);
    for (int k = 0; k <= 20; ++k) h.push(40.0 + 0.5 * k, u, z);
    const auto frame = make_frame({0.5, 0, 0});
    const auto p = project_modes(h, w, w, frame, 6.0);
    for (double a : p.a.a) CHECK(a == doctest::Approx(1.0).epsilon(2e-3));
    for (double b : p.b.a) CHECK(std::abs(b) < 1e-3);
    for (double r : p.remainder_w) CHECK(std::abs(r) < 5e-3);
    CHECK(p.overlap < 1e-3);
}

TEST_CASE("orthogonal field has no mode content") {
    const auto w = bound_state(depth5);
    const Grid g = Grid::axisymmetric(-12, 12, 12, 0.2);
    SpacetimeField h(g, 0.0, 0.5);
    // odd in x1, hence orthogonal to every radial profile
    const auto u = g.sample([&](const Point3& x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); });
    const std::vector<double> z(g.size(), 0.0);
    for (int k = 0; k < 8; ++k) h.push(0.5 * k, u, z);
    const auto tr = project_static(h, w);
    for (double a : tr.a) CHECK(std::abs(a) < 1e-12);
}

TEST_CASE("comoving projection needs a wide enough slab") {
    const auto w = bound_state(depth5);
    const Grid g = Grid::axisymmetric(-10, 10, 10, 0.5);
    SpacetimeField h(g, 0.0, 0.5);
    const std::vector<double> z(g.size(), 0.0);
    for (int k = 0; k < 4; ++k) h.push(0.5 * k, z, z);
    try {
        project_comoving(h, w, make_frame({0.5, 0, 0}), 8.0);
        FAIL("expected slab_too_narrow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::slab_too_narrow);
    }
}

namespace {

double driven_mismatch(double spacing) {
    const auto w = bound_state(depth5);
    const Grid g = Grid::axisymmetric(-20, 20, 20, spacing);
    SolverConfig c;
    c.grid = g;
    c.t0 = 0.0;
    c.T = 6.0;
    ChargeTransferPotential pot;
    pot.fixed = tabulate_potential(gaussian_well(5.0));
    std::vector<double> shape = g.sample([](const Point3& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])); });
    StepSource src = [&](double t, std::span<const double>, std::span<double> out) {
        const double f = 0.1 * std::cos(2.0 * t);
        for (std::size_t id = 0; id < out.size(); ++id) out[id] = f * shape[id];
    };
    WaveState d = WaveState::zero(g);
    d.u = g.sample([&](const Point3& x) { return 0.01 * w(std::sqrt(x[0] * x[0] + x[1] * x[1])); });
    const auto run = evolve_linear(d, pot, src, c);
    const auto tr = project_static(run.field, w);
    std::vector<double> wv(g.size());
    for (std::size_t id = 0; id < g.size(); ++id) {
        const Point3 x = g.point(id);
        wv[id] = w(std::sqrt(x[0] * x[0] + x[1] * x[1]));
    }
    const double proj = g.inner(shape, wv);
    const auto ode = integrate_mode_ode(tr.a.front(), tr.adot.front(), w.lambda, tr.times,
                                        [&](double t) { return 0.1 * std::cos(2.0 * t) * proj; });
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ode.size(); ++i) {
        worst = std::max(worst, std::abs(ode[i] - tr.a[i]));
        scale = std::max(scale, std::abs(ode[i]));
    }
    return worst / scale;
}

}  // namespace

TEST_CASE("driven projection follows the mode ODE") {
    const double coarse = driven_mismatch(0.2), fine = driven_mismatch(0.1);
    MESSAGE("projected vs ODE " << coarse << " " << fine);
    CHECK(fine <= 0.02);
    CHECK(coarse / fine > 3.0);
}

TEST_CASE("shooting without bound states is the plain iteration") {
    StaticState Z = zero_static_state();
    const auto terms = build_terms(make_pair(Z, zero_potential(), Z, zero_potential(), {0.5, 0, 0}));
    const Grid g = Grid::axisymmetric(-6, 10, 6, 0.25);
    SolverConfig c;
    c.grid = g;
    c.sponge_width = 3.0;
    c.t0 = 2.0;
    c.T = 6.0;
    const auto r = shooting_iteration(terms, {}, {}, WaveState::zero(g, 2.0), c);
    CHECK(r.trace.converged);
    CHECK(r.adot_history.empty());
}

TEST_CASE("shooting suppresses both unstable modes") {
    const RadialPotential V = gaussian_well(5.0);
    const StaticState Z = zero_static_state();
    const auto w = bound_state(linearized_potential(Z, V));
    const auto pair = make_pair(Z, V, Z, V, {0.5, 0, 0});
    const auto terms = build_terms(pair);
    SolverConfig c;
    c.grid = Grid::axisymmetric(-16, 28, 16, 0.4);
    c.sponge_width = 4.0;
    c.t0 = 8.0;
    c.T = 24.0;
    const std::vector<ModeSpec> sm{{w, 0.01}}, mm{{w, 0.01}};
    ShootOptions o;
    o.velocity_tol = 1e-7;
    const auto r = shooting_iteration(terms, sm, mm, WaveState::zero(c.grid, c.t0), c, o);
    MESSAGE("iterations " << r.trace.iterations << " a rate " << r.a_tracks[0].growth_rate << " b rate "
                          << r.b_tracks[0].growth_rate);
    CHECK(r.trace.converged);
    CHECK(r.a_tracks[0].growth_rate < 0.1 * w.lambda);
    CHECK(r.b_tracks[0].growth_rate < 0.1 * w.lambda);
    for (double q : r.update_ratios) CHECK(q < 1.0);
    CHECK(shoot_json(r)["converged"] == true);

    // unshot control
    const auto d = mode_data(WaveState::zero(c.grid, c.t0), sm, {0.0}, mm, {0.0}, pair.w[1].frame);
    const auto run = duhamel_iterate(nullptr, terms, d, c);
    CHECK(project_static(run.field, w).growth_rate >= 0.8 * w.lambda);
    CHECK(project_comoving(run.field, w, pair.w[1].frame).growth_rate >= 0.8 * w.lambda);
}

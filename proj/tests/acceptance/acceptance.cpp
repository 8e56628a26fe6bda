#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mswl/error.hpp"
#include "mswl/interaction.hpp"
#include "mswl/modes.hpp"
#include "mswl/oracle.hpp"

using namespace mswl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const Velocity v05{0.5, 0.0, 0.0};

Outcome interaction_exponent() {
    const auto t = Clock::now();
    const auto fit = interaction_decay_fit(v05, 0.05, 10.0, 1e3, 25);
    const auto parts = region_decay_fits(v05, 0.05, 0.2, 10.0, 1e3, 25);
    const double secs = seconds_since(t);
    bool ok = std::abs(fit.slope + 2.0) <= 0.1 && secs < 60.0;
    for (const auto& p : parts) ok = ok && p.slope <= -1.85;
    return {ok, fmt("slope %.4f, regions %.3f %.3f %.3f, %.1f s", fit.slope, parts[0].slope, parts[1].slope,
                    parts[2].slope, secs)};
}

struct BackwardFit {
    DecayFit domain, full;
};

BackwardFit backward_fit(const InteractionTerms& terms, double T) {
    const double h = 0.25, t1 = 20.0;
    SolverConfig c;
    c.grid = Grid::axisymmetric(-25.0, 0.5 * T + 25.0, 25.0, h);
    c.sponge_width = 5.0;
    c.sample_stride = 10;
    c.store = false;
    const auto b = backward_solve(terms, T, t1, c);
    std::vector<double> t, yd, yf;
    for (std::size_t k = 0; k < b.times.size(); ++k)
        if (b.times[k] >= 20.0 && b.times[k] <= 200.0) {
            t.push_back(b.times[k]);
            yd.push_back(b.domain_norm[k]);
            yf.push_back(b.full_norm[k]);
        }
    return {loglog_fit(t, yd), loglog_fit(t, yf)};
}

Outcome backward_decay() {
    const auto t = Clock::now();
    const auto V = gaussian_well(20.0);
    const auto W = find_ground_state(V);
    const auto terms = build_terms(make_pair(W, V, W, V, v05));
    const auto a = backward_fit(terms, 400.0);
    const auto b = backward_fit(terms, 800.0);
    const double change = std::abs(b.domain.slope - a.domain.slope) / std::abs(a.domain.slope);
    const bool ok = std::abs(a.domain.slope + 0.5) <= 0.15 && std::abs(b.domain.slope + 0.5) <= 0.15 && change < 0.1 &&
                    seconds_since(t) < 1800.0;
    return {ok, fmt("slope on [20,200]: T=400 %.3f, T=800 %.3f (doubling change %.1f%%); with absorbed energy %.3f, "
                    "%.3f; %.0f s",
                    a.domain.slope, b.domain.slope, 100.0 * change, a.full.slope, b.full.slope, seconds_since(t))};
}

Outcome interaction_algebra() {
    const auto V = gaussian_well(5.0);
    const auto W = find_ground_state(V);
    const auto pair = make_pair(W, V, W, V, v05);
    const auto terms = build_terms(pair);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double a = u(rng), b = u(rng), h = u(rng);
        worst = std::max(worst, residual_identity(terms, a, b, h) /
                                    std::pow(std::abs(a) + std::abs(b) + std::abs(h), 5));
    }
    const auto c = coefficient_table(terms);
    const bool table = c.h0 == std::array<double, 4>{5, 10, 10, 5} && c.h1 == std::array<double, 3>{20, 30, 20} &&
                       c.h2 == std::array<double, 4>{10, 30, 30, 10} && c.h3 == std::array<double, 3>{10, 20, 10} &&
                       c.h4 == std::array<double, 2>{5, 5};
    TermOptions strict;
    strict.printed_m2_coefficient = true;
    const double violated = residual_identity(build_terms(pair, strict), 1.0, 1.0, 1.0);
    return {worst < 1e-12 && table && violated > 1.0,
            fmt("max relative residual %.2e, table %s, strict-mode residual at (1,1,1) %.1f", worst,
                table ? "ok" : "wrong", violated)};
}

double metric_defect(const Mat4& L) {
    const double eta[4] = {-1, 1, 1, 1};
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            double s = 0.0;
            for (int m = 0; m < 4; ++m) s += L[m][a] * eta[m] * L[m][b];
            worst = std::max(worst, std::abs(s - (a == b ? eta[a] : 0.0)));
        }
    return worst;
}

Outcome lorentz_kinematics() {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Velocity v;
        do v = {u(rng), u(rng), u(rng)};
        while (speed(v) >= 0.95 || speed(v) < 1e-3);
        worst = std::max(worst, metric_defect(make_frame(v).transform));
    }
    const double g = lorentz_gamma({0.6, 0.0, 0.0});

    const auto ground = find_ground_state(gaussian_well(5.0));
    const auto f = make_frame(v05);
    const BoostedProfile p(ground, f);
    const Grid lab = Grid::axisymmetric(-12.0, 16.0, 6.0, 0.1);
    const auto field = sample_field(
        lab, -8.0, 0.05, 321, [&](const Point3& x, double t) { return p(x, t); },
        [&](const Point3& x, double t) { return p.time_derivative(x, t); });
    const SliceSpec target{Grid::axisymmetric(-3.0, 3.0, 3.0, 0.1), -2.0, 0.5, 9};
    const auto pulled = pullback_field(field, f, target);
    double amp = 0.0, drift = 0.0;
    for (std::size_t id = 0; id < target.grid.size(); ++id)
        for (std::size_t k = 0; k < pulled.n_times(); ++k) {
            amp = std::max(amp, std::abs(pulled.u(k)[id]));
            drift = std::max(drift, std::abs(pulled.u(k)[id] - pulled.u(0)[id]));
        }
    return {worst < 1e-12 && g == 1.25 && drift / amp < 1e-4,
            fmt("metric defect %.2e, gamma(0.6) = %.17g, pullback t' drift %.2e", worst, g, drift / amp)};
}

Outcome elliptic_suite() {
    const auto g = find_ground_state(gaussian_well(20.0));
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < g.r.size(); ++i)
        if (g.r[i] >= 50.0 && g.r[i] <= 100.0) {
            lo = std::min(lo, g.r[i] * g.u[i]);
            hi = std::max(hi, g.r[i] * g.u[i]);
        }
    const double plateau = (hi - lo) / hi;
    bool dichotomy = true;
    for (double depth : {1.0, 2.0, 3.0, 5.0, 20.0}) {
        const auto V = gaussian_well(depth);
        const auto free = linearization_spectrum(StaticState{}, V);
        dichotomy = dichotomy && find_ground_state(V).is_zero() == (free.per_sector[0] == 0);
    }
    EllipticConfig fine;
    fine.n = 40000;
    const double c2 = find_ground_state(gaussian_well(20.0), fine).far_field_c;
    const double halving = std::abs(c2 - g.far_field_c) / g.far_field_c;
    return {plateau < 0.01 && dichotomy && halving < 0.01,
            fmt("plateau spread %.2e, dichotomy %s, grid halving change in c %.2e", plateau,
                dichotomy ? "matches" : "mismatch", halving)};
}

double dalembert_error(double h) {
    const double T = 5.0;
    const Grid g = Grid::axisymmetric(-15.0, 15.0, 2.0 * h, h);
    SolverConfig c;
    c.grid = g;
    c.sponge_strength = 0.0;
    c.boundary = Boundary::neumann;
    c.store = false;
    c.T = T;
    WaveState s = WaveState::zero(g);
    auto gauss = [](double x) { return std::exp(-x * x); };
    s.u = g.sample([&](const Point3& x) { return gauss(x[0]); });
    const auto r = evolve_linear(s, {}, {}, c);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n(0); ++i) {
        const double x = g.coord(0, i);
        err = std::max(err, std::abs(r.final_state.u[g.index(i, 0)] - 0.5 * (gauss(x - T) + gauss(x + T))));
    }
    return err;
}

Outcome solver_order() {
    const double e1 = dalembert_error(0.2), e2 = dalembert_error(0.1), e3 = dalembert_error(0.05);
    const double r1 = e1 / e2, r2 = e2 / e3;
    const Grid g = Grid::axisymmetric(-20, 20, 20, 0.2);
    SolverConfig c;
    c.grid = g;
    c.sponge_strength = 0.0;
    c.T = 10.0;
    WaveState s = WaveState::zero(g);
    s.u = g.sample([](const Point3& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
    const auto r = evolve_linear(s, {}, {}, c);
    double drift = 0.0;
    for (double e : r.energy) drift = std::max(drift, std::abs(e / r.energy.front() - 1.0));
    return {std::abs(r1 - 4.0) <= 0.5 && std::abs(r2 - 4.0) <= 0.5 && drift < 1e-3,
            fmt("error ratios %.3f %.3f, energy drift %.2e", r1, r2, drift)};
}

Outcome mode_shooting() {
    // closed-form toy: lambda = 1, N = e^{-2t}
    std::vector<double> t, N;
    for (int i = 0; i <= 3000; ++i) {
        t.push_back(0.01 * i);
        N.push_back(std::exp(-2.0 * t.back()));
    }
    const double toy = stable_initial_velocity(0.0, t, N, 1.0).adot;

    const auto start = Clock::now();
    const auto V = gaussian_well(5.0);
    const auto Z = zero_static_state();
    const auto w = bound_state(linearized_potential(Z, V));
    const auto pair = make_pair(Z, V, Z, V, v05);
    const auto terms = build_terms(pair);
    SolverConfig c;
    c.grid = Grid::axisymmetric(-20.0, 35.0, 20.0, 0.25);
    c.t0 = 10.0;
    c.T = 30.0;
    const std::vector<ModeSpec> sm{{w, 0.01}}, mm{{w, 0.01}};
    ShootOptions o;
    o.velocity_tol = 1e-6;
    const auto r = shooting_iteration(terms, sm, mm, WaveState::zero(c.grid, c.t0), c, o);
    const double sa = r.a_tracks[0].growth_rate, sb = r.b_tracks[0].growth_rate;
    const auto d = mode_data(WaveState::zero(c.grid, c.t0), sm, {0.0}, mm, {0.0}, pair.w[1].frame);
    const auto run = duhamel_iterate(nullptr, terms, d, c);
    const double ca = project_static(run.field, w).growth_rate;
    const double cb = project_comoving(run.field, w, pair.w[1].frame).growth_rate;
    const double lam = w.lambda;
    const bool ok = std::abs(toy + 1.0 / 3.0) < 1e-4 && r.trace.converged && sa < 0.1 * lam && sb < 0.1 * lam &&
                    ca > 0.8 * lam && cb > 0.8 * lam;
    return {ok, fmt("toy adot(0) %.8f; lambda %.4f; shot rates a %.3f b %.3f (%zu iterates); control a %.3f b %.3f; "
                    "%.0f s",
                    toy, lam, sa, sb, r.trace.iterations, ca, cb, seconds_since(start))};
}

InteractionTerms shallow_terms() {
    const auto V = gaussian_well(3.0);
    const auto W = find_ground_state(V);
    return build_terms(make_pair(W, V, W, V, v05));
}

SolverConfig shallow_config(double t0, double window, double margin = 12.0) {
    SolverConfig c;
    c.t0 = t0;
    c.T = t0 + window;
    c.grid = Grid::axisymmetric(-margin, 0.5 * c.T + margin, margin, 0.4);
    c.sponge_width = 4.0;
    c.sample_stride = 2;
    return c;
}

bool nonincreasing(const std::vector<double>& x, std::size_t from = 0) {
    for (std::size_t k = from + 1; k < x.size(); ++k)
        if (x[k] > x[k - 1]) return false;
    return true;
}

Outcome contraction() {
    const auto terms = shallow_terms();
    IterationOptions o;
    o.max_iters = 30;
    std::vector<double> etas;
    bool ratios_ok = true;
    std::string ratios;
    for (double t0 : {10.0, 20.0, 40.0}) {
        const auto c = shallow_config(t0, 12.0);
        const auto tr = iterate_to_fixed_point(terms, WaveState::zero(c.grid, t0), c, o);
        etas.push_back(tr.eta);
        if (t0 == 40.0) {
            ratios_ok = tr.converged && !tr.ratios.empty() && nonincreasing(tr.ratios) && tr.ratios.back() <= 0.9;
            ratios = fmt("t0 = 40: %zu ratios %.3f .. %.3f", tr.ratios.size(), tr.ratios.front(), tr.ratios.back());
        }
    }
    const bool eta_ok = etas[0] > etas[1] && etas[1] > etas[2];
    return {ratios_ok && eta_ok, ratios + fmt(", eta(10, 20, 40) = %.3f %.3f %.3f", etas[0], etas[1], etas[2])};
}

Outcome scattering() {
    const auto terms = shallow_terms();
    const double t0 = 20.0, window = 30.0;
    const auto c = shallow_config(t0, window, 12.0 + 0.5 * window);
    WaveState d = WaveState::zero(c.grid, t0);
    const double xc = 0.5 * 0.5 * t0;
    d.u = c.grid.sample([&](const Point3& x) {
        return 0.05 * std::exp(-((x[0] - xc) * (x[0] - xc) + x[1] * x[1]) / 2.25);
    });
    IterationOptions o;
    o.max_iters = 30;
    const auto tr = iterate_to_fixed_point(terms, d, c, o);
    const auto s = scattering_profile(tr.final_field, c);
    const std::size_t half = s.times.size() / 2;
    const double peak = *std::max_element(s.deficit.begin() + static_cast<std::ptrdiff_t>(half), s.deficit.end());
    std::size_t rises = 0;
    double rise = 0.0;
    for (std::size_t k = half + 1; k < s.deficit.size(); ++k)
        if (s.deficit[k] > s.deficit[k - 1]) {
            ++rises;
            rise = std::max(rise, s.deficit[k] - s.deficit[k - 1]);
        }
    const bool ok = tr.converged && rises == 0 && s.deficit.back() < 0.1 * s.initial_norm;
    return {ok, fmt("converged in %zu, final deficit %.2e of initial %.4f, final-half peak %.3f of initial, "
                    "%zu rises (largest %.1e)",
                    tr.iterations, s.deficit.back(), s.initial_norm, peak / s.initial_norm, rises, rise)};
}

double energy_constant(double h) {
    const double L = 16.0;
    double worst = 1.0;
    for (double v : {0.3, 0.5, 0.8}) {
        SolverConfig c;
        c.grid = Grid::axisymmetric(-L, L, L, h);
        c.sponge_width = 2.0;
        c.t0 = -v * L - 0.5;
        c.T = v * L + 0.5;
        c.sample_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 / (c.cfl * h))));
        WaveState d = WaveState::zero(c.grid, c.t0);
        d.u = c.grid.sample([](const Point3& x) {
            const double r2 = x[0] * x[0] + x[1] * x[1];
            return r2 < 1.0 ? std::pow(1.0 - r2, 3) : 0.0;
        });
        const auto run = evolve_linear(d, {}, {}, c);
        worst = std::max(worst, slab_energy_compare(run.field, SpacetimeField(), {v, 0, 0}).measured_c);
    }
    return worst;
}

Outcome energy_comparison() {
    const double coarse = energy_constant(0.1), fine = energy_constant(0.05);
    const double change = std::abs(coarse - fine) / fine;
    return {change < 0.2 && std::isfinite(fine), fmt("C = %.4f (h = 0.1), %.4f (h = 0.05), change %.1f%%", coarse, fine,
                                                     100.0 * change)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"interaction exponent", interaction_exponent},       {"backward decay rate", backward_decay},
        {"interaction algebra", interaction_algebra}, {"Lorentz kinematics", lorentz_kinematics},
        {"elliptic suite", elliptic_suite},         {"solver order", solver_order},
        {"mode shooting", mode_shooting},           {"contraction diagnostics", contraction},
        {"scattering deficit", scattering},         {"energy comparison", energy_comparison},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %-24s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

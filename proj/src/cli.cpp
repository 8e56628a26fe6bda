#include "mswl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mswl/error.hpp"
#include "mswl/interaction.hpp"
#include "mswl/modes.hpp"
#include "mswl/oracle.hpp"

namespace mswl {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    fs::path out;
    Provenance prov;
    SubcommandReport report;

    fs::path file(const std::string& name) {
        report.artifacts.push_back(out / name);
        return out / name;
    }
};

EllipticConfig elliptic_config(const ExperimentConfig& c) {
    EllipticConfig e;
    e.rtol = c.tolerances.elliptic;
    e.atol = 1e-2 * c.tolerances.elliptic;
    return e;
}

RadialPotential center_potential(const CenterSpec& s) { return make_potential(s.family, s.depth, s.width); }

StaticState center_state(const CenterSpec& s, const EllipticConfig& e) {
    if (s.state == "zero") return zero_static_state(e);
    return find_ground_state(center_potential(s), e);
}

struct Setup {
    std::array<StaticState, 2> states;
    std::array<RadialPotential, 2> potentials;
    InteractionTerms terms;
};

Setup setup(const ExperimentConfig& c) {
    Setup s;
    const auto e = elliptic_config(c);
    for (std::size_t i = 0; i < 2; ++i) {
        s.potentials[i] = center_potential(c.centers[i]);
        s.states[i] = center_state(c.centers[i], e);
    }
    s.terms = build_terms(make_pair(s.states[0], s.potentials[0], s.states[1], s.potentials[1], c.velocity),
                          c.term_options());
    return s;
}

std::vector<BoundState> modes_of(const StaticState& Q, const RadialPotential& V) {
    try {
        return bound_states(linearized_potential(Q, V));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::no_bound_state) return {};
        throw;
    }
}

IterationTrace run_iteration(const ExperimentConfig& c, const InteractionTerms& terms, const SolverConfig& sc) {
    IterationOptions o;
    o.max_iters = c.max_iters;
    o.tol = c.tolerances.iteration;
    try {
        return iterate_to_fixed_point(terms, WaveState::zero(sc.grid, sc.t0), sc, o);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::no_contraction) throw;
        const std::string what = e.what();
        if (what.rfind("no contraction at this t0", 0) == 0) throw;
        throw Error(ErrorKind::no_contraction, "no contraction at this t0: " + what);
    }
}

void static_solve(Context& x) {
    const auto e = elliptic_config(x.cfg);
    x.report.summary["centers"] = ojson::array();
    for (std::size_t i = 0; i < 2; ++i) {
        const auto V = center_potential(x.cfg.centers[i]);
        const auto s = center_state(x.cfg.centers[i], e);
        const auto spec = linearization_spectrum(s, V, e);
        const fs::path stem = x.out / ("static_" + std::to_string(i));
        write_static_state(stem, s, &spec, x.prov);
        x.report.artifacts.push_back(fs::path(stem).concat(".csv"));
        x.report.artifacts.push_back(fs::path(stem).concat(".json"));
        x.report.summary["centers"].push_back({{"tag", s.tag},
                                               {"zero", s.is_zero()},
                                               {"far_field_c", s.far_field_c},
                                               {"energy", s.energy},
                                               {"stable", spec.is_stable}});
    }
}

void spectrum(Context& x) {
    const auto e = elliptic_config(x.cfg);
    x.report.summary["centers"] = ojson::array();
    for (std::size_t i = 0; i < 2; ++i) {
        const auto V = center_potential(x.cfg.centers[i]);
        const auto s = center_state(x.cfg.centers[i], e);
        const auto spec = linearization_spectrum(s, V, e);
        ojson j;
        j["tag"] = s.tag;
        j["negative_eigenvalues"] = spec.negative_eigenvalues;
        j["per_sector"] = spec.per_sector;
        j["zero_resonance_indicator"] = spec.zero_resonance_indicator;
        j["stable"] = spec.is_stable;
        j["s_wave_modes"] = ojson::array();
        for (const auto& b : modes_of(s, V)) j["s_wave_modes"].push_back(bound_state_json(b));
        write_json(x.file("spectrum_" + std::to_string(i) + ".json"), j, x.prov);
        x.report.summary["centers"].push_back(
            {{"negative", spec.negative_eigenvalues.size()}, {"stable", spec.is_stable}});
    }
}

void boost(Context& x) {
    const auto frame = make_frame(x.cfg.velocity);
    std::mt19937_64 rng(x.cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::array<double, 4> eta{-1.0, 1.0, 1.0, 1.0};
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        Velocity v;
        do {
            v = {u(rng), u(rng), u(rng)};
        } while (speed(v) >= 0.99 || speed(v) == 0.0);
        const auto L = make_frame(v).transform;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                double s = 0.0;
                for (int m = 0; m < 4; ++m) s += L[m][a] * eta[m] * L[m][b];
                worst = std::max(worst, std::abs(s - (a == b ? eta[a] : 0.0)));
            }
    }
    ojson j = frame_json(frame);
    j["metric_samples"] = 100;
    j["metric_residual"] = worst;
    write_json(x.file("boost.json"), j, x.prov);

    const auto su = setup(x.cfg);
    const auto& pair = su.terms.pair();
    std::vector<std::vector<double>> rows;
    const auto g = x.cfg.solver_config().grid;
    for (std::size_t i = 0; i < g.n(0); ++i) {
        const Point3 p = frame.unrotate({g.coord(0, i), 0.0, 0.0});
        rows.push_back({g.coord(0, i), pair.W1(p, x.cfg.t0), pair.W2(p, x.cfg.t0), pair.V1(p, x.cfg.t0),
                        pair.V2(p, x.cfg.t0)});
    }
    write_csv(x.file("boost.csv"), {"x1", "W1", "W2", "V1", "V2"}, rows, x.prov);
    x.report.summary = {{"gamma", frame.gamma}, {"metric_residual", worst}};
}

void evolve(Context& x) {
    const auto sc = x.cfg.solver_config();
    sc.validate();
    const auto su = setup(x.cfg);
    const auto run = evolve_linear(WaveState::zero(sc.grid, sc.t0), linearized_potentials(su.terms.pair()),
                                   nonlinear_source(su.terms, sc.grid), sc);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < run.times.size(); ++k)
        rows.push_back({run.times[k], run.energy[k], run.norm[k], run.absorbed[k]});
    write_csv(x.file("evolve.csv"), {"t", "energy", "norm", "absorbed"}, rows, x.prov);
    write_snapshot(x.file("evolve_final.bin"), run.final_state);
    x.report.summary = {{"steps", run.steps}, {"final_norm", run.norm.back()}};
}

void iterate(Context& x) {
    const auto sc = x.cfg.solver_config();
    sc.validate();
    const auto su = setup(x.cfg);
    const auto tr = run_iteration(x.cfg, su.terms, sc);
    write_json(x.file("iteration.json"), iteration_json(tr), x.prov);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < tr.differences.size(); ++k)
        rows.push_back({static_cast<double>(k + 1), tr.differences[k], k < tr.ratios.size() ? tr.ratios[k] : 0.0});
    write_csv(x.file("iteration.csv"), {"iterate", "difference", "ratio"}, rows, x.prov);
    x.report.summary = {{"converged", tr.converged}, {"iterations", tr.iterations}, {"eta", tr.eta}};
}

void shoot(Context& x) {
    const auto sc = x.cfg.solver_config();
    sc.validate();
    const auto su = setup(x.cfg);
    std::vector<ModeSpec> sm, mm;
    for (const auto& b : modes_of(su.states[0], su.potentials[0])) sm.push_back({b, x.cfg.mode_amplitude});
    for (const auto& b : modes_of(su.states[1], su.potentials[1])) mm.push_back({b, x.cfg.mode_amplitude});
    if (sm.empty() && mm.empty())
        throw Error(ErrorKind::unresolved, "shoot needs bound states: neither linearized operator has one");
    ShootOptions o;
    o.max_iters = std::max<std::size_t>(x.cfg.max_iters, 2);
    o.tol = x.cfg.tolerances.iteration;
    o.velocity_tol = x.cfg.tolerances.velocity;
    const auto r = shooting_iteration(su.terms, sm, mm, WaveState::zero(sc.grid, sc.t0), sc, o);
    write_json(x.file("shoot.json"), shoot_json(r), x.prov);
    for (std::size_t k = 0; k < r.a_tracks.size(); ++k)
        write_mode_track_csv(x.file("mode_a" + std::to_string(k) + ".csv"), r.a_tracks[k], x.prov);
    for (std::size_t k = 0; k < r.b_tracks.size(); ++k)
        write_mode_track_csv(x.file("mode_b" + std::to_string(k) + ".csv"), r.b_tracks[k], x.prov);
    x.report.summary = {{"converged", r.trace.converged}, {"iterations", r.trace.iterations}};
}

void remark_check(Context& x) {
    const auto& p = x.cfg.remark;
    const auto fit = interaction_decay_fit(x.cfg.velocity, x.cfg.epsilon, p.t_lo, p.t_hi, p.samples);
    const auto parts = region_decay_fits(x.cfg.velocity, x.cfg.epsilon, p.eta, p.t_lo, p.t_hi, p.samples);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < fit.times.size(); ++k) rows.push_back({fit.times[k], fit.values[k]});
    write_csv(x.file("remark.csv"), {"t", "I"}, rows, x.prov);
    ojson j;
    j["total"] = decay_fit_json(fit);
    j["near_origin"] = decay_fit_json(parts[0]);
    j["near_mover"] = decay_fit_json(parts[1]);
    j["far"] = decay_fit_json(parts[2]);
    write_json(x.file("remark_fit.json"), j, x.prov);
    x.report.summary = {{"slope", fit.slope},
                        {"half_width", fit.half_width},
                        {"region_slopes", {parts[0].slope, parts[1].slope, parts[2].slope}}};
}

DecayFit windowed_fit(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
    std::vector<double> tt, yy;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= lo && t[k] <= hi && y[k] > 0.0) {
            tt.push_back(t[k]);
            yy.push_back(y[k]);
        }
    if (tt.size() < 3) throw Error(ErrorKind::config, "decay fit window holds fewer than three samples");
    return loglog_fit(tt, yy);
}

void decay_fit(Context& x) {
    auto sc = x.cfg.solver_config();
    sc.t0 = x.cfg.decay.t1;
    sc.T = x.cfg.decay.T;
    sc.validate();
    const auto& d = x.cfg.decay;
    if (d.fit_lo < d.t1 || d.fit_hi > d.T) throw Error(ErrorKind::config, "decay fit window outside [t1, T]");
    const auto su = setup(x.cfg);
    const auto b = backward_solve(su.terms, d.T, d.t1, sc);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < b.times.size(); ++k) rows.push_back({b.times[k], b.domain_norm[k], b.full_norm[k]});
    write_csv(x.file("decay.csv"), {"t", "domain_norm", "full_norm"}, rows, x.prov);
    const auto fd = windowed_fit(b.times, b.domain_norm, d.fit_lo, d.fit_hi);
    const auto ff = windowed_fit(b.times, b.full_norm, d.fit_lo, d.fit_hi);
    write_json(x.file("decay_fit.json"), {{"domain", decay_fit_json(fd)}, {"full", decay_fit_json(ff)}}, x.prov);
    x.report.summary = {{"domain_slope", fd.slope}, {"full_slope", ff.slope}};
}

void scatter(Context& x) {
    const auto sc = x.cfg.solver_config();
    sc.validate();
    const auto su = setup(x.cfg);
    const auto tr = run_iteration(x.cfg, su.terms, sc);
    const auto s = scattering_profile(tr.final_field, sc);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < s.times.size(); ++k) rows.push_back({s.times[k], s.deficit[k]});
    write_csv(x.file("scatter.csv"), {"t", "deficit"}, rows, x.prov);
    const double last = s.deficit.empty() ? 0.0 : s.deficit.back();
    const ojson j{{"iteration", iteration_json(tr)},
                  {"initial_norm", s.initial_norm},
                  {"final_deficit", last},
                  {"relative", s.initial_norm > 0.0 ? last / s.initial_norm : 0.0}};
    write_json(x.file("scatter.json"), j, x.prov);
    x.report.summary = {{"converged", tr.converged}, {"final_deficit", last}};
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"static-solve", "spectrum",     "boost",     "evolve", "iterate",
                                                "shoot",        "remark-check", "decay-fit", "scatter"};
    return names;
}

SubcommandReport run_subcommand(const std::string& name, const ExperimentConfig& cfg, const fs::path& out) {
    const auto& names = subcommand_names();
    if (std::find(names.begin(), names.end(), name) == names.end())
        throw Error(ErrorKind::invalid_argument, "unknown subcommand '" + name + "'");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + out.string() + ": " + ec.message());
    Context x{cfg, out, Provenance{config_hash(cfg)}, {}};
    x.report.name = name;
    if (name == "static-solve") static_solve(x);
    else if (name == "spectrum") spectrum(x);
    else if (name == "boost") boost(x);
    else if (name == "evolve") evolve(x);
    else if (name == "iterate") iterate(x);
    else if (name == "shoot") shoot(x);
    else if (name == "remark-check") remark_check(x);
    else if (name == "decay-fit") decay_fit(x);
    else scatter(x);
    return x.report;
}

}  // namespace mswl

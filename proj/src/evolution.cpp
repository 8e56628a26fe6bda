#include "mswl/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "mswl/error.hpp"

namespace mswl {

double SolverConfig::dt() const {
    if (fixed_dt > 0.0) return fixed_dt;
    double h = grid.spacing(0);
    const int dims = grid.layout() == Layout::axisymmetric ? 2 : 3;
    for (int d = 1; d < dims; ++d) h = std::min(h, grid.spacing(d));
    return cfl * h;
}

void SolverConfig::validate() const {
    double h = grid.spacing(0);
    const int dims = grid.layout() == Layout::axisymmetric ? 2 : 3;
    for (int d = 1; d < dims; ++d) h = std::min(h, grid.spacing(d));
    const double c = dt() / h;
    if (!(c > 0.0) || c > 0.5)
        throw Error(ErrorKind::cfl_violation, "CFL violation: dt / h = " + std::to_string(c) + " exceeds 0.5");
    if (sponge_strength < 0.0) throw Error(ErrorKind::config, "sponge strength must be nonnegative");
    if (sponge_strength > 0.0 && sponge_width < 10.0 * h)
        throw Error(ErrorKind::config, "sponge layer must be at least 10 cells wide");
    if (sample_stride == 0) throw Error(ErrorKind::config, "sample stride must be positive");
}

double ChargeTransferPotential::operator()(const Point3& x, double t) const {
    double v = 0.0;
    if (fixed) v += (*fixed)(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    if (moving) {
        const Point3 y = frame.rotate(x);
        const double z0 = frame.gamma * (y[0] - frame.speed() * t);
        v += (*moving)(std::sqrt(z0 * z0 + y[1] * y[1] + y[2] * y[2]));
    }
    return v;
}

namespace {

RadialTable combined(const RadialTable& V, const RadialTable& W, int power, double coeff, double extent) {
    return RadialTable::sample([&](double r) { return V(r) + coeff * std::pow(W(r), power); }, 0.01, extent, 0.0);
}

}  // namespace

ChargeTransferPotential linearized_potentials(const SolitonPair& pair) {
    ChargeTransferPotential p;
    const double e0 = std::max(pair.v[0].r_max(), pair.w[0].value.r_max());
    const double e1 = std::max(pair.v[1].r_max(), pair.w[1].value.r_max());
    p.fixed = combined(pair.v[0], pair.w[0].value, 4, 5.0, e0);
    p.moving = combined(pair.v[1], pair.w[1].value, 4, 5.0, e1);
    p.frame = pair.w[1].frame;
    return p;
}

ChargeTransferPotential traveler_potential(const RadialPotential& V, const Velocity& v) {
    ChargeTransferPotential p;
    p.moving = tabulate_potential(V);
    p.frame = make_frame(v);
    return p;
}

StepSource quintic_source() {
    return [](double, std::span<const double> u, std::span<double> out) {
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double a = u[i] * u[i];
            out[i] = -a * a * u[i];
        }
    };
}

namespace {

std::vector<double> sponge_profile(const SolverConfig& cfg) {
    const Grid& g = cfg.grid;
    std::vector<double> s(g.size(), 0.0);
    if (cfg.sponge_strength <= 0.0) return s;
    const int dims = g.layout() == Layout::axisymmetric ? 2 : 3;
    const double w = cfg.sponge_width;
    for (std::size_t id = 0; id < g.size(); ++id) {
        const auto ijk = g.unravel(id);
        double d = INFINITY;
        for (int k = 0; k < dims; ++k) {
            const double x = g.coord(k, ijk[k]);
            d = std::min(d, g.hi(k) - x);
            if (!(dims == 2 && k == 1)) d = std::min(d, x - g.coord(k, 0));
        }
        if (d < w) {
            const double q = (w - d) / w;
            s[id] = cfg.sponge_strength * q * q;
        }
    }
    return s;
}

double gradient_energy(const Grid& g, std::span<const double> u, Boundary b) { return g.gradient_energy(u, b); }

}  // namespace

RunResult evolve_linear(const WaveState& data, const ChargeTransferPotential& potential, const StepSource& source,
                        const SolverConfig& cfg, const SampleObserver& observer) {
    cfg.validate();
    const Grid& g = cfg.grid;
    if (data.u.size() != g.size() || data.ut.size() != g.size())
        throw Error(ErrorKind::invalid_argument, "initial data does not match the solver grid");
    const std::size_t n = g.size();
    const double span = cfg.T - data.t;
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const std::size_t stride = cfg.sample_stride;
    const double nominal = cfg.dt();
    std::size_t blocks = static_cast<std::size_t>(std::ceil(std::abs(span) / (nominal * static_cast<double>(stride)) - 1e-9));
    const std::size_t N = blocks * stride;
    const double D = N > 0 ? std::abs(span) / static_cast<double>(N) : nominal;

    std::vector<double> vol(n), pts_fixed(n, 0.0), sigma = sponge_profile(cfg);
    std::vector<Point3> pts(n);
    for (std::size_t id = 0; id < n; ++id) {
        vol[id] = g.volume(id);
        pts[id] = g.point(id);
        if (potential.fixed) {
            const Point3& x = pts[id];
            pts_fixed[id] = (*potential.fixed)(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        }
    }
    std::vector<double> pot(n), src(n, 0.0), lap(n);
    auto fill_potential = [&](double t) {
        if (!potential.moving) {
            std::copy(pts_fixed.begin(), pts_fixed.end(), pot.begin());
            return;
        }
        const LorentzFrame& f = potential.frame;
        const double s = f.speed();
#pragma omp parallel for schedule(static)
        for (std::size_t id = 0; id < n; ++id) {
            const Point3 y = f.rotate(pts[id]);
            const double z0 = f.gamma * (y[0] - s * t);
            pot[id] = pts_fixed[id] + (*potential.moving)(std::sqrt(z0 * z0 + y[1] * y[1] + y[2] * y[2]));
        }
    };
    auto forcing = [&](double t, const std::vector<double>& w) {
        fill_potential(t);
        if (source) source(t, w, src);
        g.laplacian(w, lap, cfg.boundary);
    };

    RunResult res;
    if (cfg.store) res.field = SpacetimeField(g, data.t, dir * D * static_cast<double>(stride));
    std::vector<std::pair<std::vector<double>, std::vector<double>>> backward_store;

    std::vector<double> prev = data.u, cur = data.u, next(n), vel(n);
    double absorbed = 0.0;
    auto record = [&](std::size_t step, const std::vector<double>& w, const std::vector<double>& wt,
                      const std::vector<double>& w_next) {
        const double t = data.t + dir * D * static_cast<double>(step);
        std::vector<double> ut(n);
        for (std::size_t id = 0; id < n; ++id) ut[id] = dir * wt[id];
        double e = 0.0, kin = 0.0;
        for (std::size_t id = 0; id < n; ++id) {
            const double d = (w_next[id] - w[id]) / D;
            e += vol[id] * (d * d - w_next[id] * lap[id]);
            kin += vol[id] * ut[id] * ut[id];
        }
        res.times.push_back(t);
        res.energy.push_back(e);
        res.norm.push_back(std::sqrt(gradient_energy(g, w, cfg.boundary) + kin));
        res.absorbed.push_back(absorbed);
        if (observer) observer(t, w, ut);
        if (cfg.store) {
            if (dir > 0.0)
                res.field.push(t, w, ut);
            else
                backward_store.emplace_back(w, ut);
        }
        if (step == N) res.final_state = WaveState{g, w, ut, t};
    };
    auto check = [&](const std::vector<double>& w, double t) {
        double s = 0.0;
        for (double x : w) s += std::abs(x);
        if (!std::isfinite(s))
            throw Error(ErrorKind::non_finite, "non-finite solution at t = " + std::to_string(t));
    };

    // First step from the Taylor expansion in the integration direction.
    forcing(data.t, cur);
    for (std::size_t id = 0; id < n; ++id) vel[id] = dir * data.ut[id];
#pragma omp parallel for schedule(static)
    for (std::size_t id = 0; id < n; ++id) {
        const double acc = lap[id] - pot[id] * cur[id] + src[id] - sigma[id] * vel[id];
        next[id] = cur[id] + D * vel[id] + 0.5 * D * D * acc;
    }
    check(next, data.t + dir * D);
    absorbed += D * 2.0 * [&] {
        double a = 0.0;
        for (std::size_t id = 0; id < n; ++id) a += vol[id] * sigma[id] * vel[id] * vel[id];
        return a;
    }();
    record(0, cur, vel, next);

    for (std::size_t step = 1; step <= N; ++step) {
        prev.swap(cur);
        cur.swap(next);
        const double t = data.t + dir * D * static_cast<double>(step);
        forcing(t, cur);
        double diss = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : diss)
        for (std::size_t id = 0; id < n; ++id) {
            const double sd = 0.5 * sigma[id] * D;
            next[id] = (2.0 * cur[id] - (1.0 - sd) * prev[id] + D * D * (lap[id] - pot[id] * cur[id] + src[id])) /
                       (1.0 + sd);
            const double wt = (next[id] - prev[id]) / (2.0 * D);
            vel[id] = wt;
            diss += vol[id] * sigma[id] * wt * wt;
        }
        check(next, t + dir * D);
        absorbed += 2.0 * D * diss;
        if (step % stride == 0) record(step, cur, vel, next);
    }
    res.steps = N;

    if (cfg.store && dir < 0.0) {
        // Reverse into ascending time.
        const double dts = D * static_cast<double>(stride);
        res.field = SpacetimeField(g, res.times.back(), dts);
        for (std::size_t k = backward_store.size(); k-- > 0;)
            res.field.push(res.times.back() + dts * static_cast<double>(backward_store.size() - 1 - k),
                           backward_store[k].first, backward_store[k].second);
    }
    return res;
}

void time_slice(const SpacetimeField& f, double t, std::span<double> out) {
    const std::size_t nt = f.n_times(), n = f.grid().size();
    if (nt == 0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    if (nt == 1) {
        const auto u = f.u(0);
        std::copy(u.begin(), u.end(), out.begin());
        return;
    }
    const double q = std::clamp((t - f.t0()) / f.dt(), 0.0, static_cast<double>(nt - 1));
    if (nt < 4) {
        const auto k = static_cast<std::size_t>(std::min(std::floor(q), static_cast<double>(nt - 2)));
        const double s = q - static_cast<double>(k);
        const auto a = f.u(k), b = f.u(k + 1);
        for (std::size_t id = 0; id < n; ++id) out[id] = (1.0 - s) * a[id] + s * b[id];
        return;
    }
    long k0 = static_cast<long>(std::floor(q)) - 1;
    k0 = std::clamp(k0, 0L, static_cast<long>(nt) - 4);
    const auto w = cubic_weights(q - static_cast<double>(k0 + 1));
    const auto a = f.u(k0), b = f.u(k0 + 1), c = f.u(k0 + 2), d = f.u(k0 + 3);
#pragma omp parallel for schedule(static)
    for (std::size_t id = 0; id < n; ++id) out[id] = w[0] * a[id] + w[1] * b[id] + w[2] * c[id] + w[3] * d[id];
}

namespace {

struct SourceCache {
    std::vector<Point3> pts;
    std::vector<double> w1, v1;
};

std::shared_ptr<SourceCache> make_cache(const InteractionTerms& terms, const Grid& grid) {
    auto c = std::make_shared<SourceCache>();
    const auto& p = terms.pair();
    c->pts.resize(grid.size());
    c->w1.resize(grid.size());
    c->v1.resize(grid.size());
    for (std::size_t id = 0; id < grid.size(); ++id) {
        c->pts[id] = grid.point(id);
        const Point3 z = p.w[0].comoving_point(c->pts[id], 0.0);
        const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
        c->w1[id] = p.w[0].value(r);
        c->v1[id] = p.v[0](r);
    }
    return c;
}

void eval_source(const InteractionTerms& terms, const SourceCache& c, double t, std::span<const double> h,
                 std::span<double> out) {
    const auto& p = terms.pair();
    const std::size_t n = c.pts.size();
#pragma omp parallel for schedule(static)
    for (std::size_t id = 0; id < n; ++id) {
        const Point3 z = p.w[1].comoving_point(c.pts[id], t);
        const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
        const LocalValues l{c.w1[id], p.w[1].value(r), c.v1[id], p.v[1](r)};
        out[id] = terms.source(l, h.empty() ? 0.0 : h[id]);
    }
}

}  // namespace

StepSource iteration_source(const InteractionTerms& terms, const Grid& grid, const SpacetimeField* h_prev) {
    auto cache = make_cache(terms, grid);
    auto buf = std::make_shared<std::vector<double>>(grid.size(), 0.0);
    return [&terms, cache, buf, h_prev](double t, std::span<const double>, std::span<double> out) {
        if (h_prev && !h_prev->empty()) {
            time_slice(*h_prev, t, *buf);
            eval_source(terms, *cache, t, *buf, out);
        } else {
            eval_source(terms, *cache, t, {}, out);
        }
    };
}

StepSource nonlinear_source(const InteractionTerms& terms, const Grid& grid) {
    auto cache = make_cache(terms, grid);
    return [&terms, cache](double t, std::span<const double> u, std::span<double> out) {
        eval_source(terms, *cache, t, u, out);
    };
}

RunResult duhamel_iterate(const SpacetimeField* h_prev, const InteractionTerms& terms, const WaveState& data,
                          const SolverConfig& cfg) {
    const auto pot = linearized_potentials(terms.pair());
    return evolve_linear(data, pot, iteration_source(terms, cfg.grid, h_prev), cfg);
}

BackwardResult backward_solve(const InteractionTerms& terms, double T, double t1, const SolverConfig& cfg) {
    if (!(T > t1)) throw Error(ErrorKind::invalid_argument, "backward solve needs T > t1");
    SolverConfig c = cfg;
    c.T = t1;
    const auto pot = linearized_potentials(terms.pair());
    BackwardResult out;
    out.run = evolve_linear(WaveState::zero(c.grid, T), pot, nonlinear_source(terms, c.grid), c);
    const std::size_t m = out.run.times.size();
    for (std::size_t k = m; k-- > 0;) {
        out.times.push_back(out.run.times[k]);
        out.domain_norm.push_back(out.run.norm[k]);
        out.full_norm.push_back(std::sqrt(out.run.norm[k] * out.run.norm[k] + out.run.absorbed[k]));
    }
    return out;
}

double eta_norm(const InteractionTerms& terms, double t0, double t_end, double dt, double h, double extent) {
    if (!(t_end > t0) || !(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "bad eta window");
    const LorentzFrame& f = terms.pair().w[1].frame;
    const double s = f.speed();
    auto A = [&](double t) {
        // Split space at the plane halfway between the centers.
        const double mid = 0.5 * s * t;
        const double lo = -extent, hi = s > 0.0 ? std::min(mid, extent) : extent;
        double total = 0.0;
        for (int side = 0; side < (s > 0.0 ? 2 : 1); ++side) {
            const double a = side == 0 ? lo : std::max(mid, s * t - extent);
            const double b = side == 0 ? hi : s * t + extent;
            const Grid g = Grid::axisymmetric(a, b, extent, h);
            for (std::size_t id = 0; id < g.size(); ++id) {
                const Point3 y = g.point(id);
                const double w = std::abs(terms.a(f.unrotate(y), t));
                total += g.volume(id) * std::pow(w, 2.5);
            }
        }
        return std::pow(total, 0.4);
    };
    std::vector<double> ts, vals;
    const auto m = static_cast<std::size_t>(std::ceil((t_end - t0) / dt));
    for (std::size_t k = 0; k <= m; ++k) ts.push_back(t0 + (t_end - t0) * static_cast<double>(k) / static_cast<double>(m));
    vals.resize(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) vals[k] = std::pow(A(ts[k]), 1.25);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) integral += 0.5 * (ts[k + 1] - ts[k]) * (vals[k] + vals[k + 1]);
    const std::size_t half = ts.size() / 2;
    if (ts.size() >= 4 && vals.back() > 0.0) {
        const auto fit = loglog_fit({ts.begin() + static_cast<long>(half), ts.end()},
                                    {vals.begin() + static_cast<long>(half), vals.end()});
        if (fit.slope < -1.0) integral += vals.back() * ts.back() / (-fit.slope - 1.0);
    }
    return std::pow(integral, 0.8);
}

namespace {

NormReport norms_of(const SpacetimeField& f, const Velocity& v) {
    NormOptions opt;
    opt.velocity = v;
    NormAccumulator acc(f.grid(), opt);
    for (std::size_t k = 0; k < f.n_times(); ++k) acc.add(f.time(k), f.u(k), f.ut(k));
    return acc.report();
}

}  // namespace

IterationTrace iterate_to_fixed_point(const InteractionTerms& terms, const WaveState& data, const SolverConfig& cfg,
                                      const IterationOptions& opt) {
    IterationTrace tr;
    const Velocity v = terms.pair().w[1].frame.velocity;
    SolverConfig c = cfg;
    c.store = true;
    tr.eta = eta_norm(terms, cfg.t0, std::max(opt.eta_horizon, 2.0) * std::max(cfg.t0, 1.0), 1.0);
    WaveState d = data;
    d.t = cfg.t0;
    SpacetimeField prev;
    double scale = 0.0;
    int growing = 0;
    for (std::size_t i = 0; i < opt.max_iters; ++i) {
        RunResult r;
        try {
            r = duhamel_iterate(i == 0 ? nullptr : &prev, terms, d, c);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::non_finite) throw;
            throw Error(ErrorKind::no_contraction, "no contraction at this t0: iterate " + std::to_string(i) +
                                                       " blew up (eta = " + std::to_string(tr.eta) + ")");
        }
        tr.reports.push_back(norms_of(r.field, v));
        tr.iterations = i + 1;
        if (i == 0) {
            scale = tr.reports.back().s_norm();
            if (scale == 0.0) {
                tr.converged = true;
                tr.final_field = std::move(r.field);
                break;
            }
        } else {
            const double diff = norms_of(r.field.difference(prev), v).s_norm();
            tr.differences.push_back(diff);
            if (tr.differences.size() >= 2) {
                const double prev_diff = tr.differences[tr.differences.size() - 2];
                const double ratio = prev_diff > 0.0 ? diff / prev_diff : 0.0;
                tr.ratios.push_back(ratio);
                growing = ratio > 1.0 ? growing + 1 : 0;
                if (growing >= 3)
                    throw Error(ErrorKind::no_contraction,
                                "no contraction at this t0: ratio " + std::to_string(ratio) +
                                    " above 1 for 3 iterates (eta = " + std::to_string(tr.eta) + ")");
            }
            if (diff <= opt.tol * scale) {
                tr.converged = true;
                prev = std::move(r.field);
                break;
            }
        }
        prev = std::move(r.field);
    }
    if (tr.final_field.empty()) tr.final_field = std::move(prev);
    std::vector<double> t, y;
    for (std::size_t k = 0; k < tr.final_field.n_times(); ++k) {
        const double e = tr.final_field.energy_norm(k);
        if (tr.final_field.time(k) > 0.0 && e > 0.0) {
            t.push_back(tr.final_field.time(k));
            y.push_back(e);
        }
    }
    if (t.size() >= 2 && t.back() > t.front()) tr.decay = loglog_fit(t, y);
    return tr;
}

ScatteringResult scattering_profile(const SpacetimeField& h_run, const SolverConfig& cfg) {
    if (h_run.n_times() < 2) throw Error(ErrorKind::invalid_argument, "scattering profile needs a stored run");
    ScatteringResult out;
    const std::size_t last = h_run.n_times() - 1;
    SolverConfig c = cfg;
    c.grid = h_run.grid();
    c.sponge_strength = 0.0;
    c.store = true;
    c.T = h_run.time(0);
    const double dts = h_run.dt();
    const auto stride = static_cast<std::size_t>(std::max(1.0, std::ceil(dts / cfg.dt() - 1e-9)));
    c.sample_stride = stride;
    c.fixed_dt = dts / static_cast<double>(stride);
    const RunResult free = evolve_linear(h_run.state(last), {}, {}, c);
    out.free_data = free.field.state(0);
    out.initial_norm = h_run.energy_norm(0);
    const Grid& g = h_run.grid();
    for (std::size_t k = 0; k <= last; ++k) {
        const auto a = h_run.u(k), at = h_run.ut(k), b = free.field.u(k), bt = free.field.ut(k);
        std::vector<double> du(g.size()), dut(g.size());
        for (std::size_t id = 0; id < g.size(); ++id) {
            du[id] = a[id] - b[id];
            dut[id] = at[id] - bt[id];
        }
        out.times.push_back(h_run.time(k));
        out.deficit.push_back(std::sqrt(g.gradient_energy(du, cfg.boundary) + g.inner(dut, dut)));
    }
    return out;
}

WeightedEnergyReport weighted_energy_check(const SpacetimeField& run, const SpacetimeField& source, double epsilon,
                                           std::optional<Velocity> v) {
    WeightedEnergyReport r;
    for (std::size_t k = 0; k < run.n_times(); ++k) r.sup_energy = std::max(r.sup_energy, run.energy_norm(k));
    r.data_energy = run.n_times() ? run.energy_norm(0) : 0.0;
    if (!source.empty()) {
        r.weighted = weighted_L2(source, epsilon);
        if (v) r.weighted_moving = weighted_L2(source, epsilon, v);
        const Grid& g = source.grid();
        double acc = 0.0, prev = 0.0;
        for (std::size_t k = 0; k < source.n_times(); ++k) {
            const auto h = source.u(k);
            const double l2 = std::sqrt(g.inner(h, h));
            if (k > 0) acc += 0.5 * std::abs(source.dt()) * (prev + l2);
            r.l1l2_partial.push_back(acc);
            prev = l2;
        }
    }
    const double denom = r.data_energy + r.weighted + r.weighted_moving;
    r.constant = denom > 0.0 ? r.sup_energy / denom : (r.sup_energy > 0.0 ? INFINITY : 0.0);
    return r;
}

nlohmann::ordered_json iteration_json(const IterationTrace& tr) {
    nlohmann::ordered_json j;
    j["iterations"] = tr.iterations;
    j["converged"] = tr.converged;
    j["eta"] = tr.eta;
    j["differences"] = tr.differences;
    j["ratios"] = tr.ratios;
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const auto& r : tr.reports) reps.push_back(norm_report_json(r));
    j["reports"] = reps;
    j["decay_slope"] = tr.decay.slope;
    return j;
}

}  // namespace mswl

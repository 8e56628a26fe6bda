#include "mswl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mswl/error.hpp"

namespace mswl {

std::vector<std::pair<double, double>> strichartz_pairs() { return {{3.0, 18.0}, {4.0, 12.0}, {5.0, 10.0}}; }

double lorentz_quasinorm(std::span<const double> g, std::span<const double> measure, double p) {
    if (!(p > 1.0)) throw Error(ErrorKind::invalid_argument, "Lorentz exponent must exceed 1");
    if (g.size() != measure.size()) throw Error(ErrorKind::invalid_argument, "value/measure size mismatch");
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return std::abs(g[a]) > std::abs(g[b]); });
    double mu = 0.0, prev = 0.0, acc = 0.0;
    for (std::size_t k : order) {
        const double v = std::abs(g[k]);
        if (v == 0.0) break;
        mu += measure[k];
        const double now = std::pow(mu, 1.0 / p);
        acc += (now - prev) * v;
        prev = now;
    }
    return p * acc;
}

double lorentz_quasinorm(const Grid& grid, std::span<const double> g, double p) {
    std::vector<double> vol(grid.size());
    for (std::size_t id = 0; id < grid.size(); ++id) vol[id] = grid.volume(id);
    return lorentz_quasinorm(g, vol, p);
}

double iterated_quasinorm(const Grid& grid, std::span<const double> g) {
    const std::size_t n0 = grid.n(0), slice = grid.n(1) * grid.n(2);
    const double h0 = grid.spacing(0);
    double total = 0.0;
    std::vector<double> vals(slice), area(slice);
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t k = 0; k < slice; ++k) {
            const std::size_t id = i * slice + k;
            vals[k] = g[id];
            area[k] = grid.volume(id) / h0;
        }
        total += h0 * lorentz_quasinorm(vals, area, 2.0);
    }
    return total;
}

double NormReport::s_norm() const {
    return std::max({strichartz_sup, energy, reversed, reversed_moving, D_norm, D_shifted});
}

nlohmann::ordered_json norm_report_json(const NormReport& r) {
    nlohmann::ordered_json j;
    j["window"] = {r.t_lo, r.t_hi};
    nlohmann::ordered_json s;
    for (const auto& [p, v] : r.strichartz) s[std::to_string(p)] = v;
    j["strichartz"] = s;
    j["strichartz_sup"] = r.strichartz_sup;
    j["reversed"] = r.reversed;
    j["reversed_moving"] = r.reversed_moving;
    j["moving_coverage"] = r.moving_coverage;
    j["weighted"] = r.weighted;
    j["I"] = r.I_norm;
    j["D"] = r.D_norm;
    j["D_shifted"] = r.D_shifted;
    j["D1"] = r.D1_norm;
    j["D2"] = r.D2_norm;
    j["L2"] = r.l2;
    j["energy"] = r.energy;
    j["energy_min"] = r.energy_min;
    j["S"] = r.s_norm();
    return j;
}

namespace {

double japanese2(const Point3& x) { return 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

void require_moving_ok(const Grid& g, const Velocity& v) {
    if (g.layout() == Layout::axisymmetric && (v[1] != 0.0 || v[2] != 0.0))
        throw Error(ErrorKind::invalid_argument, "axisymmetric fields need a velocity along e1");
}

double energy_of(const Grid& g, std::span<const double> u, std::span<const double> ut) {
    double e = g.gradient_energy(u);
    for (std::size_t id = 0; id < g.size(); ++id) e += g.volume(id) * ut[id] * ut[id];
    return std::sqrt(e);
}

}  // namespace

std::vector<double> NormAccumulator::NodeTrapz::value(double dt, std::size_t n) const {
    std::vector<double> out(sum.size(), 0.0);
    if (n < 2) return out;
    for (std::size_t id = 0; id < sum.size(); ++id) out[id] = dt * (sum[id] - 0.5 * (first[id] + last[id]));
    return out;
}

NormAccumulator::NormAccumulator(Grid grid, NormOptions opt) : grid_(std::move(grid)), opt_(opt) {
    if (!(opt_.epsilon > 0.0) && !opt_.weight_exponent)
        throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    if (opt_.velocity) require_moving_ok(grid_, *opt_.velocity);
    const std::size_t n = grid_.size();
    weight_.resize(n);
    for (std::size_t id = 0; id < n; ++id) weight_[id] = std::pow(japanese2(grid_.point(id)), -1.5);
    trace2_.resize(n);
    trace1_.resize(n);
    sup_.assign(n, 0.0);
    damped_sup_.assign(n, 0.0);
    if (opt_.velocity) {
        moving2_.resize(n);
        damped_shift_sup_.assign(n, 0.0);
    }
}

void NormAccumulator::add(double t, std::span<const double> u, std::span<const double> ut) {
    const std::size_t n = grid_.size();
    if (u.size() != n || ut.size() != n) throw Error(ErrorKind::invalid_argument, "sample size mismatch");
    const bool initial = times_.empty();
    if (times_.size() >= 2) {
        const double dt = times_[1] - times_[0];
        if (std::abs(t - times_.back() - dt) > 1e-9 * std::max(1.0, std::abs(t)))
            throw Error(ErrorKind::invalid_argument, "norm samples must be uniformly spaced");
    }
    times_.push_back(t);

    const auto pairs = strichartz_pairs();
    std::array<double, 3> lq{0.0, 0.0, 0.0};
    double l2 = 0.0, wsum = 0.0;
    const double s = opt_.weight_exponent ? *opt_.weight_exponent : 0.5 + opt_.epsilon;
    const Velocity c = opt_.weight_moving && opt_.velocity ? *opt_.velocity : Velocity{0.0, 0.0, 0.0};
    for (std::size_t id = 0; id < n; ++id) {
        const double a = std::abs(u[id]);
        const double vol = grid_.volume(id);
        const double a2 = a * a;
        for (int k = 0; k < 3; ++k) lq[k] += vol * std::pow(a, pairs[k].second);
        l2 += vol * a2;
        if (a2 > 0.0) {
            Point3 x = grid_.point(id);
            for (int d = 0; d < 3; ++d) x[d] -= c[d] * t;
            wsum += vol * a2 * std::pow(japanese2(x), s);
        }
        trace2_.add(id, a2, initial);
        trace1_.add(id, a, initial);
        sup_[id] = std::max(sup_[id], a);
        damped_sup_[id] = std::max(damped_sup_[id], weight_[id] * a);
    }
    for (int k = 0; k < 3; ++k) stri_[k].add(std::pow(lq[k], pairs[k].first / pairs[k].second), initial);
    l2_.add(l2, initial);
    weighted_int_.add(wsum, initial);
    weighted_.push_back(wsum);
    energy_.push_back(energy_of(grid_, u, ut));

    if (opt_.velocity) {
        const Velocity& v = *opt_.velocity;
        std::size_t in = 0;
#pragma omp parallel for schedule(static) reduction(+ : in)
        for (std::size_t id = 0; id < n; ++id) {
            Point3 x = grid_.point(id);
            for (int d = 0; d < 3; ++d) x[d] += v[d] * t;
            const Point3 g = grid_.to_grid_coords(x);
            double a = 0.0;
            if (grid_.contains(g)) {
                a = std::abs(grid_.interpolate(u, g));
                ++in;
            }
            moving2_.add(id, a * a, initial);
            damped_shift_sup_[id] = std::max(damped_shift_sup_[id], weight_[id] * a);
        }
        moving_in_ += in;
        moving_total_ += n;
    }
}

NormReport NormAccumulator::report() const {
    if (times_.empty()) throw Error(ErrorKind::invalid_argument, "empty time window");
    NormReport r;
    const std::size_t n = times_.size();
    const double dt = n > 1 ? times_[1] - times_[0] : 0.0;
    r.t_lo = times_.front();
    r.t_hi = times_.back();
    const auto pairs = strichartz_pairs();
    for (int k = 0; k < 3; ++k) {
        const double v = std::pow(stri_[k].value(dt, n), 1.0 / pairs[k].first);
        r.strichartz[static_cast<int>(pairs[k].first)] = v;
        r.strichartz_sup = std::max(r.strichartz_sup, v);
    }
    r.l2 = std::sqrt(l2_.value(dt, n));
    r.weighted = std::sqrt(weighted_int_.value(dt, n));
    r.energy = *std::max_element(energy_.begin(), energy_.end());
    r.energy_min = *std::min_element(energy_.begin(), energy_.end());

    auto trace2 = trace2_.value(dt, n);
    for (double& x : trace2) x = std::sqrt(x);
    r.reversed = trace2.empty() ? 0.0 : *std::max_element(trace2.begin(), trace2.end());
    r.I_norm = std::max({r.weighted, iterated_quasinorm(grid_, trace2), lorentz_quasinorm(grid_, trace2, 1.5)});

    r.D_norm = std::max(iterated_quasinorm(grid_, damped_sup_), lorentz_quasinorm(grid_, damped_sup_, 1.5));
    const auto trace1 = trace1_.value(dt, n);
    r.D1_norm = std::max({iterated_quasinorm(grid_, trace1), lorentz_quasinorm(grid_, trace1, 1.5), r.l2});
    r.D2_norm = std::max({iterated_quasinorm(grid_, sup_), lorentz_quasinorm(grid_, sup_, 1.5), r.l2});

    if (opt_.velocity) {
        auto m = moving2_.value(dt, n);
        double best = 0.0;
        for (double x : m) best = std::max(best, std::sqrt(x));
        r.reversed_moving = best;
        r.moving_coverage = moving_total_ ? static_cast<double>(moving_in_) / static_cast<double>(moving_total_) : 1.0;
        r.D_shifted =
            std::max(iterated_quasinorm(grid_, damped_shift_sup_), lorentz_quasinorm(grid_, damped_shift_sup_, 1.5));
    }
    return r;
}

namespace {

NormReport run(const SpacetimeField& f, NormOptions opt) {
    if (f.empty()) throw Error(ErrorKind::invalid_argument, "empty time window");
    NormAccumulator acc(f.grid(), opt);
    for (std::size_t k = 0; k < f.n_times(); ++k) acc.add(f.time(k), f.u(k), f.ut(k));
    return acc.report();
}

double trapezoid(const std::vector<double>& y, double dt) {
    if (y.size() < 2) return 0.0;
    double s = 0.0;
    for (double v : y) s += v;
    return dt * (s - 0.5 * (y.front() + y.back()));
}

}  // namespace

double mixed_norm(const SpacetimeField& field, double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw Error(ErrorKind::invalid_argument, "mixed norm exponents must be >= 1");
    if (field.empty()) throw Error(ErrorKind::invalid_argument, "empty time window");
    const Grid& g = field.grid();
    std::vector<double> inner(field.n_times());
    for (std::size_t k = 0; k < field.n_times(); ++k) {
        const auto u = field.u(k);
        double s = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) s += g.volume(id) * std::pow(std::abs(u[id]), q);
        inner[k] = std::pow(s, p / q);
    }
    return std::pow(trapezoid(inner, field.dt()), 1.0 / p);
}

ReversedNorm reversed_strichartz(const SpacetimeField& field, std::optional<Velocity> moving_velocity) {
    NormOptions opt;
    opt.velocity = moving_velocity;
    const NormReport r = run(field, opt);
    ReversedNorm out;
    if (moving_velocity) {
        out.value = r.reversed_moving;
        out.coverage = r.moving_coverage;
        out.clipped = r.moving_coverage < 1.0;
    } else {
        out.value = r.reversed;
    }
    return out;
}

double weighted_L2_exponent(const SpacetimeField& field, double s, std::optional<Velocity> center_velocity) {
    if (center_velocity) require_moving_ok(field.grid(), *center_velocity);
    if (field.empty()) throw Error(ErrorKind::invalid_argument, "empty time window");
    const Grid& g = field.grid();
    const Velocity c = center_velocity.value_or(Velocity{0.0, 0.0, 0.0});
    std::vector<double> per(field.n_times());
    for (std::size_t k = 0; k < field.n_times(); ++k) {
        const auto u = field.u(k);
        const double t = field.time(k);
        double acc = 0.0;
        for (std::size_t id = 0; id < g.size(); ++id) {
            if (u[id] == 0.0) continue;
            Point3 x = g.point(id);
            for (int d = 0; d < 3; ++d) x[d] -= c[d] * t;
            acc += g.volume(id) * u[id] * u[id] * (s == 0.0 ? 1.0 : std::pow(japanese2(x), s));
        }
        per[k] = acc;
    }
    return std::sqrt(trapezoid(per, field.dt()));
}

double weighted_L2(const SpacetimeField& field, double epsilon, std::optional<Velocity> center_velocity) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    return weighted_L2_exponent(field, 0.5 + epsilon, center_velocity);
}

std::vector<double> weighted_profile(const SourceFn& H, const Grid& grid, const std::vector<double>& times, double s,
                                     std::optional<Velocity> center_velocity) {
    const Velocity c = center_velocity.value_or(Velocity{0.0, 0.0, 0.0});
    std::vector<double> out(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
        for (std::size_t id = 0; id < grid.size(); ++id) {
            Point3 x = grid.point(id);
            const double h = H(x, t);
            for (int d = 0; d < 3; ++d) x[d] -= c[d] * t;
            acc += grid.volume(id) * h * h * std::pow(japanese2(x), s);
        }
        out[k] = acc;
    }
    return out;
}

Composite parse_composite(const std::string& name) {
    if (name == "I") return Composite::I;
    if (name == "D") return Composite::D;
    if (name == "D1") return Composite::D1;
    if (name == "D2") return Composite::D2;
    throw Error(ErrorKind::invalid_argument, "unknown composite norm '" + name + "'");
}

double composite_norms(const SpacetimeField& G, Composite which, double epsilon) {
    NormOptions opt;
    opt.epsilon = epsilon;
    const NormReport r = run(G, opt);
    switch (which) {
        case Composite::I: return r.I_norm;
        case Composite::D: return r.D_norm;
        case Composite::D1: return r.D1_norm;
        case Composite::D2: return r.D2_norm;
    }
    return 0.0;
}

SpacetimeField shifted_field(const SpacetimeField& G, const Velocity& v) {
    const Grid& g = G.grid();
    require_moving_ok(g, v);
    SpacetimeField out(g, G.t0(), G.dt());
    std::vector<double> u(g.size()), ut(g.size());
    for (std::size_t k = 0; k < G.n_times(); ++k) {
        const double t = G.time(k);
        const auto src = G.u(k), srct = G.ut(k);
#pragma omp parallel for schedule(static)
        for (std::size_t id = 0; id < g.size(); ++id) {
            Point3 x = g.point(id);
            for (int d = 0; d < 3; ++d) x[d] += v[d] * t;
            const Point3 c = g.to_grid_coords(x);
            const bool in = g.contains(c);
            u[id] = in ? g.interpolate(src, c) : 0.0;
            ut[id] = in ? g.interpolate(srct, c) : 0.0;
        }
        out.push(t, u, ut);
    }
    return out;
}

NormReport s_report(const SpacetimeField& h, const Velocity& v, double epsilon) {
    NormOptions opt;
    opt.epsilon = epsilon;
    opt.velocity = v;
    return run(h, opt);
}

}  // namespace mswl

#include "mswl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mswl/error.hpp"
#include "mswl/norms.hpp"

namespace mswl {

namespace {

constexpr double pi = std::numbers::pi;

// int_{ma}^{mb} dmu / (1 + r^2 + s^2 - 2 r s mu)
double angular(double r, double s, double ma, double mb) {
    if (mb <= ma) return 0.0;
    const double A = 1.0 + r * r + s * s, B = 2.0 * r * s;
    if (B < 1e-300) return (mb - ma) / A;
    return std::log1p(B * (mb - ma) / (A - B * mb)) / B;
}

// Piecewise Gauss-Kronrod with the tolerance measured against the whole
// integral, so negligible pieces are not refined to their own scale.
double integrate(const std::function<double(double)>& f, std::vector<double> cuts, const QuadratureOptions& q) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const std::size_t n = cuts.size() - 1;
    std::vector<double> val(n), err(n), l1(n);
    double scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        val[k] = GK::integrate(f, cuts[k], cuts[k + 1], 0, 0.0, &err[k], &l1[k]);
        scale += l1[k];
    }
    double total = 0.0, total_err = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (err[k] > q.rel_tol * scale / static_cast<double>(n)) {
            const double tol = std::max(q.rel_tol * scale / (static_cast<double>(n) * l1[k]), 1e-15);
            val[k] = GK::integrate(f, cuts[k], cuts[k + 1], q.max_depth, tol, &err[k], &l1[k]);
        }
        total += val[k];
        total_err += err[k];
    }
    if (!std::isfinite(total) || total_err > std::max(1e3 * q.rel_tol, 1e-9) * scale + 1e-16)
        throw Error(ErrorKind::unresolved,
                    "unresolved: radial quadrature error " + std::to_string(total_err / scale) + " relative");
    return total;
}

struct Setup {
    double s, k, R;
    std::vector<double> cuts;
};

Setup setup(double t, const Velocity& v, double epsilon, double extra = -1.0) {
    if (!(epsilon >= 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be nonnegative");
    if (!(t >= 0.0)) throw Error(ErrorKind::invalid_argument, "t must be nonnegative");
    const double sp = speed(v);
    if (!(sp < 1.0)) throw Error(ErrorKind::superluminal, "superluminal velocity |v| = " + std::to_string(sp));
    Setup st;
    st.s = sp * t;
    st.k = 0.5 * (-7.0 + 2.0 * epsilon);
    st.R = std::max(1e3, 10.0 * st.s);
    st.cuts = {0.0, 1.0, 4.0, st.R};
    for (double c = 8.0; c < st.R; c *= 2.0) st.cuts.push_back(c);
    for (double d = 16.0; st.s - d > 4.0 || st.s + d < st.R; d *= 2.0)
        for (double c : {st.s - d, st.s + d})
            if (c > 4.0 && c < st.R) st.cuts.push_back(c);
    for (double d : {-8.0, -2.0, 0.0, 2.0, 8.0})
        if (st.s + d > 0.0 && st.s + d < st.R) st.cuts.push_back(st.s + d);
    if (extra > 0.0)
        for (double c : {extra, st.s - extra, st.s + extra})
            if (c > 0.0 && c < st.R) st.cuts.push_back(c);
    return st;
}

// Runs body(i) for i < n across threads; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

// 4 pi int_R^infty r^{2k} dr, the far tail where the mover is irrelevant.
double tail(const Setup& st) { return 4.0 * pi * std::pow(st.R, 2.0 * st.k + 1.0) / (-2.0 * st.k - 1.0); }

}  // namespace

double interaction_integral(double t, const Velocity& v, double epsilon, const QuadratureOptions& q) {
    const Setup st = setup(t, v, epsilon);
    auto f = [&](double r) { return 2.0 * pi * r * r * std::pow(1.0 + r * r, st.k) * angular(r, st.s, -1.0, 1.0); };
    return integrate(f, st.cuts, q) + tail(st);
}

RegionSplit region_split(double t, const Velocity& v, double epsilon, double eta, const QuadratureOptions& q) {
    const double sp = speed(v);
    if (!(eta > 0.0) || !(eta < sp))
        throw Error(ErrorKind::invalid_argument, "eta must lie in (0, |v|)");
    const double e = eta * t;
    const Setup st = setup(t, v, epsilon, e);
    RegionSplit out;
    out.total = interaction_integral(t, v, epsilon, q);
    out.overlapping = 2.0 * e > st.s;
    if (e == 0.0) {
        out.far = out.total;
        return out;
    }
    // |x - v t| <= e  <=>  mu >= (r^2 + s^2 - e^2) / (2 r s)
    auto mu_c = [&](double r) { return r * st.s > 0.0 ? (r * r + st.s * st.s - e * e) / (2.0 * r * st.s) : 2.0; };
    auto w = [&](double r) { return 2.0 * pi * r * r * std::pow(1.0 + r * r, st.k); };
    auto near_origin = [&](double r) { return r <= e ? w(r) * angular(r, st.s, -1.0, 1.0) : 0.0; };
    auto near_mover = [&](double r) {
        const double m = std::max(-1.0, mu_c(r));
        return m < 1.0 ? w(r) * angular(r, st.s, m, 1.0) : 0.0;
    };
    auto far = [&](double r) { return r >= e ? w(r) * angular(r, st.s, -1.0, std::min(1.0, mu_c(r))) : 0.0; };
    out.near_origin = integrate(near_origin, st.cuts, q);
    out.near_mover = integrate(near_mover, st.cuts, q);
    out.far = integrate(far, st.cuts, q) + (st.R > e && st.R > st.s + e ? tail(st) : 0.0);
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
    if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw Error(ErrorKind::invalid_argument, "bad log-spaced window");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    t.back() = hi;
    return t;
}

DecayFit loglog_fit(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2) throw Error(ErrorKind::invalid_argument, "fit needs two or more samples");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(y[i] > 0.0))
            throw Error(ErrorKind::invalid_argument, "log-log fit needs positive samples");
        lx.push_back(std::log(t[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    DecayFit f;
    f.times = t;
    f.values = y;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - f.intercept - f.slope * lx[i];
        ss += r * r;
    }
    f.half_width = lx.size() > 2 ? 2.0 * std::sqrt(ss / (n - 2.0) / sxx) : 0.0;
    f.t_lo = *std::min_element(t.begin(), t.end());
    f.t_hi = *std::max_element(t.begin(), t.end());
    return f;
}

DecayFit interaction_decay_fit(const Velocity& v, double epsilon, double t_lo, double t_hi, std::size_t n,
                               const QuadratureOptions& q) {
    const auto t = log_spaced(t_lo, t_hi, n);
    std::vector<double> I(n);
    parallel_for(n, [&](std::size_t i) { I[i] = interaction_integral(t[i], v, epsilon, q); });
    return loglog_fit(t, I);
}

std::array<DecayFit, 3> region_decay_fits(const Velocity& v, double epsilon, double eta, double t_lo, double t_hi,
                                          std::size_t n, const QuadratureOptions& q) {
    const auto t = log_spaced(t_lo, t_hi, n);
    std::array<std::vector<double>, 3> y;
    for (auto& c : y) c.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const auto r = region_split(t[i], v, epsilon, eta, q);
        y[0][i] = r.near_origin;
        y[1][i] = r.near_mover;
        y[2][i] = r.far;
    });
    return {loglog_fit(t, y[0]), loglog_fit(t, y[1]), loglog_fit(t, y[2])};
}

TailRate tail_rate(double t1, const Velocity& v, double epsilon, double window, const QuadratureOptions& q) {
    if (!(t1 >= 1.0)) throw Error(ErrorKind::invalid_argument, "tail_rate needs t1 >= 1");
    if (!(window > 1.0)) throw Error(ErrorKind::invalid_argument, "tail window must exceed 1");
    TailRate out;
    out.window_end = window * t1;
    const auto fit = interaction_decay_fit(v, epsilon, out.window_end / 2.0, out.window_end, 5, q);
    out.slope = fit.slope;
    if (!(fit.slope < -1.0))
        throw Error(ErrorKind::tail_not_controlled,
                    "non-integrable tail: fitted slope " + std::to_string(fit.slope) + " >= -1");
    // substitute t = e^x so the power-law integrand is smooth
    auto f = [&](double x) {
        const double t = std::exp(x);
        return t * interaction_integral(t, v, epsilon, q);
    };
    double err = 0.0;
    const double body = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, std::log(t1), std::log(out.window_end), 10, 1e-10, &err);
    const double end_value = fit.values.back();
    const double rest = end_value * out.window_end / (-fit.slope - 1.0);
    out.value = std::sqrt(body + rest);
    out.tail_fraction = rest / (body + rest);
    return out;
}

double slice_energy(const SpacetimeField& field, double slope, double t_ref) {
    const Grid& g = field.grid();
    if (field.empty()) throw Error(ErrorKind::invalid_argument, "empty field");
    const std::size_t n0 = g.n(0), n1 = g.n(1), n2 = g.n(2);
    const int dims = g.layout() == Layout::axisymmetric ? 2 : 3;
    for (std::size_t i = 0; i < n0; ++i) {
        const double t = t_ref + slope * g.coord(0, i);
        if (!field.covers_time(t))
            throw Error(ErrorKind::slab_too_narrow,
                        "slab too narrow: tilted slice needs t = " + std::to_string(t) + " outside the stored window");
    }
    double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
    for (std::size_t i = 0; i < n0; ++i) {
        const double t = t_ref + slope * g.coord(0, i);
        for (std::size_t j = 0; j < n1; ++j)
            for (std::size_t k = 0; k < n2; ++k) {
                const std::size_t id = g.index(i, j, k);
                const Point3 x = g.point(id);
                const Point3 gx = g.to_grid_coords(x);
                double e = 0.0;
                const double ut = field.interpolate_ut(gx, t);
                e += ut * ut;
                for (int d = 0; d < dims; ++d) {
                    const std::size_t idx[3] = {i, j, k};
                    const std::size_t lo = idx[d] > 0 ? idx[d] - 1 : idx[d];
                    const std::size_t hi = idx[d] + 1 < g.n(d) ? idx[d] + 1 : idx[d];
                    if (hi == lo || (dims == 2 && d == 1 && j == 0)) continue;
                    Point3 a = gx, b = gx;
                    a[d] = g.coord(d, lo);
                    b[d] = g.coord(d, hi);
                    const double du =
                        (field.interpolate(b, t) - field.interpolate(a, t)) / (g.spacing(d) * static_cast<double>(hi - lo));
                    e += du * du;
                }
                total += g.volume(id) * e;
            }
    }
    return total;
}

SlabEnergy slab_energy_compare(const SpacetimeField& field, const SpacetimeField& source, const Velocity& v, double C,
                               double t_ref) {
    if (v[1] != 0.0 || v[2] != 0.0) throw Error(ErrorKind::invalid_argument, "slab comparison needs v along e1");
    lorentz_gamma(v);
    SlabEnergy out;
    out.flat = slice_energy(field, 0.0, t_ref);
    out.tilted = slice_energy(field, v[0], t_ref);
    if (!source.empty()) out.source_l2 = mixed_norm(source, 2.0, 2.0);
    const double f2 = out.source_l2 * out.source_l2;
    out.bound_flat = C * (out.tilted + f2);
    out.bound_tilted = C * (out.flat + f2);
    const double c1 = out.tilted + f2 > 0.0 ? out.flat / (out.tilted + f2) : (out.flat > 0.0 ? INFINITY : 1.0);
    const double c2 = out.flat + f2 > 0.0 ? out.tilted / (out.flat + f2) : (out.tilted > 0.0 ? INFINITY : 1.0);
    out.measured_c = std::max({c1, c2, 1.0});
    out.ok = out.flat <= out.bound_flat && out.tilted <= out.bound_tilted;
    return out;
}

nlohmann::ordered_json decay_fit_json(const DecayFit& f) {
    nlohmann::ordered_json j;
    j["slope"] = f.slope;
    j["half_width"] = f.half_width;
    j["intercept"] = f.intercept;
    j["window"] = {f.t_lo, f.t_hi};
    j["samples"] = f.times.size();
    return j;
}

}  // namespace mswl

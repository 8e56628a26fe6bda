#include "mswl/interaction.hpp"

#include <cmath>
#include <functional>

#include "mswl/error.hpp"

namespace mswl {

namespace {

double norm3(const Point3& z) { return std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]); }

double japanese(const Point3& x, const Velocity& v, double t) {
    const Point3 y{x[0] - v[0] * t, x[1] - v[1] * t, x[2] - v[2] * t};
    return std::sqrt(1.0 + y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
}

}  // namespace

double SolitonPair::V1(const Point3& x, double t) const { return v[0](norm3(w[0].comoving_point(x, t))); }
double SolitonPair::V2(const Point3& x, double t) const { return v[1](norm3(w[1].comoving_point(x, t))); }

RadialTable tabulate_potential(const RadialPotential& V, double dr, double extent) {
    if (extent <= 0.0) extent = V.cutoff_radius;
    return RadialTable::sample([&V](double r) { return V(r); }, dr, extent, 0.0);
}

SolitonPair make_pair(const StaticState& w1, const RadialPotential& v1, const StaticState& w2,
                      const RadialPotential& v2, const Velocity& velocity) {
    v1.validate();
    v2.validate();
    SolitonPair p;
    p.w[0] = BoostedProfile(w1, make_frame({0.0, 0.0, 0.0}));
    p.w[1] = BoostedProfile(w2, make_frame(velocity));
    p.v[0] = tabulate_potential(v1);
    p.v[1] = tabulate_potential(v2);
    return p;
}

LocalValues InteractionTerms::local(const Point3& x, double t) const {
    const Point3 z1 = pair_.w[0].comoving_point(x, t);
    const Point3 z2 = pair_.w[1].comoving_point(x, t);
    const double r1 = norm3(z1), r2 = norm3(z2);
    return {pair_.w[0].value(r1), pair_.w[1].value(r2), pair_.v[0](r1), pair_.v[1](r2)};
}

double InteractionTerms::a_of(const LocalValues& l) {
    const double p = l.w1, q = l.w2;
    return 20.0 * p * p * p * q + 30.0 * p * p * q * q + 20.0 * p * q * q * q;
}

double InteractionTerms::f1_of(const LocalValues& l) {
    const double p2 = l.w1 * l.w1;
    return 5.0 * p2 * p2 * l.w2 + l.v1 * l.w2;
}

double InteractionTerms::f2_of(const LocalValues& l) {
    const double q2 = l.w2 * l.w2;
    return 5.0 * l.w1 * q2 * q2 + l.w1 * l.v2;
}

double InteractionTerms::f_of(const LocalValues& l) {
    const double p = l.w1, q = l.w2;
    return 10.0 * p * p * p * q * q + 10.0 * p * p * q * q * q;
}

std::array<double, 4> InteractionTerms::m1_groups(const LocalValues& l, double h) {
    const double p = l.w1, q = l.w2, h2 = h * h;
    return {10.0 * p * p * p * h2, 30.0 * p * p * q * h2, 30.0 * p * q * q * h2, 10.0 * q * q * q * h2};
}

double InteractionTerms::m2(const LocalValues& l, double h) const {
    const double p = l.w1, q = l.w2;
    return (10.0 * p * p + m2_cross_coefficient() * p * q + 10.0 * q * q) * h * h * h;
}

double InteractionTerms::m3(const LocalValues& l, double h) {
    const double h2 = h * h;
    return (5.0 * l.w1 + 5.0 * l.w2) * h2 * h2;
}

double InteractionTerms::N(const LocalValues& l, double h) const {
    const auto g = m1_groups(l, h);
    return g[0] + g[1] + g[2] + g[3] + m2(l, h) + m3(l, h);
}

double InteractionTerms::source(const LocalValues& l, double h) const {
    const double h2 = h * h;
    return rhs_sign() * (f1_of(l) + f2_of(l) + f_of(l) + N(l, h)) - a_of(l) * h - h2 * h2 * h;
}

InteractionTerms build_terms(const SolitonPair& pair, TermOptions opt) { return InteractionTerms(pair, opt); }

namespace {

// Coefficients (highest power first) of a polynomial g of the given degree,
// from its values at p = 1 .. degree + 1.
template <int D>
std::array<double, D + 1> poly_coefficients(const std::function<double(double)>& g) {
    constexpr int n = D + 1;
    double m[n][n + 1];
    for (int k = 0; k < n; ++k) {
        const double p = k + 1.0;
        for (int j = 0; j < n; ++j) m[k][j] = std::pow(p, D - j);
        m[k][n] = g(p);
    }
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            const double f = m[row][col] / m[col][col];
            for (int k = col; k <= n; ++k) m[row][k] -= f * m[col][k];
        }
    std::array<double, n> c{};
    for (int k = 0; k < n; ++k) c[k] = std::round(m[k][n] / m[k][k] * 1e9) / 1e9;
    return c;
}

LocalValues mono(double p, double q) { return {p, q, 0.0, 0.0}; }

}  // namespace

CoefficientTable coefficient_table(const InteractionTerms& terms) {
    // Each group is homogeneous in (W1, W2); set W2 = 1 and read off the
    // polynomial in W1 after dividing out the factors shared by all monomials.
    CoefficientTable c;
    c.h0 = poly_coefficients<3>([](double p) {
        const auto l = mono(p, 1.0);
        return (InteractionTerms::f1_of(l) + InteractionTerms::f2_of(l) + InteractionTerms::f_of(l)) / p;
    });
    c.h1 = poly_coefficients<2>([](double p) { return InteractionTerms::a_of(mono(p, 1.0)) / p; });
    c.h2 = poly_coefficients<3>([](double p) {
        const auto g = InteractionTerms::m1_groups(mono(p, 1.0), 1.0);
        return g[0] + g[1] + g[2] + g[3];
    });
    c.h3 = poly_coefficients<2>([&terms](double p) { return terms.m2(mono(p, 1.0), 1.0); });
    c.h4 = poly_coefficients<1>([](double p) { return InteractionTerms::m3(mono(p, 1.0), 1.0); });
    return c;
}

double residual_identity(const InteractionTerms& terms, double w1, double w2, double h) {
    const LocalValues l{w1, w2, 0.0, 0.0};
    auto p5 = [](double s) { return s * s * s * s * s; };
    const double lhs = p5(w1 + w2 + h) - p5(w1) - p5(w2);
    const double w1_4 = w1 * w1 * w1 * w1, w2_4 = w2 * w2 * w2 * w2;
    const double parts = 5.0 * w1_4 * w2 + 5.0 * w1 * w2_4 + InteractionTerms::f_of(l);
    const double rhs = parts + InteractionTerms::a_of(l) * h + terms.N(l, h) + 5.0 * w1_4 * h + 5.0 * w2_4 * h + p5(h);
    return std::abs(lhs - rhs);
}

double residual_identity(const InteractionTerms& terms, double h, const Point3& x, double t) {
    const auto l = terms.local(x, t);
    if (!std::isfinite(h)) throw Error(ErrorKind::non_finite, "sample value is not finite");
    return residual_identity(terms, l.w1, l.w2, h);
}

EnvelopeReport envelope_check(const InteractionTerms& terms, const std::vector<Point3>& points,
                              const std::vector<double>& times, double cap) {
    EnvelopeReport rep;
    const Velocity& u1 = terms.pair().w[0].frame.velocity;
    const Velocity& u2 = terms.pair().w[1].frame.velocity;
    for (double t : times) {
        for (const Point3& x : points) {
            const auto l = terms.local(x, t);
            const double j1 = japanese(x, u1, t), j2 = japanese(x, u2, t);
            const double e1 = std::abs(InteractionTerms::f1_of(l)) * j1 * j1 * j1 * j1 * j2;
            const double e2 = std::abs(InteractionTerms::f2_of(l)) * j1 * j2 * j2 * j2 * j2;
            if (e1 > rep.c1) rep.c1 = e1, rep.at1 = {x, t, e1};
            if (e2 > rep.c2) rep.c2 = e2, rep.at2 = {x, t, e2};
            if (e1 > cap || e2 > cap) rep.violations.push_back({x, t, std::max(e1, e2)});
        }
    }
    rep.ok = rep.violations.empty();
    return rep;
}

void export_terms(const InteractionTerms& terms, const Grid& grid, double t, const std::filesystem::path& stem) {
    const char* names[4] = {"a", "F1", "F2", "F"};
    for (int k = 0; k < 4; ++k) {
        WaveState s = WaveState::zero(grid, t);
        for (std::size_t id = 0; id < grid.size(); ++id) {
            const auto l = terms.local(grid.point(id), t);
            s.u[id] = k == 0   ? InteractionTerms::a_of(l)
                      : k == 1 ? InteractionTerms::f1_of(l)
                      : k == 2 ? InteractionTerms::f2_of(l)
                               : InteractionTerms::f_of(l);
        }
        auto path = stem;
        path += std::string("_") + names[k] + ".bin";
        write_snapshot(path, s);
    }
}

}  // namespace mswl

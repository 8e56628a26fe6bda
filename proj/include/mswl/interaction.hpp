#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "mswl/lorentz.hpp"

namespace mswl {

/// Two solitons, each a rest profile carried by its frame, with the rest-frame
/// radial potentials. Center 0 is normally static.
struct SolitonPair {
    std::array<BoostedProfile, 2> w;
    std::array<RadialTable, 2> v;

    double W1(const Point3& x, double t) const { return w[0](x, t); }
    double W2(const Point3& x, double t) const { return w[1](x, t); }
    double V1(const Point3& x, double t) const;
    double V2(const Point3& x, double t) const;
    const LorentzFrame& frame2() const { return w[1].frame; }
};

/// Rest potentials are tabulated on [0, extent] and vanish beyond.
RadialTable tabulate_potential(const RadialPotential& V, double dr = 0.01, double extent = -1.0);
SolitonPair make_pair(const StaticState& w1, const RadialPotential& v1, const StaticState& w2,
                      const RadialPotential& v2, const Velocity& velocity);

struct TermOptions {
    /// Use the printed "3 W1 W2" coefficient in the h^3 group.
    bool printed_m2_coefficient = false;
    /// Put F1 + F2 + F + N on the right-hand side with the printed "+" sign
    /// instead of the sign produced by substituting into the equation.
    bool printed_rhs_sign = false;
};

struct LocalValues {
    double w1 = 0.0, w2 = 0.0, v1 = 0.0, v2 = 0.0;
};

class InteractionTerms {
public:
    InteractionTerms() = default;
    InteractionTerms(SolitonPair pair, TermOptions opt) : pair_(std::move(pair)), opt_(opt) {}

    const SolitonPair& pair() const { return pair_; }
    const TermOptions& options() const { return opt_; }
    LocalValues local(const Point3& x, double t) const;

    double a(const Point3& x, double t) const { return a_of(local(x, t)); }
    double F1(const Point3& x, double t) const { return f1_of(local(x, t)); }
    double F2(const Point3& x, double t) const { return f2_of(local(x, t)); }
    double F(const Point3& x, double t) const { return f_of(local(x, t)); }

    static double a_of(const LocalValues& l);
    static double f1_of(const LocalValues& l);
    static double f2_of(const LocalValues& l);
    static double f_of(const LocalValues& l);
    /// M_{1,1..4}: 10 W1^3, 30 W1^2 W2, 30 W1 W2^2, 10 W2^3 times h^2.
    static std::array<double, 4> m1_groups(const LocalValues& l, double h);
    double m2(const LocalValues& l, double h) const;
    static double m3(const LocalValues& l, double h);
    double N(const LocalValues& l, double h) const;
    double m2_cross_coefficient() const { return opt_.printed_m2_coefficient ? 3.0 : 20.0; }
    /// +1 with the printed sign, -1 with the derived sign.
    double rhs_sign() const { return opt_.printed_rhs_sign ? 1.0 : -1.0; }

    /// Right-hand side S(x, t) of the linear equation solved by the next
    /// iterate given the previous iterate's value h.
    double source(const LocalValues& l, double h) const;

private:
    SolitonPair pair_;
    TermOptions opt_;
};

InteractionTerms build_terms(const SolitonPair& pair, TermOptions opt = {});

/// Binomial coefficient tables per h-power, read off the implementation.
struct CoefficientTable {
    std::array<double, 4> h0{};  // W1^4W2, W1^3W2^2, W1^2W2^3, W1W2^4
    std::array<double, 3> h1{};  // W1^3W2, W1^2W2^2, W1W2^3
    std::array<double, 4> h2{};  // W1^3, W1^2W2, W1W2^2, W2^3
    std::array<double, 3> h3{};  // W1^2, W1W2, W2^2
    std::array<double, 2> h4{};  // W1, W2
};
CoefficientTable coefficient_table(const InteractionTerms& terms);

/// |(W1+W2+h)^5 - W1^5 - W2^5 - rhs|, with rhs the grouped expansion.
double residual_identity(const InteractionTerms& terms, double w1, double w2, double h);
double residual_identity(const InteractionTerms& terms, double h, const Point3& x, double t);

struct EnvelopePoint {
    Point3 x{};
    double t = 0.0;
    double ratio = 0.0;
};

struct EnvelopeReport {
    double c1 = 0.0;  // sup |F1| <x>^4 <x - vt>
    double c2 = 0.0;  // sup |F2| <x> <x - vt>^4
    EnvelopePoint at1, at2;
    std::vector<EnvelopePoint> violations;
    bool ok = true;
};

EnvelopeReport envelope_check(const InteractionTerms& terms, const std::vector<Point3>& points,
                              const std::vector<double>& times, double cap = 1e3);

/// Writes stem_{a,F1,F2,F}.bin snapshots of the coefficients at time t.
void export_terms(const InteractionTerms& terms, const Grid& grid, double t, const std::filesystem::path& stem);

}  // namespace mswl

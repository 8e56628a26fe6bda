#pragma once

#include <array>
#include <functional>

#include <json.hpp>

#include "mswl/elliptic.hpp"
#include "mswl/field.hpp"

namespace mswl {

using Velocity = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

double speed(const Velocity& v);
/// 1/sqrt(1 - |v|^2); throws superluminal for |v| >= 1.
double lorentz_gamma(const Velocity& v);

struct LorentzFrame {
    Velocity velocity{0.0, 0.0, 0.0};
    double gamma = 1.0;
    Mat3 rotation{};    // maps v/|v| to e1
    Mat4 boost{};       // Lambda_v along e1
    Mat4 transform{};   // Lambda_v * diag(1, rotation)
    double contraction = 1.0;  // sqrt(1 - |v|^2) on the boost axis

    double speed() const { return mswl::speed(velocity); }
    Point3 rotate(const Point3& x) const;
    Point3 unrotate(const Point3& x) const;
    /// m_v x: boost-axis coordinate scaled by sqrt(1 - |v|^2).
    Point3 contract(const Point3& x) const;
    Point3 expand(const Point3& x) const;
    /// (t, x) -> (t', x') and back.
    std::array<double, 4> to_comoving(double t, const Point3& x) const;
    std::array<double, 4> from_comoving(double tp, const Point3& xp) const;
};

LorentzFrame make_frame(const Velocity& v);

using Field3 = std::function<double(const Point3&)>;

/// x -> V(m_v x).
Field3 contract_potential(const Field3& V, const LorentzFrame& frame);
/// Lab potential whose contraction is the radial rest-frame potential:
/// y -> V_rest(|m_v^{-1} rho_v y|).
Field3 lab_potential(const RadialPotential& rest, const LorentzFrame& frame);

/// A static rest-frame profile carried by a frame.
struct BoostedProfile {
    RadialTable value;
    RadialTable slope;
    LorentzFrame frame;

    BoostedProfile() = default;
    BoostedProfile(const StaticState& rest, const LorentzFrame& f, double dr = 0.01);
    static BoostedProfile from_function(const std::function<double(double)>& w,
                                        const std::function<double(double)>& dw, const LorentzFrame& f,
                                        double extent = 200.0, double dr = 0.01);

    /// Comoving coordinates (gamma (x~1 - |v| t), x~2, x~3) with x~ = rho_v x.
    Point3 comoving_point(const Point3& x, double t) const;
    double operator()(const Point3& x, double t) const;
    double time_derivative(const Point3& x, double t) const;
};

double lab_profile(const BoostedProfile& p, const Point3& x, double t);

/// Sampling specification of a resampled field.
struct SliceSpec {
    Grid grid;
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n_times = 1;
};

/// u_L(x', t') = u(gamma(x1' + v t'), x2', x3', gamma(t' + v x1')), with the
/// rotation applied for general v. Throws slab_too_narrow when a required
/// point leaves the sampled slab.
SpacetimeField pullback_field(const SpacetimeField& field, const LorentzFrame& frame, const SliceSpec& target);
/// u(x, t) = u_L(gamma(x1 - v t), x2, x3, gamma(t - v x1)).
SpacetimeField pushforward_field(const SpacetimeField& field_L, const LorentzFrame& frame, const SliceSpec& target);

nlohmann::ordered_json frame_json(const LorentzFrame& f);

}  // namespace mswl

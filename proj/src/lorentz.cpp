#include "mswl/lorentz.hpp"

#include <cmath>

#include "mswl/error.hpp"

namespace mswl {

double speed(const Velocity& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double lorentz_gamma(const Velocity& v) {
    const double s2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (!(s2 < 1.0)) throw Error(ErrorKind::superluminal, "superluminal velocity |v| = " + std::to_string(std::sqrt(s2)));
    return 1.0 / std::sqrt(1.0 - s2);
}

LorentzFrame make_frame(const Velocity& v) {
    for (double c : v)
        if (!std::isfinite(c)) throw Error(ErrorKind::invalid_argument, "velocity must be finite");
    LorentzFrame f;
    f.velocity = v;
    f.gamma = lorentz_gamma(v);
    const double s = speed(v);
    f.contraction = std::sqrt((1.0 - s) * (1.0 + s));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f.rotation[i][j] = i == j ? 1.0 : 0.0;
    if (s > 0.0 && !(v[1] == 0.0 && v[2] == 0.0 && v[0] > 0.0)) {
        // Householder reflection I - 2 w w^T / w^T w with w = v/|v| - e1.
        Point3 w{v[0] / s - 1.0, v[1] / s, v[2] / s};
        const double ww = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f.rotation[i][j] -= 2.0 * w[i] * w[j] / ww;
    }
    for (auto& row : f.boost) row.fill(0.0);
    f.boost[0][0] = f.gamma;
    f.boost[0][1] = -s * f.gamma;
    f.boost[1][0] = -s * f.gamma;
    f.boost[1][1] = f.gamma;
    f.boost[2][2] = 1.0;
    f.boost[3][3] = 1.0;
    Mat4 r{};
    r[0][0] = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i + 1][j + 1] = f.rotation[i][j];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) acc += f.boost[i][k] * r[k][j];
            f.transform[i][j] = acc;
        }
    return f;
}

Point3 LorentzFrame::rotate(const Point3& x) const {
    Point3 y{};
    for (int i = 0; i < 3; ++i) y[i] = rotation[i][0] * x[0] + rotation[i][1] * x[1] + rotation[i][2] * x[2];
    return y;
}

Point3 LorentzFrame::unrotate(const Point3& x) const {
    Point3 y{};
    for (int i = 0; i < 3; ++i) y[i] = rotation[0][i] * x[0] + rotation[1][i] * x[1] + rotation[2][i] * x[2];
    return y;
}

Point3 LorentzFrame::contract(const Point3& x) const { return {contraction * x[0], x[1], x[2]}; }
Point3 LorentzFrame::expand(const Point3& x) const { return {x[0] / contraction, x[1], x[2]}; }

std::array<double, 4> LorentzFrame::to_comoving(double t, const Point3& x) const {
    const Point3 y = rotate(x);
    const double s = speed();
    return {gamma * (t - s * y[0]), gamma * (y[0] - s * t), y[1], y[2]};
}

std::array<double, 4> LorentzFrame::from_comoving(double tp, const Point3& xp) const {
    const double s = speed();
    const Point3 x = unrotate({gamma * (xp[0] + s * tp), xp[1], xp[2]});
    return {gamma * (tp + s * xp[0]), x[0], x[1], x[2]};
}

Field3 contract_potential(const Field3& V, const LorentzFrame& frame) {
    return [V, frame](const Point3& x) { return V(frame.contract(x)); };
}

Field3 lab_potential(const RadialPotential& rest, const LorentzFrame& frame) {
    return [rest, frame](const Point3& y) {
        const Point3 z = frame.expand(frame.rotate(y));
        return rest(std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    };
}

BoostedProfile::BoostedProfile(const StaticState& rest, const LorentzFrame& f, double dr)
    : value(rest.table(dr)), slope(rest.derivative_table(dr)), frame(f) {}

BoostedProfile BoostedProfile::from_function(const std::function<double(double)>& w,
                                             const std::function<double(double)>& dw, const LorentzFrame& f,
                                             double extent, double dr) {
    BoostedProfile p;
    p.frame = f;
    p.value = RadialTable::sample(w, dr, extent, w(extent) * extent);
    p.slope = RadialTable::sample(dw, dr, extent, dw(extent) * extent * extent, 2, true);
    return p;
}

Point3 BoostedProfile::comoving_point(const Point3& x, double t) const {
    const Point3 y = frame.rotate(x);
    return {frame.gamma * (y[0] - frame.speed() * t), y[1], y[2]};
}

double BoostedProfile::operator()(const Point3& x, double t) const {
    const Point3 z = comoving_point(x, t);
    return value(std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
}

double BoostedProfile::time_derivative(const Point3& x, double t) const {
    const Point3 z = comoving_point(x, t);
    const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    if (r == 0.0) return 0.0;
    return slope(r) * (z[0] / r) * (-frame.gamma * frame.speed());
}

double lab_profile(const BoostedProfile& p, const Point3& x, double t) { return p(x, t); }

namespace {

void require_axis_aligned(const Grid& g, const LorentzFrame& f) {
    if (g.layout() == Layout::axisymmetric && f.speed() > 0.0 && std::abs(std::abs(f.rotation[0][0]) - 1.0) > 1e-14)
        throw Error(ErrorKind::invalid_argument, "axisymmetric fields need a velocity along e1");
}

// Resamples src at (t, x) = map(t', x') onto the target slab. The time
// derivative uses the chain rule d/dt' = (dt/dt') d/dt + (dx/dt') . grad.
SpacetimeField resample(const SpacetimeField& src, const SliceSpec& target,
                        const std::function<std::array<double, 4>(double, const Point3&)>& map, double dt_dtp,
                        const Point3& dx_dtp) {
    const Grid& sg = src.grid();
    const Grid& tg = target.grid;
    SpacetimeField out(tg, target.t0, target.dt);
    std::vector<double> u(tg.size()), ut(tg.size());
    const double delta = 0.25 * sg.spacing(0);
    for (std::size_t k = 0; k < target.n_times; ++k) {
        const double tp = target.t0 + target.dt * static_cast<double>(k);
        bool bad = false;
        double bad_t = 0.0;
#pragma omp parallel for schedule(static)
        for (std::size_t id = 0; id < tg.size(); ++id) {
            const Point3 xp = tg.point(id);
            const auto q = map(tp, xp);
            const Point3 x{q[1], q[2], q[3]};
            const Point3 g = sg.to_grid_coords(x);
            if (!src.covers_time(q[0]) || !sg.contains(g)) {
#pragma omp critical
                {
                    bad = true;
                    bad_t = q[0];
                }
                continue;
            }
            u[id] = src.interpolate(g, q[0]);
            double grad_dot = 0.0;
            for (int d = 0; d < 3; ++d) {
                if (dx_dtp[d] == 0.0) continue;
                Point3 xa = x, xb = x;
                xa[d] += delta;
                xb[d] -= delta;
                grad_dot += dx_dtp[d] * (src.interpolate(sg.to_grid_coords(xa), q[0]) -
                                         src.interpolate(sg.to_grid_coords(xb), q[0])) /
                            (2.0 * delta);
            }
            ut[id] = dt_dtp * src.interpolate_ut(g, q[0]) + grad_dot;
        }
        if (bad)
            throw Error(ErrorKind::slab_too_narrow,
                        "slab too narrow: tilted slice leaves the sampled domain near t = " + std::to_string(bad_t));
        out.push(tp, u, ut);
    }
    return out;
}

}  // namespace

SpacetimeField pullback_field(const SpacetimeField& field, const LorentzFrame& frame, const SliceSpec& target) {
    require_axis_aligned(field.grid(), frame);
    require_axis_aligned(target.grid, frame);
    const double s = frame.speed();
    const Point3 dx = frame.unrotate({frame.gamma * s, 0.0, 0.0});
    return resample(
        field, target, [&frame](double tp, const Point3& xp) { return frame.from_comoving(tp, xp); }, frame.gamma, dx);
}

SpacetimeField pushforward_field(const SpacetimeField& field_L, const LorentzFrame& frame, const SliceSpec& target) {
    require_axis_aligned(field_L.grid(), frame);
    require_axis_aligned(target.grid, frame);
    const double s = frame.speed();
    return resample(
        field_L, target, [&frame](double t, const Point3& x) { return frame.to_comoving(t, x); }, frame.gamma,
        {-frame.gamma * s, 0.0, 0.0});
}

nlohmann::ordered_json frame_json(const LorentzFrame& f) {
    nlohmann::ordered_json j;
    j["v"] = f.velocity;
    j["gamma"] = f.gamma;
    std::vector<double> rho, lam, full;
    for (const auto& row : f.rotation) rho.insert(rho.end(), row.begin(), row.end());
    for (const auto& row : f.boost) lam.insert(lam.end(), row.begin(), row.end());
    for (const auto& row : f.transform) full.insert(full.end(), row.begin(), row.end());
    j["rho"] = rho;
    j["Lambda"] = lam;
    j["transform"] = full;
    j["contraction"] = f.contraction;
    return j;
}

}  // namespace mswl

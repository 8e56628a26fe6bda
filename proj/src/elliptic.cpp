#include "mswl/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "mswl/error.hpp"
#include "mswl/grid.hpp"
#include "mswl/radial_operator.hpp"

namespace mswl {

namespace odeint = boost::numeric::odeint;

void RadialPotential::validate() const {
    if (!eval) return;
    if (!(decay_exponent > 3.0)) throw Error(ErrorKind::config, "potential decay exponent must exceed 3");
    if (!(cutoff_radius > 0.0)) throw Error(ErrorKind::config, "potential cutoff radius must be positive");
    if (!std::isfinite(eval(0.0))) throw Error(ErrorKind::config, "potential is not finite at r = 0");
    constexpr int samples = 2000;
    double inner = 0.0, outer = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double r = cutoff_radius * i / samples;
        const double v = eval(r);
        if (!std::isfinite(v)) throw Error(ErrorKind::config, "potential not finite at r = " + std::to_string(r));
        const double w = std::abs(v) * std::pow(1.0 + r, decay_exponent);
        (2 * i <= samples ? inner : outer) = std::max(2 * i <= samples ? inner : outer, w);
    }
    if (outer > 1.01 * inner + 1e-300)
        throw Error(ErrorKind::config, "potential violates the (1+r)^-beta decay bound");
}

RadialPotential zero_potential() { return RadialPotential{}; }

RadialPotential gaussian_well(double depth, double width) {
    RadialPotential p;
    p.eval = [depth, width](double r) { return -depth * std::exp(-(r / width) * (r / width)); };
    p.family = "gaussian";
    p.params = {depth, width};
    return p;
}

RadialPotential poschl_teller_well(double depth, double width) {
    RadialPotential p;
    p.eval = [depth, width](double r) {
        const double c = std::cosh(std::min(r / width, 350.0));
        return -depth / (c * c);
    };
    p.family = "poschl_teller";
    p.params = {depth, width};
    return p;
}

RadialPotential compact_bump(double depth, double radius) {
    RadialPotential p;
    p.eval = [depth, radius](double r) {
        if (r >= radius) return 0.0;
        const double s = 1.0 - (r / radius) * (r / radius);
        return -depth * s * s;
    };
    p.family = "compact";
    p.params = {depth, radius};
    return p;
}

RadialPotential make_potential(const std::string& family, double depth, double width) {
    if (family == "zero") return zero_potential();
    if (family == "gaussian") return gaussian_well(depth, width);
    if (family == "poschl_teller") return poschl_teller_well(depth, width);
    if (family == "compact") return compact_bump(depth, width);
    throw Error(ErrorKind::config, "unknown potential family '" + family + "'");
}

std::vector<double> radial_grid(const EllipticConfig& cfg) {
    if (cfg.n < 16 || !(cfg.r_max > 0.0)) throw Error(ErrorKind::invalid_argument, "bad radial grid");
    std::vector<double> r(cfg.n + 1);
    const double k = cfg.refinement;
    const double scale = cfg.r_max / std::expm1(k);
    for (std::size_t i = 0; i <= cfg.n; ++i) r[i] = scale * std::expm1(k * static_cast<double>(i) / cfg.n);
    r.back() = cfg.r_max;
    return r;
}

RadialTable::RadialTable(std::vector<double> values, double dr, double tail_c, int tail_power, bool odd)
    : values_(std::move(values)), dr_(dr), tail_c_(tail_c), tail_power_(tail_power), odd_(odd) {
    if (values_.size() < 4 || !(dr_ > 0.0)) throw Error(ErrorKind::invalid_argument, "radial table too small");
}

RadialTable RadialTable::sample(const std::function<double(double)>& f, double dr, double extent, double tail_c,
                                int tail_power, bool odd) {
    const auto n = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(extent / dr)) + 1, 4);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = f(dr * static_cast<double>(i));
    return RadialTable(std::move(values), dr, tail_c, tail_power, odd);
}

double RadialTable::operator()(double r) const {
    const double sign = odd_ && r < 0.0 ? -1.0 : 1.0;
    r = std::abs(r);
    const double q = r / dr_;
    const auto n = static_cast<long>(values_.size());
    const double fl = std::floor(q);
    if (fl >= static_cast<double>(n - 2)) return r > 0.0 ? sign * tail_c_ / std::pow(r, tail_power_) : 0.0;
    const long i = static_cast<long>(fl);
    const auto w = cubic_weights(q - fl);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const long j = i - 1 + a;
        const double v = values_[static_cast<std::size_t>(std::abs(j))];
        acc += w[a] * (j < 0 && odd_ ? -v : v);
    }
    return sign * acc;
}

bool StaticState::is_zero() const {
    return std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; });
}

namespace {

std::size_t locate(const std::vector<double>& r, double x) {
    auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = static_cast<std::size_t>(it - r.begin());
    return i == 0 ? 0 : std::min(i - 1, r.size() - 2);
}

double tail_coefficient(const StaticState& s) {
    if (s.far_field_c != 0.0) return s.far_field_c;
    return s.r.empty() ? 0.0 : s.u.back() * s.r.back();
}

}  // namespace

double StaticState::operator()(double radius) const {
    radius = std::abs(radius);
    if (r.empty()) return 0.0;
    if (radius >= r.back()) return tail_coefficient(*this) / radius;
    const std::size_t i = locate(r, radius);
    const double h = r[i + 1] - r[i];
    const double s = (radius - r[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u[i] + h10 * h * du[i] + h01 * u[i + 1] + h11 * h * du[i + 1];
}

double StaticState::derivative(double radius) const {
    const double sign = radius < 0.0 ? -1.0 : 1.0;
    radius = std::abs(radius);
    if (r.empty()) return 0.0;
    if (radius >= r.back()) return -sign * tail_coefficient(*this) / (radius * radius);
    const std::size_t i = locate(r, radius);
    const double h = r[i + 1] - r[i];
    const double s = (radius - r[i]) / h;
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    return sign * ((d00 * u[i] + d01 * u[i + 1]) / h + d10 * du[i] + d11 * du[i + 1]);
}

RadialTable StaticState::table(double dr, double extent) const {
    if (extent <= 0.0) extent = r.empty() ? 1.0 : r.back();
    return RadialTable::sample([this](double x) { return (*this)(x); }, dr, extent, tail_coefficient(*this));
}

RadialTable StaticState::derivative_table(double dr, double extent) const {
    if (extent <= 0.0) extent = r.empty() ? 1.0 : r.back();
    return RadialTable::sample([this](double x) { return derivative(x); }, dr, extent, -tail_coefficient(*this), 2,
                               true);
}

namespace {

using State2 = std::array<double, 2>;

struct BlowUp {
    double r;
    double u;
};

// Integrates u'' + (2/r) u' = f(r, u) from the series start on grid[1].
template <class Source>
void integrate_radial(Source f, double u0, const std::vector<double>& grid, double bound, double rtol, double atol,
                      std::vector<double>& u, std::vector<double>& du, std::size_t& reached, double& blowup_r,
                      double& blowup_u) {
    const std::size_t n = grid.size();
    u.assign(n, 0.0);
    du.assign(n, 0.0);
    u[0] = u0;
    const double s0 = f(0.0, u0);
    const double r1 = grid[1];
    State2 x{u0 + s0 * r1 * r1 / 6.0, s0 * r1 / 3.0};
    u[1] = x[0];
    du[1] = x[1];
    reached = 2;
    blowup_r = -1.0;
    auto rhs = [&](const State2& y, State2& dy, double r) {
        if (!std::isfinite(y[0]) || std::abs(y[0]) > bound) throw BlowUp{r, y[0]};
        dy[0] = y[1];
        dy[1] = f(r, y[0]) - 2.0 * y[1] / r;
    };
    std::size_t k = 1;
    auto observe = [&](const State2& y, double) {
        u[k] = y[0];
        du[k] = y[1];
        reached = k + 1;
        ++k;
    };
    try {
        auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State2>>(atol, rtol);
        odeint::integrate_times(stepper, rhs, x, grid.begin() + 1, grid.end(), (grid[2] - grid[1]) * 0.5, observe);
    } catch (const BlowUp& b) {
        blowup_r = b.r;
        blowup_u = b.u;
    } catch (const std::exception&) {
        blowup_r = k < n ? grid[k] : grid.back();
        blowup_u = u[k - 1];
    }
}

}  // namespace

Shot shoot(const RadialPotential& V, double alpha, const std::vector<double>& grid, const EllipticConfig& cfg) {
    Shot s;
    double bu = 0.0;
    const double bound = cfg.blowup_bound * std::max(1.0, std::abs(alpha));
    integrate_radial([&](double r, double u) { return V(r) * u + u * u * u * u * u; }, alpha, grid, bound, cfg.rtol,
                     cfg.atol, s.u, s.du, s.reached, s.blowup_radius, bu);
    for (std::size_t i = 1; i < s.reached; ++i)
        if ((s.u[i] < 0.0) != (s.u[i - 1] < 0.0) && s.u[i] != 0.0) ++s.zero_crossings;
    if (s.blowup_radius >= 0.0) {
        s.terminal_sign = bu > 0.0 ? 1 : -1;
    } else {
        const double a = s.u.back() + grid.back() * s.du.back();
        s.terminal_sign = a > 0.0 ? 1 : (a < 0.0 ? -1 : 0);
    }
    return s;
}

namespace {

// u''(r_i) from the quintic Hermite interpolant through nodes i-1, i, i+1.
double hermite_second_derivative(const std::vector<double>& r, const std::vector<double>& u,
                                 const std::vector<double>& du, std::size_t i) {
    const double h = r[i + 1] - r[i];
    const double s = (r[i - 1] - r[i]) / h;
    const double ua = (u[i - 1] - u[i] - du[i] * (r[i - 1] - r[i]));
    const double da = (du[i - 1] - du[i]) * h;
    const double ub = (u[i + 1] - u[i] - du[i] * h);
    const double db = (du[i + 1] - du[i]) * h;
    // Unknowns C2..C5 with p(x) = ... + C_k (x/h)^k.
    double m[4][5] = {{s * s, s * s * s, s * s * s * s, s * s * s * s * s, ua},
                      {2 * s, 3 * s * s, 4 * s * s * s, 5 * s * s * s * s, da},
                      {1, 1, 1, 1, ub},
                      {2, 3, 4, 5, db}};
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int q = c + 1; q < 4; ++q)
            if (std::abs(m[q][c]) > std::abs(m[p][c])) p = q;
        for (int k = 0; k < 5; ++k) std::swap(m[c][k], m[p][k]);
        for (int q = 0; q < 4; ++q) {
            if (q == c) continue;
            const double f = m[q][c] / m[c][c];
            for (int k = c; k < 5; ++k) m[q][k] -= f * m[c][k];
        }
    }
    return 2.0 * (m[0][4] / m[0][0]) / (h * h);
}

StaticState zero_state(const EllipticConfig& cfg) {
    StaticState s;
    s.r = radial_grid(cfg);
    s.u.assign(s.r.size(), 0.0);
    s.du.assign(s.r.size(), 0.0);
    s.residual.assign(s.r.size(), 0.0);
    return s;
}

}  // namespace

StaticState solve_radial_static(const RadialPotential& V, double alpha, const EllipticConfig& cfg) {
    V.validate();
    if (!std::isfinite(alpha)) throw Error(ErrorKind::invalid_argument, "shooting parameter must be finite");
    StaticState st;
    st.r = radial_grid(cfg);
    Shot shot = shoot(V, alpha, st.r, cfg);
    if (shot.blowup_radius >= 0.0)
        throw Error(ErrorKind::shoot_diverged, "shoot diverged at r = " + std::to_string(shot.blowup_radius));
    st.u = std::move(shot.u);
    st.du = std::move(shot.du);
    st.shoot_alpha = alpha;
    st.nodes = shot.zero_crossings;
    const std::size_t n = st.r.size();
    st.residual.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double r = st.r[i], u = st.u[i];
        const double upp = hermite_second_derivative(st.r, st.u, st.du, i);
        const double damp = 2.0 * st.du[i] / r;
        const double vu = V(r) * u, u5 = u * u * u * u * u;
        const double res = upp + damp - vu - u5;
        st.residual[i] = std::abs(res) / (1.0 + std::abs(damp) + std::abs(vu) + std::abs(u5));
        st.max_residual = std::max(st.max_residual, st.residual[i]);
    }
    double peak = 0.0;
    for (double x : st.u) peak = std::max(peak, std::abs(x));
    const FarField ff = far_field_coefficient(st, cfg.tail_threshold * std::max(peak, 1e-300));
    st.far_field_c = ff.c;
    st.far_field_residual = ff.residual;
    st.energy = energy_J(st, V);
    return st;
}

double energy_J(const StaticState& s, const RadialPotential& V) {
    const std::size_t n = s.r.size();
    if (n < 2) return 0.0;
    auto density = [&](std::size_t i) {
        const double u = s.u[i], d = s.du[i], r = s.r[i];
        const double u2 = u * u;
        return (0.5 * d * d + 0.5 * V(r) * u2 + u2 * u2 * u2 / 6.0) * 4.0 * std::numbers::pi * r * r;
    };
    double sum = 0.0, prev = density(0);
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = density(i);
        sum += 0.5 * (prev + cur) * (s.r[i] - s.r[i - 1]);
        prev = cur;
    }
    // Gradient tail of c/r beyond the grid.
    const double c = s.far_field_c;
    sum += 2.0 * std::numbers::pi * c * c / s.r.back();
    if (!std::isfinite(sum)) throw Error(ErrorKind::non_finite, "energy quadrature produced a non-finite value");
    return sum;
}

FarField far_field_fit(const std::vector<double>& r, const std::vector<double>& u) {
    const double rn = r.back();
    double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0, ymax = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 0.1 * rn) continue;
        const double y = r[i] * u[i], z = 1.0 / r[i];
        pts.emplace_back(z, y);
        s00 += 1;
        s01 += z;
        s11 += z * z;
        b0 += y;
        b1 += z * y;
        ymax = std::max(ymax, std::abs(y));
    }
    if (ymax < 1e-14 || pts.size() < 3) return {};
    const double det = s00 * s11 - s01 * s01;
    const double c = (b0 * s11 - b1 * s01) / det;
    const double d = (s00 * b1 - s01 * b0) / det;
    double ss = 0.0;
    for (const auto& [z, y] : pts) ss += (y - c - d * z) * (y - c - d * z);
    const double rms = std::sqrt(ss / static_cast<double>(pts.size()));
    return {c, rms / std::max(std::abs(c), 1e-300)};
}

FarField far_field_coefficient(const StaticState& s, double threshold) {
    if (s.r.empty()) return {};
    if (std::abs(s.u.back()) >= threshold)
        throw Error(ErrorKind::tail_not_resolved, "tail not resolved: |u(R)| = " + std::to_string(std::abs(s.u.back())));
    const FarField ff = far_field_fit(s.r, s.u);
    if (ff.residual > 0.05)
        throw Error(ErrorKind::tail_not_resolved,
                    "tail not resolved: relative plateau residual " + std::to_string(ff.residual));
    return ff;
}

double zero_resonance_indicator(const std::function<double(double)>& q, const EllipticConfig& cfg) {
    const auto grid = radial_grid(cfg);
    std::vector<double> phi, dphi;
    std::size_t reached = 0;
    double br = -1.0, bu = 0.0;
    integrate_radial([&](double r, double u) { return q(r) * u; }, 1.0, grid, 1e300, cfg.rtol, cfg.atol, phi, dphi,
                     reached, br, bu);
    if (br >= 0.0) throw Error(ErrorKind::non_finite, "zero-energy solution overflowed");
    double scale = 0.0;
    for (double p : phi) scale = std::max(scale, std::abs(p));
    const double a = phi.back() + grid.back() * dphi.back();
    return std::abs(a) / scale;
}

LinearizationSpectrum linearization_spectrum(const StaticState& state, const RadialPotential& V,
                                             const EllipticConfig& cfg) {
    const bool zero = state.is_zero();
    auto q = [&](double r) {
        const double w = zero ? 0.0 : state(r);
        const double w2 = w * w;
        return V(r) + 5.0 * w2 * w2;
    };
    LinearizationSpectrum out;
    const double h = cfg.spectrum_h;
    const auto n = static_cast<std::size_t>(std::llround(cfg.spectrum_r / h)) - 1;
    for (int ell = 0; ell <= 2; ++ell) {
        const auto coarse = eigenvalues_below(radial_hamiltonian(q, ell, h, n), 0.0);
        const auto fine = eigenvalues_below(radial_hamiltonian(q, ell, h / 2, 2 * n + 1), 0.0);
        if (coarse.size() != fine.size())
            throw Error(ErrorKind::unresolved, "unresolved spectrum: eigenvalue count changes under refinement");
        for (std::size_t k = 0; k < fine.size(); ++k)
            if (std::abs(fine[k] - coarse[k]) > 0.05 * std::abs(fine[k]))
                throw Error(ErrorKind::unresolved, "unresolved spectrum: eigenvalue moved more than 5%");
        out.per_sector[ell] = fine.size();
        out.sector_eigenvalues[ell] = fine;
        out.negative_eigenvalues.insert(out.negative_eigenvalues.end(), fine.begin(), fine.end());
    }
    std::sort(out.negative_eigenvalues.begin(), out.negative_eigenvalues.end());
    out.zero_resonance_indicator = zero_resonance_indicator(q, cfg);
    out.is_stable = out.negative_eigenvalues.empty() && out.zero_resonance_indicator > cfg.resonance_threshold;
    return out;
}

std::vector<StaticState> find_static_states(const RadialPotential& V, double alpha_max, const EllipticConfig& cfg) {
    V.validate();
    const auto grid = radial_grid(cfg);
    const std::size_t m = std::max<std::size_t>(cfg.alpha_scan, 2);
    std::vector<double> alphas(m);
    std::vector<int> signs(m);
    for (std::size_t k = 0; k < m; ++k) {
        alphas[k] = cfg.alpha_min * std::pow(alpha_max / cfg.alpha_min, static_cast<double>(k) / (m - 1));
        signs[k] = shoot(V, alphas[k], grid, cfg).terminal_sign;
    }
    std::vector<StaticState> out;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (signs[k] == signs[k + 1] || signs[k] == 0 || signs[k + 1] == 0) continue;
        double lo = alphas[k], hi = alphas[k + 1];
        const int slo = signs[k];
        for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const int s = shoot(V, mid, grid, cfg).terminal_sign;
            if (s == 0) {
                lo = hi = mid;
                break;
            }
            (s == slo ? lo : hi) = mid;
        }
        try {
            out.push_back(solve_radial_static(V, 0.5 * (lo + hi), cfg));
        } catch (const Error&) {
        }
    }
    return out;
}

StaticState zero_static_state(const EllipticConfig& cfg) {
    StaticState s = zero_state(cfg);
    s.tag = "zero";
    return s;
}

StaticState find_ground_state(const RadialPotential& V, const EllipticConfig& cfg) {
    V.validate();
    StaticState zero = zero_state(cfg);
    const auto free_spectrum = linearization_spectrum(zero, V, cfg);
    if (free_spectrum.per_sector[0] == 0) {
        zero.tag = "no trapping";
        return zero;
    }
    const auto grid = radial_grid(cfg);
    double alpha_max = 1.0;
    for (;;) {
        const Shot s = shoot(V, alpha_max, grid, cfg);
        if (s.terminal_sign == 1 && s.zero_crossings == 0 && s.blowup_radius >= 0.0) break;
        alpha_max *= 2.0;
        if (alpha_max > 1e4) throw Error(ErrorKind::shoot_failed, "no upper bracket for the shooting parameter");
    }
    const auto states = find_static_states(V, alpha_max, cfg);
    const StaticState* best = nullptr;
    for (const auto& s : states)
        if (s.nodes == 0 && s.shoot_alpha > 0.0 && (!best || s.energy < best->energy)) best = &s;
    if (!best) throw Error(ErrorKind::shoot_failed, "no sign-definite static state bracketed");
    StaticState g = *best;
    g.tag = "ground";
    return g;
}

nlohmann::ordered_json static_state_json(const StaticState& s, const LinearizationSpectrum* spectrum) {
    nlohmann::ordered_json j;
    j["alpha"] = s.shoot_alpha;
    j["c"] = s.far_field_c;
    j["J"] = s.energy;
    j["far_field_residual"] = s.far_field_residual;
    j["max_residual"] = s.max_residual;
    j["nodes"] = s.nodes;
    j["tag"] = s.tag;
    j["r_max"] = s.r.empty() ? 0.0 : s.r.back();
    j["n"] = s.r.size();
    if (spectrum) {
        j["stability"] = {{"negative_eigenvalues", spectrum->negative_eigenvalues},
                          {"per_sector", spectrum->per_sector},
                          {"zero_resonance_indicator", spectrum->zero_resonance_indicator},
                          {"is_stable", spectrum->is_stable}};
    }
    return j;
}

void write_static_state(const std::filesystem::path& stem, const StaticState& s, const LinearizationSpectrum* spectrum,
                        const Provenance& prov) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s.r.size());
    for (std::size_t i = 0; i < s.r.size(); ++i) rows.push_back({s.r[i], s.u[i], s.residual[i]});
    auto csv = stem;
    csv += ".csv";
    auto json = stem;
    json += ".json";
    write_csv(csv, {"r", "u", "residual"}, rows, prov);
    write_json(json, static_state_json(s, spectrum), prov);
}

}  // namespace mswl

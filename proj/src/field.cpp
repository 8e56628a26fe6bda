#include "mswl/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "mswl/error.hpp"

namespace mswl {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

WaveState WaveState::zero(const Grid& g, double t) {
    return WaveState{g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0), t};
}

double WaveState::energy_norm(Boundary b) const {
    return std::sqrt(grid.gradient_energy(u, b) + grid.inner(ut, ut));
}

SpacetimeField::SpacetimeField(Grid grid, double t0, double dt) : grid_(std::move(grid)), t0_(t0), dt_(dt) {
    if (!(dt != 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::invalid_argument, "time step must be nonzero");
}

void SpacetimeField::push(double t, std::span<const double> u, std::span<const double> ut) {
    if (u.size() != grid_.size() || ut.size() != grid_.size())
        throw Error(ErrorKind::invalid_argument, "sample size does not match grid");
    const double expected = t0_ + dt_ * static_cast<double>(times_.size());
    if (std::abs(t - expected) > 1e-6 * std::abs(dt_))
        throw Error(ErrorKind::invalid_argument, "non-uniform time sample");
    times_.push_back(expected);
    u_.insert(u_.end(), u.begin(), u.end());
    ut_.insert(ut_.end(), ut.begin(), ut.end());
}

std::span<const double> SpacetimeField::u(std::size_t k) const {
    return {u_.data() + k * grid_.size(), grid_.size()};
}
std::span<const double> SpacetimeField::ut(std::size_t k) const {
    return {ut_.data() + k * grid_.size(), grid_.size()};
}
std::span<double> SpacetimeField::u_mut(std::size_t k) { return {u_.data() + k * grid_.size(), grid_.size()}; }
std::span<double> SpacetimeField::ut_mut(std::size_t k) { return {ut_.data() + k * grid_.size(), grid_.size()}; }

WaveState SpacetimeField::state(std::size_t k) const {
    auto a = u(k), b = ut(k);
    return WaveState{grid_, {a.begin(), a.end()}, {b.begin(), b.end()}, times_[k]};
}

bool SpacetimeField::covers_time(double t) const {
    if (times_.empty()) return false;
    const double a = std::min(times_.front(), times_.back());
    const double b = std::max(times_.front(), times_.back());
    const double tol = 1e-9 * std::abs(dt_);
    return t >= a - tol && t <= b + tol;
}

double SpacetimeField::interpolate_impl(const std::vector<double>& data, const Point3& g, double t) const {
    const std::size_t nt = times_.size();
    if (nt == 0 || !covers_time(t)) return 0.0;
    const std::size_t n = grid_.size();
    auto at = [&](std::size_t k) { return grid_.interpolate({data.data() + k * n, n}, g); };
    if (nt == 1) return at(0);
    const double q = (t - t0_) / dt_;
    if (nt < 4) {
        const auto k = static_cast<std::size_t>(std::clamp(std::floor(q), 0.0, static_cast<double>(nt - 2)));
        const double s = q - static_cast<double>(k);
        return (1.0 - s) * at(k) + s * at(k + 1);
    }
    long k0 = static_cast<long>(std::floor(q)) - 1;
    k0 = std::clamp(k0, 0L, static_cast<long>(nt) - 4);
    const auto w = cubic_weights(q - static_cast<double>(k0 + 1));
    double acc = 0.0;
    for (int a = 0; a < 4; ++a)
        if (w[a] != 0.0) acc += w[a] * at(static_cast<std::size_t>(k0 + a));
    return acc;
}

double SpacetimeField::interpolate(const Point3& g, double t) const { return interpolate_impl(u_, g, t); }
double SpacetimeField::interpolate_ut(const Point3& g, double t) const { return interpolate_impl(ut_, g, t); }

SpacetimeField SpacetimeField::window(double t_lo, double t_hi) const {
    SpacetimeField out;
    out.grid_ = grid_;
    out.dt_ = dt_;
    bool first = true;
    const double tol = 1e-9 * std::abs(dt_);
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (times_[k] < t_lo - tol || times_[k] > t_hi + tol) continue;
        if (first) {
            out.t0_ = times_[k];
            first = false;
        }
        out.push(times_[k], u(k), ut(k));
    }
    return out;
}

SpacetimeField SpacetimeField::scaled(double factor) const {
    SpacetimeField out = *this;
    for (double& x : out.u_) x *= factor;
    for (double& x : out.ut_) x *= factor;
    return out;
}

SpacetimeField SpacetimeField::difference(const SpacetimeField& other) const {
    if (other.u_.size() != u_.size()) throw Error(ErrorKind::invalid_argument, "field shapes differ");
    SpacetimeField out = *this;
    for (std::size_t i = 0; i < u_.size(); ++i) {
        out.u_[i] -= other.u_[i];
        out.ut_[i] -= other.ut_[i];
    }
    return out;
}

double SpacetimeField::energy_norm(std::size_t k) const {
    return std::sqrt(grid_.gradient_energy(u(k)) + grid_.inner(ut(k), ut(k)));
}

SpacetimeField sample_field(const Grid& grid, double t0, double dt, std::size_t n_times,
                            const std::function<double(const Point3&, double)>& u,
                            const std::function<double(const Point3&, double)>& ut) {
    SpacetimeField f(grid, t0, dt);
    std::vector<double> a(grid.size()), b(grid.size());
    for (std::size_t k = 0; k < n_times; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        for (std::size_t id = 0; id < grid.size(); ++id) {
            const Point3 x = grid.point(id);
            a[id] = u(x, t);
            b[id] = ut ? ut(x, t) : 0.0;
        }
        f.push(t, a, b);
    }
    return f;
}

namespace {
template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw Error(ErrorKind::io, "truncated snapshot");
    return v;
}
}  // namespace

void write_snapshot(const std::filesystem::path& path, const WaveState& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path.string());
    os.write("MSWL", 4);
    put(os, snapshot_version);
    put(os, static_cast<std::uint32_t>(s.grid.layout()));
    for (int d = 0; d < 3; ++d) put(os, static_cast<std::uint64_t>(s.grid.n(d)));
    for (int d = 0; d < 3; ++d) put(os, s.grid.spacing(d));
    put(os, s.t);
    os.write(reinterpret_cast<const char*>(s.u.data()), static_cast<std::streamsize>(s.u.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(s.ut.data()), static_cast<std::streamsize>(s.ut.size() * sizeof(double)));
    if (!os) throw Error(ErrorKind::io, "write failed for " + path.string());
}

WaveState read_snapshot(const std::filesystem::path& path, const Point3& origin) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "MSWL", 4) != 0) throw Error(ErrorKind::io, "bad snapshot magic");
    if (get<std::uint32_t>(is) != snapshot_version) throw Error(ErrorKind::io, "unsupported snapshot version");
    GridSpec spec;
    const auto tag = get<std::uint32_t>(is);
    if (tag != 1 && tag != 2) throw Error(ErrorKind::io, "bad layout tag");
    spec.layout = static_cast<Layout>(tag);
    for (int d = 0; d < 3; ++d) spec.n[d] = get<std::uint64_t>(is);
    for (int d = 0; d < 3; ++d) spec.h[d] = get<double>(is);
    spec.lo = origin;
    WaveState s = WaveState::zero(Grid(spec), get<double>(is));
    is.read(reinterpret_cast<char*>(s.u.data()), static_cast<std::streamsize>(s.u.size() * sizeof(double)));
    is.read(reinterpret_cast<char*>(s.ut.data()), static_cast<std::streamsize>(s.ut.size() * sizeof(double)));
    if (!is) throw Error(ErrorKind::io, "truncated snapshot payload");
    return s;
}

}  // namespace mswl

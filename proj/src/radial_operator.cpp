#include "mswl/radial_operator.hpp"

#include <algorithm>
#include <cmath>

#include "mswl/error.hpp"

namespace mswl {

std::vector<double> Tridiagonal::apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += lower[i - 1] * x[i - 1];
        if (i + 1 < n) s += upper[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

Tridiagonal radial_hamiltonian(const std::function<double(double)>& q, int ell, double h, std::size_t n) {
    if (n < 2 || !(h > 0.0)) throw Error(ErrorKind::invalid_argument, "radial operator needs n >= 2 and h > 0");
    Tridiagonal a;
    a.diag.resize(n);
    a.lower.assign(n - 1, -1.0 / (h * h));
    a.upper.assign(n - 1, -1.0 / (h * h));
    const double centrifugal = static_cast<double>(ell * (ell + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const double r = h * static_cast<double>(i + 1);
        a.diag[i] = 2.0 / (h * h) + centrifugal / (r * r) + q(r);
    }
    return a;
}

std::size_t count_below(const Tridiagonal& a, double x) {
    // Negative pivots of the LDL^T factorization of A - x I.
    std::size_t count = 0;
    double d = a.diag[0] - x;
    if (d < 0.0) ++count;
    for (std::size_t i = 1; i < a.size(); ++i) {
        const double off = a.lower[i - 1] * a.upper[i - 1];
        if (d == 0.0) d = 1e-300;
        d = (a.diag[i] - x) - off / d;
        if (d < 0.0) ++count;
    }
    return count;
}

std::vector<double> eigenvalues_below(const Tridiagonal& a, double x, double tol) {
    const std::size_t k = count_below(a, x);
    std::vector<double> out;
    if (k == 0) return out;
    // Gershgorin lower bound.
    double lo = a.diag[0];
    for (std::size_t i = 0; i < a.size(); ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(a.lower[i - 1]);
        if (i + 1 < a.size()) radius += std::abs(a.upper[i]);
        lo = std::min(lo, a.diag[i] - radius);
    }
    for (std::size_t m = 0; m < k; ++m) {
        double l = lo, r = x;
        // m-th eigenvalue: smallest y with count_below(y) > m
        while (r - l > tol * std::max(1.0, std::abs(l) + std::abs(r))) {
            const double mid = 0.5 * (l + r);
            if (count_below(a, mid) > m) r = mid;
            else l = mid;
        }
        out.push_back(0.5 * (l + r));
    }
    return out;
}

std::vector<double> solve_shifted(const Tridiagonal& a, double shift, const std::vector<double>& b) {
    const std::size_t n = a.size();
    std::vector<double> c(n), d(n), y(n);
    double denom = a.diag[0] - shift;
    if (denom == 0.0) denom = 1e-300;
    c[0] = n > 1 ? a.upper[0] / denom : 0.0;
    d[0] = b[0] / denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = (a.diag[i] - shift) - a.lower[i - 1] * c[i - 1];
        if (denom == 0.0) denom = 1e-300;
        c[i] = i + 1 < n ? a.upper[i] / denom : 0.0;
        d[i] = (b[i] - a.lower[i - 1] * d[i - 1]) / denom;
    }
    y[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) y[i] = d[i] - c[i] * y[i + 1];
    return y;
}

std::vector<double> inverse_iteration(const Tridiagonal& a, double eigenvalue, int iterations) {
    const std::size_t n = a.size();
    std::vector<double> x(n, 1.0);
    const double shift = eigenvalue + 1e-10 * std::max(1.0, std::abs(eigenvalue));
    for (int it = 0; it < iterations; ++it) {
        x = solve_shifted(a, shift, x);
        double norm = 0.0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorKind::unresolved, "inverse iteration failed");
        for (double& v : x) v /= norm;
    }
    const auto it = std::max_element(x.begin(), x.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
    if (*it < 0.0)
        for (double& v : x) v = -v;
    return x;
}

}  // namespace mswl

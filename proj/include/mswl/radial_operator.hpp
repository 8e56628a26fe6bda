#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mswl {

/// Symmetric-by-construction tridiagonal matrix; lower[i] = A(i+1, i),
/// upper[i] = A(i, i+1).
struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t size() const { return diag.size(); }
    std::vector<double> apply(const std::vector<double>& x) const;
};

/// Uniform-grid discretization of -chi'' + (l(l+1)/r^2 + q(r)) chi for
/// chi = r*phi on r_i = i*h, i = 1..n, with chi(0) = chi((n+1)h) = 0.
Tridiagonal radial_hamiltonian(const std::function<double(double)>& q, int ell, double h, std::size_t n);

/// Sturm count: number of eigenvalues strictly below x.
std::size_t count_below(const Tridiagonal& a, double x);

/// All eigenvalues below x, ascending, by bisection to absolute tolerance tol.
std::vector<double> eigenvalues_below(const Tridiagonal& a, double x, double tol = 1e-12);

/// Solves (A - shift) y = b by the Thomas algorithm.
std::vector<double> solve_shifted(const Tridiagonal& a, double shift, const std::vector<double>& b);

/// Eigenvector for an isolated eigenvalue estimate by inverse iteration,
/// normalized to unit Euclidean length with a positive first extremum.
std::vector<double> inverse_iteration(const Tridiagonal& a, double eigenvalue, int iterations = 6);

}  // namespace mswl

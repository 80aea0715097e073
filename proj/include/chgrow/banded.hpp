#pragma once

#include <span>
#include <vector>

namespace chgrow {

/// LU factorization with partial pivoting of an n x n band matrix with
/// `kl` subdiagonals and `ku` superdiagonals. Storage follows the usual
/// band layout with room for pivoting fill-in (kl extra superdiagonals).
class BandedLU {
public:
    BandedLU(int n, int kl, int ku);

    /// Entry accessors valid for |i - j| within the band, 0-based.
    double& at(int i, int j);
    double at(int i, int j) const;

    void zero();

    /// Factorizes in place. Throws LinearSolveError on a zero pivot column.
    void factorize();

    /// Solves A x = b using the factorization; b is overwritten by x.
    void solve(std::span<double> b) const;

    int size() const { return n_; }

private:
    int n_, kl_, ku_, stride_;
    bool factored_ = false;
    std::vector<double> a_;
    std::vector<int> piv_;
};

/// Symmetric positive definite tridiagonal solver for the matrix
/// tridiag(-1, 2, -1) (the Dirichlet second-difference stencil scaled
/// by h^2 on the right-hand side). Pivots are precomputed once.
class DirichletTridiagonal {
public:
    explicit DirichletTridiagonal(int n);

    /// Solves tridiag(-1,2,-1) w = rhs.
    void solve(std::span<const double> rhs, std::span<double> w) const;

    int size() const { return n_; }

private:
    int n_;
    std::vector<double> diag_;  // elimination pivots
};

}  // namespace chgrow

#pragma once

/// Uniform 1D grid on (0,1) with the endpoint conditions u = 0 and
/// D^2 u = 0, second-order finite-difference operators D..D^4, the inverse
/// negative Laplacian with homogeneous Dirichlet data, and the norms used
/// by the estimate monitors.
///
/// Fields carry values at the n interior nodes x_i = i*h, h = 1/(n+1).
/// Pinned fields extend past the boundary by odd reflection, which encodes
/// both endpoint conditions to second order and makes the five-point
/// fourth-difference stencil the exact square of the Dirichlet Laplacian.

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "chgrow/banded.hpp"

namespace chgrow {

enum class BcClass { pinned, free };

enum class NormKind { L2, L4, L8, Linf, HminusOne };

class Grid1D {
public:
    /// Requires n_interior >= 7 (stencil support for the one-sided
    /// third-derivative boundary extraction).
    explicit Grid1D(int n_interior);

    int n() const { return n_; }
    double spacing() const { return h_; }
    /// Node position for value index i in [0, n): x = (i+1)*h.
    double node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Solves (-D^2) w = f with w(0) = w(1) = 0 via the cached
    /// tridiagonal factorization of the three-point stencil.
    void solve_neg_laplacian(std::span<const double> f, std::span<double> w) const;

private:
    int n_;
    double h_;
    std::vector<double> nodes_;
    DirichletTridiagonal tri_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

/// Builds a grid with spacing h = 1/(n_interior + 1). Rejects n_interior < 7.
GridPtr make_grid(int n_interior);

struct Field {
    GridPtr grid;
    std::vector<double> values;
    BcClass bc = BcClass::pinned;

    static Field zeros(GridPtr g, BcClass bc = BcClass::pinned);

    template <class F>
    static Field sample(GridPtr g, F f, BcClass bc = BcClass::pinned) {
        Field out = zeros(std::move(g), bc);
        for (int i = 0; i < out.grid->n(); ++i)
            out.values[static_cast<size_t>(i)] = f(out.grid->node(i));
        return out;
    }

    int n() const { return grid->n(); }
    double h() const { return grid->spacing(); }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
};

bool all_finite(const Field& f);
bool same_grid(const Field& a, const Field& b);

/// Second-order derivative of order 1..4 at every interior node. Pinned
/// fields use odd-reflection ghosts; free fields switch to shifted
/// stencils of the same order near the edges. Result is a free field.
Field apply_derivative(const Field& f, int order);

/// w = (-D^2)^{-1} f with w(0) = w(1) = 0; result is pinned.
Field apply_inverse_neg_laplacian(const Field& f);

/// Rectangle-rule pairing h * sum_i f_i g_i.
double inner_product(const Field& f, const Field& g);

double norm(const Field& f, NormKind kind);

/// One-sided five-point extraction of D^3 u at x = 0 and x = 1 for a
/// pinned field (boundary values enter as zero). O(h^2) accurate.
std::pair<double, double> boundary_third_derivative(const Field& u);

/// Finite-difference weights for the m-th derivative at z from the given
/// nodes (Fornberg recursion). Exposed for the shifted-stencil tables and
/// for oracle checks.
std::vector<double> fd_weights(double z, std::span<const double> xs, int m);

namespace detail {

/// Applies the three-point second difference treating w as extended by
/// zero at both endpoints; this is exactly -A with A the Dirichlet
/// Laplacian matrix, so discrete summation telescopes to boundary terms.
void second_diff_zero_ext(std::span<const double> w, double h, std::span<double> out);

/// out = A w with A = tridiag(-1,2,-1)/h^2 (Dirichlet), i.e. -D^2 w.
void neg_laplacian_matvec(std::span<const double> w, double h, std::span<double> out);

}  // namespace detail

}  // namespace chgrow

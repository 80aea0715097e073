#include "chgrow/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "chgrow/errors.hpp"

namespace chgrow {

Grid1D::Grid1D(int n_interior)
    : n_(n_interior),
      h_(1.0 / (n_interior + 1)),
      nodes_(static_cast<size_t>(std::max(n_interior, 1))),
      tri_(std::max(n_interior, 1)) {
    if (n_interior < 7)
        throw SizingError("Grid1D: n_interior must be >= 7");
    for (int i = 0; i < n_; ++i) nodes_[static_cast<size_t>(i)] = (i + 1) * h_;
}

void Grid1D::solve_neg_laplacian(std::span<const double> f, std::span<double> w) const {
    // (-D^2) w = f  <=>  tridiag(-1,2,-1) w = h^2 f.
    std::vector<double> rhs(f.size());
    const double h2 = h_ * h_;
    for (size_t i = 0; i < f.size(); ++i) rhs[i] = h2 * f[i];
    tri_.solve(rhs, w);
}

GridPtr make_grid(int n_interior) { return std::make_shared<Grid1D>(n_interior); }

Field Field::zeros(GridPtr g, BcClass bc) {
    Field out;
    out.grid = std::move(g);
    out.values.assign(static_cast<size_t>(out.grid->n()), 0.0);
    out.bc = bc;
    return out;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

bool same_grid(const Field& a, const Field& b) {
    return a.grid == b.grid || (a.grid && b.grid && a.grid->n() == b.grid->n());
}

std::vector<double> fd_weights(double z, std::span<const double> xs, int m) {
    const int nd = static_cast<int>(xs.size());
    if (nd < m + 1) throw SizingError("fd_weights: not enough nodes for derivative order");
    // Fornberg recursion for weights of derivatives 0..m at z.
    std::vector<double> c(static_cast<size_t>(nd) * (m + 1), 0.0);
    auto C = [&](int i, int k) -> double& { return c[static_cast<size_t>(i) * (m + 1) + k]; };
    double c1 = 1.0;
    double c4 = xs[0] - z;
    C(0, 0) = 1.0;
    for (int i = 1; i < nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[static_cast<size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
                C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k)
                C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
            C(j, 0) = c4 * C(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<size_t>(nd));
    for (int i = 0; i < nd; ++i) w[static_cast<size_t>(i)] = C(i, m);
    return w;
}

namespace {

struct EdgeStencils {
    // weights[j] holds the unit-spacing stencil applied at value index j
    // (from the left edge) over points 0..p-1; mirrored on the right.
    std::vector<std::vector<double>> weights;
    int points = 0;
};

// Shifted stencils of order >= 2 for free fields near an edge. The m-th
// derivative from p points has accuracy p - m.
EdgeStencils make_edge_stencils(int m) {
    static const std::array<int, 5> points_for = {0, 3, 4, 5, 6};
    const int p = points_for[static_cast<size_t>(m)];
    const int half = (m <= 2) ? 1 : 2;
    EdgeStencils es;
    es.points = p;
    std::vector<double> xs(static_cast<size_t>(p));
    std::iota(xs.begin(), xs.end(), 0.0);
    for (int j = 0; j < half; ++j)
        es.weights.push_back(fd_weights(static_cast<double>(j), xs, m));
    return es;
}

const EdgeStencils& edge_stencils(int m) {
    static const std::array<EdgeStencils, 5> tables = {
        EdgeStencils{}, make_edge_stencils(1), make_edge_stencils(2),
        make_edge_stencils(3), make_edge_stencils(4)};
    return tables[static_cast<size_t>(m)];
}

// Centered stencils at unit spacing; scale by h^-m.
constexpr std::array<double, 3> kD1 = {-0.5, 0.0, 0.5};
constexpr std::array<double, 3> kD2 = {1.0, -2.0, 1.0};
constexpr std::array<double, 5> kD3 = {-0.5, 1.0, 0.0, -1.0, 0.5};
constexpr std::array<double, 5> kD4 = {1.0, -4.0, 6.0, -4.0, 1.0};

template <size_t W>
void centered_pass(std::span<const double> ext, const std::array<double, W>& w,
                   double scale, std::span<double> out) {
    const int n = static_cast<int>(out.size());
    const int off = static_cast<int>(W) / 2;
    for (int i = 0; i < n; ++i) {
        // ext index of node i is i + 2 (two extension cells on the left).
        double s = 0.0;
        for (int k = 0; k < static_cast<int>(W); ++k)
            s += w[static_cast<size_t>(k)] * ext[static_cast<size_t>(i + 2 - off + k)];
        out[static_cast<size_t>(i)] = s * scale;
    }
}

}  // namespace

Field apply_derivative(const Field& f, int order) {
    if (order < 1 || order > 4) throw SizingError("apply_derivative: order must be 1..4");
    const int n = f.n();
    const double h = f.h();
    Field out = Field::zeros(f.grid, BcClass::free);
    const double scale = 1.0 / std::pow(h, order);

    if (f.bc == BcClass::pinned) {
        // Extended samples: [-u(h), 0, u, 0, -u(1-h)] so every node sees a
        // centered stencil.
        std::vector<double> ext(static_cast<size_t>(n) + 4);
        ext[0] = -f.values[0];
        ext[1] = 0.0;
        std::copy(f.values.begin(), f.values.end(), ext.begin() + 2);
        ext[static_cast<size_t>(n) + 2] = 0.0;
        ext[static_cast<size_t>(n) + 3] = -f.values[static_cast<size_t>(n - 1)];
        switch (order) {
            case 1: centered_pass(ext, kD1, scale, out.values); break;
            case 2: centered_pass(ext, kD2, scale, out.values); break;
            case 3: centered_pass(ext, kD3, scale, out.values); break;
            case 4: centered_pass(ext, kD4, scale, out.values); break;
        }
        return out;
    }

    // Free field: centered stencils in the interior, shifted stencils of
    // the same order at the edges.
    const EdgeStencils& es = edge_stencils(order);
    const int half = (order <= 2) ? 1 : 2;
    if (n < es.points) throw SizingError("apply_derivative: field too short for edge stencils");
    auto stencil_at = [&](std::span<const double> w, int first) {
        double s = 0.0;
        for (int k = 0; k < static_cast<int>(w.size()); ++k)
            s += w[static_cast<size_t>(k)] * f.values[static_cast<size_t>(first + k)];
        return s * scale;
    };
    for (int j = 0; j < half; ++j) {
        out.values[static_cast<size_t>(j)] = stencil_at(es.weights[static_cast<size_t>(j)], 0);
        // Mirror: odd orders flip sign under x -> -x.
        std::vector<double> rw(es.weights[static_cast<size_t>(j)].rbegin(),
                               es.weights[static_cast<size_t>(j)].rend());
        const double sgn = (order % 2 == 0) ? 1.0 : -1.0;
        double s = 0.0;
        for (int k = 0; k < static_cast<int>(rw.size()); ++k)
            s += rw[static_cast<size_t>(k)] * f.values[static_cast<size_t>(n - es.points + k)];
        out.values[static_cast<size_t>(n - 1 - j)] = sgn * s * scale;
    }
    const int w = 2 * half + 1;
    for (int i = half; i < n - half; ++i) {
        double s = 0.0;
        const double* cw = (order == 1)   ? kD1.data()
                           : (order == 2) ? kD2.data()
                           : (order == 3) ? kD3.data()
                                          : kD4.data();
        for (int k = 0; k < w; ++k)
            s += cw[k] * f.values[static_cast<size_t>(i - half + k)];
        out.values[static_cast<size_t>(i)] = s * scale;
    }
    return out;
}

Field apply_inverse_neg_laplacian(const Field& f) {
    Field out = Field::zeros(f.grid, BcClass::pinned);
    f.grid->solve_neg_laplacian(f.values, out.values);
    return out;
}

double inner_product(const Field& f, const Field& g) {
    if (!same_grid(f, g)) throw GridMismatchError("inner_product: fields on different grids");
    double s = 0.0;
    for (size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
    return f.h() * s;
}

double norm(const Field& f, NormKind kind) {
    const double h = f.h();
    switch (kind) {
        case NormKind::L2: {
            double s = 0.0;
            for (double v : f.values) s += v * v;
            return std::sqrt(h * s);
        }
        case NormKind::L4: {
            double s = 0.0;
            for (double v : f.values) { const double v2 = v * v; s += v2 * v2; }
            return std::pow(h * s, 0.25);
        }
        case NormKind::L8: {
            double s = 0.0;
            for (double v : f.values) { const double v2 = v * v; const double v4 = v2 * v2; s += v4 * v4; }
            return std::pow(h * s, 0.125);
        }
        case NormKind::Linf: {
            double m = 0.0;
            for (double v : f.values) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::HminusOne: {
            Field w = apply_inverse_neg_laplacian(f);
            return std::sqrt(std::max(0.0, inner_product(f, w)));
        }
    }
    return 0.0;
}

std::pair<double, double> boundary_third_derivative(const Field& u) {
    const int n = u.n();
    const double h = u.h();
    const double h3 = h * h * h;
    // Five-point one-sided stencil anchored at the boundary node, whose
    // value is zero for a pinned field: weights (-5/2, 9, -12, 7, -3/2).
    const double left =
        (9.0 * u[0] - 12.0 * u[1] + 7.0 * u[2] - 1.5 * u[3]) / h3;
    const double right =
        -(9.0 * u[n - 1] - 12.0 * u[n - 2] + 7.0 * u[n - 3] - 1.5 * u[n - 4]) / h3;
    return {left, right};
}

namespace detail {

void second_diff_zero_ext(std::span<const double> w, double h, std::span<double> out) {
    const int n = static_cast<int>(w.size());
    const double ih2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        const double wm = (i > 0) ? w[static_cast<size_t>(i - 1)] : 0.0;
        const double wp = (i < n - 1) ? w[static_cast<size_t>(i + 1)] : 0.0;
        out[static_cast<size_t>(i)] = (wm - 2.0 * w[static_cast<size_t>(i)] + wp) * ih2;
    }
}

void neg_laplacian_matvec(std::span<const double> w, double h, std::span<double> out) {
    second_diff_zero_ext(w, h, out);
    for (double& v : out) v = -v;
}

}  // namespace detail

}  // namespace chgrow

#pragma once

// Shared helpers for the test suites: dense linear-algebra oracles kept
// independent of the banded solve path, quadrature oracles, and the B1
// benchmark configuration used across several suites.

#include <cmath>
#include <random>
#include <vector>

#include "chgrow/config.hpp"
#include "chgrow/estimates.hpp"

namespace testsupport {

// Dense Gaussian elimination with partial pivoting; the oracle against
// which the tridiagonal and banded solvers are checked.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const size_t n = b.size();
    for (size_t k = 0; k < n; ++k) {
        size_t piv = k;
        for (size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (size_t i = k + 1; i < n; ++i) {
            const double m = a[i][k] / a[k][k];
            for (size_t j = k; j < n; ++j) a[i][j] -= m * a[k][j];
            b[i] -= m * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

// Dirichlet negative-Laplacian matrix tridiag(-1,2,-1)/h^2 as dense rows.
inline std::vector<std::vector<double>> dense_neg_laplacian(int n, double h) {
    std::vector<std::vector<double>> a(static_cast<size_t>(n),
                                       std::vector<double>(static_cast<size_t>(n), 0.0));
    const double ih2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        a[i][i] = 2.0 * ih2;
        if (i > 0) a[i][i - 1] = -ih2;
        if (i + 1 < n) a[i][i + 1] = -ih2;
    }
    return a;
}

inline std::vector<double> random_values(int n, unsigned seed, double lo = -1.0,
                                         double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = dist(rng);
    return v;
}

// Composite Simpson quadrature oracle.
template <class F>
double simpson(F f, double a, double b, int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Discrete eigenvalue of the three-point Dirichlet Laplacian for mode k.
inline double discrete_eigenvalue(int k, double h) {
    return 2.0 / (h * h) * (1.0 - std::cos(k * std::numbers::pi * h));
}

// Benchmark B1: u0 = 0.5 sin(pi x), rational bump base 2 gain 1, plain
// variant, T = 1, dt = 1e-5.
inline chgrow::RunConfig b1_config(int n, double dt = 1e-5, double t_final = 1.0) {
    chgrow::RunConfig cfg;
    cfg.n_interior = n;
    cfg.scheme.scheme = chgrow::SchemeKind::imex_stabilized;
    cfg.scheme.dt = dt;
    cfg.scheme.stabilization_S = 3.0;
    cfg.cadence = 100;
    cfg.t_final = t_final;
    cfg.coeff = chgrow::CoefficientSpec::rational_bump(2.0, 1.0);
    cfg.variant = chgrow::NonlinearityVariant::plain;
    cfg.initial.preset = chgrow::InitialConditionSpec::Preset::scaled_sine;
    cfg.initial.amplitude = 0.5;
    cfg.initial.mode = 1;
    return cfg;
}

inline chgrow::Trajectory run_b1(int n, double dt = 1e-5, double t_final = 1.0,
                                 int cadence = 100,
                                 chgrow::SchemeKind scheme = chgrow::SchemeKind::imex_stabilized) {
    chgrow::RunConfig cfg = b1_config(n, dt, t_final);
    cfg.scheme.scheme = scheme;
    cfg.cadence = cadence;
    auto grid = chgrow::make_grid(cfg.n_interior);
    chgrow::Field u0 = chgrow::build_initial_condition(cfg.initial, grid, 0);
    chgrow::Integrator integ(grid, cfg.scheme, cfg.coeff, cfg.variant);
    return integ.run(u0, cfg.t_final, cfg.cadence);
}

}  // namespace testsupport

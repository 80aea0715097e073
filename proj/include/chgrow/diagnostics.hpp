#pragma once

/// Per-state computation of every monitored quantity: norms, gradient
/// norms, coefficient-weighted dissipation integrals, the quartic and
/// antiderivative energies, the dual pairing (g(u), Nu), the discrete
/// time-derivative dual norm, and boundary fluxes.

#include <optional>
#include <utility>

#include "chgrow/model.hpp"

namespace chgrow {

struct State {
    double t = 0.0;
    Field u;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double norm_L2 = 0.0, norm_L4 = 0.0, norm_L8 = 0.0, norm_Linf = 0.0, norm_Hm1 = 0.0;
    double grad_L2 = 0.0, grad_L4 = 0.0;
    double dissipation_a_D1 = 0.0;  // integral a(u) |Du|^2
    double dissipation_a_D2 = 0.0;  // integral a(u) |D^2u|^2
    double dissipation_a_D3 = 0.0;  // integral a(u) |D^3u|^2
    double energy_quartic = 0.0;    // (1/4) ||u||_L4^4
    double energy_A = 0.0;          // integral A(u)
    double lyapunov = 0.0;          // energy_quartic - energy_A
    double pairing_g_Nu = 0.0;      // (g(u), Nu)
    double ut_Hm1_sq = 0.0;         // ||(u - u_prev)/dt||_{H^-1}^2, 0 without prev
    double flux_left = 0.0, flux_right = 0.0;
};

/// Computes all record fields for state s. When `prev` is present the
/// discrete time derivative uses the backward difference the scheme
/// produced; otherwise ut_Hm1_sq is flagged as zero.
DiagnosticsRecord record(const State& s, const State* prev, const CoefficientSpec& spec,
                         NonlinearityVariant variant);

/// max over node pairs of |u(x1)-u(x2)| / |x1-x2|^exponent. Pinned fields
/// include the endpoints with value zero; free fields use interior pairs.
double holder_modulus_space(const Field& u, double exponent);

/// Gagliardo-Nirenberg interpolation ratios
///   r_L8  = ||u||_L8 / (||D^3u||^{1/8} ||u||^{7/8} + ||u||)
///   r_DL4 = ||Du||_L4 / (||D^3u||^{5/12} ||u||^{7/12} + ||u||),
/// zero for the zero field.
std::pair<double, double> nirenberg_ratios(const Field& u);

}  // namespace chgrow

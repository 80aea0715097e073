#pragma once

/// Whole-trajectory checks: the dual-pairing energy identity residual,
/// the fitted Gronwall constant and its envelope margins, time-integrated
/// dissipation totals, Holder moduli in space and time, interpolation
/// ratios, and the per-step discrete mass balance.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chgrow/integrator.hpp"

namespace chgrow {

/// Residual series of the identity obtained by pairing the equation with
/// Nu: d/dt [1/2 ||u||_{H^-1}^2] + (f(u),u) + int (a + a'u)|Du|^2
/// + (g(u),Nu) = (forcing, Nu). The pairing sign follows from the
/// equation itself. Time derivatives are centered on the recorded
/// cadence with second-order one-sided ends. Requires >= 3 uniformly
/// spaced records (a trailing off-cadence record is dropped).
std::vector<double> energy_identity_residual(const Trajectory& traj,
                                             const ForcingFn& forcing = {});

struct GronwallFit {
    double fitted_c2 = 0.0;
    std::vector<double> margin;  // y(0) e^{2 c2 t} - y(t) per record
};

/// y(t) = ||u||_{H^-1}^2 + ||u||^2; fitted_c2 is the smallest nonnegative
/// constant for which the discrete differential inequality
/// dy/dt + 2 [dissipations + 1/2 ||u||_L4^4 + 3 ||u Du||^2] <= 2 c2 y
/// holds at every record.
GronwallFit gronwall_fit(const Trajectory& traj);

struct IntegratedDissipations {
    double a_grad_sq_plus_curv_sq = 0.0;  // int int a(u)(|Du|^2 + |D^2u|^2)
    double ut_hm1_sq = 0.0;               // int ||u_t||_{H^-1}^2
    double a_third_sq = 0.0;              // int int a(u)|D^3u|^2
    double l4_quartic = 0.0;              // int ||u||_L4^4
};

/// Trapezoid-in-time totals over the recorded cadence.
IntegratedDissipations integrated_dissipations(const Trajectory& traj);

/// max over nodes and recorded time pairs of
/// |u(x,t1) - u(x,t2)| / |t1 - t2|^exponent; the pair set is subsampled
/// deterministically to at most `max_pairs`.
double holder_modulus_time(const Trajectory& traj, double exponent,
                           long max_pairs = 1000000);

struct MassBalanceSeries {
    std::vector<double> residual;  // per step
    std::vector<double> scale;     // max(1, sum of term magnitudes)
    double max_abs_residual = 0.0;
    double max_relative = 0.0;  // max residual/scale
};

/// Discrete shadow of integrating the equation over the domain:
/// h*sum(u^{m+1} - u^m) + dt*[h*sum g + Phi_R - Phi_L] per step, with the
/// fluxes reconstructed at the exact time levels the scheme used so the
/// outer second difference telescopes to round-off. Requires the
/// trajectory to be recorded at every step (cadence 1).
MassBalanceSeries mass_balance_residuals(const Trajectory& traj);

struct EstimateReport {
    std::map<std::string, double> identity_residuals;  // name -> max abs
    double fitted_c2 = 0.0;
    double gronwall_margin_min = 0.0;
    double gronwall_y0 = 0.0;
    IntegratedDissipations integrated;
    double sup_linf = 0.0;      // ||u||_{L^inf(Q_T)} over records
    double sup_grad_l2 = 0.0;   // sup_t ||Du||
    double holder_space_modulus = 0.0;      // exponent 1/2, max over snapshots
    bool holder_space_bound_ok = true;      // modulus <= ||Du|| + 1e-6 per snapshot
    double holder_time_modulus = 0.0;       // exponent 1/8
    double nirenberg_r_l8_max = 0.0;
    double nirenberg_r_dl4_max = 0.0;
    double initial_mean = 0.0;
    std::string pairing_sign_convention = "derived_from_equation";
    bool trajectory_failed = false;
};

EstimateReport build_estimate_report(const Trajectory& traj);

}  // namespace chgrow

#pragma once

/// Manufactured-solution verification: a forcing term is added so the
/// decaying mode u_e = A e^{-lambda t} sin(k pi x) satisfies the forced
/// system, then spatial and temporal convergence orders are measured.
///
/// Two forcing tracks: the spatially-discrete track applies the discrete
/// operators to sampled u_e (so a run started on u_e incurs only temporal
/// error), and the symbolic track uses the closed-form source for the
/// constant-coefficient case (so spatial truncation is exposed).

#include <vector>

#include "chgrow/integrator.hpp"

namespace chgrow {

struct ManufacturedSolution {
    double amplitude = 0.5;
    double decay_rate = 1.0;  // lambda
    int mode = 1;             // k >= 1
};

/// u_e(., t) sampled on the grid (pinned; sin modes satisfy both endpoint
/// conditions exactly).
Field manufactured_state(const ManufacturedSolution& ms, const GridPtr& grid, double t);

/// Forcing with discrete spatial operators: the exact time derivative
/// -lambda u_e plus the discrete spatial operator applied to sampled u_e.
Field manufactured_forcing(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                           NonlinearityVariant variant, double t, const GridPtr& grid);

/// Closed-form forcing for a constant coefficient, using
/// sin^3 = (3 sin - sin 3.)/4 for the cubic term.
Field manufactured_forcing_symbolic(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                                    NonlinearityVariant variant, double t, const GridPtr& grid);

enum class StudyKind { spatial, temporal };
enum class ForcingTrack { discrete, symbolic };

struct Resolution {
    int n = 0;
    double dt = 0.0;
};

struct ConvergenceReport {
    StudyKind kind = StudyKind::spatial;
    NonlinearityVariant variant = NonlinearityVariant::plain;
    std::vector<Resolution> resolutions;
    std::vector<double> errors;  // ||u - u_e(., T)||_L2
    double fitted_order = 0.0;   // least-squares slope in log-log
    double fit_residual = 0.0;
    bool degenerate = false;     // all errors below round-off
    double t_final = 0.0;
};

/// Runs the forced problem from u_e(., 0) at each resolution and fits the
/// convergence order against h (spatial) or dt (temporal). Resolutions
/// run concurrently on up to `workers` threads (0 picks the hardware
/// count); results land in indexed slots so the fit is deterministic.
ConvergenceReport convergence_study(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                                    NonlinearityVariant variant, StudyKind kind,
                                    const std::vector<Resolution>& resolutions, double t_final,
                                    ForcingTrack track, const SchemeConfig& base_cfg,
                                    int workers = 1);

}  // namespace chgrow

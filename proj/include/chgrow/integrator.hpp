#pragma once

/// Time advancement. Two first-order schemes:
///
///  - imex_stabilized: the constant-coefficient surrogate S*D^4 is moved
///    implicit with S at least the declared upper coefficient bound; the
///    remaining terms stay explicit. One pentadiagonal solve per step
///    with the factorization cached per (grid, dt, S).
///
///  - linearized_implicit: the principal bracket is frozen at the current
///    state, a(u^m) D^2 u^{m+1} - [f(u^m) + f'(u^m)(u^{m+1} - u^m)],
///    and the outer divergence keeps the banded system in conservation
///    form; the quadratic reaction term stays explicit.
///
/// Both schemes advance the same spatially discrete system and keep the
/// discrete mass balance telescoping to round-off.

#include <functional>
#include <string>
#include <vector>

#include "chgrow/banded.hpp"
#include "chgrow/diagnostics.hpp"

namespace chgrow {

enum class SchemeKind { imex_stabilized, linearized_implicit };

struct SchemeConfig {
    SchemeKind scheme = SchemeKind::imex_stabilized;
    double dt = 1e-5;
    double stabilization_S = 0.0;  // must be >= declared M2
    int max_iters = 50;
    double nonlinear_tol = 1e-10;
};

/// Optional source term added to du/dt, evaluated at the explicit time level.
using ForcingFn = std::function<Field(double t, const GridPtr& grid)>;

struct Trajectory {
    std::vector<State> states;              // recorded at cadence, plus final
    std::vector<DiagnosticsRecord> records; // aligned with states
    SchemeConfig scheme;
    CoefficientSpec coeff;
    NonlinearityVariant variant = NonlinearityVariant::plain;
    int cadence = 100;
    double t_final = 0.0;
    bool failed = false;
    long failure_step = -1;
    double failure_time = 0.0;
    std::string failure_message;
    std::vector<std::string> warnings;
};

class Integrator {
public:
    Integrator(GridPtr grid, SchemeConfig cfg, CoefficientSpec spec, NonlinearityVariant variant,
               ForcingFn forcing = {});

    /// One step of the configured scheme. Throws NonFiniteError if the
    /// result leaves the finite range and LinearSolveError on a singular
    /// banded system.
    State step(const State& s) const;

    /// Advances from u0 until t >= t_final, recording states and
    /// diagnostics every `cadence` steps plus the final state. A
    /// non-finite step aborts and returns the partial trajectory flagged
    /// failed. Endpoint-incompatible initial data produces a warning.
    Trajectory run(const Field& u0, double t_final, int cadence) const;

    /// Step-doubling estimate: compares one dt step with two dt/2 steps
    /// and rescales dt by sqrt(target/estimate), clamped to [dt/4, 2 dt].
    double select_dt(const State& s, double target_local_error) const;

    const SchemeConfig& config() const { return cfg_; }

private:
    State step_imex(const State& s) const;
    State step_linearized(const State& s) const;

    GridPtr grid_;
    SchemeConfig cfg_;
    CoefficientSpec spec_;
    NonlinearityVariant variant_;
    ForcingFn forcing_;
    mutable BandedLU imex_lu_;  // factored once for imex_stabilized
    bool imex_ready_ = false;
};

/// Free-function forms used by callers that do not keep an integrator.
State step(const State& s, const SchemeConfig& cfg, const CoefficientSpec& spec,
           NonlinearityVariant variant);
Trajectory run(const Field& u0, double t_final, const SchemeConfig& cfg,
               const CoefficientSpec& spec, NonlinearityVariant variant, int cadence);

namespace detail {

/// Band assembly of A diag(c) A (bandwidth 2) and A diag(d) (bandwidth 1)
/// into `lu`, scaled and shifted: lu = I + dt * (A c A + A d). Pass an
/// empty `d` to skip the first-order-in-A term.
void assemble_implicit_operator(BandedLU& lu, double h, double dt,
                                std::span<const double> c, std::span<const double> d);

}  // namespace detail

}  // namespace chgrow

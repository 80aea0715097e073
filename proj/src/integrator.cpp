#include "chgrow/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "chgrow/errors.hpp"

namespace chgrow {

namespace detail {

void assemble_implicit_operator(BandedLU& lu, double h, double dt,
                                std::span<const double> c, std::span<const double> d) {
    const int n = static_cast<int>(c.size());
    const double ih4 = 1.0 / (h * h * h * h);
    const double ih2 = 1.0 / (h * h);
    lu.zero();
    auto cc = [&](int k) { return (k >= 0 && k < n) ? c[static_cast<size_t>(k)] : 0.0; };
    for (int i = 0; i < n; ++i) {
        if (i >= 2) lu.at(i, i - 2) += dt * cc(i - 1) * ih4;
        if (i >= 1) lu.at(i, i - 1) += dt * -2.0 * (cc(i - 1) + cc(i)) * ih4;
        lu.at(i, i) += 1.0 + dt * (cc(i - 1) + 4.0 * cc(i) + cc(i + 1)) * ih4;
        if (i + 1 < n) lu.at(i, i + 1) += dt * -2.0 * (cc(i) + cc(i + 1)) * ih4;
        if (i + 2 < n) lu.at(i, i + 2) += dt * cc(i + 1) * ih4;
        if (!d.empty()) {
            if (i >= 1) lu.at(i, i - 1) += dt * -d[static_cast<size_t>(i - 1)] * ih2;
            lu.at(i, i) += dt * 2.0 * d[static_cast<size_t>(i)] * ih2;
            if (i + 1 < n) lu.at(i, i + 1) += dt * -d[static_cast<size_t>(i + 1)] * ih2;
        }
    }
    lu.factorize();
}

}  // namespace detail

namespace {

void check_finite_or_throw(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NonFiniteError(what, -1, 0.0);
}

}  // namespace

Integrator::Integrator(GridPtr grid, SchemeConfig cfg, CoefficientSpec spec,
                       NonlinearityVariant variant, ForcingFn forcing)
    : grid_(std::move(grid)),
      cfg_(cfg),
      spec_(std::move(spec)),
      variant_(variant),
      forcing_(std::move(forcing)),
      imex_lu_(grid_->n(), 2, 2) {
    if (!(cfg_.dt > 0.0)) throw ConfigError("SchemeConfig: dt must be positive");
    if (cfg_.stabilization_S <= 0.0) cfg_.stabilization_S = spec_.declared_m2();
    if (cfg_.stabilization_S < spec_.declared_m2())
        throw ConfigError("SchemeConfig: stabilization_S must be >= declared M2");
    if (cfg_.scheme == SchemeKind::imex_stabilized) {
        const int n = grid_->n();
        std::vector<double> ones(static_cast<size_t>(n), cfg_.stabilization_S);
        detail::assemble_implicit_operator(imex_lu_, grid_->spacing(), cfg_.dt, ones, {});
        imex_ready_ = true;
    }
}

State Integrator::step_imex(const State& s) const {
    const int n = grid_->n();
    const double h = grid_->spacing();
    const double dt = cfg_.dt;
    const double S = cfg_.stabilization_S;
    Field rhs_field = rhs_divergence_form(s.u, spec_, variant_);
    // Explicit biharmonic compensation S * D^4 u = S * A(A u).
    std::vector<double> au(static_cast<size_t>(n)), a2u(static_cast<size_t>(n));
    detail::neg_laplacian_matvec(s.u.values, h, au);
    detail::neg_laplacian_matvec(au, h, a2u);
    std::vector<double> b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        b[static_cast<size_t>(i)] =
            s.u[i] + dt * (S * a2u[static_cast<size_t>(i)] + rhs_field[i]);
    if (forcing_) {
        Field fterm = forcing_(s.t, grid_);
        for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] += dt * fterm[i];
    }
    imex_lu_.solve(b);
    check_finite_or_throw(b, "imex_stabilized step produced non-finite values");
    State out;
    out.t = s.t + dt;
    out.u = Field::zeros(grid_, BcClass::pinned);
    out.u.values = std::move(b);
    return out;
}

State Integrator::step_linearized(const State& s) const {
    const int n = grid_->n();
    const double h = grid_->spacing();
    const double dt = cfg_.dt;
    FrozenCoefficients fc = frozen_coefficients(s.u, spec_, variant_);
    BandedLU lu(n, 2, 2);
    detail::assemble_implicit_operator(lu, h, dt, fc.a1.values, fc.a4.values);
    // rhs = u + dt * A (a4 u - f(u)) - dt g(u) [+ dt forcing]
    std::vector<double> w(static_cast<size_t>(n)), aw(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        w[static_cast<size_t>(i)] = fc.a4[i] * s.u[i] - nonlinearity_f(s.u[i], variant_);
    detail::neg_laplacian_matvec(w, h, aw);
    std::vector<double> b(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        b[static_cast<size_t>(i)] =
            s.u[i] + dt * (aw[static_cast<size_t>(i)] - nonlinearity_g(s.u[i], variant_));
    if (forcing_) {
        Field fterm = forcing_(s.t, grid_);
        for (int i = 0; i < n; ++i) b[static_cast<size_t>(i)] += dt * fterm[i];
    }
    lu.solve(b);
    check_finite_or_throw(b, "linearized_implicit step produced non-finite values");
    State out;
    out.t = s.t + dt;
    out.u = Field::zeros(grid_, BcClass::pinned);
    out.u.values = std::move(b);
    return out;
}

State Integrator::step(const State& s) const {
    if (!all_finite(s.u)) throw NonFiniteError("step input is non-finite", -1, s.t);
    return cfg_.scheme == SchemeKind::imex_stabilized ? step_imex(s) : step_linearized(s);
}

namespace {

// Quadratic extrapolation of the samples to an endpoint; used only to
// warn when supplied data looks incompatible with the pinned conditions.
void endpoint_compat_warnings(const Field& u0, std::vector<std::string>& warnings) {
    const int n = u0.n();
    const double h = u0.h();
    double umax = 0.0;
    for (double v : u0.values) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) return;
    const double value_tol = std::max(0.05 * umax, 50.0 * h * h * umax);
    const double left = 3.0 * u0[0] - 3.0 * u0[1] + u0[2];
    const double right = 3.0 * u0[n - 1] - 3.0 * u0[n - 2] + u0[n - 3];
    if (std::abs(left) > value_tol || std::abs(right) > value_tol)
        warnings.push_back("initial data does not extrapolate to zero at the endpoints");
    Field curv = apply_derivative(u0, 2);
    double cmax = 0.0;
    for (double v : curv.values) cmax = std::max(cmax, std::abs(v));
    if (cmax > 0.0) {
        Field curv_free = u0;
        curv_free.bc = BcClass::free;
        Field c2 = apply_derivative(curv_free, 2);
        const double cl = 3.0 * c2[0] - 3.0 * c2[1] + c2[2];
        const double cr = 3.0 * c2[n - 1] - 3.0 * c2[n - 2] + c2[n - 3];
        if (std::abs(cl) > 0.25 * cmax || std::abs(cr) > 0.25 * cmax)
            warnings.push_back("initial curvature does not extrapolate to zero at the endpoints");
    }
}

}  // namespace

Trajectory Integrator::run(const Field& u0, double t_final, int cadence) const {
    if (!(t_final > 0.0)) throw ConfigError("run: t_final must be positive");
    if (cadence < 1) throw ConfigError("run: cadence must be >= 1");
    if (u0.bc != BcClass::pinned) throw ConfigError("run: initial data must be pinned");
    if (!all_finite(u0)) throw NonFiniteError("run: initial data is non-finite", 0, 0.0);

    Trajectory traj;
    traj.scheme = cfg_;
    traj.coeff = spec_;
    traj.variant = variant_;
    traj.cadence = cadence;
    traj.t_final = t_final;
    endpoint_compat_warnings(u0, traj.warnings);

    const long steps = static_cast<long>(std::ceil(t_final / cfg_.dt - 1e-9));
    State cur{0.0, u0};
    State prev;
    bool have_prev = false;

    auto push_record = [&](const State& st, const State* pv) {
        traj.states.push_back(st);
        traj.records.push_back(record(st, pv, spec_, variant_));
    };
    push_record(cur, nullptr);

    for (long m = 0; m < steps; ++m) {
        State next;
        try {
            next = step(cur);
        } catch (const NonFiniteError& e) {
            traj.failed = true;
            traj.failure_step = m + 1;
            traj.failure_time = cur.t + cfg_.dt;
            traj.failure_message = e.what();
            // Keep the last finite state for post-mortem inspection.
            if (traj.states.empty() || traj.states.back().t != cur.t) push_record(cur, have_prev ? &prev : nullptr);
            return traj;
        }
        next.t = cfg_.dt * static_cast<double>(m + 1);
        prev = std::move(cur);
        have_prev = true;
        cur = std::move(next);
        const bool at_cadence = ((m + 1) % cadence) == 0;
        const bool at_end = (m + 1) == steps;
        if (at_cadence || at_end) push_record(cur, &prev);
    }
    return traj;
}

double Integrator::select_dt(const State& s, double target_local_error) const {
    if (!(target_local_error > 0.0))
        throw ConfigError("select_dt: target_local_error must be positive");
    const double dt = cfg_.dt;
    try {
        State one = step(s);
        SchemeConfig half_cfg = cfg_;
        half_cfg.dt = 0.5 * dt;
        Integrator half(grid_, half_cfg, spec_, variant_, forcing_);
        State mid = half.step(s);
        mid.t = s.t + 0.5 * dt;
        State two = half.step(mid);
        Field diff = Field::zeros(grid_, BcClass::free);
        for (int i = 0; i < grid_->n(); ++i) diff[i] = one.u[i] - two.u[i];
        const double est = norm(diff, NormKind::L2);
        if (est == 0.0) return 2.0 * dt;
        const double factor = std::clamp(std::sqrt(target_local_error / est), 0.25, 2.0);
        return factor * dt;
    } catch (const NumericalError&) {
        return dt;  // probes failed; keep the current step size
    }
}

State step(const State& s, const SchemeConfig& cfg, const CoefficientSpec& spec,
           NonlinearityVariant variant) {
    Integrator integ(s.u.grid, cfg, spec, variant);
    return integ.step(s);
}

Trajectory run(const Field& u0, double t_final, const SchemeConfig& cfg,
               const CoefficientSpec& spec, NonlinearityVariant variant, int cadence) {
    Integrator integ(u0.grid, cfg, spec, variant);
    return integ.run(u0, t_final, cadence);
}

}  // namespace chgrow

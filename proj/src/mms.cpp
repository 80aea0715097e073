#include "chgrow/mms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "chgrow/errors.hpp"

namespace chgrow {

Field manufactured_state(const ManufacturedSolution& ms, const GridPtr& grid, double t) {
    const double kpi = ms.mode * std::numbers::pi;
    const double amp = ms.amplitude * std::exp(-ms.decay_rate * t);
    return Field::sample(grid, [&](double x) { return amp * std::sin(kpi * x); });
}

Field manufactured_forcing(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                           NonlinearityVariant variant, double t, const GridPtr& grid) {
    Field ue = manufactured_state(ms, grid, t);
    Field rhs = rhs_divergence_form(ue, spec, variant);
    Field out = Field::zeros(grid, BcClass::free);
    for (int i = 0; i < grid->n(); ++i) out[i] = -ms.decay_rate * ue[i] - rhs[i];
    return out;
}

Field manufactured_forcing_symbolic(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                                    NonlinearityVariant variant, double t, const GridPtr& grid) {
    if (spec.family() != CoefficientFamily::constant &&
        spec.family() != CoefficientFamily::khain_sander)
        throw ConfigError("symbolic forcing is available for constant coefficients only");
    const double a = spec.eval(0.0);
    const double kpi = ms.mode * std::numbers::pi;
    const double kpi2 = kpi * kpi;
    const double amp = ms.amplitude * std::exp(-ms.decay_rate * t);
    const double amp3 = amp * amp * amp;
    const bool shifted = variant == NonlinearityVariant::shifted;
    Field out = Field::zeros(grid, BcClass::free);
    for (int i = 0; i < grid->n(); ++i) {
        const double x = grid->node(i);
        const double s1 = std::sin(kpi * x);
        const double s3 = std::sin(3.0 * kpi * x);
        const double ue = amp * s1;
        // d/dt u_e + D^2[a D^2 u_e - f(u_e)] + g(u_e), with
        // D^2 sin^3 = kpi^2 (-(3/4) sin + (9/4) sin 3.).
        double v = -ms.decay_rate * ue + a * kpi2 * kpi2 * ue;
        v -= amp3 * kpi2 * (-(3.0 / 4.0) * s1 + (9.0 / 4.0) * s3);
        if (shifted) v -= kpi2 * ue;  // -D^2[-u_e] from f = u^3 - u
        v += nonlinearity_g(ue, variant);
        out[i] = v;
    }
    return out;
}

ConvergenceReport convergence_study(const ManufacturedSolution& ms, const CoefficientSpec& spec,
                                    NonlinearityVariant variant, StudyKind kind,
                                    const std::vector<Resolution>& resolutions, double t_final,
                                    ForcingTrack track, const SchemeConfig& base_cfg,
                                    int workers) {
    if (resolutions.size() < 3)
        throw ConfigError("convergence_study: needs at least 3 resolutions");
    ConvergenceReport rep;
    rep.kind = kind;
    rep.variant = variant;
    rep.resolutions = resolutions;
    rep.t_final = t_final;
    rep.errors.assign(resolutions.size(), 0.0);

    auto run_one = [&](size_t idx) {
        const Resolution& res = resolutions[idx];
        GridPtr grid = make_grid(res.n);
        SchemeConfig cfg = base_cfg;
        cfg.dt = res.dt;
        ForcingFn forcing;
        if (track == ForcingTrack::discrete) {
            forcing = [ms, spec, variant](double t, const GridPtr& g) {
                return manufactured_forcing(ms, spec, variant, t, g);
            };
        } else {
            forcing = [ms, spec, variant](double t, const GridPtr& g) {
                return manufactured_forcing_symbolic(ms, spec, variant, t, g);
            };
        }
        Integrator integ(grid, cfg, spec, variant, forcing);
        Field u0 = manufactured_state(ms, grid, 0.0);
        Trajectory traj;
        try {
            traj = integ.run(u0, t_final, std::max(1, static_cast<int>(t_final / res.dt / 4)));
        } catch (const NumericalError& e) {
            throw NumericalError(std::string("convergence_study failed at n=") +
                                 std::to_string(res.n) + ", dt=" + std::to_string(res.dt) +
                                 ": " + e.what());
        }
        if (traj.failed)
            throw NumericalError("convergence_study: run diverged at n=" + std::to_string(res.n));
        const State& last = traj.states.back();
        Field exact = manufactured_state(ms, grid, last.t);
        Field diff = Field::zeros(grid, BcClass::free);
        for (int i = 0; i < grid->n(); ++i) diff[i] = last.u[i] - exact[i];
        rep.errors[idx] = norm(diff, NormKind::L2);
    };

    int w = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(1, std::min<int>(w, static_cast<int>(resolutions.size())));
    if (w == 1) {
        for (size_t i = 0; i < resolutions.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::exception_ptr> errs(resolutions.size());
        std::vector<std::thread> pool;
        for (int t = 0; t < w; ++t)
            pool.emplace_back([&]() {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= resolutions.size()) return;
                    try {
                        run_one(i);
                    } catch (...) {
                        errs[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    double emax = 0.0;
    for (double e : rep.errors) emax = std::max(emax, e);
    if (emax <= 1e-13) {
        rep.degenerate = true;
        rep.fitted_order = 0.0;
        return rep;
    }

    // Least-squares slope of log(error) against log(h) or log(dt).
    std::vector<double> xs, ys;
    for (size_t i = 0; i < rep.errors.size(); ++i) {
        const double hx = (kind == StudyKind::spatial)
                              ? 1.0 / (resolutions[i].n + 1)
                              : resolutions[i].dt;
        xs.push_back(std::log(hx));
        ys.push_back(std::log(std::max(rep.errors[i], 1e-300)));
    }
    const size_t m = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < m; ++i) { sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i]; }
    const double denom = m * sxx - sx * sx;
    rep.fitted_order = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - rep.fitted_order * sx) / m;
    double rss = 0.0;
    for (size_t i = 0; i < m; ++i) {
        const double pred = intercept + rep.fitted_order * xs[i];
        rss += (ys[i] - pred) * (ys[i] - pred);
    }
    rep.fit_residual = std::sqrt(rss / m);
    return rep;
}

}  // namespace chgrow

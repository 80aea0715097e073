#include "chgrow/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "chgrow/errors.hpp"

namespace chgrow {

namespace {

// Longest prefix of records whose spacing matches the first interval; a
// trailing short interval from an off-cadence final state is dropped.
size_t uniform_prefix(const Trajectory& traj) {
    const auto& st = traj.states;
    if (st.size() < 3) return st.size();
    const double d0 = st[1].t - st[0].t;
    size_t k = 2;
    while (k < st.size() && std::abs((st[k].t - st[k - 1].t) - d0) <= 1e-9 * std::max(1.0, d0))
        ++k;
    return k;
}

std::vector<double> centered_time_derivative(const std::vector<double>& y, double dt) {
    const size_t k = y.size();
    std::vector<double> d(k, 0.0);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt);
    for (size_t i = 1; i + 1 < k; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * dt);
    d[k - 1] = (3.0 * y[k - 1] - 4.0 * y[k - 2] + y[k - 3]) / (2.0 * dt);
    return d;
}

}  // namespace

std::vector<double> energy_identity_residual(const Trajectory& traj, const ForcingFn& forcing) {
    const size_t k = uniform_prefix(traj);
    if (k < 3) throw SizingError("energy_identity_residual: needs >= 3 uniformly spaced records");
    const double dt_rec = traj.states[1].t - traj.states[0].t;

    std::vector<double> half_hm1_sq(k), rest(k);
    for (size_t j = 0; j < k; ++j) {
        const State& s = traj.states[j];
        const Field& u = s.u;
        const int n = u.n();
        const double h = u.h();
        Field nu = apply_inverse_neg_laplacian(u);
        const double hm1sq = inner_product(u, nu);
        half_hm1_sq[j] = 0.5 * hm1sq;
        Field du = apply_derivative(u, 1);
        double grad_term = 0.0, fu_u = 0.0, g_nu = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = traj.coeff.eval(u[i]);
            const double ap = traj.coeff.eval_prime(u[i]);
            grad_term += (a + ap * u[i]) * du[i] * du[i];
            fu_u += nonlinearity_f(u[i], traj.variant) * u[i];
            g_nu += nonlinearity_g(u[i], traj.variant) * nu[i];
        }
        rest[j] = h * (grad_term + fu_u + g_nu);
        if (forcing) {
            Field fterm = forcing(s.t, u.grid);
            rest[j] -= inner_product(fterm, nu);
        }
    }
    std::vector<double> ddt = centered_time_derivative(half_hm1_sq, dt_rec);
    std::vector<double> res(k);
    for (size_t j = 0; j < k; ++j) res[j] = ddt[j] + rest[j];
    return res;
}

GronwallFit gronwall_fit(const Trajectory& traj) {
    const size_t k = uniform_prefix(traj);
    if (k < 3) throw SizingError("gronwall_fit: needs >= 3 uniformly spaced records");
    const double dt_rec = traj.states[1].t - traj.states[0].t;

    std::vector<double> y(k), dterm(k);
    for (size_t j = 0; j < k; ++j) {
        const State& s = traj.states[j];
        const Field& u = s.u;
        const DiagnosticsRecord& r = traj.records[j];
        y[j] = r.norm_Hm1 * r.norm_Hm1 + r.norm_L2 * r.norm_L2;
        Field du = apply_derivative(u, 1);
        double udu_sq = 0.0;
        for (int i = 0; i < u.n(); ++i) udu_sq += u[i] * du[i] * u[i] * du[i];
        udu_sq *= u.h();
        const double l4 = r.norm_L4;
        dterm[j] = r.dissipation_a_D1 + r.dissipation_a_D2 + 0.5 * l4 * l4 * l4 * l4 +
                   3.0 * udu_sq;
    }

    GronwallFit fit;
    if (*std::max_element(y.begin(), y.end()) <= 0.0) {
        fit.margin.assign(k, 0.0);
        return fit;  // degenerate zero trajectory
    }
    std::vector<double> dy = centered_time_derivative(y, dt_rec);
    double c2 = 0.0;
    for (size_t j = 0; j < k; ++j) {
        if (y[j] <= 1e-300) continue;
        c2 = std::max(c2, (dy[j] + 2.0 * dterm[j]) / (2.0 * y[j]));
    }
    fit.fitted_c2 = std::max(0.0, c2);
    fit.margin.resize(k);
    for (size_t j = 0; j < k; ++j)
        fit.margin[j] = y[0] * std::exp(2.0 * fit.fitted_c2 * traj.states[j].t) - y[j];
    return fit;
}

IntegratedDissipations integrated_dissipations(const Trajectory& traj) {
    IntegratedDissipations total;
    const auto& rec = traj.records;
    for (size_t j = 0; j + 1 < rec.size(); ++j) {
        const double w = 0.5 * (rec[j + 1].t - rec[j].t);
        auto l4q = [](const DiagnosticsRecord& r) {
            const double l4 = r.norm_L4;
            return l4 * l4 * l4 * l4;
        };
        total.a_grad_sq_plus_curv_sq +=
            w * (rec[j].dissipation_a_D1 + rec[j].dissipation_a_D2 +
                 rec[j + 1].dissipation_a_D1 + rec[j + 1].dissipation_a_D2);
        total.ut_hm1_sq += w * (rec[j].ut_Hm1_sq + rec[j + 1].ut_Hm1_sq);
        total.a_third_sq += w * (rec[j].dissipation_a_D3 + rec[j + 1].dissipation_a_D3);
        total.l4_quartic += w * (l4q(rec[j]) + l4q(rec[j + 1]));
    }
    return total;
}

double holder_modulus_time(const Trajectory& traj, double exponent, long max_pairs) {
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw SizingError("holder_modulus_time: exponent must lie in (0,1]");
    const auto& st = traj.states;
    const long k = static_cast<long>(st.size());
    if (k < 2) throw SizingError("holder_modulus_time: needs >= 2 recorded states");
    const long total = k * (k - 1) / 2;
    const long stride = (total > max_pairs) ? (total + max_pairs - 1) / max_pairs : 1;
    double best = 0.0;
    long counter = 0;
    for (long a = 0; a < k; ++a) {
        for (long b = a + 1; b < k; ++b, ++counter) {
            if (counter % stride != 0) continue;
            const double dt = st[static_cast<size_t>(b)].t - st[static_cast<size_t>(a)].t;
            if (dt <= 0.0) continue;
            const auto& ua = st[static_cast<size_t>(a)].u.values;
            const auto& ub = st[static_cast<size_t>(b)].u.values;
            double diff = 0.0;
            for (size_t i = 0; i < ua.size(); ++i) diff = std::max(diff, std::abs(ua[i] - ub[i]));
            if (diff > 0.0) best = std::max(best, diff / std::pow(dt, exponent));
        }
    }
    return best;
}

MassBalanceSeries mass_balance_residuals(const Trajectory& traj) {
    const auto& st = traj.states;
    if (st.size() < 2) throw SizingError("mass_balance_residuals: needs >= 2 states");
    if (traj.cadence != 1)
        throw SizingError("mass_balance_residuals: trajectory must be recorded at every step");
    const double dt = traj.scheme.dt;
    MassBalanceSeries out;
    const int n = st[0].u.n();
    const double h = st[0].u.h();
    std::vector<double> v_old(static_cast<size_t>(n)), v_new(static_cast<size_t>(n));

    for (size_t m = 0; m + 1 < st.size(); ++m) {
        const Field& u0 = st[m].u;
        const Field& u1 = st[m + 1].u;
        // v = D^2 u via the Dirichlet stencil (zero endpoint values).
        detail::neg_laplacian_matvec(u0.values, h, v_old);
        detail::neg_laplacian_matvec(u1.values, h, v_new);
        for (double& v : v_old) v = -v;
        for (double& v : v_new) v = -v;

        // Effective bracket at the scheme's time levels.
        std::vector<double> bracket(static_cast<size_t>(n));
        if (traj.scheme.scheme == SchemeKind::imex_stabilized) {
            const double S = traj.scheme.stabilization_S;
            for (int i = 0; i < n; ++i)
                bracket[static_cast<size_t>(i)] =
                    traj.coeff.eval(u0[i]) * v_old[static_cast<size_t>(i)] -
                    nonlinearity_f(u0[i], traj.variant) +
                    S * (v_new[static_cast<size_t>(i)] - v_old[static_cast<size_t>(i)]);
        } else {
            for (int i = 0; i < n; ++i) {
                const double a1 = traj.coeff.eval(u0[i]);
                const double a4 = nonlinearity_f_prime(u0[i], traj.variant);
                bracket[static_cast<size_t>(i)] =
                    a1 * v_new[static_cast<size_t>(i)] - nonlinearity_f(u0[i], traj.variant) -
                    a4 * (u1[i] - u0[i]);
            }
        }
        const double phi_left = bracket[0] / h;
        const double phi_right = -bracket[static_cast<size_t>(n - 1)] / h;
        double mass_change = 0.0, g_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            mass_change += u1[i] - u0[i];
            g_sum += nonlinearity_g(u0[i], traj.variant);
        }
        mass_change *= h;
        g_sum *= h;
        const double res = mass_change + dt * (g_sum + phi_right - phi_left);
        const double scale = std::max(
            1.0, std::abs(mass_change) + dt * (std::abs(g_sum) + std::abs(phi_right) +
                                               std::abs(phi_left)));
        out.residual.push_back(res);
        out.scale.push_back(scale);
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(res));
        out.max_relative = std::max(out.max_relative, std::abs(res) / scale);
    }
    return out;
}

EstimateReport build_estimate_report(const Trajectory& traj) {
    EstimateReport rep;
    rep.trajectory_failed = traj.failed;
    if (traj.records.empty()) return rep;

    for (const auto& r : traj.records) {
        rep.sup_linf = std::max(rep.sup_linf, r.norm_Linf);
        rep.sup_grad_l2 = std::max(rep.sup_grad_l2, r.grad_L2);
    }
    rep.integrated = integrated_dissipations(traj);

    if (traj.states.size() >= 3) {
        const auto res = energy_identity_residual(traj);
        double mx = 0.0;
        for (double v : res) mx = std::max(mx, std::abs(v));
        rep.identity_residuals["energy_identity"] = mx;
        const GronwallFit fit = gronwall_fit(traj);
        rep.fitted_c2 = fit.fitted_c2;
        rep.gronwall_margin_min =
            fit.margin.empty() ? 0.0 : *std::min_element(fit.margin.begin(), fit.margin.end());
        const auto& r0 = traj.records.front();
        rep.gronwall_y0 = r0.norm_Hm1 * r0.norm_Hm1 + r0.norm_L2 * r0.norm_L2;
    }

    for (size_t j = 0; j < traj.states.size(); ++j) {
        const Field& u = traj.states[j].u;
        const double mod = holder_modulus_space(u, 0.5);
        rep.holder_space_modulus = std::max(rep.holder_space_modulus, mod);
        if (mod > traj.records[j].grad_L2 + 1e-6) rep.holder_space_bound_ok = false;
        const auto [r8, rd4] = nirenberg_ratios(u);
        rep.nirenberg_r_l8_max = std::max(rep.nirenberg_r_l8_max, r8);
        rep.nirenberg_r_dl4_max = std::max(rep.nirenberg_r_dl4_max, rd4);
    }
    if (traj.states.size() >= 2) rep.holder_time_modulus = holder_modulus_time(traj, 0.125);

    // Mean of the initial data (rectangle rule).
    const Field& u0 = traj.states.front().u;
    double mean = 0.0;
    for (double v : u0.values) mean += v;
    rep.initial_mean = mean * u0.h();
    return rep;
}

}  // namespace chgrow

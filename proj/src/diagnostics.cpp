#include "chgrow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "chgrow/errors.hpp"

namespace chgrow {

DiagnosticsRecord record(const State& s, const State* prev, const CoefficientSpec& spec,
                         NonlinearityVariant variant) {
    const Field& u = s.u;
    const int n = u.n();
    const double h = u.h();
    DiagnosticsRecord r;
    r.t = s.t;
    r.norm_L2 = norm(u, NormKind::L2);
    r.norm_L4 = norm(u, NormKind::L4);
    r.norm_L8 = norm(u, NormKind::L8);
    r.norm_Linf = norm(u, NormKind::Linf);

    Field nu = apply_inverse_neg_laplacian(u);
    r.norm_Hm1 = std::sqrt(std::max(0.0, inner_product(u, nu)));

    Field du = apply_derivative(u, 1);
    Field d2u = apply_derivative(u, 2);
    Field d3u = apply_derivative(u, 3);
    r.grad_L2 = norm(du, NormKind::L2);
    r.grad_L4 = norm(du, NormKind::L4);

    double d1 = 0.0, d2 = 0.0, d3 = 0.0, ea = 0.0, pg = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = spec.eval(u[i]);
        d1 += a * du[i] * du[i];
        d2 += a * d2u[i] * d2u[i];
        d3 += a * d3u[i] * d3u[i];
        ea += spec.antiderivative(u[i]);
        pg += nonlinearity_g(u[i], variant) * nu[i];
    }
    r.dissipation_a_D1 = h * d1;
    r.dissipation_a_D2 = h * d2;
    r.dissipation_a_D3 = h * d3;
    r.energy_A = h * ea;
    const double l4 = r.norm_L4;
    r.energy_quartic = 0.25 * l4 * l4 * l4 * l4;
    r.lyapunov = r.energy_quartic - r.energy_A;
    r.pairing_g_Nu = h * pg;

    if (prev != nullptr) {
        const double dt = s.t - prev->t;
        if (dt > 0.0) {
            Field ut = Field::zeros(u.grid, BcClass::free);
            for (int i = 0; i < n; ++i) ut[i] = (u[i] - prev->u[i]) / dt;
            const double hm1 = norm(ut, NormKind::HminusOne);
            r.ut_Hm1_sq = hm1 * hm1;
        }
    }

    const auto [fl, fr] = boundary_flux(u, spec);
    r.flux_left = fl;
    r.flux_right = fr;
    return r;
}

double holder_modulus_space(const Field& u, double exponent) {
    if (!(exponent > 0.0 && exponent <= 1.0))
        throw SizingError("holder_modulus_space: exponent must lie in (0,1]");
    const int n = u.n();
    const bool with_endpoints = u.bc == BcClass::pinned;
    // Positions and values including endpoint zeros for pinned fields.
    std::vector<double> xs, vs;
    xs.reserve(static_cast<size_t>(n) + 2);
    vs.reserve(static_cast<size_t>(n) + 2);
    if (with_endpoints) { xs.push_back(0.0); vs.push_back(0.0); }
    for (int i = 0; i < n; ++i) { xs.push_back(u.grid->node(i)); vs.push_back(u[i]); }
    if (with_endpoints) { xs.push_back(1.0); vs.push_back(0.0); }
    double best = 0.0;
    const size_t m = xs.size();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = i + 1; j < m; ++j) {
            const double num = std::abs(vs[i] - vs[j]);
            if (num == 0.0) continue;
            best = std::max(best, num / std::pow(xs[j] - xs[i], exponent));
        }
    }
    return best;
}

std::pair<double, double> nirenberg_ratios(const Field& u) {
    const double l2 = norm(u, NormKind::L2);
    if (l2 == 0.0) return {0.0, 0.0};
    const double l8 = norm(u, NormKind::L8);
    Field du = apply_derivative(u, 1);
    Field d3u = apply_derivative(u, 3);
    const double dl4 = norm(du, NormKind::L4);
    const double d3 = norm(d3u, NormKind::L2);
    const double r_l8 = l8 / (std::pow(d3, 1.0 / 8.0) * std::pow(l2, 7.0 / 8.0) + l2);
    const double r_dl4 = dl4 / (std::pow(d3, 5.0 / 12.0) * std::pow(l2, 7.0 / 12.0) + l2);
    return {r_l8, r_dl4};
}

}  // namespace chgrow

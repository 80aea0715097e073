#include "chgrow/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chgrow/errors.hpp"

namespace chgrow {

void MonotoneSpline::build() {
    const size_t m = x.size();
    if (m < 2) throw ConfigError("tabulated coefficient needs at least 2 samples");
    for (size_t i = 1; i < m; ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("tabulated coefficient: u samples must increase");
    // Fritsch-Carlson slopes: secant averages limited so each cubic piece
    // stays monotone between its endpoints.
    std::vector<double> d(m - 1);
    for (size_t i = 0; i + 1 < m; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    slope.assign(m, 0.0);
    slope[0] = d[0];
    slope[m - 1] = d[m - 2];
    for (size_t i = 1; i + 1 < m; ++i)
        slope[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    for (size_t i = 0; i + 1 < m; ++i) {
        if (d[i] == 0.0) { slope[i] = slope[i + 1] = 0.0; continue; }
        const double a = slope[i] / d[i];
        const double b = slope[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            slope[i] = t * a * d[i];
            slope[i + 1] = t * b * d[i];
        }
    }
    // Cumulative integrals of the Hermite pieces for A(u).
    cumint.assign(m, 0.0);
    for (size_t i = 0; i + 1 < m; ++i) {
        const double hseg = x[i + 1] - x[i];
        // Integral of the cubic Hermite piece over its segment.
        const double seg = hseg * (0.5 * (y[i] + y[i + 1]) + hseg * (slope[i] - slope[i + 1]) / 12.0);
        cumint[i + 1] = cumint[i] + seg;
    }
}

namespace {
// Hermite basis on t in [0,1] for a segment of width hseg.
struct HermitePoint {
    double v, dv, ddv;
};
HermitePoint hermite_eval(double y0, double y1, double m0, double m1, double hseg, double t) {
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    const double v = h00 * y0 + hseg * h10 * m0 + h01 * y1 + hseg * h11 * m1;
    const double d00 = 6 * t2 - 6 * t;
    const double d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t;
    const double d11 = 3 * t2 - 2 * t;
    const double dv = (d00 * y0 + hseg * d10 * m0 + d01 * y1 + hseg * d11 * m1) / hseg;
    const double s00 = 12 * t - 6;
    const double s10 = 6 * t - 4;
    const double s01 = -12 * t + 6;
    const double s11 = 6 * t - 2;
    const double ddv = (s00 * y0 + hseg * s10 * m0 + s01 * y1 + hseg * s11 * m1) / (hseg * hseg);
    return {v, dv, ddv};
}
}  // namespace

double MonotoneSpline::value(double u) const {
    if (u <= x.front()) return y.front();
    if (u >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), u);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double hseg = x[i + 1] - x[i];
    return hermite_eval(y[i], y[i + 1], slope[i], slope[i + 1], hseg, (u - x[i]) / hseg).v;
}

double MonotoneSpline::derivative(double u) const {
    if (u <= x.front() || u >= x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), u);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double hseg = x[i + 1] - x[i];
    return hermite_eval(y[i], y[i + 1], slope[i], slope[i + 1], hseg, (u - x[i]) / hseg).dv;
}

double MonotoneSpline::second_derivative(double u) const {
    if (u <= x.front() || u >= x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), u);
    const size_t i = static_cast<size_t>(it - x.begin()) - 1;
    const double hseg = x[i + 1] - x[i];
    return hermite_eval(y[i], y[i + 1], slope[i], slope[i + 1], hseg, (u - x[i]) / hseg).ddv;
}

double MonotoneSpline::integral_from_zero(double u) const {
    auto indefinite = [&](double t) -> double {
        // Integral of the clamped spline from x.front() to t.
        if (t <= x.front()) return y.front() * (t - x.front());
        if (t >= x.back()) return cumint.back() + y.back() * (t - x.back());
        const auto it = std::upper_bound(x.begin(), x.end(), t);
        const size_t i = static_cast<size_t>(it - x.begin()) - 1;
        const double hseg = x[i + 1] - x[i];
        const double s = (t - x[i]) / hseg;
        const double s2 = s * s, s3 = s2 * s, s4 = s2 * s2;
        // Antiderivatives of the Hermite basis scaled by hseg.
        const double H00 = 0.5 * s4 - s3 + s;
        const double H10 = 0.25 * s4 - (2.0 / 3.0) * s3 + 0.5 * s2;
        const double H01 = -0.5 * s4 + s3;
        const double H11 = 0.25 * s4 - s3 / 3.0;
        return cumint[i] + hseg * (H00 * y[i] + hseg * H10 * slope[i] + H01 * y[i + 1] +
                                   hseg * H11 * slope[i + 1]);
    };
    return indefinite(u) - indefinite(0.0);
}

CoefficientSpec CoefficientSpec::constant(double m) {
    CoefficientSpec s;
    s.family_ = CoefficientFamily::constant;
    s.p0_ = m;
    s.m1_ = m;
    s.m2_ = m;
    return s;
}

CoefficientSpec CoefficientSpec::rational_bump(double base, double gain) {
    if (gain < 0.0) throw ConfigError("rational_bump: gain must be >= 0");
    CoefficientSpec s;
    s.family_ = CoefficientFamily::rational_bump;
    s.p0_ = base;
    s.p1_ = gain;
    s.m1_ = base;
    s.m2_ = base + gain;
    return s;
}

CoefficientSpec CoefficientSpec::khain_sander(double q) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("khain_sander: q must lie in (0,1)");
    CoefficientSpec s;
    s.family_ = CoefficientFamily::khain_sander;
    s.q_ = q;
    s.p0_ = -std::log1p(-q);
    s.m1_ = s.p0_;
    s.m2_ = s.p0_;
    return s;
}

CoefficientSpec CoefficientSpec::tabulated(std::vector<double> u, std::vector<double> a) {
    if (u.size() != a.size()) throw ConfigError("tabulated: u and a sample counts differ");
    CoefficientSpec s;
    s.family_ = CoefficientFamily::tabulated;
    s.spline_.x = std::move(u);
    s.spline_.y = std::move(a);
    s.spline_.build();
    s.m1_ = *std::min_element(s.spline_.y.begin(), s.spline_.y.end());
    s.m2_ = *std::max_element(s.spline_.y.begin(), s.spline_.y.end());
    return s;
}

void CoefficientSpec::set_declared_bounds(double m1, double m2) {
    if (!(m2 >= m1)) throw ConfigError("declared bounds require M2 >= M1");
    m1_ = m1;
    m2_ = m2;
}

double CoefficientSpec::eval(double u) const {
    switch (family_) {
        case CoefficientFamily::constant:
        case CoefficientFamily::khain_sander:
            return p0_;
        case CoefficientFamily::rational_bump: {
            const double u2 = u * u;
            return p0_ + p1_ * u2 / (1.0 + u2);
        }
        case CoefficientFamily::tabulated:
            return spline_.value(u);
    }
    return p0_;
}

double CoefficientSpec::eval_prime(double u) const {
    switch (family_) {
        case CoefficientFamily::constant:
        case CoefficientFamily::khain_sander:
            return 0.0;
        case CoefficientFamily::rational_bump: {
            const double w = 1.0 + u * u;
            return 2.0 * p1_ * u / (w * w);
        }
        case CoefficientFamily::tabulated:
            return spline_.derivative(u);
    }
    return 0.0;
}

double CoefficientSpec::eval_double_prime(double u) const {
    switch (family_) {
        case CoefficientFamily::constant:
        case CoefficientFamily::khain_sander:
            return 0.0;
        case CoefficientFamily::rational_bump: {
            const double u2 = u * u;
            const double w = 1.0 + u2;
            return 2.0 * p1_ * (1.0 - 3.0 * u2) / (w * w * w);
        }
        case CoefficientFamily::tabulated:
            return spline_.second_derivative(u);
    }
    return 0.0;
}

double CoefficientSpec::antiderivative(double u) const {
    switch (family_) {
        case CoefficientFamily::constant:
        case CoefficientFamily::khain_sander:
            return p0_ * u;
        case CoefficientFamily::rational_bump:
            // integral of u^2/(1+u^2) is u - arctan u.
            return p0_ * u + p1_ * (u - std::atan(u));
        case CoefficientFamily::tabulated:
            return spline_.integral_from_zero(u);
    }
    return p0_ * u;
}

CoefficientValidation validate_coefficient(const CoefficientSpec& spec, double u_min,
                                           double u_max, int samples) {
    if (!(u_max > u_min)) throw ConfigError("validate_coefficient: empty u range");
    if (samples < 101) throw ConfigError("validate_coefficient: needs at least 101 samples");
    CoefficientValidation r;
    r.u_min = u_min;
    r.u_max = u_max;
    r.samples = samples;
    r.smoothness_assumed = spec.family() == CoefficientFamily::tabulated;
    r.min_a = std::numeric_limits<double>::infinity();
    r.max_a = -std::numeric_limits<double>::infinity();
    r.min_aprime_u = std::numeric_limits<double>::infinity();
    r.min_aprime = std::numeric_limits<double>::infinity();
    const double du = (u_max - u_min) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double u = u_min + i * du;
        const double a = spec.eval(u);
        const double ap = spec.eval_prime(u);
        r.min_a = std::min(r.min_a, a);
        r.max_a = std::max(r.max_a, a);
        r.min_aprime_u = std::min(r.min_aprime_u, ap * u);
        r.min_aprime = std::min(r.min_aprime, ap);
    }
    r.aprime_strictly_positive = r.min_aprime > 0.0;
    if (!(spec.declared_m1() > 1.0))
        r.violations.push_back("M1>1 violated (declared M1 = " + std::to_string(spec.declared_m1()) + ")");
    if (r.min_a < spec.declared_m1())
        r.violations.push_back("a(u) >= M1 violated (min a = " + std::to_string(r.min_a) + ")");
    if (r.max_a > spec.declared_m2())
        r.violations.push_back("a(u) <= M2 violated (max a = " + std::to_string(r.max_a) + ")");
    if (r.min_aprime_u < -1e-12)
        r.violations.push_back("a'(u)u >= 0 violated (min a'(u)u = " + std::to_string(r.min_aprime_u) + ")");
    r.passed = r.violations.empty();
    return r;
}

double nonlinearity_f(double s, NonlinearityVariant v) {
    const double c = s * s * s;
    return v == NonlinearityVariant::plain ? c : c - s;
}

double nonlinearity_f_prime(double s, NonlinearityVariant v) {
    const double d = 3.0 * s * s;
    return v == NonlinearityVariant::plain ? d : d - 1.0;
}

double nonlinearity_g(double s, NonlinearityVariant v) {
    const double q = s * s;
    return v == NonlinearityVariant::plain ? q : q - s;
}

Field eval_coefficient(const CoefficientSpec& spec, const Field& u, CoefficientEval which) {
    Field out = Field::zeros(u.grid, BcClass::free);
    for (int i = 0; i < u.n(); ++i) {
        const double v = u[i];
        switch (which) {
            case CoefficientEval::a: out[i] = spec.eval(v); break;
            case CoefficientEval::a_prime: out[i] = spec.eval_prime(v); break;
            case CoefficientEval::a_double_prime: out[i] = spec.eval_double_prime(v); break;
            case CoefficientEval::a_antiderivative: out[i] = spec.antiderivative(v); break;
        }
    }
    return out;
}

Field rhs_divergence_form(const Field& u, const CoefficientSpec& spec, NonlinearityVariant v) {
    const int n = u.n();
    const double h = u.h();
    Field d2u = apply_derivative(u, 2);
    std::vector<double> bracket(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        bracket[static_cast<size_t>(i)] = spec.eval(u[i]) * d2u[i] - nonlinearity_f(u[i], v);
    Field out = Field::zeros(u.grid, BcClass::free);
    detail::second_diff_zero_ext(bracket, h, out.values);
    for (int i = 0; i < n; ++i) out[i] = -out[i] - nonlinearity_g(u[i], v);
    return out;
}

Field rhs_expanded_form(const Field& u, const CoefficientSpec& spec, NonlinearityVariant v) {
    const int n = u.n();
    Field du = apply_derivative(u, 1);
    Field d2u = apply_derivative(u, 2);
    Field d3u = apply_derivative(u, 3);
    // D f(u) computed from the pinned samples of f(u); odd powers of an
    // odd-extended field remain odd, and the shifted variant only adds a
    // linear term, so the pinned ghost rule applies to f(u) as well.
    Field fu = Field::zeros(u.grid, BcClass::pinned);
    for (int i = 0; i < n; ++i) fu[i] = nonlinearity_f(u[i], v);
    Field dfu = apply_derivative(fu, 1);
    Field inner = Field::zeros(u.grid, BcClass::free);
    for (int i = 0; i < n; ++i)
        inner[i] = spec.eval(u[i]) * d3u[i] + spec.eval_prime(u[i]) * du[i] * d2u[i] - dfu[i];
    Field div = apply_derivative(inner, 1);
    Field out = Field::zeros(u.grid, BcClass::free);
    for (int i = 0; i < n; ++i) out[i] = -div[i] - nonlinearity_g(u[i], v);
    return out;
}

FrozenCoefficients frozen_coefficients(const Field& u, const CoefficientSpec& spec,
                                       NonlinearityVariant v) {
    const int n = u.n();
    Field du = apply_derivative(u, 1);
    FrozenCoefficients fc{Field::zeros(u.grid, BcClass::free), Field::zeros(u.grid, BcClass::free),
                          Field::zeros(u.grid, BcClass::free), Field::zeros(u.grid, BcClass::free)};
    for (int i = 0; i < n; ++i) {
        fc.a1[i] = spec.eval(u[i]);
        fc.a2[i] = 2.0 * spec.eval_prime(u[i]) * du[i];
        fc.a3[i] = spec.eval_double_prime(u[i]) * du[i] * du[i];
        fc.a4[i] = nonlinearity_f_prime(u[i], v);
    }
    return fc;
}

std::pair<double, double> boundary_flux(const Field& u, const CoefficientSpec& spec) {
    const auto [d3l, d3r] = boundary_third_derivative(u);
    const double a0 = spec.eval(0.0);
    return {a0 * d3l, a0 * d3r};
}

}  // namespace chgrow

#pragma once

/// Nonlinear diffusion coefficient families a(u) with hypothesis
/// validation, the cubic/quadratic nonlinearities f and g in their plain
/// and shifted variants, right-hand-side assembly of
///
///     du/dt = -D^2[ a(u) D^2 u - f(u) ] - g(u)
///
/// in divergence and expanded (product-rule) form, and the frozen
/// coefficient fields used by the linearized implicit scheme.

#include <string>
#include <vector>

#include "chgrow/grid.hpp"

namespace chgrow {

enum class CoefficientFamily { constant, rational_bump, khain_sander, tabulated };

enum class NonlinearityVariant { plain, shifted };

enum class CoefficientEval { a, a_prime, a_double_prime, a_antiderivative };

/// Monotone cubic (Fritsch-Carlson) interpolant used by the tabulated
/// family; evaluation clamps outside the sample range.
struct MonotoneSpline {
    std::vector<double> x, y, slope, cumint;
    void build();
    double value(double u) const;
    double derivative(double u) const;
    double second_derivative(double u) const;
    double integral_from_zero(double u) const;
};

class CoefficientSpec {
public:
    static CoefficientSpec constant(double m);
    static CoefficientSpec rational_bump(double base, double gain);
    /// Constant coefficient -ln(1-q); requires 0 < q < 1. Flagged
    /// invalid-for-theorem when the value is <= 1.
    static CoefficientSpec khain_sander(double q);
    static CoefficientSpec tabulated(std::vector<double> u, std::vector<double> a);

    CoefficientFamily family() const { return family_; }
    double declared_m1() const { return m1_; }
    double declared_m2() const { return m2_; }
    void set_declared_bounds(double m1, double m2);

    double eval(double u) const;
    double eval_prime(double u) const;
    double eval_double_prime(double u) const;
    /// A(u) = integral of a from 0 to u, in closed form per family.
    double antiderivative(double u) const;

    /// Declared lower bound exceeds 1 (the khain_sander flag collapses to
    /// this same condition).
    bool valid_for_theorem() const { return m1_ > 1.0; }

    // Family parameters, exposed for serialization.
    double param_m() const { return p0_; }
    double param_base() const { return p0_; }
    double param_gain() const { return p1_; }
    double param_q() const { return q_; }
    const MonotoneSpline& table() const { return spline_; }

private:
    CoefficientFamily family_ = CoefficientFamily::constant;
    double p0_ = 2.0, p1_ = 0.0, q_ = 0.0;
    double m1_ = 2.0, m2_ = 2.0;
    MonotoneSpline spline_;
};

/// Outcome of sampling the Theorem hypotheses over a u-interval. The
/// strict-positivity of a' needed by the time-modulus lemma is reported
/// separately and does not affect `passed`.
struct CoefficientValidation {
    bool passed = false;
    double min_a = 0.0, max_a = 0.0;
    double min_aprime_u = 0.0;
    double min_aprime = 0.0;
    double u_min = 0.0, u_max = 0.0;
    int samples = 0;
    bool aprime_strictly_positive = false;
    bool smoothness_assumed = false;  // tabulated family
    std::vector<std::string> violations;
};

/// Samples a, a', a'(u)*u on [u_min, u_max]; passes iff
/// min a >= M1, max a <= M2, min a'(u)u >= -1e-12 and M1 > 1.
CoefficientValidation validate_coefficient(const CoefficientSpec& spec, double u_min,
                                           double u_max, int samples);

double nonlinearity_f(double s, NonlinearityVariant v);
double nonlinearity_f_prime(double s, NonlinearityVariant v);
double nonlinearity_g(double s, NonlinearityVariant v);

Field eval_coefficient(const CoefficientSpec& spec, const Field& u, CoefficientEval which);

/// du/dt assembled as -D^2[bracket] - g(u) with the bracket
/// a(u) D^2 u - f(u) extended by zero at the endpoints (where it
/// vanishes exactly under the boundary conditions).
Field rhs_divergence_form(const Field& u, const CoefficientSpec& spec, NonlinearityVariant v);

/// du/dt assembled from the product-rule form
/// -D[ a(u) D^3 u + a'(u) Du D^2 u - D(u^3-part) ] - g(u).
Field rhs_expanded_form(const Field& u, const CoefficientSpec& spec, NonlinearityVariant v);

struct FrozenCoefficients {
    Field a1;  // a(u)
    Field a2;  // 2 a'(u) Du
    Field a3;  // a''(u) |Du|^2
    Field a4;  // f'(u)
};

FrozenCoefficients frozen_coefficients(const Field& u, const CoefficientSpec& spec,
                                       NonlinearityVariant v);

/// Boundary fluxes of the conservation form: at the endpoints the flux
/// D[a(u) D^2 u - f(u)] reduces to a(0) D^3 u.
std::pair<double, double> boundary_flux(const Field& u, const CoefficientSpec& spec);

}  // namespace chgrow

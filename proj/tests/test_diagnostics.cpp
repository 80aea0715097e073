#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chgrow/errors.hpp"
#include "chgrow/estimates.hpp"
#include "chgrow/mms.hpp"
#include "support.hpp"

using namespace chgrow;
using testsupport::run_b1;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("record: zero state gives an all-zero record") {
    auto g = make_grid(63);
    auto spec = CoefficientSpec::rational_bump(2.0, 1.0);
    DiagnosticsRecord r =
        record({0.0, Field::zeros(g)}, nullptr, spec, NonlinearityVariant::plain);
    CHECK(r.norm_L2 == 0.0);
    CHECK(r.norm_Hm1 == 0.0);
    CHECK(r.dissipation_a_D1 == 0.0);
    CHECK(r.energy_A == 0.0);
    CHECK(r.lyapunov == 0.0);
    CHECK(r.pairing_g_Nu == 0.0);
    CHECK(r.ut_Hm1_sq == 0.0);
    CHECK(r.flux_left == 0.0);
}

TEST_CASE("record: sine gradient dissipation matches the analytic integral") {
    auto g = make_grid(127);
    auto spec = CoefficientSpec::constant(2.0);
    Field u = Field::sample(g, [](double x) { return std::sin(kPi * x); });
    DiagnosticsRecord r = record({0.0, u}, nullptr, spec, NonlinearityVariant::plain);
    // integral 2 pi^2 cos^2 = pi^2
    CHECK(r.dissipation_a_D1 == doctest::Approx(kPi * kPi).epsilon(1e-2 / kPi / kPi * 10));
    CHECK(std::abs(r.dissipation_a_D1 - kPi * kPi) < 1e-2);
}

TEST_CASE("record: entries match a high-resolution refinement oracle") {
    auto spec = CoefficientSpec::rational_bump(2.0, 1.0);
    auto eval = [&](int n) {
        auto g = make_grid(n);
        Field u = Field::sample(g, [](double x) { return 0.5 * std::sin(kPi * x); });
        return record({0.0, u}, nullptr, spec, NonlinearityVariant::plain);
    };
    DiagnosticsRecord coarse = eval(127);
    DiagnosticsRecord fine = eval(2047);
    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-3 * std::max(std::abs(a), std::abs(b));
    };
    CHECK(close(coarse.norm_L2, fine.norm_L2));
    CHECK(close(coarse.norm_L4, fine.norm_L4));
    CHECK(close(coarse.norm_L8, fine.norm_L8));
    CHECK(close(coarse.norm_Hm1, fine.norm_Hm1));
    CHECK(close(coarse.grad_L2, fine.grad_L2));
    CHECK(close(coarse.grad_L4, fine.grad_L4));
    CHECK(close(coarse.dissipation_a_D1, fine.dissipation_a_D1));
    CHECK(close(coarse.dissipation_a_D2, fine.dissipation_a_D2));
    CHECK(close(coarse.dissipation_a_D3, fine.dissipation_a_D3));
    CHECK(close(coarse.energy_quartic, fine.energy_quartic));
    CHECK(close(coarse.energy_A, fine.energy_A));
    CHECK(close(coarse.pairing_g_Nu, fine.pairing_g_Nu));
    CHECK(close(coarse.flux_left, fine.flux_left));
    CHECK(close(coarse.flux_right, fine.flux_right));
}

TEST_CASE("energy identity residual: zero trajectory and error paths") {
    auto g = make_grid(31);
    auto spec = CoefficientSpec::constant(2.0);
    SchemeConfig cfg;
    cfg.dt = 1e-4;
    cfg.stabilization_S = 2.0;
    Integrator integ(g, cfg, spec, NonlinearityVariant::plain);
    Trajectory traj = integ.run(Field::zeros(g), 0.01, 10);
    auto res = energy_identity_residual(traj);
    for (double v : res) CHECK(v == 0.0);

    Trajectory two = traj;
    two.states.resize(2);
    two.records.resize(2);
    CHECK_THROWS_AS(energy_identity_residual(two), SizingError);
}

TEST_CASE("energy identity residual: forced trajectory converges under refinement") {
    ManufacturedSolution ms{0.4, 5.0, 1};
    auto spec = CoefficientSpec::rational_bump(2.0, 1.0);
    auto residual_at = [&](int n, double dt) {
        auto g = make_grid(n);
        ForcingFn forcing = [&](double t, const GridPtr& gr) {
            return manufactured_forcing(ms, spec, NonlinearityVariant::plain, t, gr);
        };
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.stabilization_S = 3.0;
        Integrator integ(g, cfg, spec, NonlinearityVariant::plain, forcing);
        Field u0 = manufactured_state(ms, g, 0.0);
        Trajectory traj = integ.run(u0, 0.01, 10);
        auto res = energy_identity_residual(traj, forcing);
        double mx = 0.0;
        for (double v : res) mx = std::max(mx, std::abs(v));
        return mx;
    };
    const double coarse = residual_at(63, 4e-5);
    const double fine = residual_at(127, 1e-5);
    CHECK(fine < coarse / 2.5);
}

TEST_CASE("energy identity residual shrinks on B1 under joint refinement") {
    Trajectory coarse = run_b1(127, 1e-5, 0.05);
    Trajectory fine = run_b1(255, 2.5e-6, 0.05);
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    const double rc = max_abs(energy_identity_residual(coarse));
    const double rf = max_abs(energy_identity_residual(fine));
    CHECK(rc >= 4.0 * rf);
}

TEST_CASE("gronwall fit: degenerate, tiny-amplitude, and B1 stability") {
    SUBCASE("zero trajectory is degenerate") {
        auto g = make_grid(31);
        SchemeConfig cfg;
        cfg.dt = 1e-4;
        cfg.stabilization_S = 2.0;
        Integrator integ(g, cfg, CoefficientSpec::constant(2.0), NonlinearityVariant::plain);
        Trajectory traj = integ.run(Field::zeros(g), 0.01, 10);
        GronwallFit fit = gronwall_fit(traj);
        CHECK(fit.fitted_c2 == 0.0);
        for (double m : fit.margin) CHECK(m == 0.0);
    }
    SUBCASE("pure linear decay fits an essentially zero constant") {
        auto g = make_grid(63);
        SchemeConfig cfg;
        cfg.dt = 1e-6;
        cfg.stabilization_S = 2.0;
        Integrator integ(g, cfg, CoefficientSpec::constant(2.0), NonlinearityVariant::plain);
        Field u0 = Field::sample(g, [](double x) { return 1e-7 * std::sin(kPi * x); });
        Trajectory traj = integ.run(u0, 2e-4, 10);
        GronwallFit fit = gronwall_fit(traj);
        CHECK(fit.fitted_c2 < 1e-6);
        for (double m : fit.margin) CHECK(m >= -1e-20);
    }
    SUBCASE("fitted constant is grid-stable on B1") {
        Trajectory a = run_b1(127, 1e-5, 0.2);
        Trajectory b = run_b1(255, 1e-5, 0.2);
        GronwallFit fa = gronwall_fit(a);
        GronwallFit fb = gronwall_fit(b);
        const double denom = std::max({fa.fitted_c2, fb.fitted_c2, 1e-12});
        CHECK(std::abs(fa.fitted_c2 - fb.fitted_c2) / denom < 0.2);
    }
}

TEST_CASE("integrated dissipations: zero, closed-form decay, B1 grid stability") {
    SUBCASE("zero trajectory integrates to zero") {
        auto g = make_grid(31);
        SchemeConfig cfg;
        cfg.dt = 1e-4;
        cfg.stabilization_S = 2.0;
        Integrator integ(g, cfg, CoefficientSpec::constant(2.0), NonlinearityVariant::plain);
        Trajectory traj = integ.run(Field::zeros(g), 0.01, 10);
        auto tot = integrated_dissipations(traj);
        CHECK(tot.a_grad_sq_plus_curv_sq == 0.0);
        CHECK(tot.ut_hm1_sq == 0.0);
        CHECK(tot.a_third_sq == 0.0);
        CHECK(tot.l4_quartic == 0.0);
    }
    SUBCASE("tiny mode-1 run matches the closed-form decay integral") {
        // int_0^T int a |Du|^2 for u = eps e^{-a lam^2 t} sin(pi x):
        // a eps^2 (pi^2/2) (1 - e^{-2 a lam^2 T}) / (2 a lam^2).
        auto g = make_grid(255);
        const double a = 2.0, eps = 1e-7, T = 2e-3, dtv = 1e-7;
        SchemeConfig cfg;
        cfg.dt = dtv;
        cfg.stabilization_S = a;
        Integrator integ(g, cfg, CoefficientSpec::constant(a), NonlinearityVariant::plain);
        Field u0 = Field::sample(g, [&](double x) { return eps * std::sin(kPi * x); });
        Trajectory traj = integ.run(u0, T, 100);
        auto tot = integrated_dissipations(traj);
        const double lam2 = std::pow(kPi, 4.0);
        const double expected =
            a * eps * eps * (kPi * kPi / 2.0) * (1.0 - std::exp(-2.0 * a * lam2 * T)) /
            (2.0 * a * lam2);
        CHECK(tot.a_grad_sq_plus_curv_sq / expected ==
              doctest::Approx(1.0 + kPi * kPi).epsilon(0.02));
    }
    SUBCASE("totals are grid-stable on B1 at fixed dt") {
        Trajectory a = run_b1(127, 1e-5, 0.2);
        Trajectory b = run_b1(255, 1e-5, 0.2);
        auto ta = integrated_dissipations(a);
        auto tb = integrated_dissipations(b);
        auto rel = [](double x, double y) {
            return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-300});
        };
        CHECK(rel(ta.a_grad_sq_plus_curv_sq, tb.a_grad_sq_plus_curv_sq) < 0.05);
        CHECK(rel(ta.ut_hm1_sq, tb.ut_hm1_sq) < 0.05);
        CHECK(rel(ta.a_third_sq, tb.a_third_sq) < 0.05);
        CHECK(rel(ta.l4_quartic, tb.l4_quartic) < 0.05);
    }
}

TEST_CASE("space Holder modulus") {
    auto g = make_grid(127);
    SUBCASE("zero field") {
        CHECK(holder_modulus_space(Field::zeros(g), 0.5) == 0.0);
    }
    SUBCASE("sqrt(x) with exponent 1/2 attains 1 against the left endpoint") {
        Field f = Field::sample(g, [](double x) { return std::sqrt(x); });
        CHECK(holder_modulus_space(f, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("sin profile against the all-pairs oracle at n=511") {
        auto g511 = make_grid(511);
        Field f = Field::sample(g511, [](double x) { return std::sin(kPi * x); });
        // frozen from the brute-force evaluation below
        const double expected = 1.5096535770039752;
        CHECK(holder_modulus_space(f, 0.5) == doctest::Approx(expected).epsilon(1e-9));
    }
    SUBCASE("exponent validation") {
        CHECK_THROWS_AS(holder_modulus_space(Field::zeros(g), 0.0), SizingError);
        CHECK_THROWS_AS(holder_modulus_space(Field::zeros(g), 1.5), SizingError);
    }
}

TEST_CASE("time Holder modulus") {
    SUBCASE("stationary trajectory gives zero") {
        auto g = make_grid(31);
        SchemeConfig cfg;
        cfg.dt = 1e-4;
        cfg.stabilization_S = 2.0;
        Integrator integ(g, cfg, CoefficientSpec::constant(2.0), NonlinearityVariant::plain);
        Trajectory traj = integ.run(Field::zeros(g), 0.01, 10);
        CHECK(holder_modulus_time(traj, 0.125) == 0.0);
    }
    SUBCASE("single decaying mode against brute force on the closed form") {
        const double eps = 0.3, lam = 40.0;
        auto g = make_grid(63);
        SchemeConfig cfg;
        cfg.dt = 1e-5;
        cfg.stabilization_S = 2.0;
        Integrator integ(g, cfg, CoefficientSpec::constant(2.0), NonlinearityVariant::plain);
        Trajectory traj = integ.run(Field::zeros(g), 1e-3, 10);
        // overwrite with exact closed-form states
        for (auto& s : traj.states)
            s.u = Field::sample(g, [&](double x) {
                return eps * std::exp(-lam * s.t) * std::sin(kPi * x);
            });
        double brute = 0.0;
        for (size_t a = 0; a < traj.states.size(); ++a)
            for (size_t b = a + 1; b < traj.states.size(); ++b) {
                const double ta = traj.states[a].t, tb = traj.states[b].t;
                double mx = 0.0;
                for (int i = 0; i < g->n(); ++i)
                    mx = std::max(mx, std::abs(eps * std::sin(kPi * g->node(i)) *
                                               (std::exp(-lam * ta) - std::exp(-lam * tb))));
                brute = std::max(brute, mx / std::pow(tb - ta, 0.125));
            }
        CHECK(holder_modulus_time(traj, 0.125) == doctest::Approx(brute).epsilon(1e-12));
    }
    SUBCASE("needs at least two states") {
        auto g = make_grid(31);
        Trajectory t;
        t.states.push_back({0.0, Field::zeros(g)});
        CHECK_THROWS_AS(holder_modulus_time(t, 0.125), SizingError);
    }
    SUBCASE("pair subsampling is deterministic and close to the full scan") {
        Trajectory traj = run_b1(63, 1e-5, 0.02, 10);
        const double full = holder_modulus_time(traj, 0.125);
        const double sub = holder_modulus_time(traj, 0.125, 500);
        CHECK(sub == holder_modulus_time(traj, 0.125, 500));
        CHECK(sub <= full);
        CHECK(sub > 0.5 * full);
    }
}

TEST_CASE("nirenberg ratios") {
    auto g = make_grid(127);
    SUBCASE("zero field gives zero ratios") {
        auto [r8, rd4] = nirenberg_ratios(Field::zeros(g));
        CHECK(r8 == 0.0);
        CHECK(rd4 == 0.0);
    }
    SUBCASE("sine reference values stay below the regression bound") {
        auto g4095 = make_grid(4095);
        Field f = Field::sample(g4095, [](double x) { return std::sin(kPi * x); });
        auto [r8, rd4] = nirenberg_ratios(f);
        // analytic: ||sin||_L8 = (35/128)^{1/8}, ||D^3 sin|| = pi^3/sqrt(2)
        CHECK(r8 == doctest::Approx(0.4742).epsilon(2e-3));
        CHECK(rd4 == doctest::Approx(0.6709).epsilon(2e-3));
        CHECK(r8 <= 1.2);
        CHECK(rd4 <= 1.2);
    }
    SUBCASE("ratios bounded along B1 under refinement") {
        Trajectory a = run_b1(127, 1e-5, 0.1);
        Trajectory b = run_b1(255, 1e-5, 0.1);
        auto worst = [](const Trajectory& t) {
            double m8 = 0.0, m4 = 0.0;
            for (const auto& s : t.states) {
                auto [r8, rd4] = nirenberg_ratios(s.u);
                m8 = std::max(m8, r8);
                m4 = std::max(m4, rd4);
            }
            return std::pair{m8, m4};
        };
        auto [a8, a4] = worst(a);
        auto [b8, b4] = worst(b);
        CHECK(std::abs(a8 - b8) / std::max(a8, b8) < 0.1);
        CHECK(std::abs(a4 - b4) / std::max(a4, b4) < 0.1);
    }
}

TEST_CASE("space modulus bounded by the gradient norm along B1") {
    Trajectory traj = run_b1(127, 1e-5, 0.05);
    for (size_t j = 0; j < traj.states.size(); ++j) {
        const double mod = holder_modulus_space(traj.states[j].u, 0.5);
        CHECK(mod <= traj.records[j].grad_L2 + 1e-6);
    }
}

TEST_CASE("estimate report aggregates the trajectory checks") {
    Trajectory traj = run_b1(63, 1e-5, 0.02);
    EstimateReport rep = build_estimate_report(traj);
    CHECK(rep.sup_linf == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rep.sup_grad_l2 > 0.0);
    CHECK(rep.holder_space_bound_ok);
    CHECK(rep.identity_residuals.count("energy_identity") == 1);
    CHECK(rep.gronwall_margin_min >= -1e-8 * rep.gronwall_y0);
    CHECK(rep.initial_mean == doctest::Approx(2.0 * 0.5 / kPi).epsilon(1e-3));
    CHECK_FALSE(rep.trajectory_failed);
}

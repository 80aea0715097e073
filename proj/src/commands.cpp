#include "chgrow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "chgrow/errors.hpp"
#include "chgrow/mms.hpp"
#include "chgrow/svg_plot.hpp"

namespace chgrow {

using nlohmann::json;

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int worker_count(int requested, size_t jobs) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(w), jobs));
}

// Runs fn(i) for i in [0, jobs) on a bounded pool; exceptions are
// captured per job and rethrown by the caller in index order.
void parallel_for(size_t jobs, int workers, const std::function<void(size_t)>& fn) {
    if (jobs == 0) return;
    const int w = worker_count(workers, jobs);
    if (w == 1) {
        for (size_t i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (int t = 0; t < w; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& cli_out,
                                         const std::string& config_out) {
    if (cli_out) return *cli_out;
    const char* root_env = std::getenv("CHGROW_OUT");
    if (!config_out.empty()) {
        std::filesystem::path p(config_out);
        if (p.is_absolute() || root_env == nullptr) return p;
        return std::filesystem::path(root_env) / p;
    }
    const std::filesystem::path root = root_env ? std::filesystem::path(root_env)
                                                : std::filesystem::path("out");
    return root / "run";
}

int cmd_run(const RunConfig& cfg, const std::filesystem::path& outdir, std::ostream& log) {
    const CoefficientValidation validation = validate_config_coefficient(cfg);
    if (!validation.passed && !cfg.override_hypotheses) {
        log << "error: coefficient hypothesis check failed\n";
        return ExitCode::config;
    }
    GridPtr grid = make_grid(cfg.n_interior);
    Field u0 = build_initial_condition(cfg.initial, grid, cfg.seed);
    Integrator integ(grid, cfg.scheme, cfg.coeff, cfg.variant);
    Trajectory traj = integ.run(u0, cfg.t_final, cfg.cadence);
    for (const auto& w : traj.warnings) log << "warning: " << w << "\n";
    EstimateReport rep = build_estimate_report(traj);
    write_run_dir(outdir, cfg, traj, rep, validation);
    if (traj.failed) {
        log << "run failed at step " << traj.failure_step << ", t = " << traj.failure_time
            << ": " << traj.failure_message << "\n"
            << "partial trajectory persisted to " << outdir.string() << "\n";
        return ExitCode::numerical;
    }
    log << "run completed: " << traj.states.size() << " records -> " << outdir.string() << "\n";
    return ExitCode::ok;
}

int cmd_validate_coeff(const RunConfig& cfg, std::ostream& log) {
    const CoefficientValidation v = validate_config_coefficient(cfg);
    log << "coefficient validation on [" << v.u_min << ", " << v.u_max << "], " << v.samples
        << " samples\n";
    log << "  min a        = " << v.min_a << "\n";
    log << "  max a        = " << v.max_a << "\n";
    log << "  min a'(u)u   = " << v.min_aprime_u << "\n";
    log << "  min a'       = " << v.min_aprime
        << (v.aprime_strictly_positive ? "  (strictly positive)" : "  (not strictly positive)")
        << "\n";
    log << "  smoothness   = " << (v.smoothness_assumed ? "assumed" : "closed form") << "\n";
    for (const auto& viol : v.violations) log << "  violated: " << viol << "\n";
    log << (v.passed ? "PASS" : "FAIL") << "\n";
    return v.passed ? ExitCode::ok : ExitCode::config;
}

int cmd_mms(const json& study, const std::filesystem::path& outdir, int workers,
            std::ostream& log) {
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cmd_mms: cannot create " + outdir.string());

    CoefficientSpec spec = study.contains("coefficient")
                               ? coefficient_from_json(study.at("coefficient"))
                               : CoefficientSpec::constant(2.0);
    ManufacturedSolution ms;
    if (study.contains("solution")) {
        const json& s = study.at("solution");
        ms.amplitude = s.value("amplitude", 0.5);
        ms.decay_rate = s.value("decay_rate", 1.0);
        ms.mode = s.value("mode", 1);
    }
    const std::string variant_sel = study.value("variant", std::string("plain"));
    std::vector<NonlinearityVariant> variants;
    if (variant_sel == "both") {
        variants = {NonlinearityVariant::plain, NonlinearityVariant::shifted};
    } else {
        variants = {variant_from_string(variant_sel)};
    }
    const std::string which = study.value("study", std::string("both"));
    SchemeConfig base;
    base.stabilization_S = spec.declared_m2();

    std::vector<ConvergenceReport> reports;
    for (NonlinearityVariant v : variants) {
        if (which == "spatial" || which == "both") {
            const json sp = study.value("spatial", json::object());
            const std::vector<int> ns = sp.value("n", std::vector<int>{31, 63, 127});
            const double dt_factor = sp.value("dt_factor", 0.5);
            const double t_final = sp.value("t_final", 0.02);
            std::vector<Resolution> rs;
            for (int n : ns) {
                const double h = 1.0 / (n + 1);
                rs.push_back({n, dt_factor * h * h});
            }
            reports.push_back(convergence_study(ms, spec, v, StudyKind::spatial, rs, t_final,
                                                ForcingTrack::symbolic, base, workers));
        }
        if (which == "temporal" || which == "both") {
            const json tp = study.value("temporal", json::object());
            const int n = tp.value("n", 255);
            const std::vector<double> dts =
                tp.value("dt", std::vector<double>{4e-5, 2e-5, 1e-5});
            const double t_final = tp.value("t_final", 0.01);
            std::vector<Resolution> rs;
            for (double dt : dts) rs.push_back({n, dt});
            reports.push_back(convergence_study(ms, spec, v, StudyKind::temporal, rs, t_final,
                                                ForcingTrack::discrete, base, workers));
        }
    }

    std::string csv = "study,variant,n,dt,error_L2,fitted_order\n";
    for (const auto& rep : reports) {
        const std::string kind = rep.kind == StudyKind::spatial ? "spatial" : "temporal";
        const std::string tag = kind + "_" + to_string(rep.variant);
        atomic_write(outdir / ("convergence_" + tag + ".json"),
                     convergence_report_to_json(rep).dump(2) + "\n");
        for (size_t i = 0; i < rep.resolutions.size(); ++i) {
            csv += kind + "," + to_string(rep.variant) + "," +
                   std::to_string(rep.resolutions[i].n) + "," + g17(rep.resolutions[i].dt) +
                   "," + g17(rep.errors[i]) + "," + g17(rep.fitted_order) + "\n";
        }
        log << tag << ": fitted order " << rep.fitted_order
            << (rep.degenerate ? " (degenerate: errors at round-off)" : "") << "\n";
    }
    atomic_write(outdir / "convergence.csv", csv);
    return ExitCode::ok;
}

namespace {

struct SweepPoint {
    json config_doc;
    std::vector<std::string> assignment;  // "path=value" per axis
};

struct SweepResult {
    int exit_code = ExitCode::ok;
    std::string message;
    DiagnosticsRecord final_record;
    bool has_record = false;
};

std::vector<SweepPoint> expand_sweep(const json& sweep) {
    if (!sweep.contains("base")) throw ConfigError("sweep config: missing 'base'");
    const json axes = sweep.value("axes", json::array());
    std::vector<SweepPoint> points;
    points.push_back({sweep.at("base"), {}});
    for (const auto& axis : axes) {
        const std::string path = axis.at("path").get<std::string>();
        const json values = axis.at("values");
        if (!values.is_array() || values.empty())
            throw ConfigError("sweep axis '" + path + "' needs a nonempty value list");
        const std::string ptr_str = path.front() == '/' ? path : "/" + path;
        json::json_pointer ptr(ptr_str);
        std::vector<SweepPoint> expanded;
        for (const auto& p : points) {
            for (const auto& v : values) {
                SweepPoint q = p;
                q.config_doc[ptr] = v;
                q.assignment.push_back(path + "=" + v.dump());
                expanded.push_back(std::move(q));
            }
        }
        points = std::move(expanded);
    }
    return points;
}

}  // namespace

int cmd_sweep(const json& sweep, const std::filesystem::path& outdir, int workers,
              std::ostream& log) {
    std::vector<SweepPoint> points = expand_sweep(sweep);
    std::error_code ec;
    std::filesystem::create_directories(outdir, ec);
    if (ec) throw IoError("cmd_sweep: cannot create " + outdir.string());

    std::vector<SweepResult> results(points.size());
    parallel_for(points.size(), workers, [&](size_t i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        const std::filesystem::path pdir = outdir / name;
        SweepResult& res = results[i];
        try {
            RunConfig cfg = parse_config_json(points[i].config_doc);
            std::ostringstream sink;
            res.exit_code = cmd_run(cfg, pdir, sink);
            res.message = res.exit_code == ExitCode::ok ? "ok" : "numerical failure";
            const LoadedRun lr = load_run_dir(pdir);
            if (!lr.trajectory.records.empty()) {
                res.final_record = lr.trajectory.records.back();
                res.has_record = true;
            }
        } catch (const HypothesisError& e) {
            res.exit_code = ExitCode::config;
            res.message = e.what();
        } catch (const ConfigError& e) {
            res.exit_code = ExitCode::config;
            res.message = e.what();
        } catch (const NumericalError& e) {
            res.exit_code = ExitCode::numerical;
            res.message = e.what();
        } catch (const IoError& e) {
            res.exit_code = ExitCode::io;
            res.message = e.what();
        }
    });

    std::string csv = "point,assignment,status,exit_code,t,norm_L2,norm_Linf,norm_Hm1\n";
    int failures = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        const SweepResult& r = results[i];
        std::string assign;
        for (const auto& a : points[i].assignment) {
            if (!assign.empty()) assign += ";";
            assign += a;
        }
        csv += std::to_string(i) + ",\"" + assign + "\"," +
               (r.exit_code == ExitCode::ok ? "ok" : "failed") + "," +
               std::to_string(r.exit_code);
        if (r.has_record) {
            csv += "," + g17(r.final_record.t) + "," + g17(r.final_record.norm_L2) + "," +
                   g17(r.final_record.norm_Linf) + "," + g17(r.final_record.norm_Hm1);
        } else {
            csv += ",,,,";
        }
        csv += "\n";
        if (r.exit_code != ExitCode::ok) {
            ++failures;
            log << "point " << i << " failed (" << r.exit_code << "): " << r.message << "\n";
        }
    }
    atomic_write(outdir / "summary.csv", csv);
    log << "sweep: " << points.size() - static_cast<size_t>(failures) << "/" << points.size()
        << " points completed -> " << outdir.string() << "\n";
    if (failures == 0) return ExitCode::ok;
    // Partial failure: report the dominant failure class.
    for (const auto& r : results)
        if (r.exit_code == ExitCode::numerical) return ExitCode::numerical;
    return results.front().exit_code == ExitCode::ok ? ExitCode::numerical
                                                     : results.front().exit_code;
}

namespace {

void print_estimate_lines(const EstimateReport& rep, std::ostream& log) {
    auto line = [&](bool ok, const std::string& text) {
        log << "  [" << (ok ? "pass" : "warn") << "] " << text << "\n";
    };
    line(std::isfinite(rep.sup_linf), "sup |u| over the run = " + std::to_string(rep.sup_linf));
    line(std::isfinite(rep.sup_grad_l2), "sup ||Du||_L2 = " + std::to_string(rep.sup_grad_l2));
    line(std::isfinite(rep.integrated.a_third_sq),
         "int int a(u)|D^3u|^2 = " + std::to_string(rep.integrated.a_third_sq));
    line(std::isfinite(rep.integrated.ut_hm1_sq),
         "int ||u_t||_{H^-1}^2 = " + std::to_string(rep.integrated.ut_hm1_sq));
    const auto it = rep.identity_residuals.find("energy_identity");
    if (it != rep.identity_residuals.end())
        line(std::isfinite(it->second),
             "energy identity residual max-abs = " + std::to_string(it->second));
    line(rep.gronwall_margin_min >= -1e-8 * std::max(rep.gronwall_y0, 1e-300),
         "gronwall margin min = " + std::to_string(rep.gronwall_margin_min) +
             " (fitted C2 = " + std::to_string(rep.fitted_c2) + ")");
    line(rep.holder_space_bound_ok,
         "space Holder(1/2) modulus = " + std::to_string(rep.holder_space_modulus) +
             " <= sup ||Du|| per snapshot");
    line(std::isfinite(rep.holder_time_modulus),
         "time Holder(1/8) modulus = " + std::to_string(rep.holder_time_modulus));
    line(std::isfinite(rep.nirenberg_r_l8_max) && std::isfinite(rep.nirenberg_r_dl4_max),
         "interpolation ratios r_L8 = " + std::to_string(rep.nirenberg_r_l8_max) +
             ", r_DL4 = " + std::to_string(rep.nirenberg_r_dl4_max));
    if (rep.trajectory_failed) line(false, "trajectory flagged failed (partial run)");
}

double rel_diff(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / denom;
}

}  // namespace

int cmd_check_estimates(const std::vector<std::filesystem::path>& run_dirs,
                        const std::optional<std::filesystem::path>& outdir, std::ostream& log) {
    if (run_dirs.empty()) throw ConfigError("check-estimates: no run directories given");
    std::vector<EstimateReport> reports;
    std::vector<int> ns;
    for (const auto& dir : run_dirs) {
        const LoadedRun run = load_run_dir(dir);
        EstimateReport rep = build_estimate_report(run.trajectory);
        atomic_write(dir / "estimate_report.json", estimate_report_to_json(rep).dump(2) + "\n");
        log << dir.string() << " (n = " << run.config.n_interior
            << ", dt = " << run.config.scheme.dt << "):\n";
        print_estimate_lines(rep, log);
        reports.push_back(std::move(rep));
        ns.push_back(run.config.n_interior);
    }
    if (reports.size() >= 2) {
        log << "grid-stability comparison (relative differences vs first run):\n";
        json cmp;
        for (size_t i = 1; i < reports.size(); ++i) {
            json row;
            row["n"] = {ns[0], ns[i]};
            row["sup_Linf"] = rel_diff(reports[0].sup_linf, reports[i].sup_linf);
            row["sup_grad_L2"] = rel_diff(reports[0].sup_grad_l2, reports[i].sup_grad_l2);
            row["a_third_sq"] =
                rel_diff(reports[0].integrated.a_third_sq, reports[i].integrated.a_third_sq);
            row["fitted_C2"] = rel_diff(reports[0].fitted_c2, reports[i].fitted_c2);
            row["holder_time_modulus"] =
                rel_diff(reports[0].holder_time_modulus, reports[i].holder_time_modulus);
            cmp.push_back(row);
            log << "  n=" << ns[0] << " vs n=" << ns[i]
                << ": sup|u| " << row["sup_Linf"].get<double>()
                << ", sup||Du|| " << row["sup_grad_L2"].get<double>()
                << ", int a|D^3u|^2 " << row["a_third_sq"].get<double>()
                << ", C2 " << row["fitted_C2"].get<double>() << "\n";
        }
        if (outdir) {
            std::error_code ec;
            std::filesystem::create_directories(*outdir, ec);
            atomic_write(*outdir / "estimates_comparison.json", cmp.dump(2) + "\n");
        }
    }
    return ExitCode::ok;
}

int cmd_plot(const std::vector<std::filesystem::path>& run_dirs,
             const std::optional<std::filesystem::path>& outdir, std::ostream& log) {
    if (run_dirs.empty()) throw ConfigError("plot: no run directories given");
    std::vector<double> refinement_n, refinement_space_mod, refinement_time_mod;
    for (const auto& dir : run_dirs) {
        const LoadedRun run = load_run_dir(dir);
        const auto& traj = run.trajectory;

        PlotSpec norms;
        norms.title = "norm time series";
        norms.x_label = "t";
        norms.y_label = "norm";
        norms.log_y = true;
        PlotSeries l2{"L2", {}, {}}, linf{"Linf", {}, {}}, hm1{"H^-1", {}, {}};
        for (const auto& r : traj.records) {
            l2.x.push_back(r.t);
            l2.y.push_back(r.norm_L2);
            linf.x.push_back(r.t);
            linf.y.push_back(r.norm_Linf);
            hm1.x.push_back(r.t);
            hm1.y.push_back(r.norm_Hm1);
        }
        norms.series = {l2, linf, hm1};
        atomic_write(dir / "norms_timeseries.svg", render_svg_plot(norms));

        PlotSpec profile;
        profile.title = "final profile";
        profile.x_label = "x";
        profile.y_label = "u";
        PlotSeries pu{"u(., T)", {}, {}};
        const Field& uf = traj.states.back().u;
        for (int i = 0; i < uf.n(); ++i) {
            pu.x.push_back(uf.grid->node(i));
            pu.y.push_back(uf[i]);
        }
        profile.series = {pu};
        atomic_write(dir / "final_profile.svg", render_svg_plot(profile));

        PlotSpec holder;
        holder.title = "space Holder(1/2) modulus per snapshot";
        holder.x_label = "t";
        holder.y_label = "modulus";
        PlotSeries hm{"modulus", {}, {}};
        double worst = 0.0;
        for (size_t j = 0; j < traj.states.size(); ++j) {
            const double mod = holder_modulus_space(traj.states[j].u, 0.5);
            hm.x.push_back(traj.states[j].t);
            hm.y.push_back(mod);
            worst = std::max(worst, mod);
        }
        holder.series = {hm};
        atomic_write(dir / "holder_modulus_timeseries.svg", render_svg_plot(holder));

        refinement_n.push_back(run.config.n_interior);
        refinement_space_mod.push_back(worst);
        refinement_time_mod.push_back(traj.states.size() >= 2
                                          ? holder_modulus_time(traj, 0.125)
                                          : 0.0);
        log << "plots written to " << dir.string() << "\n";
    }
    if (run_dirs.size() >= 2) {
        PlotSpec ref;
        ref.title = "Holder moduli vs refinement";
        ref.x_label = "n interior";
        ref.y_label = "modulus";
        ref.series = {PlotSeries{"space exponent 1/2", refinement_n, refinement_space_mod},
                      PlotSeries{"time exponent 1/8", refinement_n, refinement_time_mod}};
        const std::filesystem::path target = outdir ? *outdir : run_dirs.front();
        std::error_code ec;
        std::filesystem::create_directories(target, ec);
        atomic_write(target / "holder_modulus_vs_refinement.svg", render_svg_plot(ref));
        log << "refinement plot written to " << target.string() << "\n";
    }
    return ExitCode::ok;
}

}  // namespace chgrow

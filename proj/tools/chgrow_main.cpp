// Batch driver: single runs, manufactured-solution studies, parameter
// sweeps, estimate checks, and plot emission for the 1D generalized
// Cahn-Hilliard solver with proliferation.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chgrow/commands.hpp"
#include "chgrow/errors.hpp"
#include "chgrow/version.hpp"

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chgrow::ConfigError("cannot open " + path);
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw chgrow::ConfigError("parse error in " + path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace chgrow;

    CLI::App app{"1D generalized Cahn-Hilliard solver and estimate-verification harness"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_str;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool override_hyp = false;
    std::vector<std::string> dirs;
    double umin = -5.0, umax = 5.0;
    int samples = 1001;

    auto* run = app.add_subcommand("run", "execute a single configured run");
    run->add_option("--config", config_path, "run config JSON")->required();
    run->add_option("--out", out_str, "output directory");
    run->add_option("--seed", seed, "override the config RNG seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_flag("--override-hypotheses", override_hyp,
                  "run even if the coefficient fails the hypothesis check");

    auto* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    mms->add_option("--config", config_path, "study config JSON")->required();
    mms->add_option("--out", out_str, "output directory");
    mms->add_option("--workers", workers, "worker threads");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    sweep->add_option("--config", config_path, "sweep config JSON")->required();
    sweep->add_option("--out", out_str, "output directory");
    sweep->add_option("--workers", workers, "worker threads");
    sweep->add_flag("--override-hypotheses", override_hyp,
                    "apply hypothesis override to every point");

    auto* check = app.add_subcommand("check-estimates", "recompute estimate reports");
    check->add_option("dirs", dirs, "run directories")->required()->expected(-1);
    check->add_option("--out", out_str, "directory for the comparison report");

    auto* plot = app.add_subcommand("plot", "emit SVG plots for run directories");
    plot->add_option("dirs", dirs, "run directories")->required()->expected(-1);
    plot->add_option("--out", out_str, "directory for cross-run plots");

    auto* vcoeff = app.add_subcommand("validate-coeff", "validate a coefficient spec");
    vcoeff->add_option("--config", config_path,
                       "run config JSON or bare coefficient object")->required();
    vcoeff->add_option("--umin", umin, "validation range lower end");
    vcoeff->add_option("--umax", umax, "validation range upper end");
    vcoeff->add_option("--samples", samples, "validation sample count");

    CLI11_PARSE(app, argc, argv);

    std::optional<std::filesystem::path> cli_out;
    if (!out_str.empty()) cli_out = std::filesystem::path(out_str);

    try {
        if (run->parsed()) {
            nlohmann::json doc = read_json_file(config_path);
            if (override_hyp) doc["override_hypotheses"] = true;
            if (seed_given) doc["seed"] = seed;
            RunConfig cfg = parse_config_json(doc);
            return cmd_run(cfg, resolve_output_dir(cli_out, cfg.output_dir), std::cout);
        }
        if (mms->parsed()) {
            nlohmann::json doc = read_json_file(config_path);
            return cmd_mms(doc, resolve_output_dir(cli_out, doc.value("output_dir", std::string())),
                           workers, std::cout);
        }
        if (sweep->parsed()) {
            nlohmann::json doc = read_json_file(config_path);
            if (override_hyp && doc.contains("base")) doc["base"]["override_hypotheses"] = true;
            return cmd_sweep(doc, resolve_output_dir(cli_out, doc.value("output_dir", std::string())),
                             workers, std::cout);
        }
        if (check->parsed()) {
            std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
            return cmd_check_estimates(paths, cli_out, std::cout);
        }
        if (plot->parsed()) {
            std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
            return cmd_plot(paths, cli_out, std::cout);
        }
        if (vcoeff->parsed()) {
            nlohmann::json doc = read_json_file(config_path);
            RunConfig cfg;
            if (doc.contains("family")) {
                cfg.coeff = coefficient_from_json(doc);
            } else {
                doc["override_hypotheses"] = true;  // report instead of rejecting
                cfg = parse_config_json(doc);
            }
            cfg.validation.u_min = umin;
            cfg.validation.u_max = umax;
            cfg.validation.samples = samples;
            return cmd_validate_coeff(cfg, std::cout);
        }
    } catch (const HypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::config;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::config;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::numerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::io;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::config;
    }
    return ExitCode::ok;
}

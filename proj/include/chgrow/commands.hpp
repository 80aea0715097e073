#pragma once

/// Batch-run orchestration behind the CLI subcommands. Every command
/// returns a process exit code: 0 success, 2 config or hypothesis
/// rejection, 3 numerical failure, 4 I/O failure.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "chgrow/run_store.hpp"

namespace chgrow {

struct ExitCode {
    static constexpr int ok = 0;
    static constexpr int config = 2;
    static constexpr int numerical = 3;
    static constexpr int io = 4;
};

/// Output directory resolution: an explicit --out wins, then the config's
/// output_dir (relative paths are rooted at $CHGROW_OUT when set), then
/// <root>/run with root = $CHGROW_OUT or ./out.
std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& cli_out,
                                         const std::string& config_out);

int cmd_run(const RunConfig& cfg, const std::filesystem::path& outdir, std::ostream& log);

int cmd_validate_coeff(const RunConfig& cfg, std::ostream& log);

/// Study config: solution {amplitude, decay_rate, mode}, coefficient,
/// variant ("plain", "shifted" or "both"), spatial {n[], dt_factor,
/// t_final} with dt = dt_factor * h^2, temporal {n, dt[], t_final}.
int cmd_mms(const nlohmann::json& study, const std::filesystem::path& outdir, int workers,
            std::ostream& log);

/// Sweep config: {"base": <run config>, "axes": [{"path": <json pointer
/// into the config>, "values": [...]}, ...]}; the cartesian product runs
/// in a bounded worker pool, one directory per point, plus a collated
/// summary CSV. Exit code reflects partial failure.
int cmd_sweep(const nlohmann::json& sweep, const std::filesystem::path& outdir, int workers,
              std::ostream& log);

/// Recomputes estimate reports for one or more run directories, writes
/// estimate_report.json into each, prints pass/warn lines, and with two
/// or more directories emits a grid-stability comparison.
int cmd_check_estimates(const std::vector<std::filesystem::path>& run_dirs,
                        const std::optional<std::filesystem::path>& outdir, std::ostream& log);

/// Emits SVG plots (norm time series, final profile, Holder modulus per
/// snapshot) for each run directory; with two or more directories also a
/// modulus-vs-refinement plot.
int cmd_plot(const std::vector<std::filesystem::path>& run_dirs,
             const std::optional<std::filesystem::path>& outdir, std::ostream& log);

}  // namespace chgrow

#pragma once

/// Persistence of runs: diagnostics CSV with a fixed column order and
/// 17-significant-digit formatting (identical inputs produce identical
/// bytes), per-snapshot (x, u) CSV files with zero-padded indices, the
/// estimate report JSON, and an atomically written manifest with
/// checksums of every emitted file.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "chgrow/config.hpp"
#include "chgrow/estimates.hpp"
#include "chgrow/mms.hpp"

namespace chgrow {

/// FNV-1a 64-bit digest of a byte string, as fixed-width hex.
std::string fnv1a64_hex(std::string_view bytes);
std::string checksum_file(const std::filesystem::path& path);

/// Writes via a temp file and rename so readers never see partial content.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string format_diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& content);

struct RunManifest {
    std::string tool;
    std::string version;
    nlohmann::json config;
    std::string status;  // "completed" | "failed"
    bool hypotheses_overridden = false;
    nlohmann::json hypothesis_report;
    double initial_mean = 0.0;
    long failure_step = -1;
    double failure_time = 0.0;
    std::string failure_message;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> file_checksums;  // relative path -> digest
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& doc);

nlohmann::json validation_to_json(const CoefficientValidation& v);
nlohmann::json estimate_report_to_json(const EstimateReport& rep);
nlohmann::json convergence_report_to_json(const ConvergenceReport& rep);

/// Writes diagnostics.csv, snapshots/snap_NNNNNN.csv, config.json,
/// estimate_report.json and run_manifest.json into `dir`.
void write_run_dir(const std::filesystem::path& dir, const RunConfig& cfg,
                   const Trajectory& traj, const EstimateReport& rep,
                   const CoefficientValidation& validation);

/// Rebuilds a trajectory (states, records, config echo) from a run
/// directory written by write_run_dir. Throws IoError on missing or
/// corrupted files.
struct LoadedRun {
    RunConfig config;
    Trajectory trajectory;
};
LoadedRun load_run_dir(const std::filesystem::path& dir);

}  // namespace chgrow

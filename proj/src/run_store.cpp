#include "chgrow/run_store.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "chgrow/errors.hpp"
#include "chgrow/version.hpp"

namespace chgrow {

using nlohmann::json;

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return std::string(buf);
}

std::string checksum_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checksum_file: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64_hex(ss.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("atomic_write: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("atomic_write: short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("atomic_write: rename failed for " + path.string() + ": " + ec.message());
}

namespace {

const char* kCsvHeader =
    "t,norm_L2,norm_L4,norm_L8,norm_Linf,norm_Hm1,grad_L2,gradL4,"
    "dissipation_a_D1,dissipation_a_D2,dissipation_a_D3,energy_quartic,energy_A,"
    "lyapunov,pairing_g_Nu,ut_Hm1_sq,flux_left,flux_right";

void append_g17(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

std::string format_diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        const double cols[] = {r.t,
                               r.norm_L2,
                               r.norm_L4,
                               r.norm_L8,
                               r.norm_Linf,
                               r.norm_Hm1,
                               r.grad_L2,
                               r.grad_L4,
                               r.dissipation_a_D1,
                               r.dissipation_a_D2,
                               r.dissipation_a_D3,
                               r.energy_quartic,
                               r.energy_A,
                               r.lyapunov,
                               r.pairing_g_Nu,
                               r.ut_Hm1_sq,
                               r.flux_left,
                               r.flux_right};
        bool first = true;
        for (double c : cols) {
            if (!first) out += ',';
            append_g17(out, c);
            first = false;
        }
        out += '\n';
    }
    return out;
}

std::vector<DiagnosticsRecord> parse_diagnostics_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw IoError("diagnostics CSV: empty file");
    if (line != kCsvHeader) throw IoError("diagnostics CSV: unexpected header");
    std::vector<DiagnosticsRecord> out;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::array<double, 18> cols{};
        size_t pos = 0;
        for (size_t c = 0; c < cols.size(); ++c) {
            const size_t next = line.find(',', pos);
            const std::string_view tok(line.data() + pos,
                                       (next == std::string::npos ? line.size() : next) - pos);
            const auto rc = std::from_chars(tok.data(), tok.data() + tok.size(), cols[c]);
            if (rc.ec != std::errc())
                throw IoError("diagnostics CSV: bad number at line " + std::to_string(lineno));
            if (next == std::string::npos) {
                if (c + 1 != cols.size())
                    throw IoError("diagnostics CSV: short row at line " + std::to_string(lineno));
                break;
            }
            pos = next + 1;
        }
        DiagnosticsRecord r;
        r.t = cols[0];
        r.norm_L2 = cols[1];
        r.norm_L4 = cols[2];
        r.norm_L8 = cols[3];
        r.norm_Linf = cols[4];
        r.norm_Hm1 = cols[5];
        r.grad_L2 = cols[6];
        r.grad_L4 = cols[7];
        r.dissipation_a_D1 = cols[8];
        r.dissipation_a_D2 = cols[9];
        r.dissipation_a_D3 = cols[10];
        r.energy_quartic = cols[11];
        r.energy_A = cols[12];
        r.lyapunov = cols[13];
        r.pairing_g_Nu = cols[14];
        r.ut_Hm1_sq = cols[15];
        r.flux_left = cols[16];
        r.flux_right = cols[17];
        out.push_back(r);
    }
    return out;
}

json validation_to_json(const CoefficientValidation& v) {
    json j;
    j["passed"] = v.passed;
    j["min_a"] = v.min_a;
    j["max_a"] = v.max_a;
    j["min_aprime_u"] = v.min_aprime_u;
    j["min_aprime"] = v.min_aprime;
    j["aprime_strictly_positive"] = v.aprime_strictly_positive;
    j["u_min"] = v.u_min;
    j["u_max"] = v.u_max;
    j["samples"] = v.samples;
    j["violations"] = v.violations;
    j["smoothness"] = v.smoothness_assumed ? "assumed" : "closed_form";
    return j;
}

json estimate_report_to_json(const EstimateReport& rep) {
    json j;
    j["identity_residuals"] = rep.identity_residuals;
    j["fitted_C2"] = rep.fitted_c2;
    j["gronwall_margin_min"] = rep.gronwall_margin_min;
    j["gronwall_y0"] = rep.gronwall_y0;
    j["integrated_dissipation"] = {{"a_grad_sq_plus_curv_sq", rep.integrated.a_grad_sq_plus_curv_sq},
                                   {"ut_Hm1_sq", rep.integrated.ut_hm1_sq},
                                   {"a_third_sq", rep.integrated.a_third_sq},
                                   {"L4_quartic", rep.integrated.l4_quartic}};
    j["sup_Linf"] = rep.sup_linf;
    j["sup_grad_L2"] = rep.sup_grad_l2;
    j["holder_space_modulus"] = rep.holder_space_modulus;
    j["holder_space_bound_ok"] = rep.holder_space_bound_ok;
    j["holder_time_modulus"] = rep.holder_time_modulus;
    j["nirenberg_ratio_L8"] = rep.nirenberg_r_l8_max;
    j["nirenberg_ratio_DL4"] = rep.nirenberg_r_dl4_max;
    j["initial_mean"] = rep.initial_mean;
    j["pairing_sign_convention"] = rep.pairing_sign_convention;
    j["trajectory_failed"] = rep.trajectory_failed;
    return j;
}

json convergence_report_to_json(const ConvergenceReport& rep) {
    json j;
    j["study"] = rep.kind == StudyKind::spatial ? "spatial" : "temporal";
    j["variant"] = to_string(rep.variant);
    json rs = json::array();
    for (size_t i = 0; i < rep.resolutions.size(); ++i)
        rs.push_back({{"n", rep.resolutions[i].n},
                      {"dt", rep.resolutions[i].dt},
                      {"error_L2", rep.errors[i]}});
    j["resolutions"] = rs;
    j["fitted_order"] = rep.fitted_order;
    j["fit_residual"] = rep.fit_residual;
    j["degenerate"] = rep.degenerate;
    j["T_final"] = rep.t_final;
    return j;
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["tool"] = m.tool;
    j["version"] = m.version;
    j["config"] = m.config;
    j["status"] = m.status;
    j["hypotheses_overridden"] = m.hypotheses_overridden;
    j["hypothesis_report"] = m.hypothesis_report;
    j["initial_mean"] = m.initial_mean;
    if (m.status == "failed") {
        j["failure"] = {{"step", m.failure_step},
                        {"time", m.failure_time},
                        {"message", m.failure_message}};
    }
    j["warnings"] = m.warnings;
    j["files"] = m.file_checksums;
    return j;
}

RunManifest manifest_from_json(const json& doc) {
    RunManifest m;
    m.tool = doc.value("tool", std::string());
    m.version = doc.value("version", std::string());
    m.config = doc.value("config", json::object());
    m.status = doc.value("status", std::string());
    m.hypotheses_overridden = doc.value("hypotheses_overridden", false);
    m.hypothesis_report = doc.value("hypothesis_report", json::object());
    m.initial_mean = doc.value("initial_mean", 0.0);
    if (doc.contains("failure")) {
        m.failure_step = doc["failure"].value("step", -1L);
        m.failure_time = doc["failure"].value("time", 0.0);
        m.failure_message = doc["failure"].value("message", std::string());
    }
    m.warnings = doc.value("warnings", std::vector<std::string>());
    if (doc.contains("files"))
        m.file_checksums = doc["files"].get<std::map<std::string, std::string>>();
    return m;
}

namespace {

std::string snapshot_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%06zu.csv", index);
    return buf;
}

std::string format_snapshot_csv(const State& s) {
    std::string out = "x,u\n";
    for (int i = 0; i < s.u.n(); ++i) {
        append_g17(out, s.u.grid->node(i));
        out += ',';
        append_g17(out, s.u[i]);
        out += '\n';
    }
    return out;
}

}  // namespace

void write_run_dir(const std::filesystem::path& dir, const RunConfig& cfg,
                   const Trajectory& traj, const EstimateReport& rep,
                   const CoefficientValidation& validation) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "snapshots", ec);
    if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());

    RunManifest manifest;
    manifest.tool = "chgrow";
    manifest.version = kVersion;
    manifest.config = emit_config(cfg);
    manifest.status = traj.failed ? "failed" : "completed";
    manifest.hypotheses_overridden = cfg.override_hypotheses && !validation.passed;
    manifest.hypothesis_report = validation_to_json(validation);
    manifest.initial_mean = rep.initial_mean;
    manifest.failure_step = traj.failure_step;
    manifest.failure_time = traj.failure_time;
    manifest.failure_message = traj.failure_message;
    manifest.warnings = traj.warnings;

    auto emit = [&](const std::filesystem::path& rel, const std::string& content) {
        atomic_write(dir / rel, content);
        manifest.file_checksums[rel.generic_string()] = fnv1a64_hex(content);
    };

    emit("config.json", emit_config(cfg).dump(2) + "\n");
    emit("diagnostics.csv", format_diagnostics_csv(traj.records));
    for (size_t i = 0; i < traj.states.size(); ++i)
        emit(std::filesystem::path("snapshots") / snapshot_name(i),
             format_snapshot_csv(traj.states[i]));
    emit("estimate_report.json", estimate_report_to_json(rep).dump(2) + "\n");

    atomic_write(dir / "run_manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

LoadedRun load_run_dir(const std::filesystem::path& dir) {
    auto slurp = [&](const std::filesystem::path& rel) -> std::string {
        std::ifstream in(dir / rel, std::ios::binary);
        if (!in) throw IoError("load_run_dir: missing " + (dir / rel).string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    LoadedRun run;
    json cfg_doc;
    try {
        cfg_doc = json::parse(slurp("config.json"));
    } catch (const json::exception& e) {
        throw IoError("load_run_dir: bad config.json: " + std::string(e.what()));
    }
    // The stored config echo was validated at write time; skip the
    // hypothesis gate here so overridden runs reload for post-mortems.
    json relaxed = cfg_doc;
    relaxed["override_hypotheses"] = true;
    run.config = parse_config_json(relaxed);
    run.config.override_hypotheses = cfg_doc.value("override_hypotheses", false);

    Trajectory& traj = run.trajectory;
    traj.scheme = run.config.scheme;
    traj.coeff = run.config.coeff;
    traj.variant = run.config.variant;
    traj.cadence = run.config.cadence;
    traj.t_final = run.config.t_final;
    traj.records = parse_diagnostics_csv(slurp("diagnostics.csv"));

    GridPtr grid = make_grid(run.config.n_interior);
    for (size_t i = 0;; ++i) {
        const std::filesystem::path rel = std::filesystem::path("snapshots") / snapshot_name(i);
        if (!std::filesystem::exists(dir / rel)) break;
        const std::string content = slurp(rel);
        std::istringstream in(content);
        std::string line;
        std::getline(in, line);
        if (line != "x,u") throw IoError("load_run_dir: bad snapshot header in " + rel.string());
        State s;
        s.u = Field::zeros(grid, BcClass::pinned);
        int row = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const size_t comma = line.find(',');
            if (comma == std::string::npos || row >= grid->n())
                throw IoError("load_run_dir: malformed snapshot " + rel.string());
            double u = 0.0;
            const auto rc =
                std::from_chars(line.data() + comma + 1, line.data() + line.size(), u);
            if (rc.ec != std::errc())
                throw IoError("load_run_dir: bad value in snapshot " + rel.string());
            s.u[row++] = u;
        }
        if (row != grid->n()) throw IoError("load_run_dir: snapshot size mismatch in " + rel.string());
        if (i < traj.records.size()) s.t = traj.records[i].t;
        traj.states.push_back(std::move(s));
    }
    if (traj.states.empty()) throw IoError("load_run_dir: no snapshots in " + dir.string());
    if (traj.states.size() != traj.records.size())
        throw IoError("load_run_dir: snapshot/record count mismatch in " + dir.string());

    if (std::filesystem::exists(dir / "run_manifest.json")) {
        try {
            const RunManifest m = manifest_from_json(json::parse(slurp("run_manifest.json")));
            traj.failed = m.status == "failed";
            traj.failure_step = m.failure_step;
            traj.failure_time = m.failure_time;
            traj.failure_message = m.failure_message;
            traj.warnings = m.warnings;
        } catch (const json::exception& e) {
            throw IoError("load_run_dir: bad manifest: " + std::string(e.what()));
        }
    }
    return run;
}

}  // namespace chgrow

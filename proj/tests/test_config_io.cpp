#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "chgrow/commands.hpp"
#include "chgrow/errors.hpp"
#include "chgrow/run_store.hpp"
#include "support.hpp"

using namespace chgrow;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("chgrow_test_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

json minimal_config() {
    return json{{"T_final", 1e-3},
                {"scheme", {{"dt", 1e-4}}},
                {"grid", {{"n_interior", 31}}},
                {"coefficient",
                 {{"family", "rational_bump"}, {"params", {{"base", 2.0}, {"gain", 1.0}}}}}};
}

}  // namespace

TEST_CASE("parse_config fills documented defaults") {
    RunConfig cfg = parse_config_json(minimal_config());
    CHECK(cfg.scheme.scheme == SchemeKind::imex_stabilized);
    CHECK(cfg.cadence == 100);
    CHECK(cfg.scheme.stabilization_S == doctest::Approx(3.0));  // declared M2
    CHECK(cfg.variant == NonlinearityVariant::plain);
    CHECK(cfg.initial.preset == InitialConditionSpec::Preset::scaled_sine);
    CHECK_FALSE(cfg.override_hypotheses);
}

TEST_CASE("hypothesis gate at parse time") {
    json doc = minimal_config();
    doc["coefficient"] = {{"family", "constant"}, {"params", {{"M", 0.5}}}};
    CHECK_THROWS_AS(parse_config_json(doc), HypothesisError);
    try {
        parse_config_json(doc);
    } catch (const HypothesisError& e) {
        CHECK(std::string(e.what()).find("M1>1") != std::string::npos);
    }
    doc["override_hypotheses"] = true;
    RunConfig cfg = parse_config_json(doc);
    CHECK(cfg.override_hypotheses);
}

TEST_CASE("config round trip: parse of emit is the identity") {
    json doc = minimal_config();
    doc["variant"] = "shifted";
    doc["initial_condition"] = {{"preset", "random_smooth"},
                                {"amplitude", 0.2},
                                {"modes", 6},
                                {"seed", 99}};
    doc["seed"] = 1234;
    RunConfig a = parse_config_json(doc);
    json emitted = emit_config(a);
    RunConfig b = parse_config_json(emitted);
    CHECK(emit_config(b) == emitted);
}

TEST_CASE("config parse errors carry context") {
    CHECK_THROWS_AS(parse_config_json(json::array()), ConfigError);
    json bad = minimal_config();
    bad["scheme"]["name"] = "secret_scheme";
    CHECK_THROWS_AS(parse_config_json(bad), ConfigError);
    bad = minimal_config();
    bad["T_final"] = -2.0;
    CHECK_THROWS_AS(parse_config_json(bad), ConfigError);
    bad = minimal_config();
    bad["coefficient"] = {{"family", "rational_bump"}, {"params", {{"base", 2.0}}}};
    CHECK_THROWS_AS(parse_config_json(bad), ConfigError);
    CHECK_THROWS_AS(parse_config(std::filesystem::path("/nonexistent/conf.json")), ConfigError);
}

TEST_CASE("initial condition presets") {
    auto g = make_grid(63);
    InitialConditionSpec sine;
    sine.amplitude = 0.5;
    sine.mode = 2;
    Field u = build_initial_condition(sine, g, 0);
    CHECK(u[15] == doctest::Approx(0.5 * std::sin(2 * std::numbers::pi * g->node(15))));

    InitialConditionSpec rnd;
    rnd.preset = InitialConditionSpec::Preset::random_smooth;
    rnd.amplitude = 0.1;
    rnd.modes = 4;
    Field r1 = build_initial_condition(rnd, g, 42);
    Field r2 = build_initial_condition(rnd, g, 42);
    Field r3 = build_initial_condition(rnd, g, 43);
    for (int i = 0; i < g->n(); ++i) CHECK(r1[i] == r2[i]);
    bool differs = false;
    for (int i = 0; i < g->n(); ++i) differs |= r1[i] != r3[i];
    CHECK(differs);
    CHECK(norm(r1, NormKind::Linf) <= 0.1 * (1.0 + 1.0 / 4.0 + 1.0 / 9.0 + 1.0 / 16.0));
}

TEST_CASE("fnv1a64 known answers") {
    // reference digests of the 64-bit FNV-1a test vectors
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("diagnostics CSV: determinism, round trip, corruption") {
    Trajectory traj = testsupport::run_b1(31, 1e-4, 2e-3, 5);
    const std::string csv1 = format_diagnostics_csv(traj.records);
    const std::string csv2 = format_diagnostics_csv(traj.records);
    CHECK(csv1 == csv2);

    auto parsed = parse_diagnostics_csv(csv1);
    REQUIRE(parsed.size() == traj.records.size());
    for (size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].t == traj.records[i].t);
        CHECK(parsed[i].norm_L2 == traj.records[i].norm_L2);
        CHECK(parsed[i].flux_right == traj.records[i].flux_right);
    }

    CHECK_THROWS_AS(parse_diagnostics_csv("bogus header\n1,2\n"), IoError);
    CHECK_THROWS_AS(parse_diagnostics_csv(csv1.substr(0, csv1.size() / 2) + "garbage\n"),
                    IoError);
}

TEST_CASE("run directory round trip with checksummed manifest") {
    const auto dir = temp_dir("roundtrip");
    RunConfig cfg = testsupport::b1_config(31, 1e-4, 2e-3);
    cfg.cadence = 5;
    auto grid = make_grid(cfg.n_interior);
    Field u0 = build_initial_condition(cfg.initial, grid, 0);
    Integrator integ(grid, cfg.scheme, cfg.coeff, cfg.variant);
    Trajectory traj = integ.run(u0, cfg.t_final, cfg.cadence);
    EstimateReport rep = build_estimate_report(traj);
    CoefficientValidation val = validate_config_coefficient(cfg);
    write_run_dir(dir, cfg, traj, rep, val);

    // manifest checksums every emitted file and matches on-disk bytes
    std::ifstream mf(dir / "run_manifest.json");
    REQUIRE(mf.good());
    json man;
    mf >> man;
    CHECK(man["status"] == "completed");
    REQUIRE(man.contains("files"));
    CHECK(man["files"].size() >= 3 + traj.states.size());
    for (const auto& [rel, digest] : man["files"].items())
        CHECK(checksum_file(dir / rel) == digest.get<std::string>());

    LoadedRun loaded = load_run_dir(dir);
    CHECK(loaded.config.n_interior == 31);
    REQUIRE(loaded.trajectory.states.size() == traj.states.size());
    for (size_t j = 0; j < traj.states.size(); ++j) {
        CHECK(loaded.trajectory.states[j].t == doctest::Approx(traj.states[j].t));
        for (int i = 0; i < grid->n(); ++i)
            CHECK(loaded.trajectory.states[j].u[i] == traj.states[j].u[i]);
    }

    // corrupted CSV surfaces as a structured error
    {
        std::ofstream out(dir / "diagnostics.csv", std::ios::trunc);
        out << "not,a,valid,file\n";
    }
    CHECK_THROWS_AS(load_run_dir(dir), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("atomic write leaves no temp files") {
    const auto dir = temp_dir("atomic");
    atomic_write(dir / "x.txt", "payload");
    CHECK(std::filesystem::exists(dir / "x.txt"));
    CHECK_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("output directory resolution") {
    const char* saved = std::getenv("CHGROW_OUT");
    ::setenv("CHGROW_OUT", "/tmp/chgrow_root", 1);
    CHECK(resolve_output_dir(std::filesystem::path("/explicit"), "cfg") ==
          std::filesystem::path("/explicit"));
    CHECK(resolve_output_dir(std::nullopt, "cfgdir") ==
          std::filesystem::path("/tmp/chgrow_root/cfgdir"));
    CHECK(resolve_output_dir(std::nullopt, "/abs/dir") == std::filesystem::path("/abs/dir"));
    CHECK(resolve_output_dir(std::nullopt, "") ==
          std::filesystem::path("/tmp/chgrow_root/run"));
    ::unsetenv("CHGROW_OUT");
    CHECK(resolve_output_dir(std::nullopt, "") == std::filesystem::path("out/run"));
    if (saved) ::setenv("CHGROW_OUT", saved, 1);
}

TEST_CASE("sweep expansion and partial failure handling") {
    const auto dir = temp_dir("sweep");
    json base = minimal_config();
    base["initial_condition"] = {{"preset", "scaled_sine"}, {"amplitude", 0.3}, {"mode", 1}};
    json sweep = {{"base", base},
                  {"axes",
                   json::array({{{"path", "initial_condition/amplitude"},
                                 {"values", {0.1, 0.2, 0.3}}}})}};
    std::ostringstream log;
    const int rc = cmd_sweep(sweep, dir, 2, log);
    CHECK(rc == ExitCode::ok);
    CHECK(std::filesystem::exists(dir / "point_000" / "diagnostics.csv"));
    CHECK(std::filesystem::exists(dir / "point_002" / "run_manifest.json"));
    std::ifstream sf(dir / "summary.csv");
    std::string summary((std::istreambuf_iterator<char>(sf)), {});
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);  // header + 3 points
    CHECK(summary.find("amplitude=0.2") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("one-point sweep behaves like a plain run") {
    const auto dir = temp_dir("sweep1");
    json sweep = {{"base", minimal_config()}};
    std::ostringstream log;
    CHECK(cmd_sweep(sweep, dir, 1, log) == ExitCode::ok);
    CHECK(std::filesystem::exists(dir / "point_000" / "diagnostics.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("sweep with a hypothesis-violating point reports partial failure") {
    const auto dir = temp_dir("sweep_fail");
    json sweep = {{"base", minimal_config()},
                  {"axes",
                   json::array({{{"path", "coefficient/params/base"},
                                 {"values", {2.0, 0.2}}}})}};
    std::ostringstream log;
    const int rc = cmd_sweep(sweep, dir, 2, log);
    CHECK(rc != ExitCode::ok);
    std::ifstream sf(dir / "summary.csv");
    std::string summary((std::istreambuf_iterator<char>(sf)), {});
    CHECK(summary.find("failed") != std::string::npos);
    CHECK(summary.find("ok") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("estimate report and convergence report serialize") {
    Trajectory traj = testsupport::run_b1(31, 1e-4, 2e-3, 5);
    EstimateReport rep = build_estimate_report(traj);
    json j = estimate_report_to_json(rep);
    CHECK(j.contains("fitted_C2"));
    CHECK(j.contains("integrated_dissipation"));
    CHECK(j["pairing_sign_convention"] == "derived_from_equation");

    ConvergenceReport cr;
    cr.kind = StudyKind::temporal;
    cr.resolutions = {{31, 1e-4}, {31, 5e-5}, {31, 2.5e-5}};
    cr.errors = {1e-3, 5e-4, 2.5e-4};
    cr.fitted_order = 1.0;
    json cj = convergence_report_to_json(cr);
    CHECK(cj["resolutions"].size() == 3);
    CHECK(cj["study"] == "temporal");
}

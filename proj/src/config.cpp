#include "chgrow/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "chgrow/errors.hpp"

namespace chgrow {

using nlohmann::json;

std::string to_string(NonlinearityVariant v) {
    return v == NonlinearityVariant::plain ? "plain" : "shifted";
}

std::string to_string(SchemeKind s) {
    return s == SchemeKind::imex_stabilized ? "imex_stabilized" : "linearized_implicit";
}

NonlinearityVariant variant_from_string(const std::string& s) {
    if (s == "plain") return NonlinearityVariant::plain;
    if (s == "shifted") return NonlinearityVariant::shifted;
    throw ConfigError("unknown nonlinearity variant: " + s);
}

SchemeKind scheme_from_string(const std::string& s) {
    if (s == "imex_stabilized") return SchemeKind::imex_stabilized;
    if (s == "linearized_implicit") return SchemeKind::linearized_implicit;
    throw ConfigError("unknown scheme: " + s);
}

json coefficient_to_json(const CoefficientSpec& spec) {
    json j;
    switch (spec.family()) {
        case CoefficientFamily::constant:
            j["family"] = "constant";
            j["params"] = {{"M", spec.param_m()}};
            break;
        case CoefficientFamily::rational_bump:
            j["family"] = "rational_bump";
            j["params"] = {{"base", spec.param_base()}, {"gain", spec.param_gain()}};
            break;
        case CoefficientFamily::khain_sander:
            j["family"] = "khain_sander";
            j["params"] = {{"q", spec.param_q()}};
            break;
        case CoefficientFamily::tabulated: {
            j["family"] = "tabulated";
            j["params"] = {{"u", spec.table().x}, {"a", spec.table().y}};
            break;
        }
    }
    j["M1"] = spec.declared_m1();
    j["M2"] = spec.declared_m2();
    return j;
}

CoefficientSpec coefficient_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("family"))
        throw ConfigError("coefficient: missing 'family'");
    const std::string family = doc.at("family").get<std::string>();
    const json params = doc.value("params", json::object());
    CoefficientSpec spec = CoefficientSpec::constant(2.0);
    try {
        if (family == "constant") {
            spec = CoefficientSpec::constant(params.at("M").get<double>());
        } else if (family == "rational_bump") {
            spec = CoefficientSpec::rational_bump(params.at("base").get<double>(),
                                                  params.at("gain").get<double>());
        } else if (family == "khain_sander") {
            spec = CoefficientSpec::khain_sander(params.at("q").get<double>());
        } else if (family == "tabulated") {
            spec = CoefficientSpec::tabulated(params.at("u").get<std::vector<double>>(),
                                              params.at("a").get<std::vector<double>>());
        } else {
            throw ConfigError("unknown coefficient family: " + family);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("coefficient params: ") + e.what());
    }
    if (doc.contains("M1") || doc.contains("M2")) {
        const double m1 = doc.value("M1", spec.declared_m1());
        const double m2 = doc.value("M2", spec.declared_m2());
        spec.set_declared_bounds(m1, m2);
    }
    return spec;
}

CoefficientValidation validate_config_coefficient(const RunConfig& cfg) {
    return validate_coefficient(cfg.coeff, cfg.validation.u_min, cfg.validation.u_max,
                                cfg.validation.samples);
}

RunConfig parse_config_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    RunConfig cfg;
    try {
        if (doc.contains("grid")) cfg.n_interior = doc.at("grid").value("n_interior", 127);
        const json sch = doc.value("scheme", json::object());
        cfg.scheme.scheme = scheme_from_string(sch.value("name", std::string("imex_stabilized")));
        cfg.scheme.dt = sch.value("dt", 1e-5);
        cfg.scheme.stabilization_S = sch.value("stabilization_S", 0.0);
        cfg.scheme.max_iters = sch.value("max_iters", 50);
        cfg.scheme.nonlinear_tol = sch.value("nonlinear_tol", 1e-10);
        cfg.cadence = sch.value("cadence", 100);
        cfg.t_final = doc.value("T_final", 1.0);
        if (doc.contains("coefficient")) cfg.coeff = coefficient_from_json(doc.at("coefficient"));
        cfg.variant = variant_from_string(doc.value("variant", std::string("plain")));
        const json ic = doc.value("initial_condition", json::object());
        const std::string preset = ic.value("preset", std::string("scaled_sine"));
        if (preset == "scaled_sine") {
            cfg.initial.preset = InitialConditionSpec::Preset::scaled_sine;
            cfg.initial.amplitude = ic.value("amplitude", 0.5);
            cfg.initial.mode = ic.value("mode", 1);
        } else if (preset == "random_smooth") {
            cfg.initial.preset = InitialConditionSpec::Preset::random_smooth;
            cfg.initial.amplitude = ic.value("amplitude", 0.1);
            cfg.initial.modes = ic.value("modes", 4);
            cfg.initial.seed = ic.value("seed", 0ULL);
        } else {
            throw ConfigError("unknown initial condition preset: " + preset);
        }
        cfg.output_dir = doc.value("output_dir", std::string());
        cfg.override_hypotheses = doc.value("override_hypotheses", false);
        cfg.seed = doc.value("seed", 0ULL);
        const json val = doc.value("validation", json::object());
        cfg.validation.u_min = val.value("u_min", -5.0);
        cfg.validation.u_max = val.value("u_max", 5.0);
        cfg.validation.samples = val.value("samples", 1001);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (cfg.n_interior < 7) throw ConfigError("config: grid.n_interior must be >= 7");
    if (!(cfg.scheme.dt > 0.0)) throw ConfigError("config: scheme.dt must be positive");
    if (!(cfg.t_final > 0.0)) throw ConfigError("config: T_final must be positive");
    if (cfg.cadence < 1) throw ConfigError("config: scheme.cadence must be >= 1");
    if (cfg.initial.mode < 1) throw ConfigError("config: initial_condition.mode must be >= 1");
    if (cfg.scheme.stabilization_S <= 0.0) cfg.scheme.stabilization_S = cfg.coeff.declared_m2();
    if (cfg.scheme.stabilization_S < cfg.coeff.declared_m2())
        throw ConfigError("config: scheme.stabilization_S must be >= declared M2");

    const CoefficientValidation report = validate_config_coefficient(cfg);
    if (!report.passed && !cfg.override_hypotheses) {
        std::string msg = "coefficient hypothesis check failed:";
        for (const auto& v : report.violations) msg += " " + v + ";";
        throw HypothesisError(msg);
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return parse_config_json(doc);
}

json emit_config(const RunConfig& cfg) {
    json j;
    j["grid"] = {{"n_interior", cfg.n_interior}};
    j["scheme"] = {{"name", to_string(cfg.scheme.scheme)},
                   {"dt", cfg.scheme.dt},
                   {"stabilization_S", cfg.scheme.stabilization_S},
                   {"cadence", cfg.cadence},
                   {"max_iters", cfg.scheme.max_iters},
                   {"nonlinear_tol", cfg.scheme.nonlinear_tol}};
    j["T_final"] = cfg.t_final;
    j["coefficient"] = coefficient_to_json(cfg.coeff);
    j["variant"] = to_string(cfg.variant);
    json ic;
    if (cfg.initial.preset == InitialConditionSpec::Preset::scaled_sine) {
        ic = {{"preset", "scaled_sine"},
              {"amplitude", cfg.initial.amplitude},
              {"mode", cfg.initial.mode}};
    } else {
        ic = {{"preset", "random_smooth"},
              {"amplitude", cfg.initial.amplitude},
              {"modes", cfg.initial.modes},
              {"seed", cfg.initial.seed}};
    }
    j["initial_condition"] = ic;
    j["output_dir"] = cfg.output_dir;
    j["override_hypotheses"] = cfg.override_hypotheses;
    j["seed"] = cfg.seed;
    j["validation"] = {{"u_min", cfg.validation.u_min},
                       {"u_max", cfg.validation.u_max},
                       {"samples", cfg.validation.samples}};
    return j;
}

Field build_initial_condition(const InitialConditionSpec& ic, const GridPtr& grid,
                              std::uint64_t seed_fallback) {
    const double pi = std::numbers::pi;
    if (ic.preset == InitialConditionSpec::Preset::scaled_sine) {
        const double kpi = ic.mode * pi;
        return Field::sample(grid,
                             [&](double x) { return ic.amplitude * std::sin(kpi * x); });
    }
    // Smooth random data: seeded combination of the first `modes` sine
    // modes with 1/k^2 damping, every term endpoint-compatible.
    const std::uint64_t seed = ic.seed != 0 ? ic.seed : seed_fallback;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> coeff(static_cast<size_t>(ic.modes));
    for (auto& c : coeff) c = unit(rng);
    return Field::sample(grid, [&](double x) {
        double v = 0.0;
        for (int k = 1; k <= ic.modes; ++k)
            v += coeff[static_cast<size_t>(k - 1)] * std::sin(k * pi * x) / (k * k);
        return ic.amplitude * v;
    });
}

}  // namespace chgrow

#pragma once

/// Run configuration: JSON parsing with defaults, hypothesis validation
/// at parse time, normalized re-emission (parse of emit is the identity),
/// and construction of the named initial-condition presets.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "chgrow/integrator.hpp"

namespace chgrow {

struct InitialConditionSpec {
    enum class Preset { scaled_sine, random_smooth };
    Preset preset = Preset::scaled_sine;
    double amplitude = 0.5;
    int mode = 1;        // scaled_sine
    int modes = 4;       // random_smooth
    std::uint64_t seed = 0;
};

struct ValidationRange {
    double u_min = -5.0;
    double u_max = 5.0;
    int samples = 1001;
};

struct RunConfig {
    int n_interior = 127;
    SchemeConfig scheme;
    int cadence = 100;
    double t_final = 1.0;
    CoefficientSpec coeff = CoefficientSpec::constant(2.0);
    NonlinearityVariant variant = NonlinearityVariant::plain;
    InitialConditionSpec initial;
    std::string output_dir;
    bool override_hypotheses = false;
    std::uint64_t seed = 0;
    ValidationRange validation;
};

/// Parses and validates a config document. Fills documented defaults
/// (scheme imex_stabilized, cadence 100, stabilization_S = declared M2).
/// Throws ConfigError on malformed input and HypothesisError, naming the
/// violated condition, when the coefficient fails validation and
/// override_hypotheses is not set.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_json(const nlohmann::json& doc);

/// Normalized re-emission with every default made explicit.
nlohmann::json emit_config(const RunConfig& cfg);

nlohmann::json coefficient_to_json(const CoefficientSpec& spec);
CoefficientSpec coefficient_from_json(const nlohmann::json& doc);

/// Re-runs the hypothesis validation the parser applies.
CoefficientValidation validate_config_coefficient(const RunConfig& cfg);

Field build_initial_condition(const InitialConditionSpec& ic, const GridPtr& grid,
                              std::uint64_t seed_fallback);

std::string to_string(NonlinearityVariant v);
std::string to_string(SchemeKind s);
NonlinearityVariant variant_from_string(const std::string& s);
SchemeKind scheme_from_string(const std::string& s);

}  // namespace chgrow

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "torsionlab/torsion_engine.hpp"

namespace torsionlab::verify {

struct ScenarioConfig {
    std::string identity_id;
    nlohmann::json parameters = nlohmann::json::object();
    double tolerance = 0.0;  // 0 = identity default
    std::string mode = "DirectSpectral";
};

struct IdentityReport {
    std::string identity_id;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    nlohmann::json parameters = nlohmann::json::object();
    engine::CalibrationRecord calibration;
    double runtime_ms = 0.0;
    nlohmann::json notes = nlohmann::json::object();  // soft diagnostics
};

// Registered identity ids, sorted.
std::vector<std::string> registered_identities();

// Evaluate one identity.  Unknown ids raise std::invalid_argument; numerical
// trouble propagates as quad::NumericalFailure / engine::CalibrationFailure.
IdentityReport run_identity(const ScenarioConfig& config,
                            const engine::CalibrationRecord& calibration);

// The default scenario catalog (every registered identity with its default
// parameters and tolerance).
std::vector<ScenarioConfig> default_catalog();

nlohmann::ordered_json report_to_json(const IdentityReport& report, bool include_volatile);

struct RunResult {
    std::vector<IdentityReport> reports;
    engine::CalibrationRecord calibration;
    int exit_code = 0;
    // include_volatile = false drops timing fields so two runs byte-compare.
    nlohmann::ordered_json to_json(bool include_volatile) const;
};

// Calibrates once, evaluates every scenario, orders reports by
// (identity_id, parameters).  Exit code 0 iff every row passes.
RunResult run_scenarios(std::vector<ScenarioConfig> scenarios);

// Reads a JSON config ({"scenarios": [...]}); throws std::runtime_error with
// a line diagnostic on malformed input.
std::vector<ScenarioConfig> load_config(const std::string& path);

ScenarioConfig parse_scenario(const nlohmann::json& j);

}  // namespace torsionlab::verify

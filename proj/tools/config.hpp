#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <slgfm/loops.hpp>
#include <slgfm/simulator.hpp>

namespace slgfm_cli {

/// Configuration problem: unknown key, wrong type, missing field, or a value
/// outside its domain.  The message carries the config path of the offending
/// entry.  Maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Options shared by the analysis commands.  The block is validated as a
/// whole so one config file can drive every command on the same case; each
/// command reads only the options it needs.
struct AnalysisOptions {
    // Frequency sweep bounds for the Nyquist contour (rad/s).  omega_max = 0
    // selects the default 10x the LCL resonance frequency.
    double omega_min = 1.0;
    double omega_max = 0.0;
    int points = 400;

    // Time-domain scenario (required by `simulate` only).
    bool has_scenario = false;
    double t_end = 0.0;
    double dt = 5e-6;
    double record_dt = 1e-4;
    std::vector<std::string> record;
    std::vector<slgfm::EventStep> events;

    // Post-event spectrum window (optional).
    bool has_fft = false;
    std::string fft_signal;
    double fft_start = 0.0;
    double fft_end = 0.0;
};

/// One-parameter sweep: the parameter path uses the same grammar as event
/// targets, extended with the circuit values (plant.L_g etc.) that a running
/// simulation cannot step.
struct SweepSpec {
    std::string parameter;
    std::vector<double> values;
};

/// A fully parsed and validated scenario file.
struct ScenarioConfig {
    slgfm::PlantParams plant;
    slgfm::ControlParams control;
    std::optional<slgfm::AdController> ad;
    AnalysisOptions analysis;
    std::optional<SweepSpec> sweep;

    // Presence of the law-specific bandwidth parameters in the file; the
    // effective law (after a --law override) decides which one is mandatory.
    bool has_T_q = false;
    bool has_k_iq = false;
};

/// Loads and strictly validates a JSON scenario file: unknown keys are
/// rejected with their full path, exactly one of plant.nameplate /
/// plant.per_unit must be present, and every value must have the right type.
/// Throws ConfigError.
ScenarioConfig load_config(const std::string& path);

/// Applies the --law flag ("droop" / "droop-i") on top of the file.
void apply_law_override(ScenarioConfig& cfg, const std::string& law);

/// Applies the --ad flag: "none" drops any configured damping; a kind name
/// keeps the file's block when the kind matches and otherwise substitutes the
/// bundled design example for that kind.
void apply_ad_override(ScenarioConfig& cfg, const std::string& ad);

/// Checks that the effective law's bandwidth parameter was actually present
/// in the file (T_q under droop, k_iq under droop-i).  Throws ConfigError.
void check_law_params(const ScenarioConfig& cfg);

}  // namespace slgfm_cli

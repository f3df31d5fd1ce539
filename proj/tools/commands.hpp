#pragma once

#include <filesystem>

#include "config.hpp"

namespace slgfm_cli {

/// Output destination and unit selection shared by all commands.
struct OutputOptions {
    std::filesystem::path out_dir;
    bool hz = false;  ///< emit frequency columns in Hz instead of rad/s
};

void cmd_poles(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_routh(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_nyquist(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_margins(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_verdict(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_simulate(const ScenarioConfig& cfg, const OutputOptions& out);
void cmd_sweep(const ScenarioConfig& cfg, const OutputOptions& out);

}  // namespace slgfm_cli

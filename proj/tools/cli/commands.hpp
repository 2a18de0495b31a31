#pragma once

#include <filesystem>

#include "config.hpp"

namespace hitrun::cli {

/// Each command writes its files under `out` and returns the process exit
/// code. Library errors propagate as exceptions.
int cmd_sample(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_verify(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_sl(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_mix(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_conductance(const ExperimentConfig& config, const std::filesystem::path& out);
int cmd_logconcave(const ExperimentConfig& config, const std::filesystem::path& out);

/// Full command-line entry point: parses flags, loads the config and
/// dispatches. Returns 0, 1 (runtime error) or 2 (usage or config error).
int run(int argc, char** argv);

}  // namespace hitrun::cli

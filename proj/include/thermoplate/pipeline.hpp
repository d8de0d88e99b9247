#pragma once

#include <filesystem>

#include "thermoplate/config.hpp"

namespace thermoplate::pipeline {

// Batch scenarios behind the CLI subcommands. Every writer is deterministic:
// identical config and seed produce byte-identical files.

void run_symbol_report(const config::Config& cfg, const std::filesystem::path& out_dir);
void run_multiplier_check(const config::Config& cfg, const std::filesystem::path& out_dir);
void run_solve_linear(const config::Config& cfg, const std::filesystem::path& out_dir);
void run_solve_nonlinear(const config::Config& cfg, const std::filesystem::path& out_dir);

// All four scenarios in sequence (the artifact bundle the verify command
// checks for byte determinism).
void run_bundle(const config::Config& cfg, const std::filesystem::path& out_dir);

}  // namespace thermoplate::pipeline

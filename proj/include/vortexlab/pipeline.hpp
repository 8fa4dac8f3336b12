#pragma once

#include "vortexlab/config.hpp"

#include <string>

namespace vortexlab {

// Exit codes shared by the pipeline and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerifyFail = 4;

// Current JSON report schema (see docs/report-schema.md).
inline constexpr int kReportSchemaVersion = 1;

// Run one pipeline stage: generate | solve | refine | verify | vekua | energy.
// Writes field files and report.json under out_dir and returns the exit code.
// Any stage error aborts with the stage name in the message; artifacts written
// before the failure are preserved.
int run_pipeline(const RunConfig& config, const std::string& command, const std::string& out_dir);

// Validate and re-emit a normalized report (the `report` subcommand).
int run_report(const std::string& report_path);

} // namespace vortexlab

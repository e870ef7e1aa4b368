#pragma once

#include <string>
#include <vector>

#include "kfv/config.hpp"

namespace kfv {

/// Orchestration of the CLI subcommands. Each returns a process exit code
/// (see ExitCode) and writes its artifacts under out_dir.
int run_single(const RunConfig& cfg, const std::string& out_dir);
int run_audit(const RunConfig& cfg, const std::string& out_dir);
int run_eoc_time(const RunConfig& cfg, const std::string& out_dir);
int run_eoc_space(const RunConfig& cfg, const std::string& out_dir);

/// Full command-line entry point: subcommands run / eoc-time / eoc-space /
/// audit, each taking --config <path> and --out <dir>, optional --threads n.
int cli_main(const std::vector<std::string>& args);

void set_thread_count(int n);

} // namespace kfv

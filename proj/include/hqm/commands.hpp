#pragma once

// Implementations behind the `hqm` subcommands. Each writes its artifacts
// (CSV, SVG, <command>_summary.json, config snapshot) into the output
// directory and returns the process exit code.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hqm/config.hpp"

namespace hqm::cli {

inline constexpr const char* version = "0.1.0";

struct RunContext {
  config::Config cfg;
  std::filesystem::path out_dir = "hqm-out";
  std::ostream* log = nullptr;  // progress lines; null for silent
};

int cmd_couplings(const RunContext& ctx);
int cmd_transfer(const RunContext& ctx);
int cmd_memory(const RunContext& ctx);
int cmd_table(const RunContext& ctx, int which);
int cmd_oracle(const RunContext& ctx);
int cmd_ramp_plot(const RunContext& ctx);

struct SweepSpec {
  std::string axis;  // "section.key"
  std::vector<double> values;
};

/// Values from an explicit comma list, or `points` evenly spaced in [from, to].
std::vector<double> sweep_values(const std::string& list, double from, double to, std::size_t points);

int cmd_sweep(const RunContext& ctx, const SweepSpec& spec);

}  // namespace hqm::cli

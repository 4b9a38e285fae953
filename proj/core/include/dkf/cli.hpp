#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dkf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;         // unexpected error
inline constexpr int kExitConfigError = 2;     // bad config, preset, or flag
inline constexpr int kExitNumericalError = 3;  // run finished but a filter went bad

struct RunOptions {
  std::string preset;       // exactly one of preset / config_path
  std::string config_path;
  std::optional<std::uint64_t> seed;   // default 1; flags override file values
  std::optional<int> seeds;            // number of independent seeds, default 1
  std::optional<std::string> out_dir;  // default "."
  std::optional<std::string> filters;  // comma-separated kinds, e.g. "CKF,IFDKF"
  std::optional<std::string> epsilon;  // number or "auto"
  std::optional<int> ticks;
};

// Runs the scenario, writes per-filter trace CSVs (single seed) or the
// cross-seed summary (multi seed), and prints a one-line MAE summary per
// filter. Returns an exit code.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
  std::string preset;
  std::string config_path;
};

// Prints per-node degrees, max degree, connectivity, and the naive set per
// schedule epoch. No simulation, no randomness.
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);

// Lists bundled scenario presets.
int cmd_presets(std::ostream& out);

}  // namespace dkf::cli

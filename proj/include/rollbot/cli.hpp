#ifndef ROLLBOT_CLI_HPP
#define ROLLBOT_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace rollbot {

struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path output_dir = ".";
  /// PD, PID, PD+FNN, PID+FNN or compare; empty keeps the config's mode.
  std::string mode;
  std::optional<std::uint64_t> seed;
  bool plots = false;
  std::size_t snapshot_every = 0;
};

/// Runs the requested rollout(s) and writes traces, the metrics report and
/// optional plots into the output directory. Returns the process exit status;
/// diagnostics go to `log`.
int run_command(const RunConfig& rc, std::ostream& log);

}  // namespace rollbot

#endif  // ROLLBOT_CLI_HPP

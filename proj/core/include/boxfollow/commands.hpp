#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "boxfollow/config.hpp"

namespace boxfollow {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
  kExitAttractorLost = 3,
};

struct CommandOptions {
  std::optional<int> depth;
  std::string which;  // analyze: lifetime, dimension, equilibria or distance
  bool resume = false;
  std::optional<unsigned> workers;
  std::optional<std::filesystem::path> out;
  std::vector<std::filesystem::path> families;
  std::string format = "csv";
};

// Each command reports progress to `log` and throws on failure; use
// run_guarded to turn exceptions into exit codes.
void cmd_compute(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_follow(const RunConfig& config, const CommandOptions& options, std::ostream& log);
void cmd_analyze(const RunConfig& config, const CommandOptions& options, std::ostream& log);
// Writes to options.out when set, else to `out`.
void cmd_export(const CommandOptions& options, std::ostream& out, std::ostream& log);

template <class F>
int run_guarded(F&& body, std::ostream& err);

int exit_code_for(const std::exception& e);

template <class F>
int run_guarded(F&& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace boxfollow

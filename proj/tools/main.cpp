#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxfollow/commands.hpp"

namespace {

using boxfollow::CommandOptions;

struct Flags {
  std::string config;
  std::optional<int> depth;
  std::string which;
  bool resume = false;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::vector<std::string> families;
  std::string format = "csv";

  CommandOptions options() const {
    CommandOptions o;
    o.depth = depth;
    o.which = which;
    o.resume = resume;
    o.workers = workers;
    if (out) o.out = *out;
    for (const auto& f : families) o.families.emplace_back(f);
    o.format = format;
    return o;
  }
};

void common(CLI::App* cmd, Flags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "Run configuration (JSON)");
  if (config_required) c->required();
  cmd->add_option("--workers", f.workers, "Worker threads (default: all cores)");
  cmd->add_option("--out", f.out, "Output directory (export: output file)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-oriented attractor coverings and their continuation in a parameter"};
  app.set_version_flag("--version", std::string(BOXFOLLOW_VERSION));
  app.require_subcommand(1);
  Flags f;

  auto* compute = app.add_subcommand("compute", "Covering of the attractor at one parameter value");
  common(compute, f, true);
  compute->add_option("--depth", f.depth, "Final depth m (overrides the config)");

  auto* follow = app.add_subcommand("follow", "Continue the covering along the configured schedule");
  common(follow, f, true);
  follow->add_flag("--resume", f.resume, "Continue from the last persisted family");

  auto* analyze = app.add_subcommand("analyze", "Lifetimes, dimension, equilibria or distances");
  common(analyze, f, true);
  analyze->add_option("--which", f.which, "lifetime | dimension | equilibria | distance")->required();
  analyze->add_option("--depth", f.depth, "Depth to analyze");
  analyze->add_option("--family", f.families, "Family file(s); distance takes two");

  auto* exporter = app.add_subcommand("export", "Write the boxes of one depth as CSV");
  common(exporter, f, false);
  exporter->add_option("--family", f.families, "Family file")->required();
  exporter->add_option("--depth", f.depth, "Depth (default: deepest)");
  exporter->add_option("--format", f.format, "Output format (csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : boxfollow::kExitValidation;
  }

  const CommandOptions options = f.options();
  return boxfollow::run_guarded(
      [&] {
        if (exporter->parsed()) {
          boxfollow::cmd_export(options, std::cout, std::cerr);
          return;
        }
        const auto config = boxfollow::load_config(f.config);
        if (compute->parsed()) {
          boxfollow::cmd_compute(config, options, std::cerr);
        } else if (follow->parsed()) {
          boxfollow::cmd_follow(config, options, std::cerr);
        } else {
          boxfollow::cmd_analyze(config, options, std::cerr);
        }
      },
      std::cerr);
}

#pragma once

#include <iosfwd>
#include <set>
#include <string>

#include "fracfield/config.hpp"

namespace fracfield {

/// Exit statuses of the command layer.
enum ExitStatus : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "FRACFIELD_OUTPUT_DIR";

struct CommandContext {
  std::ostream* out = nullptr;  // tables, dry-run plans
  std::ostream* err = nullptr;  // diagnostics and progress
  bool dry_run = false;
  bool plot = false;
  bool long_table = false;
  /// Used for the timestamp header line; empty means the current time.
  std::string timestamp;
  /// Output directory when neither the flag nor the config file sets one.
  std::string default_output_dir = ".";
};

/// Keys accepted by a subcommand, both in config files and as --flags
/// (underscores written as dashes). Throws for unknown commands.
const std::set<std::string>& command_keys(const std::string& command);
const std::set<std::string>& command_names();

int cmd_study(const ConfigMap& values, const CommandContext& ctx);
int cmd_scheme_table(const ConfigMap& values, const CommandContext& ctx);
int cmd_sample(const ConfigMap& values, const CommandContext& ctx);
int cmd_variance(const ConfigMap& values, const CommandContext& ctx);

/// Dispatches to the subcommand and maps exceptions to exit statuses with a
/// diagnostic on ctx.err.
int run_command(const std::string& command, const ConfigMap& values, const CommandContext& ctx);

}  // namespace fracfield

// fracfield: sample fractional SPDE fields and run weak-convergence studies.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "fracfield/commands.hpp"

namespace {

struct Sub {
  CLI::App* app = nullptr;
  std::string config_path;
  fracfield::ConfigMap flags;
};

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional SPDE Gaussian fields: FEM + sinc quadrature sampling and weak-error studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FRACFIELD_VERSION));

  fracfield::CommandContext ctx;
  ctx.out = &std::cout;
  ctx.err = &std::cerr;
  if (const char* dir = std::getenv(fracfield::kOutputDirEnv)) ctx.default_output_dir = dir;

  const std::map<std::string, std::string> help = {
      {"study", "run the weak-convergence study and write rows/rates CSV files"},
      {"scheme-table", "print quadrature node counts per mesh and beta"},
      {"sample", "draw seeded field realizations and write them as CSV"},
      {"variance", "write reference and discrete pointwise variances on a grid"},
  };
  std::map<std::string, Sub> subs;
  for (const std::string& name : fracfield::command_names()) {
    Sub& sub = subs[name];
    sub.app = app.add_subcommand(name, help.at(name));
    sub.app->add_option("--config", sub.config_path, "flat key = value file; flags override its values");
    sub.app->add_flag("--dry-run", ctx.dry_run, "print the plan and write nothing");
    if (name == "study") sub.app->add_flag("--plot", ctx.plot, "also write one log-log SVG per functional");
    if (name == "scheme-table") sub.app->add_flag("--long", ctx.long_table, "one CSV row per (beta, mesh)");
    for (const std::string& key : fracfield::command_keys(name)) {
      sub.app->add_option_function<std::string>(
          flag_name(key), [&sub, key](const std::string& value) { sub.flags[key] = value; }, "config key " + key);
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    fracfield::ConfigMap values;
    if (!sub.config_path.empty()) {
      try {
        values = fracfield::load_config_file(sub.config_path, fracfield::command_keys(name));
      } catch (const fracfield::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fracfield::kExitUsage;
      }
    }
    for (const auto& [key, value] : sub.flags) values[key] = value;
    return fracfield::run_command(name, values, ctx);
  }
  return fracfield::kExitUsage;
}

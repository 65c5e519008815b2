#include <CLI11.hpp>

#include <iostream>

#include "twhe/errors.hpp"
#include "twhe/presets.hpp"
#include "twhe/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Twisted Hermitian-Einstein experiments on discretized tori"};
  app.require_subcommand(1);

  std::string config, out;
  int jobs = 1;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config, "Experiment config (YAML)")->required();
  run->add_option("--out", out, "Output directory, overrides output.directory");
  run->add_option("--jobs", jobs, "Parallel cold-started epsilon solves")->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", quiet, "Only print the exit summary");

  app.add_subcommand("list-presets", "List twist, bundle, geometry and seed presets");

  std::string name;
  auto* describe = app.add_subcommand("describe", "Describe one preset");
  describe->add_option("name", name, "Preset name, e.g. theta or theta:1")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list-presets")) {
      std::cout << twhe::list_presets_text();
      return 0;
    }
    if (app.got_subcommand("describe")) {
      std::cout << twhe::describe_preset_text(name);
      return 0;
    }
    twhe::RunOptions opt;
    opt.out_dir = out;
    opt.jobs = jobs;
    opt.log = quiet ? nullptr : &std::cout;
    const twhe::RunResult r = twhe::run_config_file(config, opt);
    if (quiet) std::cout << "exit " << r.exit_code << "\n";
    for (const auto& f : r.failures) std::cerr << "failed: " << f << "\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

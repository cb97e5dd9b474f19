#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "config.hpp"
#include "experiments.hpp"
#include "invp/error.hpp"

namespace {

constexpr int kExitVerdict = 1;
constexpr int kExitError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace invp::runner;
  CLI::App app{"Inverse-pressure and stable-dimension experiments on skew-product models"};
  app.require_subcommand(1);

  std::string out_dir;
  unsigned jobs = 0;
  std::size_t cap = 0;
  std::uint64_t seed = 0;
  bool strict = false;
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* cap_opt = app.add_option("--cap", cap, "Enumeration cap (branches)")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for sampling experiments");
  app.add_option("--out", out_dir, "Output directory (default: config output or ./out/<experiment>)");
  app.add_flag("--strict", strict, "Treat informational verdict failures as errors");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* list = app.add_subcommand("list", "List registered experiments");

  CLI11_PARSE(app, argc, argv);

  Overrides ov;
  if (*seed_opt) ov.seed = seed;
  if (*cap_opt) ov.cap = cap;
  if (*jobs_opt) ov.jobs = jobs;

  try {
    if (*list) {
      for (const auto& e : registry()) {
        std::printf("%-20s %s\n%-20s [%s]%s\n", e.name.c_str(), e.description.c_str(), "",
                    e.anchor.c_str(), e.sampling ? " (needs seed)" : "");
      }
      return 0;
    }
    const auto cfg = load_config(config_path, ov);
    if (*validate) {
      check_config(cfg);
      std::printf("ok: %s\n", cfg.experiment.c_str());
      return 0;
    }
    std::filesystem::path out = out_dir;
    if (out.empty()) out = cfg.output.empty() ? std::filesystem::path("out") / cfg.experiment
                                                : std::filesystem::path(cfg.output);
    const auto res = run_experiment(cfg, out, strict);
    std::ifstream summary(out / "summary.txt");
    std::cout << summary.rdbuf();
    std::printf("outputs written to %s\n", out.string().c_str());
    return res.exit_code == 0 ? 0 : kExitVerdict;
  } catch (const invp::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}

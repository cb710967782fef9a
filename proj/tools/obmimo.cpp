#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obmimo/cli.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-bit massive MIMO uplink detection simulator"};
  app.require_subcommand(1);

  obmimo::cli::RunOptions run_opts;
  std::string detectors_csv;
  bool has_seed = false, has_workers = false, has_setups = false, has_uses = false;
  bool has_rho = false, has_iters = false, has_variant = false;
  std::uint64_t seed = 0;
  int workers = 0, setups = 0, uses = 0, iters = 0;
  double rho = 0.0;
  std::string variant;

  CLI::App* run = app.add_subcommand("run", "run a Monte-Carlo BER campaign");
  run->add_option("--config", run_opts.config_path, "config file path");
  run->add_option("--out-dir", run_opts.out_dir, "output directory")
      ->default_val(".");
  run->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
    has_seed = true;
  });
  run->add_option("--workers", workers, "worker threads (0 = all cores)")
      ->each([&](const std::string&) { has_workers = true; });
  run->add_option("--setups", setups, "number of channel setups")
      ->each([&](const std::string&) { has_setups = true; });
  run->add_option("--uses", uses, "channel uses per setup")
      ->each([&](const std::string&) { has_uses = true; });
  run->add_option("--detectors", detectors_csv,
                  "comma-separated detectors (mrc,zf,mmse,bmrc,bzf,bmmse,admm,"
                  "admm-hard,admm-soft)");
  run->add_option("--rho", rho, "ADMM penalty parameter")
      ->each([&](const std::string&) { has_rho = true; });
  run->add_option("--iters", iters, "ADMM iteration count")
      ->each([&](const std::string&) { has_iters = true; });
  run->add_option("--variant", variant, "ADMM variant: hard or soft")
      ->each([&](const std::string&) { has_variant = true; });

  obmimo::cli::ValidateOptions val_opts;
  CLI::App* validate = app.add_subcommand("validate", "run the fast invariant suite");
  validate->add_option("--tol", val_opts.tol, "oracle tolerance")->default_val(1e-6);
  validate->add_option("--seed", val_opts.seed, "seed for the checks")->default_val(7);
  validate
      ->add_flag("--test-corrupt-arcsine-clamp", val_opts.corrupt_arcsine_clamp,
                 "negative-control hook: corrupt the arcsine clamp")
      ->group("");  // hidden

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (has_seed) run_opts.overrides.seed = seed;
    if (has_workers) run_opts.overrides.workers = workers;
    if (has_setups) run_opts.overrides.setups = setups;
    if (has_uses) run_opts.overrides.uses = uses;
    if (has_rho) run_opts.overrides.rho = rho;
    if (has_iters) run_opts.overrides.iters = iters;
    if (has_variant) run_opts.overrides.variant = variant;
    if (!detectors_csv.empty()) run_opts.overrides.detectors = split_csv(detectors_csv);
    return obmimo::cli::cmd_run(run_opts, std::cout, std::cerr);
  }
  return obmimo::cli::cmd_validate(val_opts, std::cout);
}

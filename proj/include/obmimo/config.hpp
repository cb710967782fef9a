#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obmimo/sim.hpp"

namespace obmimo::config {

/// CLI flag values that override the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> setups;
  std::optional<int> uses;
  std::optional<std::vector<std::string>> detectors;
  std::optional<double> rho;
  std::optional<int> iters;
  std::optional<std::string> variant;  // "hard" | "soft"
};

/// A fully resolved run configuration: the campaign plus the base ADMM
/// section it was built from (kept for echoing).
struct Resolved {
  sim::CampaignConfig campaign;
  admm::AdmmConfig admm;
  std::vector<std::string> detector_names;  // as resolved, canonical casing
};

/// Defaults = the paper's numerical setup (250 m cell, 130 + 37.6 log10(d km)
/// path loss, sigma2 = 2e-13, p_max = 0.1 W, Delta = 15 dB, kappa = 0.98,
/// rho = 0.2, 100 iterations, M = 100, K = 12, 5000 x 200 trials).
Resolved defaults();

/// Loads `path` (sectioned key = value file), applies overrides, validates.
/// Unknown sections or keys are hard errors; so are type mismatches.
/// An empty path resolves defaults + overrides only.
Resolved load(const std::string& path, const Overrides& overrides);

/// Parses config text (exposed for tests).
Resolved parse_text(const std::string& text, const Overrides& overrides);

}  // namespace obmimo::config

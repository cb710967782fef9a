#pragma once

#include <iosfwd>
#include <string>

#include "obmimo/config.hpp"
#include "obmimo/sim.hpp"

namespace obmimo::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string config_path;  // empty = built-in defaults
  std::string out_dir = ".";
  config::Overrides overrides;
};

struct ValidateOptions {
  double tol = 1e-6;        // tolerance for the update-oracle checks
  std::uint64_t seed = 7;
  bool corrupt_arcsine_clamp = false;  // negative-control test hook
};

/// Exit codes: 0 success, 2 configuration problems, 1 campaign abort.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);

/// Runs the fast invariant suite; prints one pass/fail line per check.
/// Exit code 0 iff every check passes.
int cmd_validate(const ValidateOptions& opts, std::ostream& out);

/// Results CSV: header + one row per (detector, user), rows sorted by
/// (detector, user_index), user_index 1-based in ascending-SNR order.
void write_results_csv(std::ostream& out, const sim::BerReport& report);

/// Manifest JSON with the full resolved config echo, seed, timestamps and
/// output paths.
void write_manifest(std::ostream& out, const config::Resolved& resolved,
                    const sim::BerReport& report, const std::string& csv_path,
                    const std::string& started_utc, const std::string& finished_utc);

}  // namespace obmimo::cli

#include "obmimo/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "obmimo/diag.hpp"
#include "obmimo/errors.hpp"

namespace obmimo::cli {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json config_echo(const config::Resolved& r) {
  const sim::CampaignConfig& c = r.campaign;
  nlohmann::json j;
  j["campaign"] = {{"m", c.M},
                   {"k", c.K},
                   {"setups", c.n_setups},
                   {"uses", c.n_uses},
                   {"seed", c.master_seed},
                   {"workers", c.workers},
                   {"detectors", r.detector_names}};
  j["cell"] = {{"side_m", c.cell.side_m},
               {"min_dist_m", c.cell.min_dist_m},
               {"pl_const_db", c.cell.pl_const_db},
               {"pl_slope", c.cell.pl_slope}};
  j["power"] = {{"p_max_w", c.power.p_max_w}, {"delta_db", c.power.delta_db}};
  j["impairment"] = {{"kappa_r", c.kappa_r},
                     {"kappa_t", c.kappa_t},
                     {"sigma2", c.sigma2}};
  j["admm"] = {{"rho", r.admm.rho},
               {"iterations", r.admm.iterations},
               {"variant", r.admm.variant == admm::Variant::Hard ? "hard" : "soft"}};
  return j;
}

}  // namespace

void write_results_csv(std::ostream& out, const sim::BerReport& report) {
  std::vector<std::size_t> order(report.tallies.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&report](std::size_t a, std::size_t b) {
    return report.tallies[a].detector < report.tallies[b].detector;
  });

  out << "detector,user_index,ber,bit_errors,total_bits,avg_snr_db\n";
  for (std::size_t d : order) {
    const sim::DetectorTally& tally = report.tallies[d];
    for (std::size_t k = 0; k < tally.bit_errors.size(); ++k) {
      out << tally.detector << ',' << (k + 1) << ','
          << fmt_double(report.ber(d, static_cast<int>(k))) << ','
          << tally.bit_errors[k] << ',' << tally.total_bits[k] << ','
          << fmt_double(report.avg_snr_db(static_cast<Eigen::Index>(k))) << '\n';
    }
  }
}

void write_manifest(std::ostream& out, const config::Resolved& resolved,
                    const sim::BerReport& report, const std::string& csv_path,
                    const std::string& started_utc, const std::string& finished_utc) {
  nlohmann::json j;
  j["tool"] = "obmimo";
  j["version"] = kToolVersion;
  j["master_seed"] = report.master_seed;
  j["started_utc"] = started_utc;
  j["finished_utc"] = finished_utc;
  j["wall_seconds"] = report.wall_seconds;
  j["resampled_setups"] = report.resampled_setups;
  j["config"] = config_echo(resolved);
  nlohmann::json per_detector;
  for (const sim::DetectorTally& tally : report.tallies)
    per_detector[tally.detector] = csv_path;
  j["outputs"] = {{"results_csv", csv_path}, {"per_detector", per_detector}};
  out << j.dump(2) << '\n';
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  config::Resolved resolved;
  try {
    resolved = config::load(opts.config_path, opts.overrides);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    if (!e.field.empty()) err << "  field: " << e.field << '\n';
    return 2;
  }

  const std::string started = utc_now();
  sim::BerReport report;
  try {
    report = sim::run_campaign(resolved.campaign);
  } catch (const CampaignAborted& e) {
    err << "error: campaign aborted: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const std::string finished = utc_now();

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  const std::string csv_path =
      (std::filesystem::path(opts.out_dir) / "results.csv").string();
  const std::string manifest_path =
      (std::filesystem::path(opts.out_dir) / "manifest.json").string();

  {
    std::ofstream csv(csv_path);
    if (!csv) {
      err << "error: cannot write " << csv_path << '\n';
      return 1;
    }
    write_results_csv(csv, report);
  }
  {
    std::ofstream manifest(manifest_path);
    if (!manifest) {
      err << "error: cannot write " << manifest_path << '\n';
      return 1;
    }
    write_manifest(manifest, resolved, report, csv_path, started, finished);
  }

  // Per-user BER table, users in ascending order of average SNR.
  out << "per-user BER (user 1 = worst average SNR)\n";
  out << std::left << std::setw(12) << "detector";
  for (int k = 0; k < resolved.campaign.K; ++k)
    out << std::right << std::setw(11) << ("u" + std::to_string(k + 1));
  out << '\n';
  for (std::size_t d = 0; d < report.tallies.size(); ++d) {
    out << std::left << std::setw(12) << report.tallies[d].detector;
    for (int k = 0; k < resolved.campaign.K; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%11.3e", report.ber(d, k));
      out << buf;
    }
    out << '\n';
  }
  if (report.resampled_setups > 0)
    out << "note: " << report.resampled_setups
        << " setup(s) hit a singular matrix and were resampled\n";
  out << "results: " << csv_path << '\n';
  out << "manifest: " << manifest_path << '\n';
  return 0;
}

namespace {

struct CheckReporter {
  std::ostream& out;
  bool all_ok = true;

  void report(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) out << " (" << detail << ")";
    out << '\n';
    all_ok = all_ok && ok;
  }
};

}  // namespace

int cmd_validate(const ValidateOptions& opts, std::ostream& out) {
  CheckReporter rep{out};
  if (opts.corrupt_arcsine_clamp)
    receivers::detail::set_arcsine_clamp_for_tests(0.9);

  try {
    // Arcsine-law diagonal: Cov(r~) must have unit diagonal.
    {
      rng::Stream rs(opts.seed, {1});
      const auto block = diag::random_unit_block(6, 2, 0.98, 0.5, rs);
      const auto bg = receivers::bussgang(block);
      const double dev = (bg.C_rr.diagonal().real().array() - 1.0).abs().maxCoeff();
      rep.report("arcsine C_rr diagonal equals 1", dev < 1e-12,
                 "max deviation " + fmt_double(dev));
    }

    // Bussgang uncorrelatedness at small M.
    {
      rng::Stream rs(opts.seed, {2});
      const auto block = diag::random_unit_block(4, 2, 0.98, 0.5, rs);
      const auto stats = diag::bussgang_statistics(block, 50000, rs);
      rep.report("Bussgang distortion uncorrelated with y",
                 stats.cross_max_abs < 0.02,
                 "max |E[e y^H]| " + fmt_double(stats.cross_max_abs));
    }

    // Sign-refinement identity against a direct per-symbol inverse.
    {
      rng::Stream rs(opts.seed, {3});
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const auto block = diag::random_unit_block(4, 2, 0.95, 0.4, rs);
        const auto pre = admm::precompute_block(block, 0.2);
        Vec r(block.H.rows());
        for (Eigen::Index m = 0; m < r.size(); ++m)
          r(m) = rs.uniform() < 0.5 ? -1.0 : 1.0;
        const Mat direct = diag::direct_symbol_inverse(block, pre.A, r, pre.rho);
        const Mat via_identity = r.asDiagonal() * pre.M0 * r.asDiagonal();
        worst = std::max(worst, (via_identity - direct).cwiseAbs().maxCoeff() /
                                    direct.cwiseAbs().maxCoeff());
      }
      rep.report("sign-refinement identity", worst < std::max(opts.tol, 1e-8),
                 "max relative deviation " + fmt_double(worst));
    }

    // Closed-form updates against numerical subproblem minimizers.
    {
      rng::Stream rs(opts.seed, {4});
      double worst = 0.0;
      for (int i = 0; i < 20; ++i) {
        const auto block = diag::random_unit_block(4, 2, 0.95, 0.4, rs);
        const auto pre = admm::precompute_block(block, 0.2);
        Vec r(block.H.rows());
        for (Eigen::Index m = 0; m < r.size(); ++m)
          r(m) = rs.uniform() < 0.5 ? -1.0 : 1.0;
        const auto probe = diag::random_probe(block.H.rows(), block.H.cols(), rs);
        const Mat a_tilde = diag::assemble_a_tilde(pre.A, r);
        const Mat b_tilde = diag::assemble_b_tilde(block, pre.A, r);

        const Vec z_cf = admm::z_update(pre, r, probe.t, probe.x, probe.u1, probe.u2);
        const Vec z_or = diag::oracle_z_update(b_tilde, a_tilde, probe, pre.rho);
        worst = std::max(worst, (z_cf - z_or).cwiseAbs().maxCoeff());

        const Vec az = a_tilde * z_cf;
        worst = std::max(worst, (admm::t_update_hard(z_cf, probe.u1) -
                                 diag::oracle_t_update(z_cf, probe.u1))
                                    .cwiseAbs()
                                    .maxCoeff());
        worst = std::max(worst, (admm::x_update_hard(az, probe.u2) -
                                 diag::oracle_x_update(az, probe.u2))
                                    .cwiseAbs()
                                    .maxCoeff());
      }
      rep.report("closed-form updates match subproblem minimizers",
                 worst < opts.tol, "max deviation " + fmt_double(worst));
    }

    // ML operator identities A H = I and B H = 0.
    {
      rng::Stream rs(opts.seed, {5});
      const auto block = diag::random_unit_block(6, 2, 0.95, 0.4, rs);
      const auto pre = admm::precompute_block(block, 0.2);
      const Eigen::Index n2k = block.H.cols();
      const double ah = (pre.A * block.H - Mat::Identity(n2k, n2k)).cwiseAbs().maxCoeff();
      const double bh = (pre.B * block.H).cwiseAbs().maxCoeff() /
                        (pre.B.cwiseAbs().maxCoeff() * block.H.cwiseAbs().maxCoeff());
      rep.report("A H = I", ah < 1e-8, "max residual " + fmt_double(ah));
      rep.report("B H = 0", bh < 1e-8, "relative residual " + fmt_double(bh));
    }

    // Softplus tail behavior.
    {
      const double hi = admm::softplus(30.0) - 30.0;
      const double lo = admm::softplus(-30.0);
      rep.report("softplus tails match max(0,.)", hi < 1e-12 && lo < 1e-12,
                 "deviations " + fmt_double(hi) + ", " + fmt_double(lo));
    }
  } catch (const std::exception& e) {
    rep.report("invariant suite", false, e.what());
  }

  if (opts.corrupt_arcsine_clamp)
    receivers::detail::set_arcsine_clamp_for_tests(1.0);
  out << (rep.all_ok ? "all checks passed\n" : "some checks FAILED\n");
  return rep.all_ok ? 0 : 1;
}

}  // namespace obmimo::cli

#include "obmimo/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "obmimo/errors.hpp"

namespace obmimo::sim {

std::string DetectorSpec::name() const {
  switch (kind) {
    case DetectorKind::MRC: return "MRC";
    case DetectorKind::ZF: return "ZF";
    case DetectorKind::MMSE: return "MMSE";
    case DetectorKind::BMRC: return "BMRC";
    case DetectorKind::BZF: return "BZF";
    case DetectorKind::BMMSE: return "BMMSE";
    case DetectorKind::AdmmHard: return "ADMM-hard";
    case DetectorKind::AdmmSoft: return "ADMM-soft";
  }
  return "?";
}

DetectorSpec parse_detector(const std::string& name, const admm::AdmmConfig& base_admm) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  DetectorSpec spec;
  spec.admm = base_admm;
  if (s == "mrc") spec.kind = DetectorKind::MRC;
  else if (s == "zf") spec.kind = DetectorKind::ZF;
  else if (s == "mmse") spec.kind = DetectorKind::MMSE;
  else if (s == "bmrc") spec.kind = DetectorKind::BMRC;
  else if (s == "bzf") spec.kind = DetectorKind::BZF;
  else if (s == "bmmse") spec.kind = DetectorKind::BMMSE;
  else if (s == "admm")
    spec.kind = base_admm.variant == admm::Variant::Hard ? DetectorKind::AdmmHard
                                                         : DetectorKind::AdmmSoft;
  else if (s == "admm-hard" || s == "admm_hard") spec.kind = DetectorKind::AdmmHard;
  else if (s == "admm-soft" || s == "admm_soft") spec.kind = DetectorKind::AdmmSoft;
  else throw ConfigError("unknown detector '" + name + "'", "campaign.detectors");

  if (spec.kind == DetectorKind::AdmmHard) spec.admm.variant = admm::Variant::Hard;
  if (spec.kind == DetectorKind::AdmmSoft) spec.admm.variant = admm::Variant::Soft;
  return spec;
}

void CampaignConfig::validate() const {
  if (M < 1 || K < 1) throw ContractViolation("M and K must be at least 1");
  if (n_setups < 1) throw ContractViolation("n_setups must be at least 1");
  if (n_uses < 1) throw ContractViolation("n_uses must be at least 1");
  if (detectors.empty()) throw ContractViolation("detector list must be nonempty");
  if (workers < 0) throw ContractViolation("workers must be nonnegative");
  cell.validate();
  power.validate();
  impairments().validate();
  for (const DetectorSpec& d : detectors)
    if (d.is_admm()) d.admm.validate();
}

model::ImpairmentParams CampaignConfig::impairments() const {
  model::ImpairmentParams imp;
  imp.kappa_r = kappa_r;
  imp.sigma2 = sigma2;
  if (kappa_t.size() == 1) {
    imp.kappa_t = Vec::Constant(K, kappa_t[0]);
  } else if (kappa_t.size() == static_cast<std::size_t>(K)) {
    imp.kappa_t = Eigen::Map<const Vec>(kappa_t.data(), K);
  } else {
    throw ContractViolation("kappa_t must have 1 or K entries");
  }
  return imp;
}

double BerReport::ber(std::size_t detector_idx, int rank) const {
  const DetectorTally& t = tallies.at(detector_idx);
  return static_cast<double>(t.bit_errors.at(rank)) /
         static_cast<double>(t.total_bits.at(rank));
}

double BerReport::avg_ber(std::size_t detector_idx) const {
  const DetectorTally& t = tallies.at(detector_idx);
  std::int64_t errs = 0, bits = 0;
  for (std::size_t k = 0; k < t.bit_errors.size(); ++k) {
    errs += t.bit_errors[k];
    bits += t.total_bits[k];
  }
  return static_cast<double>(errs) / static_cast<double>(bits);
}

namespace {

constexpr int kMaxAttempts = 5;

struct SetupScratch {
  scenario::UserDrop drop;
  model::ChannelBlock block;
  std::vector<receivers::CombinerMatrix> combiners;  // by detector slot (linear)
  std::vector<admm::BlockPrecompute> precomputes;    // by detector slot (admm)
  std::vector<int> rank_of;  // user index -> SNR rank
  Vec snr_db;
};

// Builds everything that can fail with a singularity, for one attempt.
SetupScratch build_setup(const CampaignConfig& cfg, std::uint64_t setup_index,
                         std::uint64_t attempt) {
  const model::ImpairmentParams imp = cfg.impairments();

  SetupScratch sc;
  {
    rng::Stream rs(cfg.master_seed, {setup_index, attempt, rng::kUserDrop});
    sc.drop = scenario::drop_users(cfg.cell, cfg.K, rs);
  }
  sc.drop.p = scenario::power_control(sc.drop.beta, cfg.power);
  const Vec snr = scenario::average_snr(sc.drop.beta, sc.drop.p, cfg.M, imp);
  sc.drop.snr_order = scenario::snr_order(snr);
  sc.rank_of.resize(cfg.K);
  sc.snr_db.resize(cfg.K);
  for (int rank = 0; rank < cfg.K; ++rank) {
    sc.rank_of[sc.drop.snr_order[rank]] = rank;
    sc.snr_db(rank) = 10.0 * std::log10(snr(sc.drop.snr_order[rank]));
  }

  {
    rng::Stream rs(cfg.master_seed, {setup_index, attempt, rng::kFading});
    sc.block = scenario::draw_block(sc.drop.beta, sc.drop.p, cfg.M, imp, rs);
  }

  sc.combiners.resize(cfg.detectors.size());
  sc.precomputes.resize(cfg.detectors.size());
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    const DetectorSpec& spec = cfg.detectors[d];
    if (spec.is_admm()) {
      sc.precomputes[d] = admm::precompute_block(sc.block, spec.admm.rho);
    } else {
      receivers::Kind kind;
      switch (spec.kind) {
        case DetectorKind::MRC: kind = receivers::Kind::MRC; break;
        case DetectorKind::ZF: kind = receivers::Kind::ZF; break;
        case DetectorKind::MMSE: kind = receivers::Kind::MMSE; break;
        case DetectorKind::BMRC: kind = receivers::Kind::BMRC; break;
        case DetectorKind::BZF: kind = receivers::Kind::BZF; break;
        default: kind = receivers::Kind::BMMSE; break;
      }
      sc.combiners[d] = receivers::make_combiner(sc.block, kind);
    }
  }
  return sc;
}

}  // namespace

SetupResult run_setup(const CampaignConfig& cfg, std::uint64_t setup_index,
                      const SetupHooks* hooks) {
  const model::ImpairmentParams imp = cfg.impairments();
  const std::size_t n_det = cfg.detectors.size();

  SetupResult result;
  result.bit_errors.assign(n_det, std::vector<std::int64_t>(cfg.K, 0));

  SetupScratch sc;
  std::uint64_t attempt = 0;
  for (;; ++attempt) {
    try {
      sc = build_setup(cfg, setup_index, attempt);
      break;
    } catch (const SingularMatrixError& err) {
      if (attempt + 1 >= kMaxAttempts)
        throw SingularMatrixError("setup " + std::to_string(setup_index) +
                                  " after resampling: " + err.where);
      ++result.resamples;
    }
  }
  result.snr_db = sc.snr_db;

  for (int use = 0; use < cfg.n_uses; ++use) {
    const std::uint64_t u = static_cast<std::uint64_t>(use);
    rng::Stream sym_rs(cfg.master_seed, {setup_index, attempt, rng::kSymbols, u});
    rng::Stream noise_rs(cfg.master_seed, {setup_index, attempt, rng::kNoise, u});

    const model::SymbolFrame frame = model::random_frame(cfg.K, sym_rs);
    const auto [y, z] = model::transmit(sc.block, frame, imp, noise_rs);
    const model::QuantizedObservation obs = model::quantize_one_bit(z);
    if (hooks && hooks->on_quantize) hooks->on_quantize(obs);

    for (std::size_t d = 0; d < n_det; ++d) {
      const DetectorSpec& spec = cfg.detectors[d];
      model::SymbolFrame decided;
      if (spec.is_admm()) {
        const std::uint64_t variant_tag =
            spec.kind == DetectorKind::AdmmHard ? 1 : 2;
        rng::Stream init_rs(cfg.master_seed,
                            {setup_index, attempt, rng::kAdmmInit, u, variant_tag});
        const admm::AdmmResult res =
            admm::admm_detect(sc.precomputes[d], obs.r, spec.admm, init_rs);
        decided = admm::slice_admm(res.x_final);
      } else {
        decided = receivers::detect_linear(sc.combiners[d], obs);
      }
      // Two bits per symbol: signs of the real and imaginary parts.
      for (int k = 0; k < cfg.K; ++k) {
        int errs = 0;
        if (decided.x(k) * frame.x(k) < 0.0) ++errs;
        if (decided.x(cfg.K + k) * frame.x(cfg.K + k) < 0.0) ++errs;
        result.bit_errors[d][sc.rank_of[k]] += errs;
      }
    }
  }
  return result;
}

BerReport run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n_det = cfg.detectors.size();
  std::vector<SetupResult> results(cfg.n_setups);
  std::vector<char> failed(cfg.n_setups, 0);

  int workers = cfg.workers > 0
                    ? cfg.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, cfg.n_setups));

  std::atomic<int> next{0};
  auto worker_fn = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= cfg.n_setups) return;
      try {
        results[i] = run_setup(cfg, static_cast<std::uint64_t>(i));
      } catch (const SingularMatrixError&) {
        failed[i] = 1;
      }
    }
  };

  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (std::thread& t : pool) t.join();
  }

  const int n_failed = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
  if (n_failed * 100 > cfg.n_setups)
    throw CampaignAborted(std::to_string(n_failed) + " of " +
                          std::to_string(cfg.n_setups) +
                          " setups stayed singular after resampling");

  BerReport report;
  report.master_seed = cfg.master_seed;
  report.n_setups = cfg.n_setups;
  report.n_uses = cfg.n_uses;
  report.tallies.resize(n_det);
  for (std::size_t d = 0; d < n_det; ++d) {
    report.tallies[d].detector = cfg.detectors[d].name();
    report.tallies[d].bit_errors.assign(cfg.K, 0);
    report.tallies[d].total_bits.assign(cfg.K, 0);
  }
  report.avg_snr_db = Vec::Zero(cfg.K);

  // Sequential reduction in setup order so floating-point sums (and therefore
  // the whole report) are identical for every worker count.
  int n_ok = 0;
  for (int i = 0; i < cfg.n_setups; ++i) {
    if (failed[i]) continue;
    ++n_ok;
    report.resampled_setups += results[i].resamples > 0 ? 1 : 0;
    report.avg_snr_db += results[i].snr_db;
    for (std::size_t d = 0; d < n_det; ++d)
      for (int k = 0; k < cfg.K; ++k) {
        report.tallies[d].bit_errors[k] += results[i].bit_errors[d][k];
        report.tallies[d].total_bits[k] += 2LL * cfg.n_uses;
      }
  }
  report.avg_snr_db /= std::max(1, n_ok);

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace obmimo::sim

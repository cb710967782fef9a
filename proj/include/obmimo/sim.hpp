#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "obmimo/admm.hpp"
#include "obmimo/model.hpp"
#include "obmimo/receivers.hpp"
#include "obmimo/scenario.hpp"
#include "obmimo/types.hpp"

namespace obmimo::sim {

enum class DetectorKind { MRC, ZF, MMSE, BMRC, BZF, BMMSE, AdmmHard, AdmmSoft };

/// One detector to run; ADMM kinds carry their parameters.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::BMMSE;
  admm::AdmmConfig admm;

  bool is_admm() const {
    return kind == DetectorKind::AdmmHard || kind == DetectorKind::AdmmSoft;
  }
  std::string name() const;
};

/// Parses "mrc", "bmmse", "admm-hard", ... ; plain "admm" takes the variant
/// from base_admm. Throws ConfigError on unknown names.
DetectorSpec parse_detector(const std::string& name, const admm::AdmmConfig& base_admm);

struct CampaignConfig {
  int M = 100;
  int K = 12;
  int n_setups = 5000;
  int n_uses = 200;
  std::vector<DetectorSpec> detectors;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = hardware concurrency

  scenario::CellConfig cell;
  scenario::PowerControlConfig power;
  double kappa_r = 0.98;
  std::vector<double> kappa_t{0.98};  // size 1 broadcasts to every user
  double sigma2 = 2e-13;

  void validate() const;
  model::ImpairmentParams impairments() const;
};

/// Per-detector integer tallies. Users are indexed by ascending-SNR rank
/// within each setup, i.e. rank 0 aggregates each setup's worst-SNR user.
struct DetectorTally {
  std::string detector;
  std::vector<std::int64_t> bit_errors;  // length K, by SNR rank
  std::vector<std::int64_t> total_bits;  // length K, by SNR rank
};

struct BerReport {
  std::vector<DetectorTally> tallies;
  Vec avg_snr_db;           // per SNR rank, averaged over setups
  std::uint64_t master_seed = 0;
  int n_setups = 0;
  int n_uses = 0;
  int resampled_setups = 0;  // setups that hit a singularity and were redrawn
  double wall_seconds = 0.0;

  double ber(std::size_t detector_idx, int rank) const;
  /// Average BER over all users (total errors / total bits).
  double avg_ber(std::size_t detector_idx) const;
};

/// Test hooks injected into run_setup.
struct SetupHooks {
  std::function<void(const model::QuantizedObservation&)> on_quantize;
};

/// One channel setup: a user drop, a fading block, per-block combiner and
/// ADMM precomputation, then n_uses shared observations fed to every
/// detector. Returns errors indexed [detector][snr_rank].
struct SetupResult {
  std::vector<std::vector<std::int64_t>> bit_errors;
  Vec snr_db;      // per rank, this setup's user SNRs in dB
  int resamples = 0;
};

SetupResult run_setup(const CampaignConfig& cfg, std::uint64_t setup_index,
                      const SetupHooks* hooks = nullptr);

/// Full Monte-Carlo campaign. Deterministic for a given config (including
/// master_seed) regardless of the worker count; aborts if more than 1% of
/// setups stay singular after resampling.
BerReport run_campaign(const CampaignConfig& cfg);

}  // namespace obmimo::sim

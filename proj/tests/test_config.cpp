#include <doctest.h>

#include "obmimo/config.hpp"
#include "obmimo/errors.hpp"

using namespace obmimo;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults follow the experimental setup") {
  const auto r = config::defaults();
  CHECK(r.campaign.M == 100);
  CHECK(r.campaign.K == 12);
  CHECK(r.campaign.n_setups == 5000);
  CHECK(r.campaign.n_uses == 200);
  CHECK(r.campaign.cell.side_m == 250.0);
  CHECK(r.campaign.cell.pl_const_db == 130.0);
  CHECK(r.campaign.cell.pl_slope == 37.6);
  CHECK(r.campaign.power.p_max_w == 0.1);
  CHECK(r.campaign.power.delta_db == 15.0);
  CHECK(r.campaign.kappa_r == 0.98);
  CHECK(r.campaign.sigma2 == 2e-13);
  CHECK(r.admm.rho == 0.2);
  CHECK(r.admm.iterations == 100);
  CHECK(r.admm.variant == admm::Variant::Soft);
}

TEST_CASE("full config round trip") {
  const std::string text = R"(
# desk-scale experiment
[campaign]
m = 64
k = 8
setups = 300
uses = 50
seed = 42
workers = 4
detectors = ["mrc", "bmmse", "admm-soft"]

[cell]
side_m = 250.0
min_dist_m = 10.0

[power]
p_max_w = 0.1
delta_db = 15.0

[impairment]
kappa_r = 0.98
kappa_t = 0.98
sigma2 = 2e-13

[admm]
rho = 0.2
iterations = 100
variant = "soft"
)";
  const auto r = config::parse_text(text, {});
  CHECK(r.campaign.M == 64);
  CHECK(r.campaign.K == 8);
  CHECK(r.campaign.n_setups == 300);
  CHECK(r.campaign.master_seed == 42);
  CHECK(r.campaign.workers == 4);
  REQUIRE(r.campaign.detectors.size() == 3);
  CHECK(r.detector_names[0] == "MRC");
  CHECK(r.detector_names[2] == "ADMM-soft");
}

TEST_CASE("unknown keys and sections are hard errors") {
  CHECK_THROWS_AS(config::parse_text("[campaign]\nmm = 3\n", {}), ConfigError);
  CHECK_THROWS_AS(config::parse_text("[turbo]\nx = 1\n", {}), ConfigError);
  try {
    config::parse_text("[cell]\nside = 100\n", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cell.side") != std::string::npos);
  }
}

TEST_CASE("malformed values are rejected with line numbers") {
  CHECK_THROWS_AS(config::parse_text("[campaign]\nm = \"many\"\n", {}), ConfigError);
  CHECK_THROWS_AS(config::parse_text("[campaign]\nm = 3.5\n", {}), ConfigError);
  CHECK_THROWS_AS(config::parse_text("[admm]\nvariant = \"hardish\"\n", {}), ConfigError);
  CHECK_THROWS_AS(config::parse_text("m = 3\n", {}), ConfigError);  // no section
  CHECK_THROWS_AS(config::parse_text("[campaign]\nm = 3\nm = 4\n", {}), ConfigError);
}

TEST_CASE("kappa_t accepts a scalar or a per-user array") {
  auto r = config::parse_text("[campaign]\nk = 3\n[impairment]\nkappa_t = 0.9\n", {});
  CHECK(r.campaign.impairments().kappa_t.size() == 3);
  CHECK(r.campaign.impairments().kappa_t(2) == 0.9);

  r = config::parse_text(
      "[campaign]\nk = 3\n[impairment]\nkappa_t = [0.9, 0.95, 1.0]\n", {});
  CHECK(r.campaign.impairments().kappa_t(1) == 0.95);

  CHECK_THROWS_AS(config::parse_text(
                      "[campaign]\nk = 3\n[impairment]\nkappa_t = [0.9, 0.95]\n", {}),
                  ConfigError);
}

TEST_CASE("overrides win over file values") {
  config::Overrides ov;
  ov.seed = 99;
  ov.setups = 12;
  ov.variant = "hard";
  ov.detectors = std::vector<std::string>{"admm"};
  const auto r = config::parse_text("[campaign]\nseed = 1\nsetups = 5000\n", ov);
  CHECK(r.campaign.master_seed == 99);
  CHECK(r.campaign.n_setups == 12);
  REQUIRE(r.campaign.detectors.size() == 1);
  CHECK(r.detector_names[0] == "ADMM-hard");
}

TEST_CASE("invalid resolved configs are reported as config errors") {
  CHECK_THROWS_AS(config::parse_text("[admm]\nrho = -1.0\n", {}), ConfigError);
  CHECK_THROWS_AS(config::parse_text("[campaign]\nsetups = 0\n", {}), ConfigError);
}

TEST_CASE("missing file is a config error naming the path") {
  try {
    config::load("/nonexistent/fig1.toml", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/fig1.toml") != std::string::npos);
  }
}

TEST_CASE("64-bit seeds survive parsing") {
  const auto r =
      config::parse_text("[campaign]\nseed = 18446744073709551615\n", {});
  CHECK(r.campaign.master_seed == 18446744073709551615ULL);
}

TEST_SUITE_END();

#include <doctest.h>

#include <cmath>

#include "obmimo/errors.hpp"
#include "obmimo/scenario.hpp"

using namespace obmimo;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("path loss formula at reference distances") {
  scenario::CellConfig cell;
  // d = 0.1 km: 130 + 37.6 log10(0.1) = 92.4 dB.
  CHECK(scenario::path_loss_beta(cell, 100.0) ==
        doctest::Approx(std::pow(10.0, -9.24)).epsilon(1e-12));
  // d = 1 km: 130 dB exactly.
  CHECK(scenario::path_loss_beta(cell, 1000.0) ==
        doctest::Approx(1e-13).epsilon(1e-12));
}

TEST_CASE("drop_users respects the cell geometry") {
  scenario::CellConfig cell;
  rng::Stream rs(101, {1});
  const auto drop = scenario::drop_users(cell, 64, rs);
  for (int k = 0; k < 64; ++k) {
    const double x = drop.positions(k, 0);
    const double y = drop.positions(k, 1);
    CHECK(std::abs(x) <= 125.0);
    CHECK(std::abs(y) <= 125.0);
    const double dist = std::hypot(x, y);
    CHECK(dist >= cell.min_dist_m);
    CHECK(drop.beta(k) ==
          doctest::Approx(scenario::path_loss_beta(cell, dist)).epsilon(1e-14));
  }
}

TEST_CASE("power_control examples") {
  scenario::PowerControlConfig pc;  // p_max = 0.1, delta = 15 dB

  SUBCASE("equal betas transmit at p_max") {
    const Vec p = scenario::power_control(Vec::Constant(4, 1e-11), pc);
    CHECK((p.array() == 0.1).all());
  }
  SUBCASE("strong user is throttled to the 15 dB cap") {
    Vec beta(2);
    beta << 1e-13, 1e-10;
    const Vec p = scenario::power_control(beta, pc);
    CHECK(p(0) == 0.1);
    CHECK(p(1) == doctest::Approx(3.16227766e-3).epsilon(1e-8));
  }
  SUBCASE("single user transmits at p_max") {
    const Vec p = scenario::power_control(Vec::Constant(1, 1e-12), pc);
    CHECK(p(0) == 0.1);
  }
}

TEST_CASE("power_control properties") {
  scenario::PowerControlConfig pc;
  rng::Stream rs(55, {2});
  Vec beta(8);
  for (int k = 0; k < 8; ++k) beta(k) = std::pow(10.0, rs.uniform(-13.0, -8.0));
  const Vec p = scenario::power_control(beta, pc);

  // Scale equivariance: only beta ratios enter.
  const Vec p_scaled = scenario::power_control((37.5 * beta).eval(), pc);
  CHECK((p - p_scaled).cwiseAbs().maxCoeff() < 1e-15);

  // Worst user at p_max; SNR spread capped at delta dB.
  int worst = 0;
  beta.minCoeff(&worst);
  CHECK(p(worst) == 0.1);
  const double floor_snr = 0.1 * beta(worst);
  for (int k = 0; k < 8; ++k) {
    CHECK(p(k) <= 0.1);
    CHECK(p(k) * beta(k) <= floor_snr * std::pow(10.0, 1.5) * (1.0 + 1e-9));
  }
}

TEST_CASE("draw_block fading variance matches beta") {
  const auto imp = model::ImpairmentParams::uniform(1, 1.0, 1.0, 1e-13);
  Vec beta(1), p(1);
  beta << 3.7e-10;
  p << 0.1;
  rng::Stream rs(77, {3});
  const auto block = scenario::draw_block(beta, p, 100000, imp, rs);
  const double var = block.G.col(0).squaredNorm() / 100000.0;
  CHECK(var == doctest::Approx(beta(0)).epsilon(0.05));
}

TEST_CASE("draw_block is deterministic for a fixed stream") {
  const auto imp = model::ImpairmentParams::uniform(2, 0.98, 0.98, 1e-13);
  Vec beta = Vec::Constant(2, 1e-10);
  Vec p = Vec::Constant(2, 0.1);
  rng::Stream r1(42, {4}), r2(42, {4});
  const auto b1 = scenario::draw_block(beta, p, 8, imp, r1);
  const auto b2 = scenario::draw_block(beta, p, 8, imp, r2);
  CHECK((b1.G - b2.G).cwiseAbs().maxCoeff() == 0.0);
  CHECK((b1.H - b2.H).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("snr_order is an ascending permutation") {
  Vec snr(5);
  snr << 3.0, 1.0, 2.0, 5.0, 4.0;
  const auto order = scenario::snr_order(snr);
  REQUIRE(order.size() == 5);
  std::vector<bool> seen(5, false);
  for (int idx : order) {
    REQUIRE(idx >= 0);
    REQUIRE(idx < 5);
    seen[idx] = true;
  }
  for (bool s : seen) CHECK(s);
  for (std::size_t i = 1; i < order.size(); ++i)
    CHECK(snr(order[i - 1]) <= snr(order[i]));
}

TEST_CASE("config validation") {
  scenario::CellConfig cell;
  cell.min_dist_m = 200.0;  // >= side/2
  CHECK_THROWS_AS(cell.validate(), ContractViolation);
  scenario::PowerControlConfig pc;
  pc.p_max_w = 0.0;
  CHECK_THROWS_AS(pc.validate(), ContractViolation);
}

TEST_SUITE_END();

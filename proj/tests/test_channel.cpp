// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/channel.hpp"
#include "oracles.hpp"

using namespace mdrc;

namespace {

ScenarioConfig base_config(int k, int m, int n) {
  ScenarioConfig cfg;
  cfg.users = k;
  cfg.antennas = m;
  cfg.relays = n;
  cfg.alpha = 0.5;
  cfg.user_power.assign(static_cast<std::size_t>(k), 1.0);
  cfg.relay_power.assign(static_cast<std::size_t>(n), 1.0 / n);
  cfg.sigma2_relay = 1.0;
  cfg.sigma2_user = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("scenario JSON round trip with exact field names") {
  const char* text = R"({
    "K": 3, "M": 4, "N": 4, "alpha": 0.5,
    "user_power": 1.0, "relay_power": [0.25, 0.25, 0.25, 0.25],
    "sigma2_relay": 1.0, "sigma2_user": 1.0,
    "snr_grid_db": [0, 10, 20], "seeds": [1, 2, 3]
  })";
  ScenarioConfig cfg = ScenarioConfig::from_json(text);
  CHECK(cfg.users == 3);
  CHECK(cfg.antennas == 4);
  CHECK(cfg.relays == 4);
  CHECK(cfg.user_power.size() == 3);  // scalar expanded
  CHECK(cfg.relay_power[2] == doctest::Approx(0.25));
  CHECK(cfg.seeds.size() == 3);

  ScenarioConfig again = ScenarioConfig::from_json(cfg.to_json());
  CHECK(again.users == cfg.users);
  CHECK(again.alpha == doctest::Approx(cfg.alpha));
  CHECK(again.snr_grid_db == cfg.snr_grid_db);
  CHECK(again.seeds == cfg.seeds);

  for (const char* field : {"K", "M", "N", "alpha", "user_power", "relay_power",
                            "sigma2_relay", "sigma2_user", "snr_grid_db", "seeds"})
    CHECK(cfg.to_json().find(std::string("\"") + field + "\"") != std::string::npos);
}

TEST_CASE("scenario validation failures") {
  ScenarioConfig cfg = base_config(2, 2, 2);
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = base_config(1, 2, 2);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = base_config(2, 2, 2);
  cfg.user_power[0] = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK_THROWS_AS(ScenarioConfig::from_json("{not json"), Error);
  CHECK_THROWS_AS(ScenarioConfig::from_json("{\"K\":2}"), Error);
}

TEST_CASE("sampling dimensions and determinism") {
  ScenarioConfig cfg = base_config(3, 4, 4);
  cfg.seeds = {9};
  ChannelInstance a = ChannelInstance::sample(cfg, 9);
  CHECK(a.uplink.size() == 3);
  CHECK(a.downlink.size() == 3);
  CHECK(a.uplink[0].rows() == 4);
  CHECK(a.uplink[0].cols() == 4);
  CHECK(a.downlink[0].rows() == 4);
  CHECK(a.downlink[0].cols() == 4);
  CHECK(a.effective_relays == 4);

  ChannelInstance b = ChannelInstance::sample(cfg, 9);
  for (int k = 0; k < 3; ++k) {
    CHECK((a.uplink[static_cast<std::size_t>(k)] - b.uplink[static_cast<std::size_t>(k)])
              .max_abs() == 0.0);
    CHECK((a.downlink[static_cast<std::size_t>(k)] -
           b.downlink[static_cast<std::size_t>(k)])
              .max_abs() == 0.0);
  }
}

TEST_CASE("antenna disablement reduces the effective relay count") {
  ScenarioConfig cfg = base_config(2, 2, 4);
  ChannelInstance inst = ChannelInstance::sample(cfg, 5);
  CHECK(inst.relays == 4);
  CHECK(inst.effective_relays == 2);
  CHECK(inst.rq[0].r.rows() == 2);
  CHECK(inst.uplink_effective(0).rows() == 2);
  CHECK(inst.downlink_effective(1).cols() == 2);
  // The surviving rows are the lowest-index relays.
  Matrix full = inst.uplink[0];
  Matrix eff = inst.uplink_effective(0);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(eff(0, j) == full(0, j));
    CHECK(eff(1, j) == full(1, j));
  }
}

TEST_CASE("subchannel gains of an identity channel are ones") {
  std::vector<Matrix> up = {Matrix::identity(2)};
  std::vector<Matrix> down = {Matrix::identity(2)};
  ChannelInstance inst = ChannelInstance::from_matrices(up, down);
  Matrix gains = subchannel_gains(inst);
  CHECK(gains(0, 0) == doctest::Approx(1.0));
  CHECK(gains(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("subchannel gains of a diagonal channel") {
  Matrix h(2, 2);
  h(0, 0) = 2.0;
  h(1, 1) = 3.0;
  ChannelInstance inst = ChannelInstance::from_matrices({h}, {Matrix::identity(2)});
  Matrix gains = subchannel_gains(inst);
  double a = gains(0, 0), b = gains(0, 1);
  CHECK(std::min(a, b) == doctest::Approx(4.0));
  CHECK(std::max(a, b) == doctest::Approx(9.0));
}

TEST_CASE("gain products match the channel Gram determinant") {
  ScenarioConfig cfg = base_config(2, 4, 4);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ChannelInstance inst = ChannelInstance::sample(cfg, seed);
    Matrix gains = subchannel_gains(inst);
    for (int k = 0; k < 2; ++k) {
      double sum = 0.0;
      for (int n = 0; n < 4; ++n)
        sum += std::log2(gains(static_cast<std::size_t>(k), static_cast<std::size_t>(n)));
      double det = oracles::lu_det(inst.uplink[static_cast<std::size_t>(k)].gram());
      CHECK(std::fabs(sum - std::log2(det)) < 1e-7);
    }
  }
}

TEST_CASE("triangularization succeeds across a thousand seeds") {
  ScenarioConfig cfg = base_config(3, 3, 3);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    ChannelInstance inst = ChannelInstance::sample(cfg, seed);
    for (int k = 0; k < 3; ++k) {
      const RqFactors& rq = inst.rq[static_cast<std::size_t>(k)];
      double err = (rq.r * rq.u - inst.uplink_effective(k)).frobenius_norm();
      CHECK(err <= 1e-8 * inst.uplink_effective(k).frobenius_norm());
    }
  }
}

TEST_CASE("power scaling by SNR") {
  ScenarioConfig cfg = base_config(3, 4, 4);
  PowerScale pw = powers_at_snr(cfg, 20.0);
  CHECK(pw.user_power_w[0] == doctest::Approx(100.0));
  CHECK(pw.relay_power_w[0] == doctest::Approx(25.0));
  CHECK(pw.total_relay_power() == doctest::Approx(100.0));
}

// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <sstream>

#include "core/experiments.hpp"

using namespace mdrc;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg;
  cfg.users = 2;
  cfg.antennas = 2;
  cfg.relays = 2;
  cfg.alpha = 0.5;
  cfg.user_power = {1.0, 1.0};
  cfg.relay_power = {0.5, 0.5};
  cfg.sigma2_relay = cfg.sigma2_user = 1.0;
  cfg.snr_grid_db = {0.0, 20.0};
  cfg.seeds = {1, 2, 3};
  return cfg;
}

}  // namespace

TEST_CASE("csv header is bit-exact and reruns are byte-identical") {
  ScenarioConfig cfg = small_config();
  SweepResult a = run_sweep(cfg, {Scheme::Dist, Scheme::Cutset});
  SweepResult b = run_sweep(cfg, {Scheme::Dist, Scheme::Cutset});
  std::string csv = a.to_csv();
  CHECK(csv.rfind("scheme,snr_db,alpha,seed,sum_rate_bits,relaxed_bound,status\n", 0) == 0);
  CHECK(csv == b.to_csv());
  CHECK(a.records.size() == 2 * 2 * 3);
}

TEST_CASE("record grid is complete and bound ordering holds per record") {
  ScenarioConfig cfg = small_config();
  SweepResult result = run_sweep(cfg, {Scheme::Cutset, Scheme::Dist, Scheme::Coop});
  std::map<std::pair<double, std::uint64_t>, std::map<std::string, double>> table;
  for (const SweepRecord& r : result.records) {
    CHECK(r.status == "ok");
    CHECK(r.sum_rate_bits >= 0.0);
    CHECK(r.alpha == doctest::Approx(0.5));
    bool dup = table[{r.snr_db, r.seed}].count(r.scheme) > 0;
    CHECK_FALSE(dup);
    table[{r.snr_db, r.seed}][r.scheme] = r.sum_rate_bits;
    CHECK((r.scheme == "cutset") == r.relaxed_bound);
  }
  for (auto& [cell, by_scheme] : table) {
    REQUIRE(by_scheme.size() == 3);
    CHECK(by_scheme["cutset"] >= by_scheme["coop"] - 1e-6);
    CHECK(by_scheme["coop"] >= by_scheme["dist"] - 1e-6);
  }
}

TEST_CASE("empty scheme set yields an empty sweep") {
  SweepResult result = run_sweep(small_config(), {});
  CHECK(result.records.empty());
  CHECK(result.to_csv() == "scheme,snr_db,alpha,seed,sum_rate_bits,relaxed_bound,status\n");
}

TEST_CASE("scheme list parsing") {
  std::vector<Scheme> schemes = parse_scheme_list("dist,coop,cutset,df,af");
  CHECK(schemes.size() == 5);
  CHECK(schemes[0] == Scheme::Dist);
  CHECK(schemes[4] == Scheme::Af);
  CHECK_THROWS_AS(parse_scheme_list("dist,nope"), Error);
}

TEST_CASE("alpha sweep emits both schemes per grid point") {
  ScenarioConfig cfg = small_config();
  cfg.seeds = {1, 2};
  SweepResult result = run_alpha_sweep(cfg, {0.3, 0.5, 0.7}, {20.0});
  CHECK(result.records.size() == 2 * 3 * 1 * 2);
  for (const SweepRecord& r : result.records) {
    CHECK((r.scheme == "dist" || r.scheme == "coop"));
    CHECK((r.alpha == doctest::Approx(0.3) || r.alpha == doctest::Approx(0.5) ||
           r.alpha == doctest::Approx(0.7)));
  }
  CHECK_THROWS_AS(run_alpha_sweep(cfg, {0.0}, {20.0}), Error);
}

TEST_CASE("the sum rate peaks near the middle of the alpha grid") {
  ScenarioConfig cfg = small_config();
  cfg.users = 3;
  cfg.antennas = 3;
  cfg.relays = 3;
  cfg.user_power = {1.0, 1.0, 1.0};
  cfg.relay_power = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.seeds = {11, 12, 13, 14};
  std::vector<double> alphas = {0.2, 0.35, 0.5, 0.65, 0.8};
  SweepResult result = run_alpha_sweep(cfg, alphas, {25.0});
  for (const char* scheme : {"dist", "coop"}) {
    std::map<double, double> mean_by_alpha;
    std::map<double, int> count_by_alpha;
    for (const SweepRecord& r : result.records) {
      if (r.scheme != scheme) continue;
      mean_by_alpha[r.alpha] += r.sum_rate_bits;
      ++count_by_alpha[r.alpha];
    }
    double best_alpha = -1.0, best = -1.0;
    for (auto& [alpha, total] : mean_by_alpha) {
      double mean = total / count_by_alpha[alpha];
      if (mean > best) {
        best = mean;
        best_alpha = alpha;
      }
    }
    CHECK(best_alpha == doctest::Approx(0.5));
  }
}

TEST_CASE("two-user cooperative advantage fades at high SNR off the half split") {
  ScenarioConfig cfg = small_config();
  cfg.alpha = 0.7;
  double acc = 0.0;
  const int seeds = 30;
  SolveOptions opts;
  PowerScale pw = powers_at_snr(cfg, 40.0);
  for (int s = 0; s < seeds; ++s) {
    ChannelInstance inst = ChannelInstance::sample(cfg, 100 + static_cast<std::uint64_t>(s));
    double coop = maximize_sumrate_coop(inst, cfg.alpha, pw, opts).sum_rate_bits;
    double dist = maximize_sumrate_dist(inst, cfg.alpha, pw, opts).sum_rate_bits;
    CHECK(coop >= dist - 1e-6);
    acc += coop - dist;
  }
  CHECK(acc / seeds < 0.15);
}

TEST_CASE("lattice demo runs clean in the noiseless setting") {
  NestedLatticeChain chain;
  chain.dim = 1;
  chain.fine_scale = 1.0;
  chain.coarse_scales = {8.0, 4.0, 2.0};
  LatticeDemoReport report = lattice_demo({chain, chain}, 40, 0.0);
  CHECK(report.failures == 0);
  CHECK(report.runs == 40);
  CHECK(report.users == 3);
  std::string text = report.to_text();
  CHECK(text.find("0 failed") != std::string::npos);
}

TEST_CASE("verify report runs the applicable checks on a tiny budget") {
  ScenarioConfig cfg = small_config();
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.snr_grid_db = {10.0, 30.0};
  VerifyReport report = verify_theorems(cfg);
  CHECK(!report.checks.empty());
  bool found_ordering = false;
  for (const VerifyCheck& c : report.checks) {
    if (c.name.find("bound ordering") != std::string::npos) {
      found_ordering = true;
      CHECK(c.pass);
    }
  }
  CHECK(found_ordering);
  std::string text = report.to_text();
  CHECK(text.find("failures:") != std::string::npos);
}

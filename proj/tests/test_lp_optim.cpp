// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/optim.hpp"
#include "core/rates.hpp"
#include "oracles.hpp"

using namespace mdrc;

namespace {

ScenarioConfig config(int k, int m, int n, double alpha) {
  ScenarioConfig cfg;
  cfg.users = k;
  cfg.antennas = m;
  cfg.relays = n;
  cfg.alpha = alpha;
  cfg.user_power.assign(static_cast<std::size_t>(k), 1.0);
  cfg.relay_power.assign(static_cast<std::size_t>(n), 1.0 / n);
  cfg.sigma2_relay = cfg.sigma2_user = 1.0;
  return cfg;
}

LpProblem random_lp(Rng& rng, int max_vars, int max_rows) {
  int n = 1 + static_cast<int>(rng.uniform01() * max_vars);
  if (n > max_vars) n = max_vars;
  LpProblem p = LpProblem::sum_rate(n);
  for (int j = 0; j < n; ++j)
    p.objective[static_cast<std::size_t>(j)] = 0.25 + rng.uniform01();
  // Per-variable caps keep every instance bounded.
  for (int j = 0; j < n; ++j)
    p.rows.push_back({{{j, 1.0}}, rng.uniform01() * 4.0});
  int extra = static_cast<int>(rng.uniform01() * (max_rows - n));
  for (int r = 0; r < extra; ++r) {
    LpRow row;
    for (int j = 0; j < n; ++j)
      if (rng.uniform01() < 0.6)
        row.coeffs.push_back({j, 0.1 + rng.uniform01()});
    if (row.coeffs.empty()) row.coeffs.push_back({0, 1.0});
    row.cap = rng.uniform01() * 3.0;
    p.rows.push_back(row);
  }
  return p;
}

}  // namespace

TEST_CASE("lp basics") {
  LpProblem p = LpProblem::sum_rate(1);
  p.rows.push_back({{{0, 1.0}}, 3.0});
  CHECK(solve_lp(p).objective == doctest::Approx(3.0));

  LpProblem q = LpProblem::sum_rate(2);
  q.rows.push_back({{{0, 1.0}}, 2.0});
  q.rows.push_back({{{1, 1.0}}, 2.0});
  q.rows.push_back({{{0, 1.0}, {1, 1.0}}, 3.0});
  LpSolution s = solve_lp(q);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[0] + s.x[1] == doctest::Approx(3.0));
}

TEST_CASE("lp detects unbounded problems") {
  LpProblem p = LpProblem::sum_rate(2);
  p.rows.push_back({{{0, 1.0}}, 1.0});  // x1 unconstrained
  CHECK_THROWS_AS(solve_lp(p), Error);
}

TEST_CASE("lp zero caps force a zero vertex") {
  LpProblem p = LpProblem::sum_rate(3);
  for (int j = 0; j < 3; ++j) p.rows.push_back({{{j, 1.0}}, 0.0});
  LpSolution s = solve_lp(p);
  CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("lp matches brute-force vertex enumeration on random instances") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    LpProblem p = random_lp(rng, 4, 10);
    double expect = oracles::lp_vertex_enumeration(p);
    LpSolution s = solve_lp(p);
    CHECK(std::fabs(s.objective - expect) <= 1e-9 * std::max(1.0, std::fabs(expect)));
  }
}

TEST_CASE("lp duals certify optimality on a random instance") {
  Rng rng(5150);
  LpProblem p = random_lp(rng, 4, 8);
  LpSolution s = solve_lp(p);
  // weak duality: c'x <= y'b with y >= 0 and A'y >= c
  double yb = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    CHECK(s.duals[i] >= -1e-12);
    yb += s.duals[i] * p.rows[i].cap;
  }
  CHECK(s.objective <= yb + 1e-7);
  CHECK(s.objective >= yb - 1e-7);  // strong duality at the optimum
}

TEST_CASE("mac_iwf single user equals direct water-filling") {
  Matrix h = sample_gaussian_matrix(3, 3, 71);
  MacIwfResult iwf = mac_iwf({h}, {2.5}, 1.0);
  EighResult es = eigh(h.gram_t());
  WaterfillResult wf = waterfill(es.values, 2.5, 1.0);
  CHECK(iwf.value_bits == doctest::Approx(wf.value_bits).epsilon(1e-8));
  CHECK(iwf.converged);
}

TEST_CASE("mac_iwf adds up over orthogonal row spaces") {
  // Two users heard by disjoint relay groups: block-diagonal Gram.
  Matrix h1(4, 2), h2(4, 2);
  Rng rng(17);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      h1(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = rng.normal();
      h2(static_cast<std::size_t>(2 + i), static_cast<std::size_t>(j)) = rng.normal();
    }
  MacIwfResult joint = mac_iwf({h1, h2}, {2.0, 3.0}, 1.0);
  MacIwfResult solo1 = mac_iwf({h1}, {2.0}, 1.0);
  MacIwfResult solo2 = mac_iwf({h2}, {3.0}, 1.0);
  CHECK(joint.value_bits ==
        doctest::Approx(solo1.value_bits + solo2.value_bits).epsilon(1e-7));
}

TEST_CASE("mac_iwf beats a parameterized covariance grid (K=2, N=M=2)") {
  // Oracle: grid over one user's covariance (power split + rotation
  // angle at 0.05 resolution), exact water-filling response for the
  // other. Checks global optimality of the block ascent within 1e-3.
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    Matrix h1 = sample_gaussian_matrix(2, 2, seed * 11);
    Matrix h2 = sample_gaussian_matrix(2, 2, seed * 11 + 1);
    double p1 = 1.8, p2 = 2.4, sigma2 = 1.0;
    MacIwfResult iwf = mac_iwf({h1, h2}, {p1, p2}, sigma2);

    double best = 0.0;
    for (double split = 0.0; split <= 1.0 + 1e-12; split += 0.05) {
      for (double angle = 0.0; angle < 3.14159265; angle += 0.05) {
        double c = std::cos(angle), s = std::sin(angle);
        Matrix q2(2, 2);
        double e1 = split * p2, e2 = (1.0 - split) * p2;
        q2(0, 0) = e1 * c * c + e2 * s * s;
        q2(1, 1) = e1 * s * s + e2 * c * c;
        q2(0, 1) = q2(1, 0) = (e1 - e2) * c * s;
        // Exact best response of user 1 given q2.
        Matrix w = Matrix::identity(2);
        w.add_scaled(h2 * q2 * h2.transposed(), 1.0 / sigma2);
        Matrix f = inverse_sqrt_psd(w) * h1;
        EighResult es = eigh(f.gram_t());
        std::vector<double> gains(2);
        for (int e = 0; e < 2; ++e)
          gains[static_cast<std::size_t>(e)] =
              std::max(0.0, es.values[static_cast<std::size_t>(e)]);
        WaterfillResult wf = waterfill(gains, p1, sigma2);
        double value = logdet_psd(w).log2_det + wf.value_bits;
        best = std::max(best, value);
      }
    }
    CHECK(iwf.value_bits >= best - 1e-3);
  }
}

TEST_CASE("distributive solver: zero-power limit deactivates everything") {
  ScenarioConfig cfg = config(3, 2, 2, 0.5);
  ChannelInstance inst = ChannelInstance::sample(cfg, 4);
  PowerScale pw = powers_at_snr(cfg, -80.0);
  RateSolution sol = maximize_sumrate_dist(inst, cfg.alpha, pw);
  CHECK(sol.sum_rate_bits == doctest::Approx(0.0));
  CHECK(sol.deactivated.size() == 6);
  CHECK(sol.outer_iterations <= 3 * 2 + 1);
}

TEST_CASE("distributive solver matches the projected-gradient oracle") {
  // High SNR keeps every stream active, so the relaxed program the
  // oracle solves is the one the production path solves last.
  for (std::uint64_t seed : {3ULL, 8ULL}) {
    ScenarioConfig cfg = config(2, 2, 2, 0.5);
    ChannelInstance inst = ChannelInstance::sample(cfg, seed);
    PowerScale pw = powers_at_snr(cfg, 25.0);
    RateSolution sol = maximize_sumrate_dist(inst, cfg.alpha, pw);
    REQUIRE(sol.deactivated.empty());

    oracles::RelaxedRateProgram prog;
    prog.b = 2.0 * (cfg.users - 1) / cfg.alpha;
    Matrix gains = subchannel_gains(inst);
    std::vector<double> budgets = uplink_stream_budgets(cfg.users, pw.user_power_w);
    prog.budgets = budgets;
    std::vector<std::vector<int>> index(2, std::vector<int>(2));
    for (int k = 0; k < 2; ++k)
      for (int n = 0; n < 2; ++n) {
        int j = static_cast<int>(prog.a.size());
        index[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = j;
        prog.a.push_back(pw.sigma2_relay /
                         gains(static_cast<std::size_t>(k), static_cast<std::size_t>(n)));
        prog.user_of.push_back(k);
        double ub = std::log2(budgets[static_cast<std::size_t>(k)] /
                              prog.a[static_cast<std::size_t>(j)]) /
                    prog.b;
        prog.ub.push_back(ub);
        prog.lb.push_back(std::min(0.0, ub - 1.0 / prog.b) - 3.0);
      }
    std::vector<double> relay_powers(pw.relay_power_w.begin(),
                                     pw.relay_power_w.begin() + 2);
    for (const PolymatroidConstraint& c :
         downlink_polymatroid(inst, cfg.alpha, relay_powers, pw.sigma2_user)) {
      LpRow row;
      for (int n = 0; n < 2; ++n)
        if (c.mask & (1u << n))
          for (int k2 = 0; k2 < 2; ++k2)
            if (k2 != c.user)
              row.coeffs.push_back(
                  {index[static_cast<std::size_t>(k2)][static_cast<std::size_t>(n)], 1.0});
      row.cap = c.cap_bits;
      prog.linear_rows.push_back(row);
    }
    oracles::PgaResult ref = oracles::pga_dykstra_solve(prog);
    CHECK(std::fabs(sol.sum_rate_bits - ref.value) < 1e-4);
  }
}

TEST_CASE("scheme ordering and SNR monotonicity on random instances") {
  SolveOptions opts;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    int k = seed % 2 ? 2 : 3;
    int m = seed % 3 ? 2 : 4;
    ScenarioConfig cfg = config(k, m, m, 0.5);
    ChannelInstance inst = ChannelInstance::sample(cfg, seed);
    double prev_dist = -1.0, prev_coop = -1.0, prev_cut = -1.0;
    for (double snr : {0.0, 15.0, 30.0}) {
      PowerScale pw = powers_at_snr(cfg, snr);
      double dist = maximize_sumrate_dist(inst, cfg.alpha, pw, opts).sum_rate_bits;
      double coop = maximize_sumrate_coop(inst, cfg.alpha, pw, opts).sum_rate_bits;
      double cut = cutset_bound(inst, cfg.alpha, pw, opts).sum_rate_bits;
      CHECK(dist >= -1e-12);
      CHECK(coop >= dist - 1e-6);
      CHECK(cut >= coop - 1e-6);
      CHECK(dist >= prev_dist - 1e-7);
      CHECK(coop >= prev_coop - 1e-7);
      CHECK(cut >= prev_cut - 1e-7);
      prev_dist = dist;
      prev_coop = coop;
      prev_cut = cut;
    }
  }
}

TEST_CASE("high-SNR slope of the distributive sum rate follows the theory") {
  // alpha < 1/2 is uplink-limited with slope K N alpha / (2(K-1));
  // alpha > 1/2 is downlink-limited with slope N (1-alpha) K / (2(K-1)).
  for (double alpha : {0.3, 0.7}) {
    ScenarioConfig cfg = config(2, 2, 2, alpha);
    DofQuantities dof = dof_quantities(2, 2, 2, alpha);
    double expect = std::min(2.0 * 2.0 * dof.dist_up_per_stream, dof.dist_down_sum);
    double acc = 0.0;
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ChannelInstance inst = ChannelInstance::sample(cfg, seed);
      double r60 =
          maximize_sumrate_dist(inst, cfg.alpha, powers_at_snr(cfg, 60.0)).sum_rate_bits;
      double r80 =
          maximize_sumrate_dist(inst, cfg.alpha, powers_at_snr(cfg, 80.0)).sum_rate_bits;
      double slope = (r80 - r60) / (std::log2(1e8) - std::log2(1e6));
      acc += slope;
      ++count;
    }
    double mean_slope = acc / count;
    CHECK(std::fabs(mean_slope - expect) < 0.05 * expect);
  }
}

TEST_CASE("cooperative refinement never loses to the default covariance") {
  ScenarioConfig cfg = config(3, 2, 2, 0.5);
  SolveOptions plain, refined;
  refined.refine_qr = true;
  refined.refine_iterations = 60;
  for (std::uint64_t seed = 2; seed <= 4; ++seed) {
    ChannelInstance inst = ChannelInstance::sample(cfg, seed);
    PowerScale pw = powers_at_snr(cfg, 40.0);
    double base = maximize_sumrate_coop(inst, cfg.alpha, pw, plain).sum_rate_bits;
    double better = maximize_sumrate_coop(inst, cfg.alpha, pw, refined).sum_rate_bits;
    CHECK(better >= base - 1e-9);
  }
}

TEST_CASE("cut-set bound for K=2 composes water-filling values") {
  ScenarioConfig cfg = config(2, 3, 3, 0.5);
  ChannelInstance inst = ChannelInstance::sample(cfg, 12);
  PowerScale pw = powers_at_snr(cfg, 20.0);
  RateSolution sol = cutset_bound(inst, cfg.alpha, pw);
  CHECK(sol.relaxed_bound);

  // Reconstruct the per-user cut caps directly.
  std::vector<double> expect(2);
  for (int k = 0; k < 2; ++k) {
    int other = 1 - k;
    EighResult up = eigh(inst.uplink[static_cast<std::size_t>(other)].gram_t());
    WaterfillResult upwf =
        waterfill(up.values, pw.user_power_w[static_cast<std::size_t>(other)],
                  pw.sigma2_relay);
    EighResult down = eigh(inst.downlink[static_cast<std::size_t>(k)].gram_t());
    WaterfillResult downwf =
        waterfill(down.values, pw.total_relay_power(), pw.sigma2_user);
    expect[static_cast<std::size_t>(other)] = std::min(
        0.5 * cfg.alpha * upwf.value_bits, 0.5 * (1.0 - cfg.alpha) * downwf.value_bits);
  }
  CHECK(sol.sum_rate_bits == doctest::Approx(expect[0] + expect[1]).epsilon(1e-7));
}

TEST_CASE("uplink budgets follow the slot schedule") {
  std::vector<double> budgets = uplink_stream_budgets(3, {1.0, 1.0, 1.0});
  CHECK(budgets[0] == doctest::Approx(2.0));
  CHECK(budgets[1] == doctest::Approx(1.0));
  CHECK(budgets[2] == doctest::Approx(2.0));
  std::vector<double> two = uplink_stream_budgets(2, {3.0, 5.0});
  CHECK(two[0] == doctest::Approx(3.0));
  CHECK(two[1] == doctest::Approx(5.0));
}

TEST_CASE("deactivation report is consistent") {
  ScenarioConfig cfg = config(3, 2, 2, 0.5);
  ChannelInstance inst = ChannelInstance::sample(cfg, 6);
  PowerScale pw = powers_at_snr(cfg, 2.0);  // low SNR prunes some streams
  RateSolution sol = maximize_sumrate_dist(inst, cfg.alpha, pw);
  for (auto [k, n] : sol.deactivated) {
    CHECK(sol.stream_rates(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) == 0.0);
    CHECK(sol.stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) == 0.0);
  }
  double sum = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int n = 0; n < 2; ++n)
      sum += sol.stream_rates(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
  CHECK(sum == doctest::Approx(sol.sum_rate_bits));
}

// SPDX-License-Identifier: Apache-2.0

#include "core/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "core/rates.hpp"

namespace mdrc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

struct StreamId {
  int user;
  int sub;
};

// ---------------------------------------------------------------------------
// Inner relaxed program of the deactivation loop, in rate space.
//
// maximize sum_j R_j subject to
//   per user k:  g_k(R) = sum_{j of k} a_j 2^(b R_j) <= B_k   (power budget)
//   polymatroid rows over the active streams
//   LB_j <= R_j <= UB_j
//
// Solved as an LP over linear rows, tightened with supporting hyperplanes
// of the convex budget sets at pulled-back boundary points. The LP value
// upper-bounds the program; the pullback iterate is feasible, so the gap
// certifies optimality.
// ---------------------------------------------------------------------------

struct InnerProblem {
  std::vector<StreamId> streams;        // active (user, sub) pairs
  std::vector<double> a;                // power coefficient per stream
  double b = 0.0;                       // rate-to-power exponent, bits
  std::vector<double> budgets;          // per user
  std::vector<std::vector<int>> user_streams;  // stream indices per user
  std::vector<LpRow> poly_rows;         // over stream indices, unshifted
  std::vector<double> lb, ub;
};

struct InnerSolution {
  std::vector<double> rates;
  double value = 0.0;
  long iterations = 0;
  bool converged = false;
};

double budget_usage(const InnerProblem& prob, const std::vector<int>& streams,
                    const std::vector<double>& r) {
  double g = 0.0;
  for (int j : streams)
    g += prob.a[static_cast<std::size_t>(j)] *
         std::exp2(prob.b * r[static_cast<std::size_t>(j)]);
  return g;
}

InnerSolution solve_inner(const InnerProblem& prob, const SolveOptions& opts) {
  const int nv = static_cast<int>(prob.streams.size());
  InnerSolution out;
  if (nv == 0) {
    out.converged = true;
    return out;
  }

  // Shift to nonnegative variables x = R - LB.
  LpProblem lp = LpProblem::sum_rate(nv);
  for (int j = 0; j < nv; ++j) {
    LpRow box;
    box.coeffs = {{j, 1.0}};
    box.cap = prob.ub[static_cast<std::size_t>(j)] - prob.lb[static_cast<std::size_t>(j)];
    lp.rows.push_back(box);
  }
  for (const LpRow& row : prob.poly_rows) {
    LpRow shifted = row;
    for (auto [j, w] : row.coeffs) shifted.cap -= w * prob.lb[static_cast<std::size_t>(j)];
    shifted.cap = std::max(0.0, shifted.cap);
    lp.rows.push_back(shifted);
  }

  std::vector<double> best_rates(static_cast<std::size_t>(nv), 0.0);
  double best_value = -std::numeric_limits<double>::infinity();

  const int max_rounds = 500;
  for (int round = 0; round < max_rounds; ++round) {
    if (out.iterations >= opts.max_iterations) break;
    ++out.iterations;

    LpSolution sol = solve_lp(lp);
    std::vector<double> r(static_cast<std::size_t>(nv));
    for (int j = 0; j < nv; ++j)
      r[static_cast<std::size_t>(j)] =
          sol.x[static_cast<std::size_t>(j)] + prob.lb[static_cast<std::size_t>(j)];
    double upper =
        sol.objective + std::accumulate(prob.lb.begin(), prob.lb.end(), 0.0);

    // Pull every over-budget user back onto its budget surface.
    std::vector<double> feas = r;
    bool any_violation = false;
    for (std::size_t k = 0; k < prob.budgets.size(); ++k) {
      if (prob.user_streams[k].empty()) continue;
      double g = budget_usage(prob, prob.user_streams[k], r);
      double budget = prob.budgets[k];
      if (g > budget * (1.0 + 1e-12)) {
        any_violation = true;
        double delta = std::log2(g / budget) / prob.b;
        for (int j : prob.user_streams[k]) feas[static_cast<std::size_t>(j)] -= delta;
      }
    }
    // Scrub simplex drift off the linear rows: pay any residual excess
    // from the largest contributor. Decreases keep every other row
    // satisfied, so one pass suffices.
    for (const LpRow& row : prob.poly_rows) {
      double lhs = 0.0;
      for (auto [j, w] : row.coeffs) lhs += w * feas[static_cast<std::size_t>(j)];
      double excess = lhs - row.cap;
      if (excess <= 0.0) continue;
      int top = row.coeffs.front().first;
      double top_w = row.coeffs.front().second;
      for (auto [j, w] : row.coeffs)
        if (w * feas[static_cast<std::size_t>(j)] >
            top_w * feas[static_cast<std::size_t>(top)]) {
          top = j;
          top_w = w;
        }
      feas[static_cast<std::size_t>(top)] -= excess / top_w;
    }
    double feas_value = std::accumulate(feas.begin(), feas.end(), 0.0);
    if (feas_value > best_value) {
      best_value = feas_value;
      best_rates = feas;
    }

    if (!any_violation || upper - best_value <= 1e-9 * (1.0 + std::fabs(upper))) {
      out.converged = true;
      break;
    }

    // Supporting cuts at the boundary points; they separate the LP iterate.
    for (std::size_t k = 0; k < prob.budgets.size(); ++k) {
      if (prob.user_streams[k].empty()) continue;
      double g = budget_usage(prob, prob.user_streams[k], r);
      if (g <= prob.budgets[k] * (1.0 + 1e-12)) continue;
      LpRow cut;
      double rhs = 0.0;
      for (int j : prob.user_streams[k]) {
        double p = prob.a[static_cast<std::size_t>(j)] *
                   std::exp2(prob.b * feas[static_cast<std::size_t>(j)]);
        double w = prob.b * kLn2 * p;
        cut.coeffs.push_back({j, w});
        rhs += w * (feas[static_cast<std::size_t>(j)] - prob.lb[static_cast<std::size_t>(j)]);
      }
      cut.cap = std::max(0.0, rhs);
      lp.rows.push_back(cut);
    }
  }

  out.rates = best_rates;
  out.value = best_value;
  return out;
}

std::string subset_label(std::uint32_t mask) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int n = 0; n < 32; ++n) {
    if (mask & (1u << n)) {
      if (!first) os << ",";
      os << (n + 1);
      first = false;
    }
  }
  os << "}";
  return os.str();
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Dist: return "dist";
    case Scheme::Coop: return "coop";
    case Scheme::Cutset: return "cutset";
    case Scheme::Df: return "df";
    case Scheme::Af: return "af";
  }
  return "unknown";
}

std::vector<double> uplink_stream_budgets(int users,
                                          const std::vector<double>& user_power_w) {
  require(users >= 2, ErrorCode::InvalidArgument, "need at least two users");
  require(static_cast<int>(user_power_w.size()) == users, ErrorCode::InvalidArgument,
          "budget list length mismatch");
  std::vector<double> budgets(user_power_w.size());
  for (int k = 0; k < users; ++k) {
    bool end_user = (k == 0 || k == users - 1);
    double scale = end_user ? (users - 1.0) : (users - 1.0) / 2.0;
    budgets[static_cast<std::size_t>(k)] = scale * user_power_w[static_cast<std::size_t>(k)];
  }
  return budgets;
}

RateSolution maximize_sumrate_dist(const ChannelInstance& inst, double alpha,
                                   const PowerScale& pw, const SolveOptions& opts) {
  require(inst.effective_relays <= inst.antennas, ErrorCode::InvalidArgument,
          "triangularization needs effective N <= M");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha in (0,1)");
  const int K = inst.users;
  const int N = inst.effective_relays;
  const double sigma2 = pw.sigma2_relay;

  Matrix gains = subchannel_gains(inst);
  std::vector<double> budgets = uplink_stream_budgets(K, pw.user_power_w);
  std::vector<double> relay_powers(pw.relay_power_w.begin(),
                                   pw.relay_power_w.begin() + N);
  std::vector<PolymatroidConstraint> poly =
      downlink_polymatroid(inst, alpha, relay_powers, pw.sigma2_user);

  RateSolution sol;
  sol.scheme = Scheme::Dist;
  sol.stream_rates = Matrix(static_cast<std::size_t>(K), static_cast<std::size_t>(N));
  sol.stream_powers = Matrix(static_cast<std::size_t>(K), static_cast<std::size_t>(N));

  std::vector<std::vector<bool>> active(static_cast<std::size_t>(K),
                                        std::vector<bool>(static_cast<std::size_t>(N), true));
  const double b = 2.0 * (K - 1) / alpha;

  std::vector<double> final_rates;
  std::vector<StreamId> final_streams;
  bool inner_converged = true;

  for (int outer = 0; outer <= K * N; ++outer) {
    sol.outer_iterations = outer + 1;

    InnerProblem prob;
    prob.b = b;
    prob.budgets = budgets;
    prob.user_streams.assign(static_cast<std::size_t>(K), {});
    std::vector<std::vector<int>> index(static_cast<std::size_t>(K),
                                        std::vector<int>(static_cast<std::size_t>(N), -1));
    for (int k = 0; k < K; ++k) {
      for (int n = 0; n < N; ++n) {
        if (!active[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]) continue;
        double g = gains(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
        if (g <= 0.0) {
          active[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = false;
          continue;
        }
        int j = static_cast<int>(prob.streams.size());
        prob.streams.push_back({k, n});
        prob.a.push_back(sigma2 / g);
        prob.user_streams[static_cast<std::size_t>(k)].push_back(j);
        index[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = j;
      }
    }
    for (std::size_t j = 0; j < prob.streams.size(); ++j) {
      int k = prob.streams[j].user;
      double nk = static_cast<double>(prob.user_streams[static_cast<std::size_t>(k)].size());
      double ub = std::log2(budgets[static_cast<std::size_t>(k)] / prob.a[j]) / b;
      prob.ub.push_back(ub);
      prob.lb.push_back(std::min(0.0, ub - std::log2(nk) / b) - 3.0);
    }
    for (const PolymatroidConstraint& c : poly) {
      LpRow row;
      for (int n = 0; n < N; ++n) {
        if (!(c.mask & (1u << n))) continue;
        for (int k2 = 0; k2 < K; ++k2) {
          if (k2 == c.user) continue;
          int j = index[static_cast<std::size_t>(k2)][static_cast<std::size_t>(n)];
          if (j >= 0) row.coeffs.push_back({j, 1.0});
        }
      }
      if (row.coeffs.empty()) continue;
      row.cap = c.cap_bits;
      prob.poly_rows.push_back(row);
    }

    InnerSolution inner = solve_inner(prob, opts);
    sol.inner_iterations += inner.iterations;
    inner_converged = inner.converged;

    if (prob.streams.empty()) {
      final_rates.clear();
      final_streams.clear();
      break;
    }

    // Deactivate streams with nonpositive relaxed rates.
    bool changed = false;
    for (std::size_t j = 0; j < prob.streams.size(); ++j) {
      if (inner.rates[j] <= opts.deactivation_tol) {
        active[static_cast<std::size_t>(prob.streams[j].user)]
              [static_cast<std::size_t>(prob.streams[j].sub)] = false;
        changed = true;
      }
    }
    if (!changed) {
      final_rates = inner.rates;
      final_streams = prob.streams;
      break;
    }
  }

  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n)
      if (!active[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)])
        sol.deactivated.push_back({k, n});

  sol.user_rates.assign(static_cast<std::size_t>(K), 0.0);
  for (std::size_t j = 0; j < final_streams.size(); ++j) {
    const StreamId& s = final_streams[j];
    double r = std::max(0.0, final_rates[j]);
    double g = gains(static_cast<std::size_t>(s.user), static_cast<std::size_t>(s.sub));
    double p = sigma2 / g * std::exp2(b * final_rates[j]);
    sol.stream_rates(static_cast<std::size_t>(s.user), static_cast<std::size_t>(s.sub)) = r;
    sol.stream_powers(static_cast<std::size_t>(s.user), static_cast<std::size_t>(s.sub)) = p;
    sol.user_rates[static_cast<std::size_t>(s.user)] += r;
    sol.sum_rate_bits += r;
  }
  sol.converged = inner_converged;

  // Binding report: tight budgets and tight downlink rows.
  for (int k = 0; k < K; ++k) {
    double used = 0.0;
    for (int n = 0; n < N; ++n)
      used += sol.stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    if (used >= budgets[static_cast<std::size_t>(k)] * (1.0 - 1e-6)) {
      std::ostringstream os;
      os << "uplink power budget, user " << (k + 1);
      sol.binding.push_back(os.str());
    }
  }
  for (const PolymatroidConstraint& c : poly) {
    double lhs = 0.0;
    for (int n = 0; n < N; ++n)
      if (c.mask & (1u << n))
        for (int k2 = 0; k2 < K; ++k2)
          if (k2 != c.user)
            lhs += sol.stream_rates(static_cast<std::size_t>(k2), static_cast<std::size_t>(n));
    if (lhs >= c.cap_bits - 1e-7 * (1.0 + c.cap_bits)) {
      std::ostringstream os;
      os << "downlink receiver " << (c.user + 1) << ", relays " << subset_label(c.mask);
      sol.binding.push_back(os.str());
    }
  }

  verify_dist_solution(inst, alpha, pw, sol);
  return sol;
}

void verify_dist_solution(const ChannelInstance& inst, double alpha,
                          const PowerScale& pw, const RateSolution& sol) {
  const int K = inst.users;
  const int N = inst.effective_relays;
  std::vector<double> budgets = uplink_stream_budgets(K, pw.user_power_w);

  for (const auto& [k, n] : sol.deactivated) {
    require(sol.stream_rates(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) == 0.0 &&
                sol.stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) == 0.0,
            ErrorCode::Internal, "deactivated stream carries rate or power");
  }
  for (int k = 0; k < K; ++k) {
    double used = 0.0;
    for (int n = 0; n < N; ++n) {
      require(sol.stream_rates(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) >= 0.0,
              ErrorCode::Internal, "negative rate");
      used += sol.stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    }
    require(used <= budgets[static_cast<std::size_t>(k)] * (1.0 + 1e-8) + 1e-12,
            ErrorCode::Internal, "uplink power budget violated");
  }
  Matrix caps = uplink_caps_dist(inst, alpha, sol.stream_powers, pw.sigma2_relay);
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < N; ++n)
      require(sol.stream_rates(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) <=
                  caps(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) + 1e-8,
              ErrorCode::Internal, "per-stream uplink cap violated");
  std::vector<double> relay_powers(pw.relay_power_w.begin(),
                                   pw.relay_power_w.begin() + N);
  for (const PolymatroidConstraint& c :
       downlink_polymatroid(inst, alpha, relay_powers, pw.sigma2_user)) {
    double lhs = 0.0;
    for (int n = 0; n < N; ++n)
      if (c.mask & (1u << n))
        for (int k2 = 0; k2 < K; ++k2)
          if (k2 != c.user)
            lhs += sol.stream_rates(static_cast<std::size_t>(k2), static_cast<std::size_t>(n));
    if (lhs > c.cap_bits + 1e-8 * (1.0 + c.cap_bits)) {
      std::ostringstream os;
      os << "downlink polymatroid constraint violated: receiver " << (c.user + 1)
         << " subset " << subset_label(c.mask) << " lhs " << lhs << " cap "
         << c.cap_bits;
      throw Error(ErrorCode::Internal, os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Cooperative relays
// ---------------------------------------------------------------------------

namespace {

struct PrefixWf {
  double cap_bits = 0.0;            // (1/(K-1)) sum of clamped per-stream terms
  std::vector<double> powers;       // per sub-channel, watts
};

// maximize sum_n [ (alpha/2) log2(g_n p_n / sigma2) ]^+ under sum p <= B:
// the optimum puts equal power on a prefix of the strongest sub-channels.
PrefixWf prefix_waterfill(const std::vector<double>& gains, double budget,
                          double sigma2, double alpha, int users) {
  PrefixWf out;
  out.powers.assign(gains.size(), 0.0);
  std::vector<std::size_t> order(gains.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return gains[i] > gains[j]; });

  double best = 0.0;
  std::size_t best_m = 0;
  for (std::size_t m = 1; m <= gains.size(); ++m) {
    if (gains[order[m - 1]] <= 0.0) break;
    double p = budget / static_cast<double>(m);
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double snr = gains[order[i]] * p / sigma2;
      if (snr > 1.0) v += 0.5 * alpha * std::log2(snr);
    }
    if (v > best) {
      best = v;
      best_m = m;
    }
  }
  for (std::size_t i = 0; i < best_m; ++i)
    out.powers[order[i]] = budget / static_cast<double>(best_m);
  out.cap_bits = best / (users - 1.0);
  return out;
}

LpProblem coop_lp(const std::vector<double>& up_caps,
                  const std::vector<double>& down_caps) {
  const int K = static_cast<int>(up_caps.size());
  LpProblem lp = LpProblem::sum_rate(K);
  for (int k = 0; k < K; ++k)
    lp.rows.push_back({{{k, 1.0}}, std::max(0.0, up_caps[static_cast<std::size_t>(k)])});
  for (int k = 0; k < K; ++k) {
    LpRow row;
    for (int j = 0; j < K; ++j)
      if (j != k) row.coeffs.push_back({j, 1.0});
    row.cap = std::max(0.0, down_caps[static_cast<std::size_t>(k)]);
    lp.rows.push_back(row);
  }
  return lp;
}

std::vector<double> downlink_caps_for(const ChannelInstance& inst, double alpha,
                                      const PowerScale& pw, const Matrix& q) {
  std::vector<double> caps(static_cast<std::size_t>(inst.users), 0.0);
  for (int k = 0; k < inst.users; ++k) {
    const Matrix& g = inst.downlink[static_cast<std::size_t>(k)];
    Matrix inner = Matrix::identity(static_cast<std::size_t>(inst.antennas));
    inner.add_scaled(g * q * g.transposed(), 1.0 / pw.sigma2_user);
    caps[static_cast<std::size_t>(k)] =
        std::max(0.0, 0.5 * (1.0 - alpha) * logdet_psd(inner).log2_det);
  }
  return caps;
}

}  // namespace

RelayCovarianceResult optimize_relay_covariance(const ChannelInstance& inst,
                                                double alpha, const PowerScale& pw,
                                                const DownlinkEval& evaluate,
                                                const SolveOptions& opts) {
  const int N = inst.relays;
  const double budget = pw.total_relay_power();

  Matrix q_uniform = Matrix::identity(static_cast<std::size_t>(N)).scaled(budget / N);
  Matrix q_diag(static_cast<std::size_t>(N), static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n)
    q_diag(static_cast<std::size_t>(n), static_cast<std::size_t>(n)) =
        pw.relay_power_w[static_cast<std::size_t>(n)];

  RelayCovarianceResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const Matrix& q : {q_uniform, q_diag}) {
    std::vector<double> caps = downlink_caps_for(inst, alpha, pw, q);
    auto [value, duals] = evaluate(caps);
    (void)duals;
    if (value > best.value) {
      best.q_relay = q;
      best.caps_bits = caps;
      best.value = value;
    }
  }
  if (!opts.refine_qr) return best;

  Matrix q = best.q_relay;
  for (int t = 1; t <= opts.refine_iterations; ++t) {
    ++best.iterations;
    std::vector<double> caps = downlink_caps_for(inst, alpha, pw, q);
    auto [value, duals] = evaluate(caps);
    if (value > best.value) {
      best.value = value;
      best.caps_bits = caps;
      best.q_relay = q;
    }
    // Supergradient of the LP value through the downlink caps.
    Matrix grad(static_cast<std::size_t>(N), static_cast<std::size_t>(N));
    for (int k = 0; k < inst.users; ++k) {
      double y = duals[static_cast<std::size_t>(k)];
      if (y <= 0.0) continue;
      const Matrix& g = inst.downlink[static_cast<std::size_t>(k)];
      Matrix inner = Matrix::identity(static_cast<std::size_t>(inst.antennas));
      inner.add_scaled(g * q * g.transposed(), 1.0 / pw.sigma2_user);
      EighResult es = eigh(inner);
      Matrix inv(inner.rows(), inner.cols());
      for (std::size_t e = 0; e < es.values.size(); ++e) {
        double w = 1.0 / std::max(es.values[e], 1e-12);
        for (std::size_t i = 0; i < inv.rows(); ++i)
          for (std::size_t j = 0; j < inv.cols(); ++j)
            inv(i, j) += w * es.vectors(i, e) * es.vectors(j, e);
      }
      Matrix term = g.transposed() * inv * g;
      grad.add_scaled(term, y * 0.5 * (1.0 - alpha) / (kLn2 * pw.sigma2_user));
    }
    double norm = grad.frobenius_norm();
    if (norm <= 1e-14) break;
    double step = 0.25 * budget / (norm * std::sqrt(static_cast<double>(t)));
    q.add_scaled(grad, step);
    q = project_psd_trace(q, budget);
  }
  return best;
}

RateSolution maximize_sumrate_coop(const ChannelInstance& inst, double alpha,
                                   const PowerScale& pw, const SolveOptions& opts) {
  require(inst.effective_relays <= inst.antennas, ErrorCode::InvalidArgument,
          "triangularization needs effective N <= M");
  const int K = inst.users;
  const int N = inst.effective_relays;
  Matrix gains = subchannel_gains(inst);
  std::vector<double> budgets = uplink_stream_budgets(K, pw.user_power_w);

  RateSolution sol;
  sol.scheme = Scheme::Coop;
  sol.stream_powers = Matrix(static_cast<std::size_t>(K), static_cast<std::size_t>(N));

  std::vector<double> up_caps(static_cast<std::size_t>(K), 0.0);
  for (int k = 0; k < K; ++k) {
    PrefixWf wf = prefix_waterfill(gains.row(static_cast<std::size_t>(k)),
                                   budgets[static_cast<std::size_t>(k)],
                                   pw.sigma2_relay, alpha, K);
    up_caps[static_cast<std::size_t>(k)] = wf.cap_bits;
    for (int n = 0; n < N; ++n)
      sol.stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) =
          wf.powers[static_cast<std::size_t>(n)];
  }

  DownlinkEval evaluate = [&](const std::vector<double>& down_caps) {
    LpSolution s = solve_lp(coop_lp(up_caps, down_caps));
    std::vector<double> duals(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
      duals[static_cast<std::size_t>(k)] = s.duals[static_cast<std::size_t>(K + k)];
    return std::make_pair(s.objective, duals);
  };
  RelayCovarianceResult cov = optimize_relay_covariance(inst, alpha, pw, evaluate, opts);
  sol.inner_iterations = cov.iterations;

  LpProblem lp = coop_lp(up_caps, cov.caps_bits);
  LpSolution s = solve_lp(lp);
  sol.user_rates = s.x;
  sol.sum_rate_bits = s.objective;
  for (int i : s.binding_rows) {
    std::ostringstream os;
    if (i < K)
      os << "uplink cap, user " << (i + 1);
    else
      os << "downlink cap, receiver " << (i - K + 1);
    sol.binding.push_back(os.str());
  }

  // Post-hoc audit against the caps implied by the chosen covariance.
  for (int k = 0; k < K; ++k) {
    require(s.x[static_cast<std::size_t>(k)] <=
                up_caps[static_cast<std::size_t>(k)] + 1e-8,
            ErrorCode::Internal, "coop uplink cap violated");
    double others = s.objective - s.x[static_cast<std::size_t>(k)];
    require(others <= cov.caps_bits[static_cast<std::size_t>(k)] + 1e-8,
            ErrorCode::Internal, "coop downlink cap violated");
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Cut-set outer bound
// ---------------------------------------------------------------------------

namespace {

// Largest eigenvalue of a symmetric matrix (spectrum is tiny here).
double lambda_max(const Matrix& a) { return eigh(a).values.back(); }

// Certified maximum of a weighted log-det sum over covariances on trace
// balls. Projected gradient ascent tracks the best iterate; every
// iterate also yields the Frank-Wolfe upper certificate
//   F(Q) + sum_j [ B_j * max(0, lmax(grad_j)) - <grad_j, Q_j> ]  >=  max F,
// and the smallest certificate seen is returned. Used to tighten the
// per-cut-relaxed cut-set value through weak LP duality without ever
// dipping below the true bound.
struct SharedCovarianceBound {
  double best_value = 0.0;
  double certificate = std::numeric_limits<double>::infinity();
};

// F({Q_j}) = sum_k w_k log2 det(I + (1/s2) sum_{j in terms of k} H_j Q_j H_j^T),
// where user j contributes to the cuts of every k != j.
SharedCovarianceBound certified_weighted_uplink(const std::vector<Matrix>& channels,
                                                const std::vector<double>& budgets,
                                                const std::vector<double>& weights,
                                                double sigma2, int iterations) {
  const std::size_t K = channels.size();
  const std::size_t n_rx = channels[0].rows();
  std::vector<Matrix> q(K);
  for (std::size_t j = 0; j < K; ++j) {
    q[j] = Matrix::identity(channels[j].cols())
               .scaled(budgets[j] / static_cast<double>(channels[j].cols()));
  }
  SharedCovarianceBound out;
  double scale = 1.0 / (kLn2 * sigma2);

  for (int t = 1; t <= iterations; ++t) {
    // Cut matrices and value.
    std::vector<Matrix> w_inv(K);
    double value = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (weights[k] == 0.0) continue;
      Matrix w = Matrix::identity(n_rx);
      for (std::size_t j = 0; j < K; ++j) {
        if (j == k) continue;
        w.add_scaled(channels[j] * q[j] * channels[j].transposed(), 1.0 / sigma2);
      }
      value += weights[k] * logdet_psd(w).log2_det;
      EighResult es = eigh(w);
      Matrix inv(n_rx, n_rx);
      for (std::size_t e = 0; e < n_rx; ++e) {
        double lam = 1.0 / std::max(es.values[e], 1e-12);
        for (std::size_t a = 0; a < n_rx; ++a)
          for (std::size_t b = 0; b < n_rx; ++b)
            inv(a, b) += lam * es.vectors(a, e) * es.vectors(b, e);
      }
      w_inv[k] = inv;
    }
    out.best_value = std::max(out.best_value, value);

    std::vector<Matrix> grad(K);
    double cert = value;
    for (std::size_t j = 0; j < K; ++j) {
      Matrix g(channels[j].cols(), channels[j].cols());
      for (std::size_t k = 0; k < K; ++k) {
        if (k == j || weights[k] == 0.0) continue;
        g.add_scaled(channels[j].transposed() * w_inv[k] * channels[j],
                     weights[k] * scale);
      }
      double inner = 0.0;
      for (std::size_t a = 0; a < g.rows(); ++a)
        for (std::size_t b = 0; b < g.cols(); ++b) inner += g(a, b) * q[j](a, b);
      cert += budgets[j] * std::max(0.0, lambda_max(g)) - inner;
      grad[j] = g;
    }
    out.certificate = std::min(out.certificate, cert);
    if (cert - out.best_value <= 1e-7 * (1.0 + std::fabs(cert))) break;

    for (std::size_t j = 0; j < K; ++j) {
      double norm = grad[j].frobenius_norm();
      if (norm <= 1e-14) continue;
      q[j].add_scaled(grad[j],
                      0.5 * budgets[j] / (norm * std::sqrt(static_cast<double>(t))));
      q[j] = project_psd_trace(q[j], budgets[j]);
    }
  }
  return out;
}

// F(Q) = sum_k w_k log2 det(I + G_k Q G_k^T / s2) over one trace ball.
SharedCovarianceBound certified_weighted_downlink(const std::vector<Matrix>& g_list,
                                                  double budget,
                                                  const std::vector<double>& weights,
                                                  double sigma2, int iterations) {
  const std::size_t K = g_list.size();
  const std::size_t n = g_list[0].cols();
  Matrix q = Matrix::identity(n).scaled(budget / static_cast<double>(n));
  SharedCovarianceBound out;
  double scale = 1.0 / (kLn2 * sigma2);

  for (int t = 1; t <= iterations; ++t) {
    double value = 0.0;
    Matrix grad(n, n);
    for (std::size_t k = 0; k < K; ++k) {
      if (weights[k] == 0.0) continue;
      const Matrix& g = g_list[k];
      Matrix w = Matrix::identity(g.rows());
      w.add_scaled(g * q * g.transposed(), 1.0 / sigma2);
      value += weights[k] * logdet_psd(w).log2_det;
      EighResult es = eigh(w);
      Matrix inv(w.rows(), w.cols());
      for (std::size_t e = 0; e < w.rows(); ++e) {
        double lam = 1.0 / std::max(es.values[e], 1e-12);
        for (std::size_t a = 0; a < w.rows(); ++a)
          for (std::size_t b = 0; b < w.cols(); ++b)
            inv(a, b) += lam * es.vectors(a, e) * es.vectors(b, e);
      }
      grad.add_scaled(g.transposed() * inv * g, weights[k] * scale);
    }
    out.best_value = std::max(out.best_value, value);

    double inner = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) inner += grad(a, b) * q(a, b);
    double cert = value + budget * std::max(0.0, lambda_max(grad)) - inner;
    out.certificate = std::min(out.certificate, cert);
    if (cert - out.best_value <= 1e-7 * (1.0 + std::fabs(cert))) break;

    double norm = grad.frobenius_norm();
    if (norm <= 1e-14) break;
    q.add_scaled(grad, 0.5 * budget / (norm * std::sqrt(static_cast<double>(t))));
    q = project_psd_trace(q, budget);
  }
  return out;
}

}  // namespace

MacIwfResult mac_iwf(const std::vector<Matrix>& channels,
                     const std::vector<double>& budgets_w, double sigma2) {
  require(!channels.empty(), ErrorCode::InvalidArgument, "mac_iwf: no channels");
  require(channels.size() == budgets_w.size(), ErrorCode::InvalidArgument,
          "mac_iwf: one budget per channel");
  require(sigma2 > 0.0, ErrorCode::InvalidArgument, "mac_iwf: sigma2 > 0");
  const std::size_t n_rx = channels[0].rows();
  for (const Matrix& h : channels)
    require(h.rows() == n_rx, ErrorCode::InvalidArgument, "mac_iwf: row mismatch");
  for (double b : budgets_w)
    require(b > 0.0, ErrorCode::InvalidArgument, "mac_iwf: budgets must be positive");

  MacIwfResult out;
  out.covariances.reserve(channels.size());
  for (const Matrix& h : channels)
    out.covariances.push_back(Matrix(h.cols(), h.cols()));

  auto objective = [&]() {
    Matrix acc = Matrix::identity(n_rx);
    for (std::size_t j = 0; j < channels.size(); ++j)
      acc.add_scaled(channels[j] * out.covariances[j] * channels[j].transposed(),
                     1.0 / sigma2);
    return logdet_psd(acc).log2_det;
  };

  double value = objective();
  const int max_cycles = 10000;
  out.converged = false;
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    ++out.iterations;
    for (std::size_t j = 0; j < channels.size(); ++j) {
      Matrix w = Matrix::identity(n_rx);
      for (std::size_t i = 0; i < channels.size(); ++i) {
        if (i == j) continue;
        w.add_scaled(channels[i] * out.covariances[i] * channels[i].transposed(),
                     1.0 / sigma2);
      }
      Matrix f = inverse_sqrt_psd(w) * channels[j];
      EighResult es = eigh(f.gram_t());
      std::vector<double> g(es.values.size());
      for (std::size_t e = 0; e < g.size(); ++e) g[e] = std::max(0.0, es.values[e]);
      WaterfillResult wf = waterfill(g, budgets_w[j], sigma2);
      Matrix q(f.cols(), f.cols());
      for (std::size_t e = 0; e < g.size(); ++e) {
        if (wf.powers[e] <= 0.0) continue;
        for (std::size_t r = 0; r < q.rows(); ++r)
          for (std::size_t c = 0; c < q.cols(); ++c)
            q(r, c) += wf.powers[e] * es.vectors(r, e) * es.vectors(c, e);
      }
      out.covariances[j] = q;
    }
    double next = objective();
    if (next - value <= 1e-9 * std::max(1.0, std::fabs(next))) {
      value = std::max(value, next);
      out.converged = true;
      break;
    }
    value = next;
  }
  out.value_bits = value;
  return out;
}

RateSolution cutset_bound(const ChannelInstance& inst, double alpha,
                          const PowerScale& pw, const SolveOptions& opts) {
  (void)opts;
  const int K = inst.users;
  RateSolution sol;
  sol.scheme = Scheme::Cutset;
  sol.relaxed_bound = true;  // cuts maximized independently

  std::vector<double> up_cut(static_cast<std::size_t>(K), 0.0);
  std::vector<double> down_cut(static_cast<std::size_t>(K), 0.0);
  bool all_converged = true;
  for (int k = 0; k < K; ++k) {
    std::vector<Matrix> others;
    std::vector<double> budgets;
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      others.push_back(inst.uplink[static_cast<std::size_t>(j)]);
      budgets.push_back(pw.user_power_w[static_cast<std::size_t>(j)]);
    }
    MacIwfResult iwf = mac_iwf(others, budgets, pw.sigma2_relay);
    all_converged = all_converged && iwf.converged;
    sol.inner_iterations += iwf.iterations;
    up_cut[static_cast<std::size_t>(k)] = 0.5 * alpha * iwf.value_bits;

    // Downlink cut: exact water-filling of the super-relay covariance.
    const Matrix& g = inst.downlink[static_cast<std::size_t>(k)];
    EighResult es = eigh(g.gram_t());
    std::vector<double> gains(es.values.size());
    for (std::size_t e = 0; e < gains.size(); ++e)
      gains[e] = std::max(0.0, es.values[e]);
    WaterfillResult wf = waterfill(gains, pw.total_relay_power(), pw.sigma2_user);
    down_cut[static_cast<std::size_t>(k)] = 0.5 * (1.0 - alpha) * wf.value_bits;
  }
  sol.converged = all_converged;

  LpProblem lp = LpProblem::sum_rate(K);
  for (int k = 0; k < K; ++k) {
    LpRow up, down;
    for (int j = 0; j < K; ++j) {
      if (j == k) continue;
      up.coeffs.push_back({j, 1.0});
      down.coeffs.push_back({j, 1.0});
    }
    up.cap = up_cut[static_cast<std::size_t>(k)];
    down.cap = down_cut[static_cast<std::size_t>(k)];
    lp.rows.push_back(up);
    lp.rows.push_back(down);
  }
  LpSolution s = solve_lp(lp);
  sol.user_rates = s.x;
  sol.sum_rate_bits = s.objective;
  for (int i : s.binding_rows) {
    std::ostringstream os;
    os << ((i % 2 == 0) ? "uplink cut" : "downlink cut") << ", user " << (i / 2 + 1);
    sol.binding.push_back(os.str());
  }

  // Tighten through weak duality: for any dual-feasible weights y, the
  // jointly optimized bound is at most max over the *shared* covariances
  // of y' caps(Q), and that maximum has a computable upper certificate.
  // The reported value is the smaller of the two valid bounds.
  double coverage = std::numeric_limits<double>::infinity();
  for (int j = 0; j < K; ++j) {
    double c = 0.0;
    for (int k = 0; k < K; ++k) {
      if (k == j) continue;
      c += s.duals[static_cast<std::size_t>(2 * k)] +
           s.duals[static_cast<std::size_t>(2 * k + 1)];
    }
    coverage = std::min(coverage, c);
  }
  if (coverage > 1e-9 && K >= 2) {
    double boost = coverage < 1.0 ? 1.0 / coverage : 1.0;
    std::vector<double> up_w(static_cast<std::size_t>(K));
    std::vector<double> down_w(static_cast<std::size_t>(K));
    std::vector<Matrix> channels;
    std::vector<double> budgets;
    std::vector<Matrix> g_list;
    for (int k = 0; k < K; ++k) {
      up_w[static_cast<std::size_t>(k)] =
          boost * s.duals[static_cast<std::size_t>(2 * k)] * 0.5 * alpha;
      down_w[static_cast<std::size_t>(k)] =
          boost * s.duals[static_cast<std::size_t>(2 * k + 1)] * 0.5 * (1.0 - alpha);
      channels.push_back(inst.uplink[static_cast<std::size_t>(k)]);
      budgets.push_back(pw.user_power_w[static_cast<std::size_t>(k)]);
      g_list.push_back(inst.downlink[static_cast<std::size_t>(k)]);
    }
    SharedCovarianceBound up = certified_weighted_uplink(channels, budgets, up_w,
                                                         pw.sigma2_relay, 300);
    SharedCovarianceBound down = certified_weighted_downlink(
        g_list, pw.total_relay_power(), down_w, pw.sigma2_user, 300);
    double dual_bound = up.certificate + down.certificate;
    if (dual_bound < sol.sum_rate_bits) {
      double shrink = sol.sum_rate_bits > 0.0 ? dual_bound / sol.sum_rate_bits : 1.0;
      for (double& r : sol.user_rates) r *= shrink;
      sol.sum_rate_bits = dual_bound;
    }
  }

  for (int k = 0; k < K; ++k) {
    double others = sol.sum_rate_bits - sol.user_rates[static_cast<std::size_t>(k)];
    require(others <= up_cut[static_cast<std::size_t>(k)] + 1e-8 &&
                others <= down_cut[static_cast<std::size_t>(k)] + 1e-8,
            ErrorCode::Internal, "cut-set solution violates its own cuts");
  }
  return sol;
}

}  // namespace mdrc

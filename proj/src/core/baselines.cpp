// SPDX-License-Identifier: Apache-2.0

#include "core/baselines.hpp"

#include <cmath>
#include <sstream>

#include "core/rates.hpp"

namespace mdrc {

namespace {

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

Matrix scaled_identity_covariance(int antennas, double power) {
  return Matrix::identity(static_cast<std::size_t>(antennas)).scaled(power / antennas);
}

// Per-user water-filling on the user's own uplink, an optional upgrade
// over the equal-power covariance.
Matrix waterfilled_covariance(const Matrix& h, double power, double sigma2) {
  EighResult es = eigh(h.gram_t());
  std::vector<double> gains(es.values.size());
  for (std::size_t e = 0; e < gains.size(); ++e)
    gains[e] = std::max(0.0, es.values[e]);
  WaterfillResult wf = waterfill(gains, power, sigma2);
  Matrix q(h.cols(), h.cols());
  for (std::size_t e = 0; e < gains.size(); ++e) {
    if (wf.powers[e] <= 0.0) continue;
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (std::size_t j = 0; j < q.cols(); ++j)
        q(i, j) += wf.powers[e] * es.vectors(i, e) * es.vectors(j, e);
  }
  return q;
}

std::vector<Matrix> user_covariances(const ChannelInstance& inst,
                                     const PowerScale& pw,
                                     const BaselineOptions& opts) {
  std::vector<Matrix> qs;
  qs.reserve(static_cast<std::size_t>(inst.users));
  for (int k = 0; k < inst.users; ++k) {
    double p = pw.user_power_w[static_cast<std::size_t>(k)];
    if (opts.waterfill_user_covariances)
      qs.push_back(waterfilled_covariance(inst.uplink[static_cast<std::size_t>(k)], p,
                                          pw.sigma2_relay));
    else
      qs.push_back(scaled_identity_covariance(inst.antennas, p));
  }
  return qs;
}

double quad_form(const std::vector<double>& h, const Matrix& q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] == 0.0) continue;
    for (std::size_t j = 0; j < h.size(); ++j) acc += h[i] * q(i, j) * h[j];
  }
  return acc;
}

}  // namespace

RateSolution df_sumrate(const ChannelInstance& inst, double alpha,
                        const PowerScale& pw, const BaselineOptions& opts) {
  require(inst.effective_relays <= inst.antennas, ErrorCode::InvalidArgument,
          "df_sumrate needs effective N <= M");
  const int K = inst.users;
  const int N = inst.relays;
  std::vector<Matrix> qs = user_covariances(inst, pw, opts);

  // Per-relay scalar MAC rows: every relay decodes every subset.
  std::vector<LpRow> uplink_rows;
  for (int n = 0; n < N; ++n) {
    std::vector<double> signal(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
      std::vector<double> h =
          inst.uplink[static_cast<std::size_t>(k)].row(static_cast<std::size_t>(n));
      signal[static_cast<std::size_t>(k)] = quad_form(h, qs[static_cast<std::size_t>(k)]);
    }
    for (std::uint32_t mask = 1; mask < (1u << K); ++mask) {
      LpRow row;
      double power = 0.0;
      for (int k = 0; k < K; ++k) {
        if (!(mask & (1u << k))) continue;
        row.coeffs.push_back({k, 1.0});
        power += signal[static_cast<std::size_t>(k)];
      }
      row.cap = std::max(0.0, 0.5 * alpha * std::log2(1.0 + power / pw.sigma2_relay));
      uplink_rows.push_back(row);
    }
  }

  auto lp_for = [&](const std::vector<double>& down_caps) {
    LpProblem lp = LpProblem::sum_rate(K);
    lp.rows = uplink_rows;
    for (int k = 0; k < K; ++k) {
      LpRow row;
      for (int j = 0; j < K; ++j)
        if (j != k) row.coeffs.push_back({j, 1.0});
      if (row.coeffs.empty()) continue;  // degenerate single-user instance
      row.cap = std::max(0.0, down_caps[static_cast<std::size_t>(k)]);
      lp.rows.push_back(row);
    }
    return lp;
  };
  DownlinkEval evaluate = [&](const std::vector<double>& down_caps) {
    LpProblem lp = lp_for(down_caps);
    LpSolution s = solve_lp(lp);
    std::vector<double> duals(static_cast<std::size_t>(K), 0.0);
    std::size_t base = uplink_rows.size();
    if (lp.rows.size() == base + static_cast<std::size_t>(K))
      for (int k = 0; k < K; ++k)
        duals[static_cast<std::size_t>(k)] = s.duals[base + static_cast<std::size_t>(k)];
    return std::make_pair(s.objective, duals);
  };
  RelayCovarianceResult cov =
      optimize_relay_covariance(inst, alpha, pw, evaluate, opts.solve);

  LpSolution s = solve_lp(lp_for(cov.caps_bits));
  RateSolution sol;
  sol.scheme = Scheme::Df;
  sol.user_rates = s.x;
  sol.sum_rate_bits = s.objective;
  sol.inner_iterations = cov.iterations;
  for (int k = 0; k < K; ++k) {
    double others = s.objective - s.x[static_cast<std::size_t>(k)];
    if (K > 1)
      require(others <= cov.caps_bits[static_cast<std::size_t>(k)] + 1e-8,
              ErrorCode::Internal, "df downlink cap violated");
  }
  for (const LpRow& row : uplink_rows) {
    double lhs = 0.0;
    for (auto [j, w] : row.coeffs) lhs += w * s.x[static_cast<std::size_t>(j)];
    require(lhs <= row.cap + 1e-8, ErrorCode::Internal, "df uplink row violated");
  }
  return sol;
}

RateSolution af_sumrate(const ChannelInstance& inst, const PowerScale& pw,
                        const BaselineOptions& opts) {
  require(inst.users >= 2, ErrorCode::InvalidArgument, "af_sumrate needs K >= 2");
  require(inst.effective_relays <= inst.antennas, ErrorCode::InvalidArgument,
          "af_sumrate needs effective N <= M");
  const int K = inst.users;
  const int N = inst.relays;
  const int M = inst.antennas;
  std::vector<Matrix> qs = user_covariances(inst, pw, opts);

  // Forwarding gains: per-relay power constraint met with equality.
  std::vector<double> a(static_cast<std::size_t>(N), 0.0);
  for (int n = 0; n < N; ++n) {
    double received = pw.sigma2_relay;
    for (int k = 0; k < K; ++k) {
      std::vector<double> h =
          inst.uplink[static_cast<std::size_t>(k)].row(static_cast<std::size_t>(n));
      received += quad_form(h, qs[static_cast<std::size_t>(k)]);
    }
    a[static_cast<std::size_t>(n)] =
        std::sqrt(pw.relay_power_w[static_cast<std::size_t>(n)] / received);
  }

  LpProblem lp = LpProblem::sum_rate(K);
  for (int rx = 0; rx < K; ++rx) {
    Matrix ga = inst.downlink[static_cast<std::size_t>(rx)];  // M x N, columns scaled
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (int n = 0; n < N; ++n)
        ga(i, static_cast<std::size_t>(n)) *= a[static_cast<std::size_t>(n)];

    Matrix noise = ga.gram().scaled(pw.sigma2_relay);
    for (int i = 0; i < M; ++i)
      noise(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) += pw.sigma2_user;
    double noise_logdet = logdet_psd(noise).log2_det;

    std::vector<Matrix> signal;
    signal.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
      Matrix t = ga * inst.uplink[static_cast<std::size_t>(k)];  // M x M
      signal.push_back(t * qs[static_cast<std::size_t>(k)] * t.transposed());
    }
    for (std::uint32_t mask = 1; mask < (1u << K); ++mask) {
      if (mask & (1u << rx)) continue;  // subsets of the other users only
      Matrix acc = noise;
      LpRow row;
      for (int k = 0; k < K; ++k) {
        if (!(mask & (1u << k))) continue;
        acc.add_scaled(signal[static_cast<std::size_t>(k)], 1.0);
        row.coeffs.push_back({k, 1.0});
      }
      // Prelog 1/4: the forwarded block occupies half the round, and the
      // real-signal capacity carries its own factor 1/2.
      row.cap = std::max(0.0, 0.25 * (logdet_psd(acc).log2_det - noise_logdet));
      lp.rows.push_back(row);
    }
  }

  LpSolution s = solve_lp(lp);
  RateSolution sol;
  sol.scheme = Scheme::Af;
  sol.user_rates = s.x;
  sol.sum_rate_bits = s.objective;
  for (const LpRow& row : lp.rows) {
    double lhs = 0.0;
    for (auto [j, w] : row.coeffs) lhs += w * s.x[static_cast<std::size_t>(j)];
    require(lhs <= row.cap + 1e-8, ErrorCode::Internal, "af rate row violated");
  }
  return sol;
}

}  // namespace mdrc

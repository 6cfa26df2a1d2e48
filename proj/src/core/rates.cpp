// SPDX-License-Identifier: Apache-2.0

#include "core/rates.hpp"

#include <cmath>

namespace mdrc {

namespace {

constexpr double kLog2E = 1.4426950408889634074;

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

void check_covariance(const Matrix& q, double trace_budget, const char* label) {
  double scale = std::max(1.0, q.max_abs());
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = i + 1; j < q.cols(); ++j)
      require(std::fabs(q(i, j) - q(j, i)) <= 1e-8 * scale, ErrorCode::NotSymmetric,
              std::string(label) + ": covariance not symmetric");
  EighResult es = eigh(q);
  require(es.values.front() >= -1e-8 * std::max(1.0, es.values.back()),
          ErrorCode::NotPsd, std::string(label) + ": covariance not PSD");
  require(q.trace() <= trace_budget * (1.0 + 1e-9) + 1e-12,
          ErrorCode::TraceBudgetExceeded,
          std::string(label) + ": covariance trace exceeds budget");
}

}  // namespace

Matrix uplink_caps_dist(const ChannelInstance& inst, double alpha,
                        const Matrix& stream_powers, double sigma2_relay) {
  const int k_users = inst.users;
  const int n_eff = inst.effective_relays;
  require(static_cast<int>(stream_powers.rows()) == k_users &&
              static_cast<int>(stream_powers.cols()) == n_eff,
          ErrorCode::InvalidArgument, "stream power table shape mismatch");
  require(sigma2_relay > 0.0, ErrorCode::InvalidArgument, "sigma2 must be positive");

  Matrix gains = subchannel_gains(inst);
  Matrix caps(static_cast<std::size_t>(k_users), static_cast<std::size_t>(n_eff));
  for (int k = 0; k < k_users; ++k) {
    for (int n = 0; n < n_eff; ++n) {
      double p = stream_powers(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
      require(p >= 0.0, ErrorCode::InvalidArgument, "stream powers must be nonnegative");
      double snr = gains(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) * p /
                   sigma2_relay;
      double cap = 0.0;
      if (snr > 1.0) cap = 0.5 * alpha * std::log(snr) * kLog2E / (k_users - 1);
      caps(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) = cap;
    }
  }
  return caps;
}

std::vector<PolymatroidConstraint> downlink_polymatroid(
    const ChannelInstance& inst, double alpha,
    const std::vector<double>& relay_powers_w, double sigma2_user) {
  const int n_eff = inst.effective_relays;
  const int m = inst.antennas;
  require(static_cast<int>(relay_powers_w.size()) >= n_eff, ErrorCode::InvalidArgument,
          "need a power for every effective relay");
  require(sigma2_user > 0.0, ErrorCode::InvalidArgument, "sigma2 must be positive");

  std::vector<PolymatroidConstraint> rows;
  rows.reserve(static_cast<std::size_t>(inst.users) * ((1u << n_eff) - 1u));
  for (int k = 0; k < inst.users; ++k) {
    Matrix g = inst.downlink_effective(k);  // M x n_eff
    // Rank-one terms P_{R,n} g_n g_n^T, reused across subsets.
    std::vector<Matrix> terms;
    terms.reserve(static_cast<std::size_t>(n_eff));
    for (int n = 0; n < n_eff; ++n) {
      std::vector<double> gn = g.col(static_cast<std::size_t>(n));
      terms.push_back(outer(gn, gn).scaled(
          relay_powers_w[static_cast<std::size_t>(n)] / sigma2_user));
    }
    for (std::uint32_t mask = 1; mask < (1u << n_eff); ++mask) {
      Matrix acc = Matrix::identity(static_cast<std::size_t>(m));
      for (int n = 0; n < n_eff; ++n)
        if (mask & (1u << n)) acc.add_scaled(terms[static_cast<std::size_t>(n)], 1.0);
      double cap = 0.5 * (1.0 - alpha) * logdet_psd(acc).log2_det;
      rows.push_back({k, mask, std::max(0.0, cap)});
    }
  }
  return rows;
}

CoopCaps coop_constraints(const ChannelInstance& inst, double alpha,
                          const Matrix& stream_powers, double sigma2_relay,
                          const Matrix& q_relay, double relay_budget_total,
                          double sigma2_user) {
  require(static_cast<int>(q_relay.rows()) == inst.relays &&
              static_cast<int>(q_relay.cols()) == inst.relays,
          ErrorCode::InvalidArgument, "relay covariance must be N x N");
  check_covariance(q_relay, relay_budget_total, "coop");

  CoopCaps out;
  Matrix caps = uplink_caps_dist(inst, alpha, stream_powers, sigma2_relay);
  out.uplink_bits.resize(static_cast<std::size_t>(inst.users), 0.0);
  for (int k = 0; k < inst.users; ++k)
    for (int n = 0; n < inst.effective_relays; ++n)
      out.uplink_bits[static_cast<std::size_t>(k)] +=
          caps(static_cast<std::size_t>(k), static_cast<std::size_t>(n));

  out.downlink_bits.resize(static_cast<std::size_t>(inst.users), 0.0);
  for (int k = 0; k < inst.users; ++k) {
    const Matrix& g = inst.downlink[static_cast<std::size_t>(k)];  // M x N
    Matrix inner = Matrix::identity(static_cast<std::size_t>(inst.antennas));
    inner.add_scaled(g * q_relay * g.transposed(), 1.0 / sigma2_user);
    out.downlink_bits[static_cast<std::size_t>(k)] =
        std::max(0.0, 0.5 * (1.0 - alpha) * logdet_psd(inner).log2_det);
  }
  return out;
}

std::vector<CutPair> cutset_constraints(const ChannelInstance& inst, double alpha,
                                        const std::vector<Matrix>& q_users,
                                        const std::vector<double>& user_budgets_w,
                                        double sigma2_relay, const Matrix& q_relay,
                                        double relay_budget_total,
                                        double sigma2_user) {
  require(static_cast<int>(q_users.size()) == inst.users, ErrorCode::InvalidArgument,
          "need one covariance per user");
  require(user_budgets_w.size() == q_users.size(), ErrorCode::InvalidArgument,
          "need one budget per user");
  for (int k = 0; k < inst.users; ++k) {
    require(static_cast<int>(q_users[static_cast<std::size_t>(k)].rows()) ==
                    inst.antennas &&
                static_cast<int>(q_users[static_cast<std::size_t>(k)].cols()) ==
                    inst.antennas,
            ErrorCode::InvalidArgument, "user covariance must be M x M");
    check_covariance(q_users[static_cast<std::size_t>(k)],
                     user_budgets_w[static_cast<std::size_t>(k)], "cutset user");
  }
  check_covariance(q_relay, relay_budget_total, "cutset relay");

  std::vector<CutPair> out(static_cast<std::size_t>(inst.users));
  for (int k = 0; k < inst.users; ++k) {
    Matrix up = Matrix::identity(static_cast<std::size_t>(inst.relays));
    for (int j = 0; j < inst.users; ++j) {
      if (j == k) continue;
      const Matrix& h = inst.uplink[static_cast<std::size_t>(j)];
      up.add_scaled(h * q_users[static_cast<std::size_t>(j)] * h.transposed(),
                    1.0 / sigma2_relay);
    }
    out[static_cast<std::size_t>(k)].uplink_bits =
        std::max(0.0, 0.5 * alpha * logdet_psd(up).log2_det);

    const Matrix& g = inst.downlink[static_cast<std::size_t>(k)];
    Matrix down = Matrix::identity(static_cast<std::size_t>(inst.antennas));
    down.add_scaled(g * q_relay * g.transposed(), 1.0 / sigma2_user);
    out[static_cast<std::size_t>(k)].downlink_bits =
        std::max(0.0, 0.5 * (1.0 - alpha) * logdet_psd(down).log2_det);
  }
  return out;
}

DofQuantities dof_quantities(int users, int relays, int antennas, double alpha) {
  require(users >= 2 && relays >= 1 && antennas >= relays, ErrorCode::InvalidArgument,
          "dof_quantities needs K >= 2 and N <= M");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "alpha must lie in (0,1)");
  DofQuantities d;
  const double k = users;
  const double n = relays;
  d.dist_up_per_stream = alpha / (2.0 * (k - 1.0));
  d.dist_down_per_pair = (1.0 - alpha) / 2.0;
  d.dist_down_sum = n * (1.0 - alpha) * k / (2.0 * (k - 1.0));
  d.coop_up_per_user = n * alpha / (2.0 * (k - 1.0));
  d.coop_down_cut = n * (1.0 - alpha) / 2.0;
  d.bound_up_cut = n * alpha / 2.0;
  d.bound_down_cut = n * (1.0 - alpha) / 2.0;
  double up_sum = k * n * d.dist_up_per_stream;  // all streams uplink-capped
  d.dist_sum = std::min(up_sum, d.dist_down_sum);
  d.uplink_limited = alpha < 0.5;
  return d;
}

double digamma(double x) {
  require(x > 0.0, ErrorCode::InvalidArgument, "digamma needs x > 0");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  double inv = 1.0 / x;
  double inv2 = inv * inv;
  // Asymptotic expansion; |error| < 1e-12 for x >= 8.
  return acc + std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 -
                 inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
}

double fisher_z_mean_exact(int d_num, int d_den) {
  return 0.5 * (digamma(0.5 * d_num) - std::log(0.5 * d_num) -
                digamma(0.5 * d_den) + std::log(0.5 * d_den));
}

GapBound asymptotic_gap_bound(int users, int antennas, int relays, double alpha,
                              std::int64_t mc_samples, std::uint64_t seed) {
  require(users >= 3, ErrorCode::InvalidRegime, "gap bound needs K >= 3");
  require(relays >= 1 && antennas >= relays, ErrorCode::InvalidArgument,
          "gap bound needs N <= M");
  require(alpha > 0.0 && alpha < 1.0 && alpha != 0.5, ErrorCode::InvalidRegime,
          "gap bound defined for alpha != 1/2");

  GapBound out;
  out.mc_samples = mc_samples;
  if (alpha > 0.5) return out;  // downlink-limited regime: zero gap

  require(mc_samples > 1, ErrorCode::InvalidArgument, "need at least 2 samples");
  const double k = users;
  out.power_split_term = alpha * relays * k * (k - 2.0) / (2.0 * (k - 1.0) * (k - 1.0));

  Rng rng(seed);
  double var_sum = 0.0;
  for (int n = 1; n <= relays; ++n) {
    int dn = (users - 1) * antennas - relays + n;
    out.chi_degrees.push_back(dn);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < mc_samples; ++i) {
      double x = rng.chi_square(dn);
      double y = rng.chi_square(n);
      double z = 0.5 * std::log((x / dn) / (y / n));
      double delta = z - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (z - mean);
    }
    double se = std::sqrt(m2 / static_cast<double>(mc_samples - 1) /
                          static_cast<double>(mc_samples));
    out.fisher_means.push_back(mean);
    out.fisher_std_errors.push_back(se);
    out.spectrum_term += alpha * kLog2E * mean +
                         0.5 * alpha * std::log(static_cast<double>(dn) / n) * kLog2E;
    var_sum += (alpha * kLog2E * se) * (alpha * kLog2E * se);
  }
  out.spectrum_term *= k / (k - 1.0);
  out.std_error_bits = k / (k - 1.0) * std::sqrt(var_sum);
  out.delta_bits = out.power_split_term + out.spectrum_term;
  return out;
}

}  // namespace mdrc

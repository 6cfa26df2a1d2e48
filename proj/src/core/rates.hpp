// SPDX-License-Identifier: Apache-2.0
//
// Rate constraints and closed-form bounds: per-stream uplink caps of the
// lattice scheme, downlink polymatroid caps, cooperative-relay caps,
// cut-set caps, high-SNR degrees of freedom, and the asymptotic
// distributive-vs-bound rate-gap bound.

#pragma once

#include <cstdint>
#include <vector>

#include "core/channel.hpp"
#include "core/linalg.hpp"

namespace mdrc {

/// One downlink multiple-access constraint: for receiver `user`, the
/// rates of all other users over the relay subset `mask` are capped.
struct PolymatroidConstraint {
  int user = 0;
  std::uint32_t mask = 0;  // bit n set => relay n in the subset
  double cap_bits = 0.0;
};

/// Per-stream uplink caps c_{k,n} = [ (alpha/2) log2(r_k(n,n)^2 P_{k,n} /
/// sigma2) ]^+ / (K-1). `stream_powers` is K x effective_relays.
Matrix uplink_caps_dist(const ChannelInstance& inst, double alpha,
                        const Matrix& stream_powers, double sigma2_relay);

/// All K * (2^N - 1) downlink constraints, N = effective relay count:
/// cap(k,S) = ((1-alpha)/2) log2 det(I_M + sum_{n in S} P_{R,n} g_{n,k}
/// g_{n,k}^T / sigma2). Exponential in N by construction; desk scale
/// keeps N <= 6.
std::vector<PolymatroidConstraint> downlink_polymatroid(
    const ChannelInstance& inst, double alpha,
    const std::vector<double>& relay_powers_w, double sigma2_user);

struct CoopCaps {
  std::vector<double> uplink_bits;    // per-user cap
  std::vector<double> downlink_bits;  // per-receiver cap on the others' sum
};

/// Cooperative-relay caps: uplink per user k is the clamped per-stream sum
/// divided by K-1; downlink per receiver k is the full log-det with the
/// super-relay covariance q_relay (PSD, trace <= relay_budget_total).
CoopCaps coop_constraints(const ChannelInstance& inst, double alpha,
                          const Matrix& stream_powers, double sigma2_relay,
                          const Matrix& q_relay, double relay_budget_total,
                          double sigma2_user);

struct CutPair {
  double uplink_bits = 0.0;
  double downlink_bits = 0.0;
};

/// Cut-set caps for given covariances. Uses the full channel matrices
/// (all N relays), since the outer bound is a property of the channel,
/// not of the antenna-disablement scheme.
std::vector<CutPair> cutset_constraints(const ChannelInstance& inst, double alpha,
                                        const std::vector<Matrix>& q_users,
                                        const std::vector<double>& user_budgets_w,
                                        double sigma2_relay, const Matrix& q_relay,
                                        double relay_budget_total,
                                        double sigma2_user);

/// High-SNR slopes (rate / log2 P) of every constraint family.
struct DofQuantities {
  double dist_up_per_stream = 0.0;   // alpha / (2(K-1))
  double dist_down_per_pair = 0.0;   // (1-alpha)/2 per (k,n) constraint
  double dist_down_sum = 0.0;        // N (1-alpha) K / (2(K-1))
  double coop_up_per_user = 0.0;     // N alpha / (2(K-1))
  double coop_down_cut = 0.0;        // N (1-alpha)/2
  double bound_up_cut = 0.0;         // N alpha / 2
  double bound_down_cut = 0.0;       // N (1-alpha)/2
  double dist_sum = 0.0;             // sum-rate slope of the lattice scheme
  bool uplink_limited = false;       // alpha < 1/2 (same for both schemes)
};

DofQuantities dof_quantities(int users, int relays, int antennas, double alpha);

struct GapBound {
  double delta_bits = 0.0;
  double power_split_term = 0.0;  // alpha N K (K-2) / (2 (K-1)^2)
  double spectrum_term = 0.0;     // (K/(K-1)) sum_n (...)
  std::vector<int> chi_degrees;           // d_n = (K-1)M - N + n
  std::vector<double> fisher_means;       // E[FisherZ(d_n, n)] estimates
  std::vector<double> fisher_std_errors;  // per-n standard errors
  double std_error_bits = 0.0;            // propagated onto delta
  std::int64_t mc_samples = 0;
};

/// Asymptotic sum-rate gap bound between the distributive scheme and the
/// cut-set bound for K >= 3 users with equal power fractions. Zero for
/// alpha > 1/2; for alpha < 1/2 the Fisher-Z means are Monte Carlo
/// estimates of E[(1/2) ln((X/d_n)/(Y/n))], X ~ chi2(d_n), Y ~ chi2(n).
GapBound asymptotic_gap_bound(int users, int antennas, int relays, double alpha,
                              std::int64_t mc_samples, std::uint64_t seed);

/// Closed-form backend for the same mean via digamma:
/// (1/2)(psi(d/2) - ln(d/2) - psi(n/2) + ln(n/2)).
double fisher_z_mean_exact(int d_num, int d_den);

double digamma(double x);

}  // namespace mdrc

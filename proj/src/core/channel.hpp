// SPDX-License-Identifier: Apache-2.0
//
// Scenario definitions and sampled channel instances for the multiway
// distributed-relay network: K multi-antenna users exchanging data via
// N single-antenna relays over a two-phase (uplink/downlink) round.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace mdrc {

/// Scenario parameters. Powers are linear multipliers relative to the
/// reference power P of a sweep point: at `snr_db`, P = sigma2_relay *
/// 10^(snr_db/10), user k transmits with budget user_power[k] * P and
/// relay n with relay_power[n] * P.
struct ScenarioConfig {
  int users = 0;     // K >= 2
  int antennas = 0;  // M >= 1 per user
  int relays = 0;    // N >= 1
  double alpha = 0.5;
  std::vector<double> user_power;   // length K, > 0
  std::vector<double> relay_power;  // length N, > 0
  double sigma2_relay = 1.0;
  double sigma2_user = 1.0;
  std::vector<double> snr_grid_db;
  std::vector<std::uint64_t> seeds;

  void validate() const;

  /// JSON field names: K, M, N, alpha, user_power, relay_power,
  /// sigma2_relay, sigma2_user, snr_grid_db, seeds. The power fields
  /// accept a scalar (applied uniformly) or an array.
  static ScenarioConfig from_json(const std::string& text);
  std::string to_json() const;
};

/// Per-sweep-point absolute powers in watts.
struct PowerScale {
  std::vector<double> user_power_w;
  std::vector<double> relay_power_w;
  double sigma2_relay = 1.0;
  double sigma2_user = 1.0;
  double total_relay_power() const;
};

PowerScale powers_at_snr(const ScenarioConfig& cfg, double snr_db);

/// One channel draw: uplink H_k (N x M), downlink G_k (M x N), and RQ
/// factors of the effective uplink matrices. When M < N the relays with
/// the largest indices are deactivated until the effective relay count
/// is at most M; the triangularization is computed on the surviving rows.
struct ChannelInstance {
  int users = 0;
  int antennas = 0;          // M, always fully used
  int relays = 0;            // configured N
  int effective_relays = 0;  // min(N, M)
  std::vector<Matrix> uplink;    // K matrices, N x M
  std::vector<Matrix> downlink;  // K matrices, M x N
  std::vector<RqFactors> rq;     // K factors of the effective uplink

  Matrix uplink_effective(int k) const;    // first effective_relays rows
  Matrix downlink_effective(int k) const;  // first effective_relays cols

  static ChannelInstance sample(const ScenarioConfig& cfg, std::uint64_t seed);
  /// Build from explicit matrices (test and demo entry point).
  static ChannelInstance from_matrices(std::vector<Matrix> uplink,
                                       std::vector<Matrix> downlink);
};

/// Squared sub-channel gains r_k(n,n)^2, one row per user, one column
/// per effective relay.
Matrix subchannel_gains(const ChannelInstance& inst);

}  // namespace mdrc

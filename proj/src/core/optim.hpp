// SPDX-License-Identifier: Apache-2.0
//
// Sum-rate solvers: the deactivation outer loop for the distributive
// lattice scheme, water-filled cooperative caps with optional relay
// covariance refinement, per-cut maximized cut-set bound, and iterative
// water-filling for multiple-access cuts.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core/channel.hpp"
#include "core/linalg.hpp"
#include "core/lp.hpp"

namespace mdrc {

enum class Scheme { Dist, Coop, Cutset, Df, Af };

const char* scheme_name(Scheme s);

struct SolveOptions {
  bool refine_qr = false;        // supergradient ascent on the relay covariance
  int refine_iterations = 500;
  double inner_tol = 1e-7;       // convergence tolerance of the inner solves
  long max_iterations = 100000;  // total inner-iteration budget per solve
  double deactivation_tol = 1e-9;
};

struct RateSolution {
  Scheme scheme = Scheme::Dist;
  double sum_rate_bits = 0.0;
  Matrix stream_rates;   // K x effective_relays (distributive scheme)
  Matrix stream_powers;  // watts per stream where applicable
  std::vector<double> user_rates;                // per-user rates (all schemes)
  std::vector<std::pair<int, int>> deactivated;  // (user, sub-channel)
  int outer_iterations = 0;
  long inner_iterations = 0;
  bool converged = true;
  bool relaxed_bound = false;        // cut-set per-cut relaxation marker
  std::vector<std::string> binding;  // binding constraints, human readable
};

/// Sum-rate maximization for the distributive lattice scheme: solve the
/// relaxed problem (clamp removed) in rate space, deactivate streams with
/// nonpositive rates, and repeat until the deactivated set stops growing.
/// The relaxed program eliminates powers through
///   P_{k,n} = (sigma2 / r_k(n,n)^2) * 2^(2(K-1) R_{k,n} / alpha),
/// leaving per-user convex budget constraints that are solved as an LP
/// outer approximation tightened with supporting cuts.
RateSolution maximize_sumrate_dist(const ChannelInstance& inst, double alpha,
                                   const PowerScale& pw,
                                   const SolveOptions& opts = {});

/// Cooperative-relay sum rate: per-user uplink caps from equal-power
/// water-filling over the active sub-channel prefix, downlink caps from
/// the better of the uniform-trace identity and diag(relay powers)
/// covariances, optionally improved by projected supergradient ascent.
RateSolution maximize_sumrate_coop(const ChannelInstance& inst, double alpha,
                                   const PowerScale& pw,
                                   const SolveOptions& opts = {});

/// Cut-set outer bound with each cut maximized independently (a valid
/// relaxation, flagged in the result): uplink cuts by multiple-access
/// iterative water-filling, downlink cuts by exact single-user
/// water-filling over the super-relay covariance.
RateSolution cutset_bound(const ChannelInstance& inst, double alpha,
                          const PowerScale& pw, const SolveOptions& opts = {});

struct MacIwfResult {
  std::vector<Matrix> covariances;
  double value_bits = 0.0;  // log2 det(I + sum_j H_j Q_j H_j^T / sigma2)
  int iterations = 0;
  bool converged = true;
};

/// Block-coordinate ascent for the MIMO multiple-access sum capacity:
/// each step water-fills one user against the whitened channel seen
/// through the other users' interference. Monotone and bounded.
MacIwfResult mac_iwf(const std::vector<Matrix>& channels,
                     const std::vector<double>& budgets_w, double sigma2);

/// Per-user uplink power budgets of the slot schedule: end users may
/// burst (K-1) times their average power, interior users (K-1)/2 (they
/// transmit the same signal in two slots).
std::vector<double> uplink_stream_budgets(int users,
                                          const std::vector<double>& user_power_w);

/// Downlink relay-covariance selection shared by the cooperative scheme
/// and the decode-and-forward baseline. `evaluate` maps per-receiver
/// downlink caps to (objective value, one dual weight per receiver).
struct RelayCovarianceResult {
  Matrix q_relay;
  std::vector<double> caps_bits;
  double value = 0.0;
  long iterations = 0;
};
using DownlinkEval =
    std::function<std::pair<double, std::vector<double>>(const std::vector<double>&)>;
RelayCovarianceResult optimize_relay_covariance(const ChannelInstance& inst,
                                                double alpha, const PowerScale& pw,
                                                const DownlinkEval& evaluate,
                                                const SolveOptions& opts);

/// Feasibility audit of a distributive solution against the unrelaxed
/// constraint set; violations beyond 1e-8 raise Internal. (The other
/// schemes are audited inside their solvers, where the chosen
/// covariances are still in scope.)
void verify_dist_solution(const ChannelInstance& inst, double alpha,
                          const PowerScale& pw, const RateSolution& sol);

}  // namespace mdrc

// SPDX-License-Identifier: Apache-2.0
//
// Decode-and-forward and amplify-and-forward reference schemes. Both fix
// the user covariances to (P_k / M) I; the baselines exist for
// qualitative comparison, so no joint covariance search is attempted.
// An optional per-user water-filling heuristic sits behind a flag.

#pragma once

#include "core/channel.hpp"
#include "core/optim.hpp"

namespace mdrc {

struct BaselineOptions {
  SolveOptions solve;
  bool waterfill_user_covariances = false;
};

/// Every relay decodes all messages: per-relay scalar multiple-access
/// constraints on the uplink, full-cooperation downlink rows shared with
/// the cooperative scheme.
RateSolution df_sumrate(const ChannelInstance& inst, double alpha,
                        const PowerScale& pw, const BaselineOptions& opts = {});

/// Relays forward scaled received signals (time split fixed at 1/2, the
/// symbol-for-symbol forwarding has no free split). Scalings are set to
/// the per-relay power constraint with equality.
RateSolution af_sumrate(const ChannelInstance& inst, const PowerScale& pw,
                        const BaselineOptions& opts = {});

}  // namespace mdrc

// SPDX-License-Identifier: Apache-2.0
//
// Exact desk-scale execution of the lattice exchange protocol on nested
// scaled-integer (cubic) lattice chains: dithered mod-lattice encoding
// with interference pre-subtraction, per-slot relay combining, nearest
// fine-point decoding, and chained codeword retrieval at the users.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/linalg.hpp"

namespace mdrc {

/// A chain of nested cubic lattices for one sub-channel. User k's coarse
/// lattice is coarse_scales[k] * Z^dim, the common fine lattice is
/// fine_scale * Z^dim; coarse_scales[k+1] divides coarse_scales[k]
/// exactly, so the lattices nest as point sets. User k's codebook is the
/// fine lattice inside the half-open cell [-q_k/2, q_k/2)^dim.
struct NestedLatticeChain {
  int dim = 1;
  double fine_scale = 1.0;
  std::vector<double> coarse_scales;  // one per user, nonincreasing

  void validate() const;
  int users() const { return static_cast<int>(coarse_scales.size()); }
  /// (q_k / g)^dim
  std::uint64_t codebook_size(int user) const;

  static NestedLatticeChain from_json(const std::string& text);
  std::string to_json() const;
  /// Parses either a single chain object or an array of chains.
  static std::vector<NestedLatticeChain> list_from_json(const std::string& text);
};

using Vec = std::vector<double>;

/// Componentwise x - q*floor(x/q + 1/2); lands in [-q/2, q/2), the
/// boundary mapping to the negative edge.
Vec mod_lattice(const Vec& x, double q);
double mod_scalar(double x, double q);

/// Enumeration of the codebook of user `user`: index <-> codeword
/// bijection in mixed radix over the dimensions.
Vec codeword_from_index(const NestedLatticeChain& chain, int user,
                        std::uint64_t index);
std::uint64_t codeword_index(const NestedLatticeChain& chain, int user,
                             const Vec& codeword);
bool codeword_valid(const NestedLatticeChain& chain, int user, const Vec& c);
Vec random_codeword(const NestedLatticeChain& chain, int user, Rng& rng);

/// Dithered mod-lattice precoding with the cell of lattice scale q_mod:
/// x = ((c - v - d) mod q_mod) / r_diag. Throws ZeroGain for |r| <= 1e-12.
Vec precode_mod(const Vec& c, const Vec& v, const Vec& d, double r_diag,
                double q_mod);

/// Transmit-signal construction for user k on this chain (mod over the
/// user's own coarse cell). Average power over random dithers is
/// q_k^2 * dim / (12 r_diag^2).
Vec encode_stream(const Vec& c, const Vec& v, const Vec& d, double r_diag,
                  const NestedLatticeChain& chain, int user);

/// Relay combining in slot l: (y + d_l + d_{l+1}) mod q_l. With noiseless
/// inputs produced by the exchange pipeline this equals
/// (c_l + c_{l+1}) mod q_l exactly — the interference terms and dithers
/// cancel inside the mod.
Vec relay_combine(const Vec& y, const Vec& dither_l, const Vec& dither_l1,
                  const NestedLatticeChain& chain, int slot);

/// Nearest fine-lattice point, then reduction into the slot cell.
Vec relay_decode_noisy(const Vec& y_tilde, const NestedLatticeChain& chain,
                       int slot);

/// Recovers every user's codeword from the K-1 combined slot words and
/// one known codeword. Forward: c_{l+1} = (w_l - c_l) mod q_l; backward:
/// c_l = (w_l - c_{l+1}) mod q_l. Throws InconsistentInputs when a
/// recovered word falls outside its codebook.
std::vector<Vec> retrieve_all(const std::vector<Vec>& slot_words, int own_user,
                              const Vec& own_codeword,
                              const NestedLatticeChain& chain);

struct ExchangeReport {
  int users = 0;
  /// success[receiver][sender]; the diagonal is trivially true.
  std::vector<std::vector<bool>> success;
  bool all_ok = true;
};

/// Full pipeline on a channel instance: triangularization, reverse-order
/// dithered encoding (each user pre-cancels its own inter-stream
/// interference), the two-active-users slot schedule, per-slot relay
/// combining and fine-lattice decoding, idealized downlink delivery, and
/// chained retrieval at every user. `chains` holds one chain per
/// effective sub-channel; `messages[k][n]` is user k's codeword on
/// sub-channel n. noise_sigma == 0 runs the exact noiseless protocol.
ExchangeReport simulate_exchange(const ChannelInstance& inst,
                                 const std::vector<NestedLatticeChain>& chains,
                                 const std::vector<std::vector<Vec>>& messages,
                                 double noise_sigma, std::uint64_t dither_seed);

}  // namespace mdrc

// SPDX-License-Identifier: Apache-2.0

#include "core/lattice.hpp"

#include <cmath>

#include <json.hpp>

namespace mdrc {

namespace {

using nlohmann::json;

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

// Encoding cell of user k in the slot schedule: the coarsest lattice of
// the (at most two) slots the user is active in, i.e. the one of slot
// k-1. Quantization offsets then live in every active slot's lattice and
// vanish under the relay's mod reduction.
int encoding_slot(int user) { return user > 0 ? user - 1 : 0; }

long ratio_as_int(double num, double den) {
  double r = num / den;
  double rounded = std::nearbyint(r);
  if (std::fabs(r - rounded) > 1e-9 * std::max(1.0, std::fabs(r))) return -1;
  return static_cast<long>(rounded);
}

}  // namespace

void NestedLatticeChain::validate() const {
  require(dim >= 1, ErrorCode::InvalidArgument, "chain: dim must be >= 1");
  require(fine_scale > 0.0, ErrorCode::InvalidArgument, "chain: fine scale must be > 0");
  require(!coarse_scales.empty(), ErrorCode::InvalidArgument, "chain: no coarse scales");
  for (std::size_t k = 0; k < coarse_scales.size(); ++k) {
    require(coarse_scales[k] > 0.0, ErrorCode::InvalidArgument,
            "chain: coarse scales must be > 0");
    require(ratio_as_int(coarse_scales[k], fine_scale) >= 1, ErrorCode::InvalidArgument,
            "chain: coarse scale not an integer multiple of the fine scale");
    if (k + 1 < coarse_scales.size())
      require(ratio_as_int(coarse_scales[k], coarse_scales[k + 1]) >= 1,
              ErrorCode::InvalidArgument, "chain: divisibility q_{l+1} | q_l violated");
  }
}

std::uint64_t NestedLatticeChain::codebook_size(int user) const {
  long per_dim = ratio_as_int(coarse_scales[static_cast<std::size_t>(user)], fine_scale);
  std::uint64_t size = 1;
  for (int t = 0; t < dim; ++t) size *= static_cast<std::uint64_t>(per_dim);
  return size;
}

NestedLatticeChain NestedLatticeChain::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("chain parse error: ") + e.what());
  }
  NestedLatticeChain chain;
  try {
    chain.dim = j.at("dim").get<int>();
    chain.fine_scale = j.at("g").get<double>();
    chain.coarse_scales = j.at("q").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("chain field error: ") + e.what());
  }
  chain.validate();
  return chain;
}

std::string NestedLatticeChain::to_json() const {
  json j;
  j["dim"] = dim;
  j["g"] = fine_scale;
  j["q"] = coarse_scales;
  return j.dump(2);
}

std::vector<NestedLatticeChain> NestedLatticeChain::list_from_json(
    const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("chain parse error: ") + e.what());
  }
  std::vector<NestedLatticeChain> out;
  auto one = [](const json& obj) {
    return NestedLatticeChain::from_json(obj.dump());
  };
  if (j.is_array()) {
    require(!j.empty(), ErrorCode::ParseError, "chain list is empty");
    for (const json& obj : j) out.push_back(one(obj));
  } else {
    out.push_back(one(j));
  }
  for (const NestedLatticeChain& c : out)
    require(c.users() == out[0].users() , ErrorCode::ParseError,
            "all chains must agree on the user count");
  return out;
}

double mod_scalar(double x, double q) {
  return x - q * std::floor(x / q + 0.5);
}

Vec mod_lattice(const Vec& x, double q) {
  require(q > 0.0, ErrorCode::InvalidArgument, "mod_lattice: scale must be > 0");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = mod_scalar(x[i], q);
  return out;
}

Vec codeword_from_index(const NestedLatticeChain& chain, int user,
                        std::uint64_t index) {
  long per_dim = ratio_as_int(chain.coarse_scales[static_cast<std::size_t>(user)],
                              chain.fine_scale);
  Vec c(static_cast<std::size_t>(chain.dim));
  for (int t = 0; t < chain.dim; ++t) {
    long digit = static_cast<long>(index % static_cast<std::uint64_t>(per_dim));
    index /= static_cast<std::uint64_t>(per_dim);
    // digits 0..L-1 map onto the centered lattice points of [-q/2, q/2)
    c[static_cast<std::size_t>(t)] =
        chain.fine_scale * static_cast<double>(digit - per_dim / 2);
  }
  return c;
}

std::uint64_t codeword_index(const NestedLatticeChain& chain, int user,
                             const Vec& codeword) {
  long per_dim = ratio_as_int(chain.coarse_scales[static_cast<std::size_t>(user)],
                              chain.fine_scale);
  std::uint64_t index = 0;
  for (int t = chain.dim - 1; t >= 0; --t) {
    double v = codeword[static_cast<std::size_t>(t)] / chain.fine_scale;
    long digit = static_cast<long>(std::nearbyint(v)) + per_dim / 2;
    require(digit >= 0 && digit < per_dim, ErrorCode::InvalidArgument,
            "codeword outside its codebook");
    index = index * static_cast<std::uint64_t>(per_dim) + static_cast<std::uint64_t>(digit);
  }
  return index;
}

bool codeword_valid(const NestedLatticeChain& chain, int user, const Vec& c) {
  if (static_cast<int>(c.size()) != chain.dim) return false;
  double q = chain.coarse_scales[static_cast<std::size_t>(user)];
  for (double v : c) {
    double steps = v / chain.fine_scale;
    if (std::fabs(steps - std::nearbyint(steps)) > 1e-6) return false;
    if (v < -q / 2 - 1e-9 || v >= q / 2 - 1e-9) return false;
  }
  return true;
}

Vec random_codeword(const NestedLatticeChain& chain, int user, Rng& rng) {
  std::uint64_t size = chain.codebook_size(user);
  auto index = static_cast<std::uint64_t>(rng.uniform01() * static_cast<double>(size));
  if (index >= size) index = size - 1;
  return codeword_from_index(chain, user, index);
}

Vec precode_mod(const Vec& c, const Vec& v, const Vec& d, double r_diag,
                double q_mod) {
  require(std::fabs(r_diag) > 1e-12, ErrorCode::ZeroGain,
          "precode_mod: vanishing sub-channel gain");
  require(c.size() == v.size() && c.size() == d.size(), ErrorCode::InvalidArgument,
          "precode_mod: length mismatch");
  Vec x(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    x[i] = mod_scalar(c[i] - v[i] - d[i], q_mod) / r_diag;
  return x;
}

Vec encode_stream(const Vec& c, const Vec& v, const Vec& d, double r_diag,
                  const NestedLatticeChain& chain, int user) {
  require(user >= 0 && user < chain.users(), ErrorCode::InvalidArgument,
          "encode_stream: bad user index");
  require(codeword_valid(chain, user, c), ErrorCode::InvalidArgument,
          "encode_stream: codeword not in the user's codebook");
  return precode_mod(c, v, d, r_diag,
                     chain.coarse_scales[static_cast<std::size_t>(user)]);
}

Vec relay_combine(const Vec& y, const Vec& dither_l, const Vec& dither_l1,
                  const NestedLatticeChain& chain, int slot) {
  require(slot >= 0 && slot + 1 < chain.users(), ErrorCode::InvalidArgument,
          "relay_combine: bad slot");
  Vec s(y.size());
  double q = chain.coarse_scales[static_cast<std::size_t>(slot)];
  for (std::size_t i = 0; i < y.size(); ++i)
    s[i] = mod_scalar(y[i] + dither_l[i] + dither_l1[i], q);
  return s;
}

Vec relay_decode_noisy(const Vec& y_tilde, const NestedLatticeChain& chain,
                       int slot) {
  double g = chain.fine_scale;
  double q = chain.coarse_scales[static_cast<std::size_t>(slot)];
  Vec w(y_tilde.size());
  for (std::size_t i = 0; i < y_tilde.size(); ++i) {
    double point = g * std::floor(y_tilde[i] / g + 0.5);
    w[i] = mod_scalar(point, q);
  }
  return w;
}

namespace {

// Recovered words live on the fine grid inside the slot cell. For a
// valid input codeword of user l+1 the slot-cell representative IS the
// codeword; off-grid values flag inconsistent inputs.
bool on_fine_grid(const NestedLatticeChain& chain, const Vec& v) {
  for (double x : v) {
    double steps = x / chain.fine_scale;
    if (std::fabs(steps - std::nearbyint(steps)) > 1e-6) return false;
  }
  return true;
}

}  // namespace

std::vector<Vec> retrieve_all(const std::vector<Vec>& slot_words, int own_user,
                              const Vec& own_codeword,
                              const NestedLatticeChain& chain) {
  const int K = chain.users();
  require(static_cast<int>(slot_words.size()) == K - 1, ErrorCode::InvalidArgument,
          "retrieve_all: need K-1 slot words");
  require(own_user >= 0 && own_user < K, ErrorCode::InvalidArgument,
          "retrieve_all: bad user index");
  require(on_fine_grid(chain, own_codeword), ErrorCode::InconsistentInputs,
          "retrieve_all: own codeword off the fine lattice");

  std::vector<Vec> words(static_cast<std::size_t>(K));
  words[static_cast<std::size_t>(own_user)] = own_codeword;
  for (int l = own_user; l + 1 < K; ++l) {
    double q = chain.coarse_scales[static_cast<std::size_t>(l)];
    Vec next(own_codeword.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = mod_scalar(slot_words[static_cast<std::size_t>(l)][i] -
                               words[static_cast<std::size_t>(l)][i],
                           q);
    require(on_fine_grid(chain, next), ErrorCode::InconsistentInputs,
            "retrieve_all: forward-recovered word outside its codebook");
    words[static_cast<std::size_t>(l + 1)] = next;
  }
  for (int l = own_user - 1; l >= 0; --l) {
    double q = chain.coarse_scales[static_cast<std::size_t>(l)];
    Vec prev(own_codeword.size());
    for (std::size_t i = 0; i < prev.size(); ++i)
      prev[i] = mod_scalar(slot_words[static_cast<std::size_t>(l)][i] -
                               words[static_cast<std::size_t>(l + 1)][i],
                           q);
    require(on_fine_grid(chain, prev), ErrorCode::InconsistentInputs,
            "retrieve_all: backward-recovered word outside its codebook");
    words[static_cast<std::size_t>(l)] = prev;
  }
  return words;
}

ExchangeReport simulate_exchange(const ChannelInstance& inst,
                                 const std::vector<NestedLatticeChain>& chains,
                                 const std::vector<std::vector<Vec>>& messages,
                                 double noise_sigma, std::uint64_t dither_seed) {
  const int K = inst.users;
  const int N = inst.effective_relays;
  require(static_cast<int>(chains.size()) == N, ErrorCode::InvalidArgument,
          "simulate_exchange: need one chain per effective sub-channel");
  require(static_cast<int>(messages.size()) == K, ErrorCode::InvalidArgument,
          "simulate_exchange: need messages for every user");
  for (const NestedLatticeChain& chain : chains) {
    chain.validate();
    require(chain.users() == K, ErrorCode::InvalidArgument,
            "simulate_exchange: chain user count mismatch");
  }
  for (int k = 0; k < K; ++k) {
    require(static_cast<int>(messages[static_cast<std::size_t>(k)].size()) == N,
            ErrorCode::InvalidArgument, "simulate_exchange: message table shape");
    for (int n = 0; n < N; ++n)
      require(codeword_valid(chains[static_cast<std::size_t>(n)], k,
                             messages[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)]),
              ErrorCode::InvalidArgument, "simulate_exchange: invalid codeword");
  }
  require(noise_sigma >= 0.0, ErrorCode::InvalidArgument, "noise sigma must be >= 0");

  Rng rng(dither_seed);

  // Dithers: one per (user, sub-channel), uniform over the encoding cell,
  // reused across the user's two slots (the transmitted signals in those
  // slots are identical).
  std::vector<std::vector<Vec>> dither(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    dither[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
      const NestedLatticeChain& chain = chains[static_cast<std::size_t>(n)];
      double cell = chain.coarse_scales[static_cast<std::size_t>(encoding_slot(k))];
      Vec d(static_cast<std::size_t>(chain.dim));
      for (double& v : d) v = (rng.uniform01() - 0.5) * cell;
      dither[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = d;
    }
  }

  // Reverse-order encoding: stream n sees only streams n' > n of the same
  // user, already encoded, through the upper-triangular rows.
  std::vector<std::vector<Vec>> x(static_cast<std::size_t>(K),
                                  std::vector<Vec>(static_cast<std::size_t>(N)));
  std::vector<std::vector<Vec>> interference = x;
  for (int k = 0; k < K; ++k) {
    const Matrix& r = inst.rq[static_cast<std::size_t>(k)].r;
    for (int n = N - 1; n >= 0; --n) {
      const NestedLatticeChain& chain = chains[static_cast<std::size_t>(n)];
      Vec v(static_cast<std::size_t>(chain.dim), 0.0);
      for (int n2 = n + 1; n2 < N; ++n2) {
        double w = r(static_cast<std::size_t>(n), static_cast<std::size_t>(n2));
        if (w == 0.0) continue;
        const Vec& xs = x[static_cast<std::size_t>(k)][static_cast<std::size_t>(n2)];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += w * xs[i];
      }
      interference[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = v;
      double cell = chain.coarse_scales[static_cast<std::size_t>(encoding_slot(k))];
      x[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)] = precode_mod(
          messages[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)], v,
          dither[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)],
          r(static_cast<std::size_t>(n), static_cast<std::size_t>(n)), cell);
    }
  }

  // Uplink slots and relay processing; the decoded combination of slot l
  // on sub-channel n is delivered to every user (idealized downlink).
  std::vector<std::vector<Vec>> slot_words(
      static_cast<std::size_t>(K - 1), std::vector<Vec>(static_cast<std::size_t>(N)));
  for (int l = 0; l + 1 < K; ++l) {
    for (int n = 0; n < N; ++n) {
      const NestedLatticeChain& chain = chains[static_cast<std::size_t>(n)];
      Vec y(static_cast<std::size_t>(chain.dim), 0.0);
      for (int k = l; k <= l + 1; ++k) {
        const Matrix& r = inst.rq[static_cast<std::size_t>(k)].r;
        double rd = r(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        const Vec& xs = x[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
        const Vec& v = interference[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += rd * xs[i] + v[i];
      }
      if (noise_sigma > 0.0)
        for (double& val : y) val += noise_sigma * rng.normal();
      Vec combined = relay_combine(
          y, dither[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)],
          dither[static_cast<std::size_t>(l + 1)][static_cast<std::size_t>(n)], chain, l);
      slot_words[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)] =
          relay_decode_noisy(combined, chain, l);
    }
  }

  ExchangeReport report;
  report.users = K;
  report.success.assign(static_cast<std::size_t>(K),
                        std::vector<bool>(static_cast<std::size_t>(K), true));
  for (int k = 0; k < K; ++k) {
    for (int n = 0; n < N; ++n) {
      const NestedLatticeChain& chain = chains[static_cast<std::size_t>(n)];
      std::vector<Vec> words(static_cast<std::size_t>(K - 1));
      for (int l = 0; l + 1 < K; ++l)
        words[static_cast<std::size_t>(l)] =
            slot_words[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
      std::vector<Vec> recovered;
      bool retrieval_ok = true;
      try {
        recovered = retrieve_all(
            words, k, messages[static_cast<std::size_t>(k)][static_cast<std::size_t>(n)],
            chain);
      } catch (const Error&) {
        retrieval_ok = false;  // noisy decoding can leave the codebook
      }
      for (int k2 = 0; k2 < K; ++k2) {
        if (k2 == k) continue;
        bool ok = retrieval_ok;
        if (ok) {
          const Vec& truth =
              messages[static_cast<std::size_t>(k2)][static_cast<std::size_t>(n)];
          const Vec& got = recovered[static_cast<std::size_t>(k2)];
          for (std::size_t i = 0; i < truth.size(); ++i)
            if (std::fabs(truth[i] - got[i]) > 1e-9 * std::max(1.0, std::fabs(truth[i])))
              ok = false;
        }
        if (!ok) {
          report.success[static_cast<std::size_t>(k)][static_cast<std::size_t>(k2)] = false;
          report.all_ok = false;
        }
      }
    }
  }
  return report;
}

}  // namespace mdrc

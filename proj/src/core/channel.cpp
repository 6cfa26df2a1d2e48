// SPDX-License-Identifier: Apache-2.0

#include "core/channel.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

namespace mdrc {

namespace {

using nlohmann::json;

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

std::vector<double> power_field(const json& j, const char* name, int count) {
  require(j.contains(name), ErrorCode::ParseError,
          std::string("missing field: ") + name);
  const json& f = j.at(name);
  std::vector<double> out;
  if (f.is_number()) {
    out.assign(static_cast<std::size_t>(count), f.get<double>());
  } else if (f.is_array()) {
    out = f.get<std::vector<double>>();
    require(static_cast<int>(out.size()) == count, ErrorCode::ParseError,
            std::string(name) + ": wrong array length");
  } else {
    throw Error(ErrorCode::ParseError, std::string(name) + ": expected number or array");
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(users >= 2, ErrorCode::InvalidArgument, "K must be >= 2");
  require(antennas >= 1, ErrorCode::InvalidArgument, "M must be >= 1");
  require(relays >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument,
          "alpha must lie strictly inside (0,1)");
  require(static_cast<int>(user_power.size()) == users, ErrorCode::InvalidArgument,
          "user_power length != K");
  require(static_cast<int>(relay_power.size()) == relays, ErrorCode::InvalidArgument,
          "relay_power length != N");
  for (double p : user_power)
    require(p > 0.0, ErrorCode::InvalidArgument, "user powers must be positive");
  for (double p : relay_power)
    require(p > 0.0, ErrorCode::InvalidArgument, "relay powers must be positive");
  require(sigma2_relay > 0.0 && sigma2_user > 0.0, ErrorCode::InvalidArgument,
          "noise variances must be positive");
}

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config parse error: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg.users = j.at("K").get<int>();
    cfg.antennas = j.at("M").get<int>();
    cfg.relays = j.at("N").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.user_power = power_field(j, "user_power", cfg.users);
    cfg.relay_power = power_field(j, "relay_power", cfg.relays);
    cfg.sigma2_relay = j.at("sigma2_relay").get<double>();
    cfg.sigma2_user = j.at("sigma2_user").get<double>();
    if (j.contains("snr_grid_db"))
      cfg.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    if (j.contains("seeds"))
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config field error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string ScenarioConfig::to_json() const {
  json j;
  j["K"] = users;
  j["M"] = antennas;
  j["N"] = relays;
  j["alpha"] = alpha;
  j["user_power"] = user_power;
  j["relay_power"] = relay_power;
  j["sigma2_relay"] = sigma2_relay;
  j["sigma2_user"] = sigma2_user;
  j["snr_grid_db"] = snr_grid_db;
  j["seeds"] = seeds;
  return j.dump(2);
}

double PowerScale::total_relay_power() const {
  return std::accumulate(relay_power_w.begin(), relay_power_w.end(), 0.0);
}

PowerScale powers_at_snr(const ScenarioConfig& cfg, double snr_db) {
  // SNR is defined as P / sigma^2 with a common noise floor.
  double p_ref = cfg.sigma2_relay * std::pow(10.0, snr_db / 10.0);
  PowerScale out;
  out.sigma2_relay = cfg.sigma2_relay;
  out.sigma2_user = cfg.sigma2_user;
  out.user_power_w.resize(cfg.user_power.size());
  out.relay_power_w.resize(cfg.relay_power.size());
  for (std::size_t k = 0; k < cfg.user_power.size(); ++k)
    out.user_power_w[k] = cfg.user_power[k] * p_ref;
  for (std::size_t n = 0; n < cfg.relay_power.size(); ++n)
    out.relay_power_w[n] = cfg.relay_power[n] * p_ref;
  return out;
}

Matrix ChannelInstance::uplink_effective(int k) const {
  return uplink[static_cast<std::size_t>(k)].top_rows(
      static_cast<std::size_t>(effective_relays));
}

Matrix ChannelInstance::downlink_effective(int k) const {
  return downlink[static_cast<std::size_t>(k)].left_cols(
      static_cast<std::size_t>(effective_relays));
}

ChannelInstance ChannelInstance::sample(const ScenarioConfig& cfg,
                                        std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  std::vector<Matrix> up, down;
  up.reserve(static_cast<std::size_t>(cfg.users));
  down.reserve(static_cast<std::size_t>(cfg.users));
  for (int k = 0; k < cfg.users; ++k)
    up.push_back(sample_gaussian_matrix(static_cast<std::size_t>(cfg.relays),
                                        static_cast<std::size_t>(cfg.antennas), rng));
  for (int k = 0; k < cfg.users; ++k)
    down.push_back(sample_gaussian_matrix(static_cast<std::size_t>(cfg.antennas),
                                          static_cast<std::size_t>(cfg.relays), rng));
  return from_matrices(std::move(up), std::move(down));
}

ChannelInstance ChannelInstance::from_matrices(std::vector<Matrix> uplink,
                                               std::vector<Matrix> downlink) {
  require(!uplink.empty() && uplink.size() == downlink.size(),
          ErrorCode::InvalidArgument, "instance needs matching uplink/downlink sets");
  ChannelInstance inst;
  inst.users = static_cast<int>(uplink.size());
  inst.relays = static_cast<int>(uplink[0].rows());
  inst.antennas = static_cast<int>(uplink[0].cols());
  for (const Matrix& h : uplink) {
    require(static_cast<int>(h.rows()) == inst.relays &&
                static_cast<int>(h.cols()) == inst.antennas,
            ErrorCode::InvalidArgument, "uplink matrix shape mismatch");
    require(h.all_finite(), ErrorCode::InvalidArgument, "uplink entries must be finite");
  }
  for (const Matrix& g : downlink) {
    require(static_cast<int>(g.rows()) == inst.antennas &&
                static_cast<int>(g.cols()) == inst.relays,
            ErrorCode::InvalidArgument, "downlink matrix shape mismatch");
    require(g.all_finite(), ErrorCode::InvalidArgument, "downlink entries must be finite");
  }
  inst.uplink = std::move(uplink);
  inst.downlink = std::move(downlink);
  // Deactivate highest-index relays until the triangularization fits.
  inst.effective_relays = std::min(inst.relays, inst.antennas);
  inst.rq.reserve(static_cast<std::size_t>(inst.users));
  for (int k = 0; k < inst.users; ++k)
    inst.rq.push_back(rq_decompose(inst.uplink_effective(k)));
  return inst;
}

Matrix subchannel_gains(const ChannelInstance& inst) {
  Matrix gains(static_cast<std::size_t>(inst.users),
               static_cast<std::size_t>(inst.effective_relays));
  for (int k = 0; k < inst.users; ++k)
    for (int n = 0; n < inst.effective_relays; ++n) {
      double r = inst.rq[static_cast<std::size_t>(k)].r(static_cast<std::size_t>(n),
                                                        static_cast<std::size_t>(n));
      gains(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) = r * r;
    }
  return gains;
}

}  // namespace mdrc

// SPDX-License-Identifier: Apache-2.0
//
// extern "C" wrapper over the core library: opaque handles, status
// codes, thread-local error text. No exception may cross this boundary.

#include "mdrc/mdrc.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "core/channel.hpp"
#include "core/experiments.hpp"
#include "core/lattice.hpp"
#include "core/optim.hpp"
#include "core/rates.hpp"

struct mdrc_scenario {
  mdrc::ScenarioConfig cfg;
};

struct mdrc_instance {
  mdrc::ChannelInstance inst;
};

namespace {

thread_local std::string g_last_error = "no error";

mdrc_status status_from(mdrc::ErrorCode code) {
  using mdrc::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return MDRC_ERR_INVALID_ARGUMENT;
    case ErrorCode::ParseError: return MDRC_ERR_PARSE;
    case ErrorCode::RankDeficient: return MDRC_ERR_RANK_DEFICIENT;
    case ErrorCode::NotSymmetric: return MDRC_ERR_NOT_SYMMETRIC;
    case ErrorCode::NotPsd: return MDRC_ERR_NOT_PSD;
    case ErrorCode::TraceBudgetExceeded: return MDRC_ERR_TRACE_BUDGET;
    case ErrorCode::EmptyGains: return MDRC_ERR_EMPTY_GAINS;
    case ErrorCode::ZeroGain: return MDRC_ERR_ZERO_GAIN;
    case ErrorCode::InconsistentInputs: return MDRC_ERR_INCONSISTENT_INPUTS;
    case ErrorCode::Unbounded: return MDRC_ERR_UNBOUNDED;
    case ErrorCode::NonConvergence: return MDRC_ERR_NON_CONVERGENCE;
    case ErrorCode::InvalidRegime: return MDRC_ERR_INVALID_REGIME;
    case ErrorCode::IoError: return MDRC_ERR_IO;
    case ErrorCode::Internal: return MDRC_ERR_INTERNAL;
  }
  return MDRC_ERR_INTERNAL;
}

template <typename Fn>
mdrc_status guarded(Fn&& fn) {
  try {
    fn();
    return MDRC_OK;
  } catch (const mdrc::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MDRC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MDRC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MDRC_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

mdrc_status require_arg(bool cond, const char* what) {
  if (cond) return MDRC_OK;
  g_last_error = what;
  return MDRC_ERR_INVALID_ARGUMENT;
}

mdrc::SolveOptions to_core(const mdrc_solve_options* options) {
  mdrc::SolveOptions opts;
  if (options) {
    opts.refine_qr = options->refine_relay_covariance != 0;
    if (options->inner_tol > 0.0) opts.inner_tol = options->inner_tol;
    if (options->max_iterations > 0) opts.max_iterations = options->max_iterations;
  }
  return opts;
}

mdrc::Scheme to_core(mdrc_scheme scheme) {
  switch (scheme) {
    case MDRC_SCHEME_DIST: return mdrc::Scheme::Dist;
    case MDRC_SCHEME_COOP: return mdrc::Scheme::Coop;
    case MDRC_SCHEME_CUTSET: return mdrc::Scheme::Cutset;
    case MDRC_SCHEME_DF: return mdrc::Scheme::Df;
    case MDRC_SCHEME_AF: return mdrc::Scheme::Af;
  }
  throw mdrc::Error(mdrc::ErrorCode::InvalidArgument, "unknown scheme id");
}

}  // namespace

extern "C" {

const char* mdrc_version(void) { return "0.1.0"; }

const char* mdrc_status_name(mdrc_status status) {
  switch (status) {
    case MDRC_OK: return "ok";
    case MDRC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case MDRC_ERR_PARSE: return "parse_error";
    case MDRC_ERR_RANK_DEFICIENT: return "rank_deficient";
    case MDRC_ERR_NOT_SYMMETRIC: return "not_symmetric";
    case MDRC_ERR_NOT_PSD: return "not_psd";
    case MDRC_ERR_TRACE_BUDGET: return "trace_budget_exceeded";
    case MDRC_ERR_EMPTY_GAINS: return "empty_gains";
    case MDRC_ERR_ZERO_GAIN: return "zero_gain";
    case MDRC_ERR_INCONSISTENT_INPUTS: return "inconsistent_inputs";
    case MDRC_ERR_UNBOUNDED: return "unbounded";
    case MDRC_ERR_NON_CONVERGENCE: return "non_convergence";
    case MDRC_ERR_INVALID_REGIME: return "invalid_regime";
    case MDRC_ERR_IO: return "io_error";
    case MDRC_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* mdrc_last_error_message(void) { return g_last_error.c_str(); }

void mdrc_string_free(char* s) { delete[] s; }

mdrc_status mdrc_scenario_parse_json(const char* json_text,
                                     mdrc_scenario** out_scenario) {
  if (mdrc_status st = require_arg(json_text && out_scenario, "null argument"))
    return st;
  return guarded([&] {
    auto* handle = new mdrc_scenario{mdrc::ScenarioConfig::from_json(json_text)};
    *out_scenario = handle;
  });
}

mdrc_status mdrc_scenario_load_file(const char* path, mdrc_scenario** out_scenario) {
  if (mdrc_status st = require_arg(path && out_scenario, "null argument")) return st;
  return guarded([&] {
    std::ifstream in(path);
    if (!in) throw mdrc::Error(mdrc::ErrorCode::IoError, std::string("cannot open ") + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto* handle = new mdrc_scenario{mdrc::ScenarioConfig::from_json(ss.str())};
    *out_scenario = handle;
  });
}

mdrc_status mdrc_scenario_to_json(const mdrc_scenario* scenario, char** out_json) {
  if (mdrc_status st = require_arg(scenario && out_json, "null argument")) return st;
  return guarded([&] { *out_json = copy_string(scenario->cfg.to_json()); });
}

mdrc_status mdrc_scenario_snr_grid(const mdrc_scenario* scenario, double* out_grid,
                                   size_t capacity, size_t* out_count) {
  if (mdrc_status st = require_arg(scenario != nullptr, "null scenario")) return st;
  const std::vector<double>& grid = scenario->cfg.snr_grid_db;
  if (out_count) *out_count = grid.size();
  if (out_grid)
    for (size_t i = 0; i < grid.size() && i < capacity; ++i) out_grid[i] = grid[i];
  return MDRC_OK;
}

void mdrc_scenario_free(mdrc_scenario* scenario) { delete scenario; }

mdrc_status mdrc_instance_sample(const mdrc_scenario* scenario, uint64_t seed,
                                 mdrc_instance** out_instance) {
  if (mdrc_status st = require_arg(scenario && out_instance, "null argument"))
    return st;
  return guarded([&] {
    auto* handle = new mdrc_instance{mdrc::ChannelInstance::sample(scenario->cfg, seed)};
    *out_instance = handle;
  });
}

void mdrc_instance_free(mdrc_instance* instance) { delete instance; }

mdrc_status mdrc_instance_effective_relays(const mdrc_instance* instance,
                                           int* out_effective_relays) {
  if (mdrc_status st = require_arg(instance && out_effective_relays, "null argument"))
    return st;
  *out_effective_relays = instance->inst.effective_relays;
  return MDRC_OK;
}

mdrc_status mdrc_instance_subchannel_gain(const mdrc_instance* instance, int user,
                                          int sub_channel, double* out_gain) {
  if (mdrc_status st = require_arg(instance && out_gain, "null argument")) return st;
  return guarded([&] {
    const mdrc::ChannelInstance& inst = instance->inst;
    if (user < 0 || user >= inst.users || sub_channel < 0 ||
        sub_channel >= inst.effective_relays)
      throw mdrc::Error(mdrc::ErrorCode::InvalidArgument, "index out of range");
    mdrc::Matrix gains = mdrc::subchannel_gains(inst);
    *out_gain = gains(static_cast<std::size_t>(user), static_cast<std::size_t>(sub_channel));
  });
}

void mdrc_solve_options_init(mdrc_solve_options* options) {
  if (!options) return;
  options->refine_relay_covariance = 0;
  options->inner_tol = 1e-7;
  options->max_iterations = 100000;
}

mdrc_status mdrc_sum_rate(const mdrc_scenario* scenario, const mdrc_instance* instance,
                          mdrc_scheme scheme, double snr_db,
                          const mdrc_solve_options* options, double* out_sum_rate_bits,
                          int* out_relaxed_bound) {
  if (!scenario) return require_arg(false, "null scenario");
  return mdrc_sum_rate_alpha(scenario, instance, scheme, scenario->cfg.alpha, snr_db,
                             options, out_sum_rate_bits, out_relaxed_bound);
}

mdrc_status mdrc_sum_rate_alpha(const mdrc_scenario* scenario,
                                const mdrc_instance* instance, mdrc_scheme scheme,
                                double alpha, double snr_db,
                                const mdrc_solve_options* options,
                                double* out_sum_rate_bits, int* out_relaxed_bound) {
  if (mdrc_status st =
          require_arg(scenario && instance && out_sum_rate_bits, "null argument"))
    return st;
  return guarded([&] {
    mdrc::PowerScale pw = mdrc::powers_at_snr(scenario->cfg, snr_db);
    mdrc::RateSolution sol = mdrc::solve_scheme(instance->inst, to_core(scheme), alpha,
                                                pw, to_core(options));
    *out_sum_rate_bits = sol.sum_rate_bits;
    if (out_relaxed_bound) *out_relaxed_bound = sol.relaxed_bound ? 1 : 0;
  });
}

mdrc_status mdrc_gap_bound(int users, int antennas, int relays, double alpha,
                           int64_t mc_samples, uint64_t seed, double* out_delta_bits,
                           double* out_std_error) {
  if (mdrc_status st = require_arg(out_delta_bits != nullptr, "null argument"))
    return st;
  return guarded([&] {
    mdrc::GapBound bound =
        mdrc::asymptotic_gap_bound(users, antennas, relays, alpha, mc_samples, seed);
    *out_delta_bits = bound.delta_bits;
    if (out_std_error) *out_std_error = bound.std_error_bits;
  });
}

mdrc_status mdrc_run_sweep(const mdrc_scenario* scenario, const char* schemes_csv,
                           const mdrc_solve_options* options, char** out_csv) {
  if (mdrc_status st = require_arg(scenario && schemes_csv && out_csv, "null argument"))
    return st;
  return guarded([&] {
    std::vector<mdrc::Scheme> schemes = mdrc::parse_scheme_list(schemes_csv);
    mdrc::SweepResult result = mdrc::run_sweep(scenario->cfg, schemes, to_core(options));
    *out_csv = copy_string(result.to_csv());
  });
}

mdrc_status mdrc_run_alpha_sweep(const mdrc_scenario* scenario, const double* alphas,
                                 size_t n_alphas, const double* snrs_db, size_t n_snrs,
                                 const mdrc_solve_options* options, char** out_csv) {
  if (mdrc_status st = require_arg(scenario && alphas && n_alphas > 0 && snrs_db &&
                                       n_snrs > 0 && out_csv,
                                   "null or empty argument"))
    return st;
  return guarded([&] {
    std::vector<double> av(alphas, alphas + n_alphas);
    std::vector<double> sv(snrs_db, snrs_db + n_snrs);
    mdrc::SweepResult result =
        mdrc::run_alpha_sweep(scenario->cfg, av, sv, to_core(options));
    *out_csv = copy_string(result.to_csv());
  });
}

mdrc_status mdrc_verify(const mdrc_scenario* scenario,
                        const mdrc_solve_options* options, char** out_report,
                        int* out_failures) {
  if (mdrc_status st =
          require_arg(scenario && out_report && out_failures, "null argument"))
    return st;
  return guarded([&] {
    mdrc::VerifyReport report = mdrc::verify_theorems(scenario->cfg, to_core(options));
    *out_report = copy_string(report.to_text());
    *out_failures = report.failures;
  });
}

mdrc_status mdrc_lattice_demo(const char* chain_json, uint64_t runs,
                              double noise_sigma, char** out_report,
                              uint64_t* out_failures) {
  if (mdrc_status st =
          require_arg(chain_json && out_report && out_failures, "null argument"))
    return st;
  return guarded([&] {
    std::vector<mdrc::NestedLatticeChain> chains =
        mdrc::NestedLatticeChain::list_from_json(chain_json);
    mdrc::LatticeDemoReport report = mdrc::lattice_demo(chains, runs, noise_sigma);
    *out_report = copy_string(report.to_text());
    *out_failures = report.failures;
  });
}

}  // extern "C"

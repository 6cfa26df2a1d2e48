// SPDX-License-Identifier: Apache-2.0
//
// mdrc command-line tool. Talks to the library exclusively through the
// public C interface.
//
//   mdrc run --config cfg.json --schemes dist,coop,cutset --out rates.csv
//   mdrc alpha-sweep --config cfg.json --alphas 0.3,0.5,0.7 --snrs 20,40 --out a.csv
//   mdrc verify --config cfg.json
//   mdrc lattice-demo --chain chain.json --seeds 100
//
// Exit codes: 0 success, 1 failed verification, 2 configuration error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdrc/mdrc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;

int exit_code_for(mdrc_status status) {
  switch (status) {
    case MDRC_OK:
      return kExitOk;
    case MDRC_ERR_PARSE:
    case MDRC_ERR_INVALID_ARGUMENT:
    case MDRC_ERR_IO:
      return kExitConfigError;
    default:
      return kExitVerifyFailed;
  }
}

int fail(mdrc_status status) {
  std::cerr << "error (" << mdrc_status_name(status)
            << "): " << mdrc_last_error_message() << "\n";
  return exit_code_for(status);
}

bool write_output(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << text;
  return true;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) out.push_back(std::stod(token));
  return out;
}

struct ScenarioHandle {
  mdrc_scenario* ptr = nullptr;
  ~ScenarioHandle() { mdrc_scenario_free(ptr); }
};

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { mdrc_string_free(ptr); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Achievable rates and bounds for multiway relaying with "
               "distributed relays, plus an executable lattice exchange demo"};
  app.set_version_flag("--version", std::string("mdrc ") + mdrc_version());
  app.require_subcommand(1);

  mdrc_solve_options options;
  mdrc_solve_options_init(&options);
  bool refine = false;

  std::string config_path, out_path, schemes = "dist,coop,cutset";
  auto* run = app.add_subcommand("run", "Monte Carlo sum-rate sweep over the SNR grid");
  run->add_option("--config", config_path, "scenario JSON file")->required();
  run->add_option("--schemes", schemes, "comma separated: dist,coop,cutset,df,af");
  run->add_option("--out", out_path, "output CSV path ('-' for stdout)");
  run->add_flag("--refine-qr", refine, "refine the relay covariance by ascent");

  std::string alphas_csv = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  std::string snrs_csv;
  auto* alpha_sweep =
      app.add_subcommand("alpha-sweep", "dist/coop sum rates over a time-split grid");
  alpha_sweep->add_option("--config", config_path, "scenario JSON file")->required();
  alpha_sweep->add_option("--alphas", alphas_csv, "comma separated alpha grid");
  alpha_sweep->add_option("--snrs", snrs_csv,
                          "comma separated SNR grid in dB (default: config grid)");
  alpha_sweep->add_option("--out", out_path, "output CSV path ('-' for stdout)");
  alpha_sweep->add_flag("--refine-qr", refine, "refine the relay covariance by ascent");

  auto* verify = app.add_subcommand("verify", "run the high-SNR consistency checks");
  verify->add_option("--config", config_path, "scenario JSON file")->required();

  std::string chain_path;
  std::uint64_t demo_seeds = 100;
  double noise_sigma = 0.0;
  auto* demo = app.add_subcommand("lattice-demo", "execute the lattice exchange protocol");
  demo->add_option("--chain", chain_path, "chain JSON ({dim,g,q:[...]} or array)")
      ->required();
  demo->add_option("--seeds", demo_seeds, "number of random runs");
  demo->add_option("--noise", noise_sigma, "relay noise standard deviation (0 = off)");

  CLI11_PARSE(app, argc, argv);
  options.refine_relay_covariance = refine ? 1 : 0;

  if (run->parsed()) {
    ScenarioHandle scenario;
    if (mdrc_status st = mdrc_scenario_load_file(config_path.c_str(), &scenario.ptr))
      return fail(st);
    OwnedString csv;
    if (mdrc_status st = mdrc_run_sweep(scenario.ptr, schemes.c_str(), &options, &csv.ptr))
      return fail(st);
    return write_output(out_path, csv.ptr) ? kExitOk : kExitConfigError;
  }

  if (alpha_sweep->parsed()) {
    ScenarioHandle scenario;
    if (mdrc_status st = mdrc_scenario_load_file(config_path.c_str(), &scenario.ptr))
      return fail(st);
    std::vector<double> alphas = parse_doubles(alphas_csv);
    std::vector<double> snrs = parse_doubles(snrs_csv);
    if (snrs.empty()) {
      size_t count = 0;
      mdrc_scenario_snr_grid(scenario.ptr, nullptr, 0, &count);
      snrs.resize(count);
      mdrc_scenario_snr_grid(scenario.ptr, snrs.data(), snrs.size(), &count);
    }
    if (alphas.empty() || snrs.empty()) {
      std::cerr << "error: empty alpha or SNR grid\n";
      return kExitConfigError;
    }
    OwnedString csv;
    if (mdrc_status st =
            mdrc_run_alpha_sweep(scenario.ptr, alphas.data(), alphas.size(),
                                 snrs.data(), snrs.size(), &options, &csv.ptr))
      return fail(st);
    return write_output(out_path, csv.ptr) ? kExitOk : kExitConfigError;
  }

  if (verify->parsed()) {
    ScenarioHandle scenario;
    if (mdrc_status st = mdrc_scenario_load_file(config_path.c_str(), &scenario.ptr))
      return fail(st);
    OwnedString report;
    int failures = 0;
    if (mdrc_status st = mdrc_verify(scenario.ptr, &options, &report.ptr, &failures))
      return fail(st);
    std::cout << report.ptr;
    return failures == 0 ? kExitOk : kExitVerifyFailed;
  }

  if (demo->parsed()) {
    std::ifstream in(chain_path);
    if (!in) {
      std::cerr << "error: cannot open " << chain_path << "\n";
      return kExitConfigError;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    OwnedString report;
    std::uint64_t failures = 0;
    if (mdrc_status st = mdrc_lattice_demo(ss.str().c_str(), demo_seeds, noise_sigma,
                                           &report.ptr, &failures))
      return fail(st);
    std::cout << report.ptr;
    return failures == 0 ? kExitOk : kExitVerifyFailed;
  }

  return kExitOk;
}

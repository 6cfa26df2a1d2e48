// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared-library surface only: handles, status codes,
// error text, and the string-returning entry points.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "mdrc/mdrc.h"

namespace {

const char* kConfig =
    "{\"K\":2,\"M\":2,\"N\":2,\"alpha\":0.5,\"user_power\":1.0,"
    "\"relay_power\":[0.5,0.5],\"sigma2_relay\":1.0,\"sigma2_user\":1.0,"
    "\"snr_grid_db\":[0,20],\"seeds\":[1,2]}";

struct Scenario {
  mdrc_scenario* ptr = nullptr;
  ~Scenario() { mdrc_scenario_free(ptr); }
};

struct Instance {
  mdrc_instance* ptr = nullptr;
  ~Instance() { mdrc_instance_free(ptr); }
};

}  // namespace

TEST_CASE("scenario parsing, serialization, and grid access") {
  Scenario s;
  REQUIRE(mdrc_scenario_parse_json(kConfig, &s.ptr) == MDRC_OK);

  char* json = nullptr;
  REQUIRE(mdrc_scenario_to_json(s.ptr, &json) == MDRC_OK);
  CHECK(std::strstr(json, "\"K\"") != nullptr);
  CHECK(std::strstr(json, "\"sigma2_relay\"") != nullptr);
  mdrc_string_free(json);

  size_t count = 0;
  double grid[4] = {0, 0, 0, 0};
  REQUIRE(mdrc_scenario_snr_grid(s.ptr, grid, 4, &count) == MDRC_OK);
  CHECK(count == 2);
  CHECK(grid[1] == doctest::Approx(20.0));
}

TEST_CASE("parse errors carry a status and a message") {
  mdrc_scenario* out = nullptr;
  CHECK(mdrc_scenario_parse_json("{oops", &out) == MDRC_ERR_PARSE);
  CHECK(std::string(mdrc_last_error_message()).size() > 0);
  CHECK(mdrc_scenario_parse_json("{\"K\":1}", &out) != MDRC_OK);
  CHECK(mdrc_scenario_parse_json(nullptr, &out) == MDRC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(mdrc_status_name(MDRC_ERR_PARSE)) == "parse_error");
}

TEST_CASE("sampling and solving through the C surface keeps the ordering") {
  Scenario s;
  REQUIRE(mdrc_scenario_parse_json(kConfig, &s.ptr) == MDRC_OK);
  Instance inst;
  REQUIRE(mdrc_instance_sample(s.ptr, 11, &inst.ptr) == MDRC_OK);

  int n_eff = 0;
  REQUIRE(mdrc_instance_effective_relays(inst.ptr, &n_eff) == MDRC_OK);
  CHECK(n_eff == 2);
  double gain = -1.0;
  REQUIRE(mdrc_instance_subchannel_gain(inst.ptr, 0, 1, &gain) == MDRC_OK);
  CHECK(gain >= 0.0);
  CHECK(mdrc_instance_subchannel_gain(inst.ptr, 5, 0, &gain) ==
        MDRC_ERR_INVALID_ARGUMENT);

  double dist = 0.0, coop = 0.0, cut = 0.0;
  int relaxed = -1;
  REQUIRE(mdrc_sum_rate(s.ptr, inst.ptr, MDRC_SCHEME_DIST, 20.0, nullptr, &dist,
                        nullptr) == MDRC_OK);
  REQUIRE(mdrc_sum_rate(s.ptr, inst.ptr, MDRC_SCHEME_COOP, 20.0, nullptr, &coop,
                        nullptr) == MDRC_OK);
  REQUIRE(mdrc_sum_rate(s.ptr, inst.ptr, MDRC_SCHEME_CUTSET, 20.0, nullptr, &cut,
                        &relaxed) == MDRC_OK);
  CHECK(relaxed == 1);
  CHECK(dist >= 0.0);
  CHECK(coop >= dist - 1e-6);
  CHECK(cut >= coop - 1e-6);

  double with_alpha = 0.0;
  REQUIRE(mdrc_sum_rate_alpha(s.ptr, inst.ptr, MDRC_SCHEME_DIST, 0.3, 20.0, nullptr,
                              &with_alpha, nullptr) == MDRC_OK);
  CHECK(with_alpha >= 0.0);
}

TEST_CASE("sweep CSV through the C surface") {
  Scenario s;
  REQUIRE(mdrc_scenario_parse_json(kConfig, &s.ptr) == MDRC_OK);
  char* csv = nullptr;
  REQUIRE(mdrc_run_sweep(s.ptr, "dist,cutset", nullptr, &csv) == MDRC_OK);
  std::string text(csv);
  mdrc_string_free(csv);
  CHECK(text.rfind("scheme,snr_db,alpha,seed,sum_rate_bits,relaxed_bound,status\n", 0) ==
        0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 2 * 2);
  CHECK(mdrc_run_sweep(s.ptr, "dist,bogus", nullptr, &csv) ==
        MDRC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("alpha sweep and gap bound through the C surface") {
  Scenario s;
  REQUIRE(mdrc_scenario_parse_json(kConfig, &s.ptr) == MDRC_OK);
  double alphas[2] = {0.4, 0.6};
  double snrs[1] = {15.0};
  char* csv = nullptr;
  REQUIRE(mdrc_run_alpha_sweep(s.ptr, alphas, 2, snrs, 1, nullptr, &csv) == MDRC_OK);
  CHECK(std::string(csv).find("coop") != std::string::npos);
  mdrc_string_free(csv);

  double delta = -1.0, se = -1.0;
  REQUIRE(mdrc_gap_bound(3, 4, 4, 0.7, 100, 1, &delta, &se) == MDRC_OK);
  CHECK(delta == 0.0);
  REQUIRE(mdrc_gap_bound(3, 4, 4, 0.3, 20000, 1, &delta, &se) == MDRC_OK);
  CHECK(delta > 0.0);
  CHECK(se > 0.0);
  CHECK(mdrc_gap_bound(2, 4, 4, 0.3, 100, 1, &delta, &se) == MDRC_ERR_INVALID_REGIME);
}

TEST_CASE("lattice demo through the C surface") {
  const char* chain = "{\"dim\":1,\"g\":1.0,\"q\":[8,4,2]}";
  char* report = nullptr;
  uint64_t failures = 99;
  REQUIRE(mdrc_lattice_demo(chain, 25, 0.0, &report, &failures) == MDRC_OK);
  CHECK(failures == 0);
  CHECK(std::string(report).find("lattice exchange demo") != std::string::npos);
  mdrc_string_free(report);
  CHECK(mdrc_lattice_demo("{\"dim\":1,\"g\":1.0,\"q\":[8,3]}", 5, 0.0, &report,
                          &failures) != MDRC_OK);
}

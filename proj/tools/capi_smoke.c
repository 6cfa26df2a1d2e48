/* SPDX-License-Identifier: Apache-2.0 */
/* Compiled as C to keep the public header C-clean. */

#include <stdio.h>

#include "mdrc/mdrc.h"

int main(void) {
  const char* cfg_json =
      "{\"K\":2,\"M\":2,\"N\":2,\"alpha\":0.5,\"user_power\":1.0,"
      "\"relay_power\":0.5,\"sigma2_relay\":1.0,\"sigma2_user\":1.0,"
      "\"snr_grid_db\":[10],\"seeds\":[1]}";
  mdrc_scenario* scenario = NULL;
  mdrc_instance* instance = NULL;
  double rate = 0.0;

  if (mdrc_scenario_parse_json(cfg_json, &scenario) != MDRC_OK) {
    fprintf(stderr, "parse: %s\n", mdrc_last_error_message());
    return 1;
  }
  if (mdrc_instance_sample(scenario, 7, &instance) != MDRC_OK) {
    fprintf(stderr, "sample: %s\n", mdrc_last_error_message());
    mdrc_scenario_free(scenario);
    return 1;
  }
  if (mdrc_sum_rate(scenario, instance, MDRC_SCHEME_CUTSET, 10.0, NULL, &rate, NULL) !=
      MDRC_OK) {
    fprintf(stderr, "solve: %s\n", mdrc_last_error_message());
    mdrc_instance_free(instance);
    mdrc_scenario_free(scenario);
    return 1;
  }
  printf("mdrc %s cutset sum rate at 10 dB: %.6f bits\n", mdrc_version(), rate);
  mdrc_instance_free(instance);
  mdrc_scenario_free(scenario);
  return rate > 0.0 ? 0 : 1;
}

#include <math.h>
#include <stdio.h>

#include "wsn_sim.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    WsnRadioParams params = wsn_radio_params_default();
    CHECK(wsn_max_packets_per_round(&params) == 250);

    double e = 0.0;
    CHECK(wsn_tx_energy(&params, 400, -1.0, &e) == WSN_STATUS_INVALID_ARGUMENT);
    char msg[128];
    CHECK(wsn_last_error(msg, sizeof msg) > 0);

    WsnSimulation *sim = NULL;
    CHECK(wsn_simulation_new("nodes=10\ninitial_energy=2e7\nseed=5", &sim) == WSN_STATUS_OK);
    WsnLifetime life;
    CHECK(wsn_simulation_run(sim, &life) == WSN_STATUS_OK);
    CHECK(life.first_death_round > 0);
    CHECK(life.first_death_round <= life.last_death_round);
    CHECK(!isnan(life.utility_pct));
    CHECK(wsn_simulation_alive_count(sim) == 0);
    CHECK(wsn_simulation_step(sim, NULL) == WSN_STATUS_FINISHED);
    wsn_simulation_free(sim);

    printf("%llu %llu %.2f\n", (unsigned long long)life.first_death_round,
           (unsigned long long)life.last_death_round, life.utility_pct);
    return 0;
}

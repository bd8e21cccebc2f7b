#include <stdio.h>
#include <string.h>
#include "starris.h"

int main(void) {
    StarrisConfig *cfg = NULL;
    StarrisChannels *ch = NULL;
    StarrisMetrics m;
    double psi_t[8], psi_r[8];
    bool feasible = false;
    double p = 0.0;

    if (starris_detection_probability(1.0, &p) != STARRIS_STATUS_OK || p != 0.5) return 1;
    if (starris_config_parse("n_ris = 4\nseed = 3\n", &cfg) != STARRIS_STATUS_OK) return 2;
    if (starris_channels_generate(cfg, &ch) != STARRIS_STATUS_OK) return 3;
    if (starris_run_method(ch, cfg, STARRIS_METHOD_SAFE_ISAC, &m, psi_t, psi_r, &feasible) != STARRIS_STATUS_OK) {
        fprintf(stderr, "%s\n", starris_last_error_message());
        return 4;
    }
    if (starris_config_parse("bogus = 1", &cfg) != STARRIS_STATUS_CONFIG) return 5;
    if (strlen(starris_last_error_message()) == 0) return 6;
    printf("jam_gain=%g gamma_sd=%g feasible=%d\n", m.jam_gain, m.gamma_sd, (int)feasible);
    starris_channels_free(ch);
    starris_config_free(cfg);
    return 0;
}

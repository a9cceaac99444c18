#include "kerrsim.h"
#include <stdio.h>
#include <math.h>

int main(void) {
    KerrsimState *state = NULL;
    KerrsimStatus st = kerrsim_state_coherent(12, 1.0, 0.0, &state);
    if (st != KERRSIM_STATUS_OK) { fprintf(stderr, "create: %s\n", kerrsim_status_message(st)); return 1; }

    KerrsimState *evolved = NULL;
    st = kerrsim_evolve_kraus(state, 0.3, 0.2, 1.0, &evolved);
    if (st != KERRSIM_STATUS_OK) { fprintf(stderr, "evolve: %s\n", kerrsim_status_message(st)); return 1; }

    double mean_n = 0.0, pur = 0.0;
    kerrsim_mean_photon_number(evolved, &mean_n);
    kerrsim_purity(evolved, &pur);
    double expect = exp(-2.0 * 0.2 * 1.0);
    printf("dim=%u mean_n=%.12f (expect %.12f) purity=%.6f version=%s\n",
           kerrsim_state_dim(evolved), mean_n, expect, pur, kerrsim_version());
    if (fabs(mean_n - expect) > 1e-6) return 1;

    double residual = 0.0;
    kerrsim_completeness_residual(16, 1.0, 1.0, 1.0, &residual);
    printf("completeness residual = %.3e\n", residual);
    if (residual > 1e-12) return 1;

    kerrsim_state_free(evolved);
    kerrsim_state_free(state);
    puts("C ABI smoke test: OK");
    return 0;
}

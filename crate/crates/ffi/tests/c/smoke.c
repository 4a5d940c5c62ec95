#include <stdio.h>
#include "oodsel.h"

int main(void) {
    /* two domains, two labels, one feature; domain 2 shifted */
    float x[16] = {0.f, 0.2f, 1.f, 1.2f, 0.1f, 0.3f, 1.1f, 1.3f, 2.f, 2.2f, 3.f, 3.2f, 2.1f, 2.3f, 3.1f, 3.3f};
    uint16_t y[16] = {1, 1, 2, 2, 1, 1, 2, 2, 1, 1, 2, 2, 1, 1, 2, 2};
    uint16_t e[16] = {1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2};
    OodselDataset *ds = NULL;
    if (oodsel_dataset_from_arrays(16, 1, 2, x, y, e, &ds) != OODSEL_STATUS_OK) {
        fprintf(stderr, "%s\n", oodsel_last_error());
        return 1;
    }
    uint16_t doms[2] = {1, 2};
    double v = -1.0;
    if (oodsel_feature_variation(ds, 0, doms, 2, OODSEL_DIVERGENCE_TOTAL_VARIATION, &v) != OODSEL_STATUS_OK) return 2;
    if (oodsel_feature_variation(ds, 5, doms, 2, OODSEL_DIVERGENCE_TOTAL_VARIATION, &v) != OODSEL_STATUS_INVALID_ARGUMENT) return 3;
    if (oodsel_last_error() == NULL) return 4;
    oodsel_dataset_free(ds);
    printf("variation ok\n");
    return 0;
}

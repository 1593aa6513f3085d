/* minimal consumer: build a 2x2 matrix, take a riesz projector, and
 * check the selected rank through the C API alone. exits nonzero on
 * any mismatch so the harness can assert on the status code. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "speclab.h"

static void require(int ok, const char *what) {
    if (!ok) {
        fprintf(stderr, "consumer: %s failed: %s\n", what, speclab_last_error_message());
        exit(1);
    }
}

int main(void) {
    printf("speclab %s\n", speclab_version());

    /* diag(i, 2i), interleaved re/im, row-major */
    double entries[8] = {0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0};
    SpeclabMatrix *a = NULL;
    require(speclab_matrix_create(2, 2, entries, &a) == SPECLAB_STATUS_OK, "matrix_create");

    SpeclabMatrix *p = NULL;
    double defect = 0.0, tr_re = 0.0, tr_im = 0.0;
    require(speclab_riesz_projector(a, 0.0, 2.0, 0.5, 0, &p, &defect, &tr_re, &tr_im) ==
                SPECLAB_STATUS_OK,
            "riesz_projector");
    require(defect <= 1e-10, "idempotence defect");
    require(fabs(tr_re - 1.0) <= 1e-10 && fabs(tr_im) <= 1e-10, "trace");

    double re = 0.0, im = 0.0;
    require(speclab_matrix_get(p, 1, 1, &re, &im) == SPECLAB_STATUS_OK, "matrix_get");
    require(fabs(re - 1.0) <= 1e-10 && fabs(im) <= 1e-10, "selected entry");

    /* error path: a contour through the spectrum must fail and leave a message */
    SpeclabMatrix *bad = NULL;
    require(speclab_riesz_projector(a, 0.0, 2.0, 1.0, 0, &bad, NULL, NULL, NULL) ==
                SPECLAB_STATUS_NUMERICAL_ERROR,
            "error status");
    require(strlen(speclab_last_error_message()) > 0, "error message");

    char *json = NULL;
    require(speclab_matrix_to_json(p, &json) == SPECLAB_STATUS_OK, "matrix_to_json");
    require(strstr(json, "\"rows\"") != NULL, "json shape");
    speclab_string_free(json);

    speclab_matrix_free(a);
    speclab_matrix_free(p);
    printf("consumer: ok\n");
    return 0;
}

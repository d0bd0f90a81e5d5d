#include <math.h>
#include <stdio.h>
#include <string.h>

#include "setquad.h"

#define CHECK(call)                                                            \
    do {                                                                       \
        SqStatus s_ = (call);                                                  \
        if (s_ != SQ_STATUS_OK) {                                              \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,            \
                    sq_last_error_message());                                  \
            return 1;                                                          \
        }                                                                      \
    } while (0)

int main(void) {
    SqModulus *lip = NULL;
    SqWeight *one = NULL;
    SqKnots *mid = NULL;
    double err = 0.0;

    CHECK(sq_modulus_power(1.0, 1.0, &lip));
    CHECK(sq_weight_constant_one(&one));
    CHECK(sq_knots_midpoints(2, &mid));
    CHECK(sq_worst_case_error(lip, one, mid, &err));
    if (fabs(err - 0.125) > 1e-15) {
        fprintf(stderr, "bound %.17g\n", err);
        return 1;
    }

    double eps[2] = {0.0, 1.0};
    double x[2] = {0.5, 0.51};
    SqKnots *pair = NULL;
    size_t active[2];
    size_t nu = 0;
    CHECK(sq_knots_new(x, 2, &pair));
    CHECK(sq_noisy_active_indices(lip, pair, eps, 2, one, active, 2, &nu));
    if (nu != 1 || active[0] != 0) {
        fprintf(stderr, "nu %zu\n", nu);
        return 1;
    }

    SqModulus *bad = NULL;
    if (sq_modulus_power(1.0, 2.0, &bad) != SQ_STATUS_INVALID_INPUT || bad != NULL ||
        strlen(sq_last_error_message()) == 0) {
        fprintf(stderr, "expected invalid input\n");
        return 1;
    }

    sq_knots_free(pair);
    sq_knots_free(mid);
    sq_weight_free(one);
    sq_modulus_free(lip);
    printf("ok %s\n", sq_version());
    return 0;
}

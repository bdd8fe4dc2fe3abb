#include <math.h>
#include <stdio.h>
#include "fdblock.h"

int main(void) {
    FdbEncoding *e = NULL;
    if (fdb_encoding_new(FDB_OPERATOR_LAPLACE, 2, 2, &e) != FDB_STATUS_OK) {
        fprintf(stderr, "new: %s\n", fdb_last_error());
        return 1;
    }
    double dev = 1.0;
    bool ok = false;
    if (fdb_encoding_verify(e, 1e-12, &dev, &ok) != FDB_STATUS_OK || !ok) {
        return 2;
    }
    FdbGateCounts counts;
    if (fdb_encoding_resources(e, &counts) != FDB_STATUS_OK || counts.t_count == 0) {
        return 3;
    }
    printf("alpha=%g m=%zu t=%zu\n", fdb_encoding_alpha(e), fdb_encoding_ancillas(e), counts.t_count);
    fdb_encoding_free(e);
    if (fdb_encoding_new(FDB_OPERATOR_LAPLACE, 0, 2, &e) != FDB_STATUS_INVALID_ARGUMENT || fdb_last_error() == NULL) {
        return 4;
    }
    return 0;
}

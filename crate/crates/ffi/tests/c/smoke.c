#include <math.h>
#include <stdio.h>
#include <string.h>

#include "schwarzian_lab.h"

#define CHECK(cond)                                                  \
    do {                                                             \
        if (!(cond)) {                                               \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,   \
                    sl_last_error_message());                        \
            return 1;                                                \
        }                                                            \
    } while (0)

int main(void) {
    SlFamily *f = NULL;
    CHECK(sl_family_from_catalog("example1", &f) == SL_STATUS_OK);

    SlComplex z = {0.25, -1.0};
    SlComplex s;
    CHECK(sl_schwarzian(f, 3.0, z, &s) == SL_STATUS_OK);
    CHECK(fabs(s.re + 4.5) < 1e-12 && fabs(s.im) < 1e-12);

    SlMobius m = {{2, 0}, {1, 0}, {1, 0}, {3, 0}};
    SlIdentityReport rep;
    CHECK(sl_check_mobius_invariance(f, 3.0, &m, z, NULL, &rep) == SL_STATUS_OK);
    CHECK(rep.pass);

    SlFamily *bad = NULL;
    size_t offset = 0;
    CHECK(sl_family_parse("exp(z", &bad, &offset) == SL_STATUS_PARSE_ERROR);
    CHECK(bad == NULL && offset == 5);
    CHECK(strlen(sl_last_error_message()) > 0);

    SlGridSpec grid = sl_grid_spec(0.5, 1.0, -0.5, 0.5, 3, 3);
    uint32_t ns[32];
    for (uint32_t i = 0; i < 32; i++) ns[i] = i + 1;
    SlScanReport *scan = NULL;
    CHECK(sl_marty_scan(f, &grid, ns, 32, 1, 0, &scan) == SL_STATUS_OK);
    CHECK(sl_scan_report_len(scan) == 9);
    for (size_t i = 0; i < 9; i++) {
        SlScanPoint p;
        CHECK(sl_scan_report_point(scan, i, NULL, &p) == SL_STATUS_OK);
        CHECK(p.verdict == SL_VERDICT_BOUNDED);
    }
    char *csv = NULL;
    CHECK(sl_scan_report_to_csv(scan, NULL, &csv) == SL_STATUS_OK);
    CHECK(strncmp(csv, "re,im,sup_stat", 14) == 0);
    sl_string_free(csv);
    sl_scan_report_free(scan);
    sl_family_free(f);

    printf("ok %s\n", sl_version());
    return 0;
}

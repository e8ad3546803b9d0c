#include <stdio.h>
#include <stdlib.h>
#include "qsdesign.h"

int main(void) {
    QsDesign *d = NULL;
    if (qs_generate(6, 6, 0, NULL, &d) != QS_STATUS_OK) {
        fprintf(stderr, "%s\n", qs_last_error());
        return 1;
    }
    QsMetrics r;
    if (qs_evaluate(d, &r) != QS_STATUS_OK) return 2;
    uint32_t o[36];
    if (qs_design_copy_o(d, o, 36) != QS_STATUS_OK) return 3;
    printf("d1=%llu d2sq=%llu dH=%llu r_ave=%lld/%lld o11=%u\n", (unsigned long long)r.d1,
           (unsigned long long)r.d2sq, (unsigned long long)r.dh, (long long)r.r_ave_num,
           (long long)r.r_ave_den, o[0]);
    qs_design_free(d);
    if (qs_generate(7, 6, 0, NULL, &d) != QS_STATUS_UNSUPPORTED || d != NULL) return 4;
    return 0;
}

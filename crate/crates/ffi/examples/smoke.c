#include <math.h>
#include <stdio.h>
#include "korteweg.h"

int main(void) {
    size_t n = 64;
    KwGrid *grid = NULL;
    if (kw_grid_new(1, &n, NULL, &grid) != KW_STATUS_OK) {
        fprintf(stderr, "%s\n", kw_last_error_message());
        return 1;
    }
    double data[64];
    for (size_t i = 0; i < n; i++) data[i] = 2.0 + cos(4.0 * 6.283185307179586 * i / n);
    KwField *field = NULL;
    kw_field_from_values(grid, data, n, &field);
    double norm = 0.0;
    KwStatus st = kw_besov_norm(field, 1.0, 2.0, 2.0, 0, &norm);
    printf("korteweg %s: status %d, B^1_{2,2} norm %.12f\n", kw_version(), (int)st, norm);
    kw_field_free(field);
    kw_grid_free(grid);
    return st == KW_STATUS_OK ? 0 : 1;
}

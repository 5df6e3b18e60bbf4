#include <stdio.h>
#include "jacobi_mv.h"

int main(void) {
    JmvFunctional *f = NULL;
    JmvSequences *s = NULL;
    char *json = NULL;
    if (jmv_functional_gaussian(2, &f) != JMV_STATUS_OK ||
        jmv_sequences_compute(f, 2, &s) != JMV_STATUS_OK ||
        jmv_sequences_to_json(s, &json) != JMV_STATUS_OK) {
        fprintf(stderr, "error: %s\n", jmv_last_error_message());
        return 1;
    }
    puts(json);
    jmv_string_free(json);
    jmv_sequences_free(s);
    jmv_functional_free(f);
    return 0;
}

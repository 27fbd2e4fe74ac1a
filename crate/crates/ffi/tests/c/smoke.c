#include <stdio.h>
#include <string.h>

#include "cbd.h"

static const char *SPECKER =
    "contents q1 q2 q3\n"
    "context c1 measures q1 q2 { ++: 1/2, --: 1/2 }\n"
    "context c2 measures q2 q3 { ++: 1/2, --: 1/2 }\n"
    "context c3 measures q1 q3 { +-: 1/2, -+: 1/2 }\n";

int main(void) {
    CbdSystem *system = NULL;
    if (cbd_system_parse(SPECKER, &system) != CBD_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", cbd_last_error());
        return 1;
    }
    CbdAnalysis *analysis = NULL;
    if (cbd_analyze(system, &analysis) != CBD_STATUS_OK) {
        fprintf(stderr, "analyze: %s\n", cbd_last_error());
        return 1;
    }
    bool contextual = false;
    char *delta = NULL;
    cbd_analysis_contextual(analysis, &contextual);
    cbd_analysis_delta(analysis, &delta);
    CbdCyclicVerdict verdict;
    cbd_cyclic_verdict(system, &verdict);
    printf("contextual=%d delta=%s cyclic=%d\n", contextual, delta, (int)verdict);
    cbd_string_free(delta);
    cbd_analysis_free(analysis);
    cbd_system_free(system);

    CbdSystem *bad = NULL;
    CbdStatus status = cbd_system_parse("contents q1\ncontext c1 measures q1 { +: 1/2 }\n", &bad);
    printf("status=%d error=%s\n", (int)status, cbd_last_error());
    return bad == NULL ? 0 : 1;
}

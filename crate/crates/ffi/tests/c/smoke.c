#include <stdio.h>
#include "dpbb.h"

int main(void) {
    DpbbProblem *problem = NULL;
    DpbbSolveResult *result = NULL;
    uint8_t x[3];
    double sse0, sse1;
    uint8_t decision;

    if (dpbb_problem_generate(DPBB_FAMILY_PAPER1, 0.0, 0, false, &problem) != DPBB_STATUS_OK) {
        fprintf(stderr, "generate: %s\n", dpbb_last_error());
        return 1;
    }
    if (dpbb_solve_problem(problem, &result) != DPBB_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", dpbb_last_error());
        return 1;
    }
    dpbb_result_solution(result, x, 3);
    dpbb_result_stage(result, 1, &sse0, &sse1, &decision);
    printf("x=%u%u%u stage1=%.4f decision=%u\n", x[0], x[1], x[2], sse0, decision);

    dpbb_result_free(result);
    dpbb_problem_free(problem);

    double a[4] = {1.0, 2.0, 3.0, 4.0};
    double b[2] = {1.0, 1.0};
    DpbbStatus st = dpbb_problem_new(2, 2, a, b, 0.0, &problem);
    printf("square=%d\n", (int)st);
    return 0;
}

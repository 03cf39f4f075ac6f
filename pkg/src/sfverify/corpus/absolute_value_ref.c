/*
 * absolute_value_ref.c
 *
 * Hand-maintained step functions for the AbsoluteValue chart.  Same record
 * layout as the generated module, but the state dispatch is written
 * positively (P tested first) because that is how the original author
 * thought about it.  Kept as a verification candidate.
 */

#define AbsoluteValue_IN_P 1
#define AbsoluteValue_IN_N 2

typedef struct {
    unsigned char is_active_c1;
    unsigned char is_c1;
} DWork_AbsoluteValue;

typedef struct {
    double y;
} B_AbsoluteValue;

typedef struct {
    double u;
} U_AbsoluteValue;

typedef struct {
    double y;
} Y_AbsoluteValue;

static DWork_AbsoluteValue AbsoluteValue_DWork;
static B_AbsoluteValue AbsoluteValue_B;
static U_AbsoluteValue AbsoluteValue_U;
static Y_AbsoluteValue AbsoluteValue_Y;

void AbsoluteValue_initialize(void)
{
    AbsoluteValue_DWork.is_active_c1 = 0;
    AbsoluteValue_DWork.is_c1 = 0;
    AbsoluteValue_B.y = 0.0;
    AbsoluteValue_U.u = 0.0;
    AbsoluteValue_Y.y = 0.0;
}

void AbsoluteValue_output(void)
{
    if (AbsoluteValue_DWork.is_active_c1 == 0) {
        AbsoluteValue_DWork.is_active_c1 = 1;
        if (AbsoluteValue_U.u >= 0) {
            AbsoluteValue_DWork.is_c1 = AbsoluteValue_IN_P;
        } else {
            AbsoluteValue_DWork.is_c1 = AbsoluteValue_IN_N;
        }
    } else if (AbsoluteValue_DWork.is_c1 == AbsoluteValue_IN_P) {
        /* in P: drop to N on a sign change */
        if (AbsoluteValue_U.u < 0) {
            AbsoluteValue_B.y = -AbsoluteValue_U.u;
            AbsoluteValue_DWork.is_c1 = AbsoluteValue_IN_N;
        } else {
            AbsoluteValue_B.y = AbsoluteValue_U.u;
        }
    } else {
        /* in N: climb back to P when the input is non-negative */
        if (AbsoluteValue_U.u >= 0) {
            AbsoluteValue_B.y = AbsoluteValue_U.u;
            AbsoluteValue_DWork.is_c1 = AbsoluteValue_IN_P;
        } else {
            AbsoluteValue_B.y = -AbsoluteValue_U.u;
        }
    }
    AbsoluteValue_Y.y = AbsoluteValue_B.y;
    return;
}

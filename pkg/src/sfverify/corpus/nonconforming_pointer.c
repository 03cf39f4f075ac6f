/*
 * nonconforming_pointer.c
 *
 * An AbsoluteValue step function routed through a pointer to the active
 * working area, the way hand-tuned firmware sometimes aliases its state.
 * Aliasing makes record accesses unresolvable by name, so reading it must
 * fail rather than guess.
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
    DWork_AbsoluteValue *dw = &AbsoluteValue_DWork;
    dw->is_active_c1 = 0;
    dw->is_c1 = 0;
    AbsoluteValue_B.y = 0.0;
    AbsoluteValue_U.u = 0.0;
    AbsoluteValue_Y.y = 0.0;
}

void AbsoluteValue_output(void)
{
    if (AbsoluteValue_DWork.is_active_c1 == 0) {
        AbsoluteValue_DWork.is_active_c1 = 1;
        AbsoluteValue_DWork.is_c1 = AbsoluteValue_U.u >= 0 ? AbsoluteValue_IN_P : AbsoluteValue_IN_N;
    } else {
        AbsoluteValue_B.y = *(&AbsoluteValue_U.u) < 0 ? -AbsoluteValue_U.u : AbsoluteValue_U.u;
    }
    AbsoluteValue_Y.y = AbsoluteValue_B.y;
}

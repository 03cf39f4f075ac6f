/*
 * nonconforming_loop.c
 *
 * A rewrite of the Heater step function that "settles" the mode inside the
 * step with a while loop instead of taking one transition per call.  The
 * observable behaviour may even agree, but the shape is outside what the
 * structural checker can relate to a chart, so reading it must fail.
 */

#define Heater_IN_Off 1
#define Heater_IN_On 2

typedef struct {
    unsigned char is_active_c1;
    unsigned char is_c1;
} DWork_Heater;

typedef struct {
    double temp;
} U_Heater;

typedef struct {
    long long heat;
} Y_Heater;

typedef struct {
    long long heat;
} B_Heater;

static DWork_Heater Heater_DWork;
static U_Heater Heater_U;
static Y_Heater Heater_Y;
static B_Heater Heater_B;

void Heater_initialize(void)
{
    Heater_DWork.is_active_c1 = 0;
    Heater_DWork.is_c1 = 0;
    Heater_B.heat = 0;
    Heater_U.temp = 0.0;
    Heater_Y.heat = 0;
}

void Heater_output(void)
{
    int settled = 0;
    if (Heater_DWork.is_active_c1 == 0) {
        Heater_DWork.is_active_c1 = 1;
        Heater_DWork.is_c1 = Heater_IN_Off;
    }
    while (!settled) {
        if (Heater_DWork.is_c1 == Heater_IN_Off && Heater_U.temp < 18.0) {
            Heater_DWork.is_c1 = Heater_IN_On;
        } else if (Heater_DWork.is_c1 == Heater_IN_On && Heater_U.temp > 22.0) {
            Heater_DWork.is_c1 = Heater_IN_Off;
        } else {
            settled = 1;
        }
    }
    for (settled = 0; settled < 2; settled++) {
        Heater_B.heat = Heater_DWork.is_c1 == Heater_IN_On;
    }
    Heater_Y.heat = Heater_B.heat;
}

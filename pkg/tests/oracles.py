"""Frozen hand-computed oracles for the corpus charts.

Every value here was worked out by hand-simulating the chart semantics on
paper BEFORE the interpreter existed, and is never edited to match code.
If an implementation disagrees with a value below, the implementation is
wrong (or the disagreement must be argued in the decisions ledger, not by
touching this file).

Step indices are 1-based in comments; sequences are per-step observations.
"""

# --- absolute_value ---------------------------------------------------------
# u = <5, 5, -3, -3>
# step 1 activates the chart (enters P via the initial junction, u>=0);
# activation writes no output, y stays 0.
# step 2: P during y:=u -> 5.
# step 3: P fires to N through the exit junction (u<0), path action y:=-u -> 3.
# step 4: N during y:=-u -> 3.
ABSOLUTE_VALUE_INPUT_U = [5.0, 5.0, -3.0, -3.0]
ABSOLUTE_VALUE_OUTPUT_Y = [0.0, 5.0, 3.0, 3.0]
# Active leaf after each step:
ABSOLUTE_VALUE_LEAF = ["P", "P", "N", "N"]

# --- counters ---------------------------------------------------------------
# parallel root, regions A then B; events tick, tock; input delta.
# steps: ({tick}, 3), ({tick, tock}, 4), ({}, 9), ({tock}, 2)
# step 1: first execution activates (entry a:=1, b:=1); the tick execution is
#         consumed by activation, no on-action runs. total=0.
# step 2: tick execution: a:=2, total+=4 -> 4; b:=2. tock execution: a:=3,
#         b:=3, total-=1 -> 3.
# step 3: no events -> single execution: a:=4, b:=4. total unchanged.
# step 4: tock: a:=5, b:=5, total-=1 -> 2.
COUNTERS_EVENTS = [["tick"], ["tick", "tock"], [], ["tock"]]
COUNTERS_INPUT_DELTA = [3, 4, 9, 2]
COUNTERS_OUTPUT_TOTAL = [0, 3, 3, 2]
COUNTERS_FINAL_A = 5
COUNTERS_FINAL_B = 5

# --- gearbox ----------------------------------------------------------------
# (speed, reset) per step.
# step 1: activation -> Idle (entry gear:=0).
# step 2: Idle -> Drive (speed>0): entry gear:=1, default child Low gear:=1.
# step 3: Low -> High (speed>=10), condition action shifts+=1 runs during the
#         search, entry gear:=2.
# step 4: inner transition Drive->Low (reset!=0) exits High, re-enters Low.
# step 5: nothing fires (speed 3, reset 0), no during actions -> unchanged.
# step 6: Drive -> Idle (speed<=0): gear:=0.
GEARBOX_INPUTS = [(5.0, 0), (5.0, 0), (12.0, 0), (12.0, 1), (3.0, 0), (0.0, 0)]
GEARBOX_OUTPUT_GEAR = [0, 1, 2, 1, 1, 0]
GEARBOX_OUTPUT_SHIFTS = [0, 0, 1, 1, 1, 1]

# --- heater -----------------------------------------------------------------
# (power, heat) per step; On has a history junction and exit action
# cycles := cycles + 1.
# step 1: activation -> Off (level:=0).
# step 2: Off -> On (power!=0), no history yet -> default child Low, level:=1.
# step 3: Low -> High (heat!=0), level:=2.
# step 4: On -> Off (power==0); exiting On bumps cycles to 1; Off level:=0.
#         History remembers High.
# step 5: Off -> On, history restores High, level:=2.
# step 6: High -> Low (heat==0), level:=1.
HEATER_INPUTS = [(1, 1), (1, 1), (1, 1), (0, 1), (1, 0), (1, 0)]
HEATER_OUTPUT_LEVEL = [0, 1, 2, 0, 2, 1]
HEATER_OUTPUT_CYCLES = [0, 0, 0, 1, 1, 1]

# --- alarm ------------------------------------------------------------------
# parallel root: Monitor {Quiet, Loud} then Control {Idle, Active, Done};
# local events ping, alert; input arm=1 throughout.
# step 1: activation: Quiet (level:=0), Idle. x=0.
# step 2: Idle->Active fires (arm!=0); transition action: x+=1 (x=1),
#         send ping (Quiet->Loud, level:=1; Control has no active child
#         mid-transition so its dispatch does nothing), scope Control still
#         active so the action resumes: x+=10 (x=11), Active entered.
# step 3: Active during: x+=2 (x=13), send alert (Loud->Quiet level:=0;
#         Active->Done). Active is no longer active -> early return skips
#         x+=50 forever (that increment is dead by construction).
# step 4: Quiet and Done are quiescent; nothing changes.
ALARM_INPUT_ARM = [1, 1, 1, 1]
ALARM_OUTPUT_X = [0, 11, 13, 13]
ALARM_OUTPUT_LEVEL = [0, 1, 0, 0]
# Active leaves after steps 2 and 3:
ALARM_STEP2_LEAVES = {"Loud", "Active"}
ALARM_STEP3_LEAVES = {"Quiet", "Done"}

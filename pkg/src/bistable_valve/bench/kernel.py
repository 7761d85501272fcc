"""Compiled fixed-step integrator for the pneumatic test rig.

State and parameters travel as flat float64 arrays so the same kernel
serves single steps and whole protocol pauses.
"""

import math

import numpy as np
from numba import njit

# state vector layout
STEP, T, P0, P1, P2, Q, VALVE, INTEG, PREV_ERR, SETPOINT = range(10)
S0, S1, S2, S3, S4, S5 = range(10, 16)
T_ENGAGED, T_SWITCHED, T_BLOCK_ONSET, BLOCKED, MONITOR = range(16, 21)
N_STATE = 21

# parameter vector layout
(TAU_FILL, TAU_BLOCK, Q_PUMP, PC, RESPONSE, KP, KI, KD, TAU_RES, PUMP_GAIN,
 U_MAX, BAND, Q_THRESHOLD, LEAKING, SWITCH_TOL) = range(15)
N_PARAM = 15

# log columns: t, P_reservoir, P1, P2, Q, valve_state, S0..S5
N_LOG = 12
STATE_I, STATE_II = 1.0, 2.0


@njit(cache=True)
def _write_row(x, out, row):
    out[row, 0] = x[T]
    out[row, 1] = x[P0]
    out[row, 2] = x[P1]
    out[row, 3] = x[P2]
    out[row, 4] = x[Q]
    out[row, 5] = x[VALVE]
    for k in range(6):
        out[row, 6 + k] = x[S0 + k]


@njit(cache=True)
def advance(x, p, dt, n, out):
    """Advance state ``x`` in place by ``n`` steps of ``dt`` seconds.

    When ``out`` has at least ``n`` rows, the state after every step is
    written to it.
    """
    record = out.shape[0] >= n
    a_fill = math.exp(-dt / p[TAU_FILL])
    a_block = math.exp(-dt / p[TAU_BLOCK])
    a_res = math.exp(-dt / p[TAU_RES])
    # blocking starts this long after engagement so the flow crosses the
    # threshold exactly one response time after engagement
    lead = p[RESPONSE] - p[TAU_BLOCK] * math.log(p[Q_PUMP] / p[Q_THRESHOLD])
    if lead < 0.0:
        lead = 0.0
    for i in range(n):
        x[STEP] += 1.0
        x[T] = x[STEP] * dt

        # reservoir: PID-driven pump into a first-order plant
        if x[S0] > 0.5:
            e = x[SETPOINT] - x[P0]
            d = (e - x[PREV_ERR]) / dt
            trial = x[INTEG] + e * dt
            u = p[KP] * e + p[KI] * trial + p[KD] * d
            # conditional integration as anti-windup
            if (0.0 <= u <= p[U_MAX]) or (u < 0.0 and e > 0.0) or (u > p[U_MAX] and e < 0.0):
                x[INTEG] = trial
            u = p[KP] * e + p[KI] * x[INTEG] + p[KD] * d
            if u < 0.0:
                u = 0.0
            elif u > p[U_MAX]:
                u = p[U_MAX]
            x[PREV_ERR] = e
            target = p[PUMP_GAIN] * u
            x[P0] = target + (x[P0] - target) * a_res
        if x[S3] > 0.5:
            x[P0] *= a_fill

        # chambers: S2 engages P2 and S1 vents it; S5 engages P1 and S4 vents it
        src2 = x[P0] if (x[S2] > 0.5 and x[S1] < 0.5) else 0.0
        src1 = x[P0] if (x[S5] > 0.5 and x[S4] < 0.5) else 0.0
        x[P2] = src2 + (x[P2] - src2) * a_fill
        x[P1] = src1 + (x[P1] - src1) * a_fill

        # valve state machine on the chamber pressure difference
        dp = x[P2] - x[P1]
        if x[VALVE] == STATE_I and dp >= p[PC] - p[SWITCH_TOL]:
            x[VALVE] = STATE_II
            x[T_SWITCHED] = x[T]
        elif x[VALVE] == STATE_II and -dp >= p[PC] - p[SWITCH_TOL]:
            x[VALVE] = STATE_I
            x[T_SWITCHED] = x[T]

        # engagement stamp of the currently driven chamber
        if math.isnan(x[T_ENGAGED]):
            level = (1.0 - p[BAND]) * x[SETPOINT]
            if x[S2] > 0.5 and x[S1] < 0.5 and x[P2] >= level:
                x[T_ENGAGED] = x[T]
            elif x[S5] > 0.5 and x[S4] < 0.5 and x[P1] >= level:
                x[T_ENGAGED] = x[T]

        # monitored channel: MONITOR holds the valve state that blocks it
        if x[VALVE] == x[MONITOR] and p[LEAKING] < 0.5:
            if math.isnan(x[T_BLOCK_ONSET]) and not math.isnan(x[T_ENGAGED]):
                onset = x[T_ENGAGED] + lead
                if onset < x[T_SWITCHED]:
                    onset = x[T_SWITCHED]
                x[T_BLOCK_ONSET] = onset
            blocked = (not math.isnan(x[T_BLOCK_ONSET])) and x[T] >= x[T_BLOCK_ONSET] + 0.5 * dt
            x[BLOCKED] = 1.0 if blocked else 0.0
        else:
            x[T_BLOCK_ONSET] = np.nan
            x[BLOCKED] = 0.0

        qsrc = 0.0 if x[BLOCKED] > 0.5 else p[Q_PUMP]
        x[Q] = qsrc + (x[Q] - qsrc) * a_block

        if record:
            _write_row(x, out, i)


@njit(cache=True)
def snapshot(x, out, row):
    _write_row(x, out, row)

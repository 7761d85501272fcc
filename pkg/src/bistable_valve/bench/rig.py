"""Virtual pneumatic rig: reservoir under PID control, two valve chambers,
six solenoids and a monitored controlled-air channel.

Solenoid roles: S0 opens the pump supply to the reservoir (the PID loop only
acts while it is on), S1/S2 vent/engage chamber 2, S4/S5 vent/engage
chamber 1, S3 bleeds the reservoir. A chamber that is not engaged vents to
atmosphere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernel as K

LOG_COLUMNS = ("t_s", "P_reservoir_kPa", "P1_kPa", "P2_kPa", "Q_mL_min", "valve_state",
               "S0", "S1", "S2", "S3", "S4", "S5")
SOLENOIDS = ("S0", "S1", "S2", "S3", "S4", "S5")
_STATE_CODE = {"I": K.STATE_I, "II": K.STATE_II}
_STATE_NAME = {K.STATE_I: "I", K.STATE_II: "II"}
# channel -> valve state that blocks it
_CHANNEL_BLOCKED_IN = {"top": "I", "bottom": "II"}


@dataclass(frozen=True)
class BenchConfig:
    sample_rate: float = 1000.0      # Hz; the step size is its inverse
    tau_fill: float = 0.5            # s
    tau_block: float = 0.01          # s
    pump_flow: float = 2000.0        # mL/min into the controlled channel
    flow_threshold: float = 5.0      # mL/min
    engage_band: float = 0.02        # fraction of target
    hold_samples: int = 50
    kp: float = 2.0
    ki: float = 1.0
    kd: float = 0.0
    reservoir_tau: float = 2.0       # s, plant time constant
    pump_gain: float = 2.5           # kPa per unit controller output at steady state
    u_max: float = 200.0
    switch_tolerance: float = 1e-5   # kPa

    def __post_init__(self):
        if not 1000.0 <= self.sample_rate:
            raise ValueError("sample rate must be at least 1 kHz (dt <= 1 ms)")
        for name in ("tau_fill", "tau_block", "pump_flow", "flow_threshold", "reservoir_tau", "pump_gain"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate


DEFAULT_CONFIG = BenchConfig()


@dataclass
class ValveSimModel:
    """Behavioural valve: switching threshold, response time and wear.

    With ``degradation = (a, b)`` the response time at cycle ``n`` is
    ``a * exp(b * n)``; otherwise it is ``base_response_time``. Once
    ``cycle_count`` reaches ``leak_threshold`` the valve no longer seals.
    """

    critical_pressure: float
    base_response_time: float = 1.0
    degradation: Optional[tuple] = None
    cycle_count: int = 0
    leak_threshold: Optional[int] = None

    def __post_init__(self):
        if not self.critical_pressure > 0:
            raise ValueError("critical pressure must be positive")
        if not self.base_response_time >= 0:
            raise ValueError("response time must be non-negative")

    def response_time(self, n: Optional[int] = None) -> float:
        if self.degradation is None:
            return self.base_response_time
        a, b = self.degradation
        return a * math.exp(b * (self.cycle_count if n is None else n))

    @property
    def leaking(self) -> bool:
        return self.leak_threshold is not None and self.cycle_count >= self.leak_threshold


@dataclass(frozen=True)
class BenchState:
    t: float = 0.0
    reservoir: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    flow: float = DEFAULT_CONFIG.pump_flow
    valve_state: str = "I"
    solenoids: tuple = (False,) * 6
    setpoint: float = 0.0
    monitored_channel: str = "bottom"
    step_index: int = 0
    pid_integral: float = 0.0
    pid_prev_error: float = 0.0
    t_engaged: float = math.nan
    t_switched: float = math.nan
    t_block_onset: float = math.nan
    blocked: bool = False

    @classmethod
    def at_rest(cls, reservoir=0.0, valve_state="I", monitored_channel="bottom",
                config: BenchConfig = DEFAULT_CONFIG, **solenoids) -> "BenchState":
        """Equilibrium state with the reservoir holding ``reservoir`` kPa.

        The PID integrator is preloaded so S0 regulation starts without a kick.
        """
        blocked = _CHANNEL_BLOCKED_IN[monitored_channel] == valve_state
        sol = tuple(bool(solenoids.get(name, False)) for name in SOLENOIDS)
        return cls(reservoir=reservoir, setpoint=reservoir, valve_state=valve_state,
                   monitored_channel=monitored_channel, solenoids=sol,
                   flow=0.0 if blocked else config.pump_flow, blocked=blocked,
                   pid_integral=reservoir / (config.pump_gain * config.ki) if config.ki else 0.0)

    def to_array(self) -> np.ndarray:
        x = np.zeros(K.N_STATE)
        x[K.STEP] = self.step_index
        x[K.T] = self.t
        x[K.P0], x[K.P1], x[K.P2], x[K.Q] = self.reservoir, self.p1, self.p2, self.flow
        x[K.VALVE] = _STATE_CODE[self.valve_state]
        x[K.INTEG], x[K.PREV_ERR], x[K.SETPOINT] = self.pid_integral, self.pid_prev_error, self.setpoint
        x[K.S0:K.S5 + 1] = [1.0 if s else 0.0 for s in self.solenoids]
        x[K.T_ENGAGED], x[K.T_SWITCHED], x[K.T_BLOCK_ONSET] = self.t_engaged, self.t_switched, self.t_block_onset
        x[K.BLOCKED] = 1.0 if self.blocked else 0.0
        x[K.MONITOR] = _STATE_CODE[_CHANNEL_BLOCKED_IN[self.monitored_channel]]
        return x

    @classmethod
    def from_array(cls, x: np.ndarray, monitored_channel: str) -> "BenchState":
        return cls(t=float(x[K.T]), reservoir=float(x[K.P0]), p1=float(x[K.P1]), p2=float(x[K.P2]),
                   flow=float(x[K.Q]), valve_state=_STATE_NAME[float(x[K.VALVE])],
                   solenoids=tuple(bool(v > 0.5) for v in x[K.S0:K.S5 + 1]),
                   setpoint=float(x[K.SETPOINT]), monitored_channel=monitored_channel,
                   step_index=int(x[K.STEP]), pid_integral=float(x[K.INTEG]),
                   pid_prev_error=float(x[K.PREV_ERR]), t_engaged=float(x[K.T_ENGAGED]),
                   t_switched=float(x[K.T_SWITCHED]), t_block_onset=float(x[K.T_BLOCK_ONSET]),
                   blocked=bool(x[K.BLOCKED] > 0.5))

    def with_solenoids(self, **changes) -> "BenchState":
        sol = list(self.solenoids)
        for name, value in changes.items():
            sol[SOLENOIDS.index(name)] = bool(value)
        return replace(self, solenoids=tuple(sol))

    @property
    def blocked_channels(self) -> frozenset:
        """Control channels the valve pistons currently block."""
        return frozenset(c for c, s in _CHANNEL_BLOCKED_IN.items() if s == self.valve_state)


def _params(valve: ValveSimModel, config: BenchConfig, response_time=None) -> np.ndarray:
    p = np.zeros(K.N_PARAM)
    p[K.TAU_FILL], p[K.TAU_BLOCK] = config.tau_fill, config.tau_block
    p[K.Q_PUMP], p[K.Q_THRESHOLD] = config.pump_flow, config.flow_threshold
    p[K.PC] = valve.critical_pressure
    p[K.RESPONSE] = valve.response_time() if response_time is None else response_time
    p[K.KP], p[K.KI], p[K.KD] = config.kp, config.ki, config.kd
    p[K.TAU_RES], p[K.PUMP_GAIN], p[K.U_MAX] = config.reservoir_tau, config.pump_gain, config.u_max
    p[K.BAND], p[K.SWITCH_TOL] = config.engage_band, config.switch_tolerance
    p[K.LEAKING] = 1.0 if valve.leaking else 0.0
    return p


_NO_LOG = np.zeros((0, K.N_LOG))


def step(state: BenchState, dt: float, valve: ValveSimModel,
         config: BenchConfig = DEFAULT_CONFIG) -> BenchState:
    """One integration step; returns a new state and leaves ``state`` untouched."""
    if not 0 < dt <= 1e-3:
        raise ValueError("dt must lie in (0, 1 ms]")
    x = state.to_array()
    # the kernel derives time from the step counter, so rebase it on dt
    x[K.STEP] = state.t / dt
    K.advance(x, _params(valve, config), dt, 1, _NO_LOG)
    return BenchState.from_array(x, state.monitored_channel)


@dataclass(eq=False)
class BenchLog:
    """Sampled rig signals; one row per sample in :data:`LOG_COLUMNS` order."""

    data: np.ndarray = field(default_factory=lambda: np.zeros((0, K.N_LOG)))

    def __len__(self):
        return len(self.data)

    def column(self, name: str) -> np.ndarray:
        return self.data[:, LOG_COLUMNS.index(name)]

    @property
    def t(self):
        return self.data[:, 0]

    @property
    def reservoir(self):
        return self.data[:, 1]

    @property
    def p1(self):
        return self.data[:, 2]

    @property
    def p2(self):
        return self.data[:, 3]

    @property
    def flow(self):
        return self.data[:, 4]

    @property
    def valve_state(self):
        return self.data[:, 5]

    def slice_time(self, t0: float, t1: float) -> "BenchLog":
        m = (self.t >= t0) & (self.t <= t1)
        return BenchLog(self.data[m])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(LOG_COLUMNS)
            for row in self.data:
                w.writerow([f"{row[0]:.9g}", *(f"{v:.9g}" for v in row[1:5]),
                            str(int(row[5])), *(str(int(v)) for v in row[6:])])

    @classmethod
    def from_csv(cls, path) -> "BenchLog":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if tuple(rows[0]) != LOG_COLUMNS:
            raise ValueError(f"{path}: unexpected header {rows[0]}")
        return cls(np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, K.N_LOG))


class Rig:
    """Stateful driver around :func:`kernel.advance` used by the protocols.

    Pauses advance simulated time only. With ``record`` the full log is kept;
    :meth:`pause` always returns the samples of that pause.
    """

    def __init__(self, valve: ValveSimModel, config: BenchConfig = DEFAULT_CONFIG,
                 valve_state: str = "I", monitored_channel: str = "bottom", record: bool = True):
        self.valve = valve
        self.config = config
        self.monitored_channel = monitored_channel
        self.record = record
        self._x = BenchState.at_rest(valve_state=valve_state, monitored_channel=monitored_channel,
                                     config=config).to_array()
        self._p = _params(valve, config)
        self._chunks = []
        if record:
            first = np.zeros((1, K.N_LOG))
            K.snapshot(self._x, first, 0)
            self._chunks.append(first)

    @property
    def state(self) -> BenchState:
        return BenchState.from_array(self._x, self.monitored_channel)

    @property
    def t(self) -> float:
        return float(self._x[K.T])

    @property
    def flow(self) -> float:
        return float(self._x[K.Q])

    def set(self, **solenoids) -> None:
        for name, on in solenoids.items():
            self._x[K.S0 + SOLENOIDS.index(name)] = 1.0 if on else 0.0
            # a fresh engagement gets a fresh engagement stamp
            if on and name in ("S2", "S5"):
                self._x[K.T_ENGAGED] = np.nan

    def all_off(self) -> None:
        """Solenoids S1 to S5 off; S0 (reservoir supply) is left alone."""
        self.set(S1=False, S2=False, S3=False, S4=False, S5=False)

    def set_target(self, kpa: float) -> None:
        self._x[K.SETPOINT] = kpa
        self.set(S0=True)

    def set_response_time(self, seconds: float) -> None:
        self._p[K.RESPONSE] = seconds

    def set_leaking(self, leaking: bool) -> None:
        self._p[K.LEAKING] = 1.0 if leaking else 0.0

    def pause(self, seconds: float) -> BenchLog:
        n = int(round(seconds * self.config.sample_rate))
        out = np.empty((n, K.N_LOG))
        K.advance(self._x, self._p, self.config.dt, n, out)
        if self.record:
            self._chunks.append(out)
        return BenchLog(out)

    @property
    def log(self) -> BenchLog:
        if not self._chunks:
            return BenchLog()
        return BenchLog(np.concatenate(self._chunks))

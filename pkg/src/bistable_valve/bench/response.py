"""Response-time extraction from rig time series, plus a synthetic log source."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import EventNotFoundError
from .rig import BenchLog
from . import kernel as K


def first_stable_index(mask: np.ndarray, hold: int) -> Optional[int]:
    """First index where ``mask`` holds for ``hold`` consecutive samples."""
    mask = np.asarray(mask, dtype=bool)
    if len(mask) < hold:
        return None
    runs = np.convolve(mask.astype(np.int64), np.ones(hold, dtype=np.int64), mode="valid")
    hits = np.flatnonzero(runs == hold)
    return int(hits[0]) if len(hits) else None


def extract_response_time(log: BenchLog, chamber: Optional[int] = None, target: Optional[float] = None,
                          band: float = 0.02, flow_threshold: float = 5.0, hold: int = 50) -> float:
    """Seconds from "driving pressure engaged" to "controlled airflow blocked".

    Engaged: the driven chamber's pressure is within ``band`` of ``target``
    for ``hold`` consecutive samples. Blocked: the flow stays at or below
    ``flow_threshold`` for ``hold`` consecutive samples. The driven chamber
    defaults to the one reaching the higher pressure and the target to that
    chamber's peak.
    """
    if chamber is None:
        chamber = 1 if np.max(log.p1, initial=0.0) > np.max(log.p2, initial=0.0) else 2
    pressure = log.p1 if chamber == 1 else log.p2
    if target is None:
        target = float(np.max(pressure, initial=0.0))
    if not target > 0:
        raise EventNotFoundError("driving pressure never engaged")
    i_engaged = first_stable_index(np.abs(pressure - target) <= band * target, hold)
    if i_engaged is None:
        raise EventNotFoundError("driving pressure never stabilised at the target")
    i_blocked = first_stable_index(log.flow <= flow_threshold, hold)
    if i_blocked is None:
        raise EventNotFoundError("controlled flow never dropped below the threshold")
    return float(log.t[i_blocked] - log.t[i_engaged])


def synthetic_response_log(response_time: float, sample_rate: float = 1000.0, target: float = 30.0,
                           rise_tau: float = 0.2, lead_in: float = 1.0, tail: float = 2.0,
                           pump_flow: float = 2000.0, flow_threshold: float = 5.0,
                           decay_tau: float = 0.02, chamber: int = 2) -> BenchLog:
    """Chamber pressure step and flow cut-off with a known response time.

    The pressure rises as a first-order lag from ``lead_in`` seconds. The flow
    decays exponentially and is timed to cross ``flow_threshold`` exactly
    ``response_time`` after the pressure first enters the 2 % band.
    """
    duration = lead_in + 10.0 * rise_tau + response_time + tail
    n = int(round(duration * sample_rate)) + 1
    t = np.arange(n) / sample_rate
    p = np.where(t >= lead_in, target * (1.0 - np.exp(-(t - lead_in) / rise_tau)), 0.0)
    t_engaged = lead_in - rise_tau * math.log(0.02)
    t_cross = t_engaged + response_time
    t_onset = t_cross - decay_tau * math.log(pump_flow / flow_threshold)
    q = np.where(t < t_onset, pump_flow, pump_flow * np.exp(-(t - t_onset) / decay_tau))
    data = np.zeros((n, K.N_LOG))
    data[:, 0] = t
    data[:, 1] = target
    data[:, 2 if chamber == 1 else 3] = p
    data[:, 4] = q
    data[:, 5] = np.where(t >= t_engaged, K.STATE_II, K.STATE_I)
    return BenchLog(data)

"""Two-shell energy landscape, pressure-displacement curve and switching pressure."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import minimize_scalar

from .errors import NoBucklingError
from .materials import MaterialModel
from .shell import (BucklingSolution, ShellGeometry, critical_buckling_force,
                    strain_energy, strain_energy_slope)

DEFAULT_GRID = 2001
MIN_GRID = 101
KPA_PER_MPA = 1000.0


@dataclass(frozen=True, eq=False)
class EnergyCurve:
    h: np.ndarray          # mm
    energy: np.ndarray     # mJ, both shells
    geometry: ShellGeometry
    material: MaterialModel
    buckling: BucklingSolution

    @property
    def grid_resolution(self) -> int:
        return len(self.h)

    @property
    def spacing(self) -> float:
        return float(self.h[1] - self.h[0])


@dataclass(frozen=True, eq=False)
class PressureCurve:
    h: np.ndarray          # mm
    pressure: np.ndarray   # kPa
    dvdh: float            # mm^2


@dataclass(frozen=True)
class ValveCharacteristic:
    stable_states: tuple = ()
    critical_pressure: Optional[float] = None   # kPa
    snap_height: Optional[float] = None         # mm
    monostable: bool = False
    buckling: Optional[BucklingSolution] = field(default=None, compare=False)

    @property
    def bistable(self) -> bool:
        return not self.monostable


def symmetric_grid(half_width: float, n: int) -> np.ndarray:
    """Uniform odd-sized grid on ``[-half_width, half_width]``, exactly mirror-symmetric."""
    if n < 3 or n % 2 == 0:
        raise ValueError(f"grid size must be odd and >= 3, got {n}")
    half = half_width * np.linspace(0.0, 1.0, (n + 1) // 2)
    return np.concatenate([-half[:0:-1], half])


def total_energy_curve(geom: ShellGeometry, mat: MaterialModel, grid_n: int = DEFAULT_GRID,
                       span: float = 1.0) -> EnergyCurve:
    """Doubled single-shell energy sampled on ``[-span*h0, span*h0]``.

    ``span`` > 1 extends the window past the rest heights into the stretched
    region, where both rest states become interior minima of the sampled curve.
    """
    if grid_n < MIN_GRID or grid_n % 2 == 0:
        raise ValueError(f"grid_n must be odd and >= {MIN_GRID}, got {grid_n}")
    if not span >= 1.0:
        raise ValueError("span must be >= 1")
    buck = critical_buckling_force(geom, mat)
    h = symmetric_grid(span * geom.rest_height, grid_n)
    u = 2.0 * strain_energy(geom, mat, buck, h)
    return EnergyCurve(h, u, geom, mat, buck)


def chamber_volume_derivative(geom: ShellGeometry) -> float:
    """dV/dh (mm^2) of the chamber volume under a linear cone displacement field.

    The inner disc moves by ``h`` and the slant's vertical displacement falls
    linearly to zero at the outer ring, giving ``pi (R^2 + R r + r^2) / 3``.
    """
    R, r = geom.outer_radius, geom.inner_radius
    return math.pi * (R * R + R * r + r * r) / 3.0


def chamber_volume(geom: ShellGeometry, h):
    return chamber_volume_derivative(geom) * np.asarray(h, dtype=float)


def pressure_curve(curve: EnergyCurve, geom: Optional[ShellGeometry] = None) -> PressureCurve:
    """Driving pressure p = (dU/dh) / (dV/dh) in kPa, by finite differences on the grid."""
    geom = geom or curve.geometry
    dvdh = chamber_volume_derivative(geom)
    dudh = np.gradient(curve.energy, curve.h, edge_order=1)
    return PressureCurve(curve.h, dudh / dvdh * KPA_PER_MPA, dvdh)


def energy_from_pressure_roundtrip(pc: PressureCurve, geom: Optional[ShellGeometry] = None) -> np.ndarray:
    """Energy recovered as the running integral of p dV from the left end of the grid."""
    dvdh = chamber_volume_derivative(geom) if geom is not None else pc.dvdh
    return cumulative_trapezoid(pc.pressure / KPA_PER_MPA * dvdh, pc.h, initial=0.0)


def local_minima(h: np.ndarray, u: np.ndarray, include_ends: bool = False) -> list:
    """Indices of strict local minima; a flat run counts once, at its smallest ``|h|``.

    With ``include_ends`` an end sample lower than (or level with) its only
    neighbour also counts.
    """
    n = len(u)
    found = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and u[j + 1] == u[i]:
            j += 1
        left_ok = u[i - 1] > u[i] if i > 0 else include_ends
        right_ok = u[j + 1] > u[i] if j < n - 1 else include_ends
        if left_ok and right_ok and not (i == 0 and j == n - 1):
            run = range(i, j + 1)
            found.append(min(run, key=lambda k: (abs(h[k]), k)))
        i = j + 1
    return found


def stable_state_indices(curve: EnergyCurve) -> list:
    """The two lowest-energy minima, in increasing ``h``.

    Interior minima are preferred; the rest states at the grid ends are used
    when fewer than two interior minima exist.
    """
    h, u = curve.h, curve.energy
    candidates = local_minima(h, u)
    if len(candidates) < 2:
        ends = [k for k in local_minima(h, u, include_ends=True) if k in (0, len(u) - 1)]
        candidates = sorted(set(candidates) | set(ends))
    ranked = sorted(candidates, key=lambda k: (u[k], abs(h[k]), k))
    return sorted(ranked[:2])


def characterize(geom: ShellGeometry, mat: MaterialModel, grid_n: int = DEFAULT_GRID,
                 refine: bool = True) -> ValveCharacteristic:
    """Stable states and critical switching pressure of one valve design.

    The critical pressure is the largest driving pressure between the two
    stable states, found on the grid and then (with ``refine``) polished by a
    bounded scalar search on the analytic pressure around the grid maximum.
    A slant that never buckles is reported as monostable.
    """
    try:
        curve = total_energy_curve(geom, mat, grid_n)
    except NoBucklingError:
        return ValveCharacteristic(monostable=True)
    states = stable_state_indices(curve)
    if len(states) < 2:
        return ValveCharacteristic(tuple(float(curve.h[k]) for k in states),
                                   monostable=True, buckling=curve.buckling)
    a, b = states
    pc = pressure_curve(curve, geom)
    if b - a < 2:
        return ValveCharacteristic((float(curve.h[a]), float(curve.h[b])),
                                   monostable=True, buckling=curve.buckling)
    window = pc.pressure[a + 1:b]
    i = a + 1 + int(np.argmax(window))
    p_max, h_max = float(pc.pressure[i]), float(curve.h[i])
    if refine:
        p_max, h_max = _refine_peak(curve, i, a, b, p_max, h_max)
    if not p_max > 0:
        return ValveCharacteristic((float(curve.h[a]), float(curve.h[b])),
                                   monostable=True, buckling=curve.buckling)
    return ValveCharacteristic((float(curve.h[a]), float(curve.h[b])), p_max, h_max,
                               False, curve.buckling)


def analytic_pressure(geom, mat, buck, h):
    """Driving pressure (kPa) from the exact energy slope of both shells."""
    slope = 2.0 * strain_energy_slope(geom, mat, buck, h)
    return slope / chamber_volume_derivative(geom) * KPA_PER_MPA


def _refine_peak(curve, i, a, b, p_grid, h_grid):
    geom, mat, buck = curve.geometry, curve.material, curve.buckling
    lo = curve.h[max(i - 1, a)]
    hi = curve.h[min(i + 1, b)]
    res = minimize_scalar(lambda x: -analytic_pressure(geom, mat, buck, x),
                          bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(abs(lo), abs(hi), 1.0)})
    best = (p_grid, h_grid)
    # the pressure peak usually sits on the buckling kink, which Brent can miss
    for x in (float(res.x), -buck.critical_height, buck.critical_height):
        if lo <= x <= hi:
            p = float(analytic_pressure(geom, mat, buck, x))
            if p > best[0]:
                best = (p, x)
    return best

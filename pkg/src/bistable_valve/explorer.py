"""Parameter sweeps over the valve design and inverse design by bisection."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .curves import DEFAULT_GRID, characterize
from .errors import ModelDomainError, NonMonotoneError, TargetUnreachableError
from .materials import (DEFAULT_TABLE, PRINTABLE_HARDNESS, HardnessTable, MaterialModel,
                        hardness_for_modulus, modulus_for_hardness)
from .output import csv_text, json_text
from .shell import ShellGeometry

SWEEP_PARAMETERS = ("shore_hardness", "thickness", "slope_angle")
INVERT_PARAMETERS = SWEEP_PARAMETERS + ("youngs_modulus",)
SWEEP_COLUMNS = ("param", "P_c_kPa", "bistable", "h_state_mm")


def design_point(parameter: str, value: float, geometry: ShellGeometry,
                 material: MaterialModel, table: HardnessTable = DEFAULT_TABLE):
    """Geometry and material with one parameter set to ``value``.

    Changing the slope angle keeps both radii, so rest height and slant
    length follow the angle.
    """
    if parameter == "thickness":
        return geometry.replace(thickness=value), material
    if parameter == "slope_angle":
        return geometry.replace(slope_angle=value), material
    if parameter == "shore_hardness":
        return geometry, modulus_for_hardness(value, table)
    if parameter == "youngs_modulus":
        return geometry, MaterialModel(value)
    raise ValueError(f"unknown parameter {parameter!r}; expected one of {INVERT_PARAMETERS}")


def _baseline_material(material, table):
    return material if material is not None else modulus_for_hardness(50.0, table)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    geometry: ShellGeometry = field(default_factory=ShellGeometry)
    material: Optional[MaterialModel] = None   # baseline; 50A from the table if omitted
    table: HardnessTable = DEFAULT_TABLE
    grid_n: int = DEFAULT_GRID

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}; expected one of {SWEEP_PARAMETERS}")
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValueError("sweep needs at least one value")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("sweep values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "material", _baseline_material(self.material, self.table))
        for v in values:  # surfaces invalid geometry or hardness before any work
            design_point(self.parameter, v, self.geometry, self.material, self.table)


@dataclass(frozen=True)
class SweepRow:
    value: float
    critical_pressure: Optional[float]   # kPa, None when monostable
    bistable: bool
    stable_states: tuple                 # mm
    youngs_modulus: float                # MPa

    @property
    def state_height(self) -> Optional[float]:
        """Upper stable state, the one the valve rests in after moulding."""
        return max(self.stable_states) if self.stable_states else None


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    rows: tuple
    provenance: dict

    @property
    def critical_pressures(self) -> list:
        return [r.critical_pressure for r in self.rows]

    def to_csv(self) -> str:
        return csv_text(SWEEP_COLUMNS, [(r.value, r.critical_pressure, r.bistable, r.state_height)
                                        for r in self.rows])

    def to_json(self) -> str:
        return json_text({"parameter": self.parameter,
                          "rows": [asdict(r) for r in self.rows],
                          "provenance": self.provenance})


def provenance(geometry: ShellGeometry, material: MaterialModel, table: HardnessTable,
               grid_n: int) -> dict:
    return {
        "geometry": {"R_mm": geometry.outer_radius, "r_mm": geometry.inner_radius,
                     "t_mm": geometry.thickness, "alpha_deg": geometry.slope_angle},
        "material": {"E_MPa": material.youngs_modulus, "shore_A": material.shore_hardness,
                     "source": material.source},
        "material_table": {"entries": [list(e) for e in table.entries], "fallback": table.fallback},
        "grid_n": grid_n,
    }


def _evaluate(args) -> SweepRow:
    parameter, value, geometry, material, table, grid_n = args
    geom, mat = design_point(parameter, value, geometry, material, table)
    try:
        ch = characterize(geom, mat, grid_n)
    except ModelDomainError:
        return SweepRow(value, None, False, (), mat.youngs_modulus)
    return SweepRow(value, ch.critical_pressure, ch.bistable, ch.stable_states, mat.youngs_modulus)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Characterise the valve at every sweep value, rows in input order."""
    tasks = [(spec.parameter, v, spec.geometry, spec.material, spec.table, spec.grid_n)
             for v in spec.values]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = tuple(pool.map(_evaluate, tasks))
    else:
        rows = tuple(map(_evaluate, tasks))
    return SweepResult(spec.parameter, rows,
                       provenance(spec.geometry, spec.material, spec.table, spec.grid_n))


@dataclass(frozen=True)
class InverseResult:
    parameter: str
    value: float                 # parameter value returned to the caller
    critical_pressure: float     # kPa achieved at ``value``
    iterations: int
    continuous_value: float      # before snapping to a printable hardness


def _pc(parameter, value, geometry, material, table, grid_n):
    geom, mat = design_point(parameter, value, geometry, material, table)
    ch = characterize(geom, mat, grid_n)
    return ch.critical_pressure


def invert_design(target: float, parameter: str, bounds, geometry: Optional[ShellGeometry] = None,
                  material: Optional[MaterialModel] = None, table: HardnessTable = DEFAULT_TABLE,
                  grid_n: int = DEFAULT_GRID, ptol: float = 0.05, xtol: float = 1e-6,
                  max_iter: int = 60, samples: int = 5) -> InverseResult:
    """Parameter value whose critical pressure matches ``target`` kPa.

    Monotonicity is checked on ``samples`` evenly spaced points including the
    bounds. Bisection stops once the pressure is within ``ptol`` and the
    bracket is narrower than ``xtol``, or after ``max_iter`` halvings.
    Hardness is inverted continuously through the modulus and then snapped to
    the nearest printable hardness inside the bounds.
    """
    if parameter not in INVERT_PARAMETERS:
        raise ValueError(f"unknown parameter {parameter!r}; expected one of {INVERT_PARAMETERS}")
    geometry = geometry if geometry is not None else ShellGeometry()
    material = _baseline_material(material, table)
    lo, hi = (float(b) for b in bounds)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"bounds must be finite with lower < upper, got {bounds}")
    if not math.isfinite(target):
        raise TargetUnreachableError(f"target {target} kPa is not finite")

    if parameter == "shore_hardness":
        e_lo = modulus_for_hardness(lo, table).youngs_modulus
        e_hi = modulus_for_hardness(hi, table).youngs_modulus
        res = invert_design(target, "youngs_modulus", (e_lo, e_hi), geometry, material, table,
                            grid_n, ptol, xtol, max_iter, samples)
        s_cont = hardness_for_modulus(res.value, table)
        candidates = [s for s in PRINTABLE_HARDNESS if lo <= s <= hi] or [round(s_cont)]
        s = min(candidates, key=lambda c: (abs(c - s_cont), c))
        return InverseResult(parameter, s, _pc(parameter, s, geometry, material, table, grid_n),
                             res.iterations, s_cont)

    def f(x):
        pc = _pc(parameter, x, geometry, material, table, grid_n)
        if pc is None:
            raise NonMonotoneError(f"valve is monostable at {parameter}={x:g}; "
                                   "critical pressure undefined inside the bounds")
        return pc

    xs = np.linspace(lo, hi, max(samples, 2))
    ps = np.array([f(x) for x in xs])
    diffs = np.diff(ps)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise NonMonotoneError(f"critical pressure is not monotone in {parameter} over [{lo:g}, {hi:g}]")
    p_min, p_max = float(ps.min()), float(ps.max())
    if not p_min - ptol <= target <= p_max + ptol:
        raise TargetUnreachableError(
            f"target {target:g} kPa outside achievable range [{p_min:.6g}, {p_max:.6g}] kPa "
            f"for {parameter} in [{lo:g}, {hi:g}]")

    increasing = diffs[0] > 0
    # narrow the bracket to the sampled interval that holds the target
    k = int(np.searchsorted(ps if increasing else -ps, target if increasing else -target))
    k = min(max(k, 1), len(xs) - 1)
    a, b = float(xs[k - 1]), float(xs[k])
    x, p, it = a, float(ps[k - 1]), 0
    for it in range(1, max_iter + 1):
        x = 0.5 * (a + b)
        p = f(x)
        if (p < target) == increasing:
            a = x
        else:
            b = x
        if abs(p - target) < ptol and b - a <= xtol:
            break
    return InverseResult(parameter, x, p, it, x)

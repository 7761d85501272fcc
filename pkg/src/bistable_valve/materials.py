"""Shore-A hardness to Young's modulus mapping for printed digital materials.

A small table of known moduli is consulted first; anything not in the table
falls back to a rescaled Gent relation (or log-linear interpolation between
table entries when requested).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

ANCHOR_HARDNESS = 50.0
ANCHOR_MODULUS = 1.65  # MPa, 50A digital material
PRINTABLE_HARDNESS = (30.0, 40.0, 50.0, 60.0, 70.0)
HARDNESS_RANGE = (20.0, 95.0)
TABLE_ENV_VAR = "BVL_MATERIAL_TABLE"

Source = Literal["explicit", "table", "fallback-formula"]


@dataclass(frozen=True)
class MaterialModel:
    """Linear elastic material; ``youngs_modulus`` in MPa."""

    youngs_modulus: float
    shore_hardness: Optional[float] = None
    source: Source = "explicit"

    def __post_init__(self):
        if not (math.isfinite(self.youngs_modulus) and self.youngs_modulus > 0):
            raise ValueError(f"Young's modulus must be positive, got {self.youngs_modulus}")

    def scaled(self, k: float) -> "MaterialModel":
        return MaterialModel(self.youngs_modulus * k, None, "explicit")


def gent_modulus(shore_a: float) -> float:
    """Uncalibrated Gent estimate of Young's modulus (MPa) from Shore-A hardness."""
    s = float(shore_a)
    return 0.0981 * (56.0 + 7.62336 * s) / (0.137505 * (254.0 - 2.54 * s))


GENT_CALIBRATION = ANCHOR_MODULUS / gent_modulus(ANCHOR_HARDNESS)


def calibrated_gent_modulus(shore_a: float) -> float:
    return GENT_CALIBRATION * gent_modulus(shore_a)


@dataclass(frozen=True)
class HardnessTable:
    entries: tuple = ((ANCHOR_HARDNESS, ANCHOR_MODULUS),)
    fallback: Literal["gent-formula", "linear-log-interpolation"] = "gent-formula"
    _lookup: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        entries = tuple((float(s), float(e)) for s, e in self.entries)
        for s, e in entries:
            if not 0.0 < s < 100.0:
                raise ValueError(f"Shore-A value {s} outside (0, 100)")
            if not e > 0.0:
                raise ValueError(f"modulus for {s}A must be positive")
        for (s0, e0), (s1, e1) in zip(entries, entries[1:]):
            if not s1 > s0:
                raise ValueError("hardness entries must be strictly increasing")
            if not e1 > e0:
                raise ValueError("moduli must increase with hardness")
        if self.fallback not in ("gent-formula", "linear-log-interpolation"):
            raise ValueError(f"unknown fallback {self.fallback!r}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "_lookup", dict(entries))

    def with_entries(self, extra: dict) -> "HardnessTable":
        """Copy with ``extra`` merged over the existing entries."""
        merged = dict(self.entries)
        merged.update({float(k): float(v) for k, v in extra.items()})
        return HardnessTable(tuple(sorted(merged.items())), self.fallback)

    def modulus(self, shore_a: float) -> MaterialModel:
        return modulus_for_hardness(shore_a, self)


DEFAULT_TABLE = HardnessTable()


def modulus_for_hardness(shore_a: float, table: HardnessTable = DEFAULT_TABLE) -> MaterialModel:
    """Young's modulus for a Shore-A hardness.

    Exact table hits return the tabulated value. Otherwise the calibrated Gent
    relation is used, or log-linear interpolation between neighbouring table
    entries if the table asks for it.
    """
    s = float(shore_a)
    lo, hi = HARDNESS_RANGE
    if not (math.isfinite(s) and lo <= s <= hi):
        raise ValueError(f"Shore-A hardness {shore_a} outside [{lo:g}, {hi:g}]")
    if s in table._lookup:
        return MaterialModel(table._lookup[s], s, "table")
    if table.fallback == "linear-log-interpolation":
        return MaterialModel(_log_interp(table.entries, s), s, "fallback-formula")
    return MaterialModel(calibrated_gent_modulus(s), s, "fallback-formula")


def _log_interp(entries, s):
    if len(entries) < 2:
        raise ValueError("log-linear interpolation needs at least two table entries")
    xs = [e[0] for e in entries]
    # extrapolate with the end segments
    i = 1
    while i < len(xs) - 1 and xs[i] < s:
        i += 1
    (s0, e0), (s1, e1) = entries[i - 1], entries[i]
    w = (s - s0) / (s1 - s0)
    return math.exp((1.0 - w) * math.log(e0) + w * math.log(e1))


def hardness_for_modulus(youngs_modulus: float, table: HardnessTable = DEFAULT_TABLE,
                         tol: float = 1e-10) -> float:
    """Continuous inverse of :func:`modulus_for_hardness` over the valid hardness range."""
    lo, hi = HARDNESS_RANGE
    e_lo = modulus_for_hardness(lo, table).youngs_modulus
    e_hi = modulus_for_hardness(hi, table).youngs_modulus
    if not e_lo <= youngs_modulus <= e_hi:
        raise ValueError(f"modulus {youngs_modulus} MPa outside mapped range [{e_lo:.4g}, {e_hi:.4g}]")
    for s, e in table.entries:
        if e == youngs_modulus:
            return s
    # assumes the mapping is monotone; holds for the default table since the
    # fallback is anchored on its only entry
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if modulus_for_hardness(mid, table).youngs_modulus < youngs_modulus:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def load_table(path, base: HardnessTable = DEFAULT_TABLE) -> HardnessTable:
    """Read ``shoreA=modulus_MPa`` lines and merge them over ``base``.

    Blank lines and ``#`` comments are ignored.
    """
    extra = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'shoreA=modulus', got {raw!r}")
        try:
            extra[float(key)] = float(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric entry {raw!r}") from None
    return base.with_entries(extra)


def resolve_table(path=None) -> HardnessTable:
    """Table from an explicit path, else from ``$BVL_MATERIAL_TABLE``, else the default."""
    path = path or os.environ.get(TABLE_ENV_VAR)
    if path:
        return load_table(path)
    return DEFAULT_TABLE

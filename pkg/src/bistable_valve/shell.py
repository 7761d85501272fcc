"""Slice-beam model of one conical shell.

Each thin sector of the shell is treated as a pin-ended slant beam whose
cross-section grows linearly from the inner to the outer ring. Moving the
inner ring by ``h`` shortens the slant (Pythagoras); the beam first stores
axial energy, then buckles into a half-sine and stores bending energy.

Units are mm, N, MPa and mJ throughout (MPa * mm^2 = N, N * mm = mJ).
Both closed forms and adaptive quadrature are available for every integral;
the closed forms are the default, quadrature is there to check them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NoBucklingError
from .materials import MaterialModel
from .quadrature import adaptive_simpson

Method = Literal["closed", "quadrature"]
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class ShellGeometry:
    """Conical shell dimensions. ``slope_angle`` is in degrees."""

    outer_radius: float = 8.0
    inner_radius: float = 4.0
    thickness: float = 1.0
    slope_angle: float = 45.0

    def __post_init__(self):
        R, r, t, a = self.outer_radius, self.inner_radius, self.thickness, self.slope_angle
        if not all(math.isfinite(v) for v in (R, r, t, a)):
            raise ValueError("geometry parameters must be finite")
        if not R > r > 0:
            raise ValueError(f"need R > r > 0, got R={R}, r={r}")
        if not t > 0:
            raise ValueError(f"thickness must be positive, got {t}")
        if not 0 < a < 90:
            raise ValueError(f"slope angle must lie in (0, 90) degrees, got {a}")

    @property
    def alpha(self) -> float:
        """Slope angle in radians."""
        return math.radians(self.slope_angle)

    @property
    def radial_span(self) -> float:
        return self.outer_radius - self.inner_radius

    @property
    def slant_length(self) -> float:
        return self.radial_span / math.cos(self.alpha)

    @property
    def rest_height(self) -> float:
        return self.radial_span * math.tan(self.alpha)

    @property
    def max_compression(self) -> float:
        """Slant shortening when the shell is flat (h = 0)."""
        return self.slant_length - self.radial_span

    def replace(self, **changes) -> "ShellGeometry":
        fields = dict(outer_radius=self.outer_radius, inner_radius=self.inner_radius,
                      thickness=self.thickness, slope_angle=self.slope_angle)
        fields.update(changes)
        return ShellGeometry(**fields)


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _check_span(geom, x):
    x = np.asarray(x, dtype=float)
    L = geom.slant_length
    eps = 1e-12 * L
    if np.any(~np.isfinite(x)) or np.any(x < -eps) or np.any(x > L + eps):
        raise ValueError(f"slant coordinate outside [0, L={L:.6g}]")
    return x


def signed_compression(geom: ShellGeometry, h):
    """Slant shortening without clamping; negative beyond the rest height (stretching)."""
    h = np.asarray(h, dtype=float)
    if np.any(~np.isfinite(h)):
        raise ValueError("h must be finite")
    return geom.slant_length - np.sqrt(geom.radial_span ** 2 + h * h)


def slant_compression(geom: ShellGeometry, h):
    """Compression of the slant at height ``h``; clamped to be non-negative."""
    return _scalar_or_array(np.maximum(signed_compression(geom, h), 0.0))


def cross_section_area(geom: ShellGeometry, x):
    x = _check_span(geom, x)
    r, t, c = geom.inner_radius, geom.thickness, math.cos(geom.alpha)
    return _scalar_or_array(2.0 * math.pi * (r + x * c) * t)


def second_moment(geom: ShellGeometry, x):
    x = _check_span(geom, x)
    r, t, c = geom.inner_radius, geom.thickness, math.cos(geom.alpha)
    return _scalar_or_array(math.pi / 6.0 * (r + x * c) * t ** 3)


def axial_compliance(geom: ShellGeometry, method: Method = "closed") -> float:
    """The integral of dx / A(x) along the slant (1/mm)."""
    if method == "quadrature":
        return adaptive_simpson(lambda x: 1.0 / cross_section_area(geom, x),
                                0.0, geom.slant_length, QUAD_RTOL)
    R, r = geom.outer_radius, geom.inner_radius
    return math.log(R / r) / (2.0 * math.pi * geom.thickness * math.cos(geom.alpha))


def axial_stiffness(geom: ShellGeometry, mat: MaterialModel, method: Method = "closed") -> float:
    """Force per unit slant shortening (N/mm)."""
    return mat.youngs_modulus / axial_compliance(geom, method)


def axial_force_from_compression(geom, mat, compression, method: Method = "closed"):
    """Axial force (N) that produces ``compression`` (mm) in the slant."""
    d = np.asarray(compression, dtype=float)
    if np.any(d < 0):
        raise ValueError("compression must be non-negative")
    return _scalar_or_array(d * axial_stiffness(geom, mat, method))


def axial_energy(geom, mat, force, method: Method = "closed"):
    """Axial strain energy (mJ) stored under a uniform axial force (N)."""
    f = np.asarray(force, dtype=float)
    if np.any(f < 0):
        raise ValueError("force must be non-negative")
    return _scalar_or_array(f * f * axial_compliance(geom, method) / (2.0 * mat.youngs_modulus))


def _mode_slope_integral(geom, C, method):
    # integral of 0.5 * (dw/dx)^2 for w = C sin(pi x / L)
    L = geom.slant_length
    if method == "quadrature":
        k = math.pi / L
        return adaptive_simpson(lambda x: 0.5 * (C * k * math.cos(k * x)) ** 2, 0.0, L, QUAD_RTOL)
    return C * C * math.pi ** 2 / (4.0 * L)


def bending_energy(geom, mat, C, method: Method = "closed"):
    """Bending energy (mJ) of the half-sine buckling mode with amplitude ``C`` (mm)."""
    C = np.asarray(C, dtype=float)
    if np.any(C < 0):
        raise ValueError("mode amplitude must be non-negative")
    L = geom.slant_length
    E = mat.youngs_modulus
    if method == "quadrature":
        k = math.pi / L

        def per_unit_amplitude(x):
            return 0.5 * E * second_moment(geom, x) * (k * k * math.sin(k * x)) ** 2

        unit = adaptive_simpson(per_unit_amplitude, 0.0, L, QUAD_RTOL)
    else:
        R, r, t = geom.outer_radius, geom.inner_radius, geom.thickness
        unit = E * math.pi ** 5 * t ** 3 * (R + r) / (48.0 * L ** 3)
    return _scalar_or_array(unit * C * C)


def mode_amplitude(geom: ShellGeometry, excess_compression):
    """Half-sine amplitude whose arc-length shortening equals ``excess_compression``."""
    e = np.asarray(excess_compression, dtype=float)
    if np.any(e < 0):
        raise ValueError("excess compression must be non-negative")
    return _scalar_or_array(2.0 / math.pi * np.sqrt(geom.slant_length * e))


@dataclass(frozen=True)
class BucklingSolution:
    critical_force: float        # N
    critical_compression: float  # mm
    critical_height: float       # mm, magnitude
    slant_length: float          # mm

    def amplitude(self, excess_compression):
        """Mode amplitude (mm) for a compression beyond the critical one."""
        e = np.asarray(excess_compression, dtype=float)
        return _scalar_or_array(2.0 / math.pi * np.sqrt(self.slant_length * e))


def critical_force(geom: ShellGeometry, mat: MaterialModel, method: Method = "closed") -> float:
    """Rayleigh-Ritz buckling load of the pin-ended slant (N).

    Ratio of bending energy to the arc-length shortening for the half-sine
    mode; the amplitude cancels, so unit amplitude is used.
    """
    if method == "quadrature":
        return bending_energy(geom, mat, 1.0, "quadrature") / _mode_slope_integral(geom, 1.0, "quadrature")
    R, r, t = geom.outer_radius, geom.inner_radius, geom.thickness
    return mat.youngs_modulus * math.pi ** 3 * t ** 3 * (R + r) / (12.0 * geom.slant_length ** 2)


def critical_buckling_force(geom: ShellGeometry, mat: MaterialModel,
                            method: Method = "closed") -> BucklingSolution:
    """Buckling load, the compression that triggers it, and the matching height.

    Raises :class:`NoBucklingError` when the slant never reaches that
    compression, i.e. the critical compression is at least the flat-shell
    compression ``L - (R - r)``.
    """
    fc = critical_force(geom, mat, method)
    dlc = fc * axial_compliance(geom, method) / mat.youngs_modulus
    if dlc >= geom.max_compression:
        raise NoBucklingError(
            f"critical compression {dlc:.6g} mm exceeds available travel "
            f"{geom.max_compression:.6g} mm; the slant never buckles")
    hc = math.sqrt(max((geom.slant_length - dlc) ** 2 - geom.radial_span ** 2, 0.0))
    return BucklingSolution(fc, dlc, hc, geom.slant_length)


def strain_energy(geom: ShellGeometry, mat: MaterialModel, buck: BucklingSolution, h):
    """Strain energy (mJ) of one shell at height ``h``.

    Below the critical compression only axial energy is stored. Past it the
    axial force stays at the buckling load and the extra shortening goes into
    the bending mode. Heights beyond the rest height stretch the slant and
    store axial energy of the same form.
    """
    dl = signed_compression(geom, h)
    dlc = buck.critical_compression
    k = axial_stiffness(geom, mat)
    axial = 0.5 * k * dl * dl
    excess = np.maximum(dl - dlc, 0.0)
    buckled = (axial_energy(geom, mat, buck.critical_force)
               + bending_energy(geom, mat, mode_amplitude(geom, excess)))
    return _scalar_or_array(np.where(dl <= dlc, axial, buckled))


def strain_energy_slope(geom: ShellGeometry, mat: MaterialModel, buck: BucklingSolution, h):
    """Analytic dU/dh (N) of :func:`strain_energy`."""
    h = np.asarray(h, dtype=float)
    dl = signed_compression(geom, h)
    force = np.where(dl <= buck.critical_compression,
                     axial_stiffness(geom, mat) * dl, buck.critical_force)
    return _scalar_or_array(-force * h / np.sqrt(geom.radial_span ** 2 + h * h))

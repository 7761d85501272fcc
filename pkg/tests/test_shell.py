import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from bistable_valve.errors import NoBucklingError
from bistable_valve.materials import MaterialModel
from bistable_valve.shell import (ShellGeometry, axial_compliance, axial_energy,
                                  axial_force_from_compression, bending_energy, critical_buckling_force,
                                  critical_force, cross_section_area, mode_amplitude, second_moment,
                                  signed_compression, slant_compression, strain_energy)

designs = st.builds(
    ShellGeometry,
    outer_radius=st.floats(6.0, 12.0),
    inner_radius=st.floats(2.0, 5.0),
    thickness=st.floats(0.5, 1.5),
    slope_angle=st.floats(30.0, 60.0),
)


# geometry and slant compression

def test_geometry_validation():
    with pytest.raises(ValueError):
        ShellGeometry(outer_radius=4, inner_radius=8)
    with pytest.raises(ValueError):
        ShellGeometry(thickness=0)
    with pytest.raises(ValueError):
        ShellGeometry(slope_angle=90)
    with pytest.raises(ValueError):
        ShellGeometry(thickness=float("nan"))


def test_baseline_derived_dimensions(geom):
    assert geom.slant_length == pytest.approx(math.sqrt(32), rel=1e-15)
    assert geom.rest_height == pytest.approx(4.0, rel=1e-14)
    assert geom.max_compression == pytest.approx(math.sqrt(32) - 4, rel=1e-14)


def test_compression_zero_at_rest_states(geom):
    assert slant_compression(geom, 4.0) == pytest.approx(0.0, abs=1e-14)
    assert slant_compression(geom, -4.0) == pytest.approx(0.0, abs=1e-14)


def test_compression_at_flat(geom):
    assert slant_compression(geom, 0.0) == pytest.approx(math.sqrt(32) - 4, rel=1e-14)


def test_compression_clamped_beyond_rest(geom):
    assert slant_compression(geom, 4.2) == 0.0
    assert signed_compression(geom, 4.2) < 0


def test_compression_rejects_non_finite(geom):
    with pytest.raises(ValueError):
        slant_compression(geom, float("nan"))
    with pytest.raises(ValueError):
        slant_compression(geom, float("inf"))


def test_compression_strictly_decreasing_in_abs_h(geom):
    h = np.linspace(0, geom.rest_height, 1001)
    dl = slant_compression(geom, h)
    assert np.all(np.diff(dl) < 0)
    assert np.all(dl >= 0) and dl.max() <= geom.max_compression + 1e-15


# section properties

def test_area_at_ends(geom):
    assert cross_section_area(geom, 0.0) == pytest.approx(8 * math.pi, rel=1e-14)
    assert cross_section_area(geom, geom.slant_length) == pytest.approx(16 * math.pi, rel=1e-14)


def test_second_moment_at_ends(geom):
    assert second_moment(geom, 0.0) == pytest.approx(2 * math.pi / 3, rel=1e-14)
    assert second_moment(geom, geom.slant_length) == pytest.approx(4 * math.pi / 3, rel=1e-14)


def test_section_thickness_scaling(geom):
    x = np.linspace(0, geom.slant_length, 7)
    thick = geom.replace(thickness=2.0)
    np.testing.assert_allclose(cross_section_area(thick, x), 2 * cross_section_area(geom, x), rtol=1e-14)
    np.testing.assert_allclose(second_moment(thick, x), 8 * second_moment(geom, x), rtol=1e-14)


@pytest.mark.parametrize("x", [-0.1, 6.0])
def test_section_rejects_outside_slant(geom, x):
    with pytest.raises(ValueError):
        cross_section_area(geom, x)
    with pytest.raises(ValueError):
        second_moment(geom, x)


# axial member

def test_axial_force_example(geom, mat):
    expected = 0.1 * 1.65 * 2 * math.pi * math.cos(math.pi / 4) / math.log(2)
    assert axial_force_from_compression(geom, mat, 0.1) == pytest.approx(expected, rel=1e-14)
    # the commonly quoted rounding of this value is 1.0573; the formula gives 1.05760
    assert expected == pytest.approx(1.0573, rel=1e-3)


def test_axial_force_zero_and_linear(geom, mat):
    assert axial_force_from_compression(geom, mat, 0.0) == 0.0
    f1 = axial_force_from_compression(geom, mat, 0.13)
    assert axial_force_from_compression(geom, mat, 0.26) == pytest.approx(2 * f1, rel=1e-15)


def test_axial_force_matches_quadrature_oracle(geom, mat):
    # force that makes the integrated strain equal the compression
    expected = 0.1 * 1.65 / oracles.compliance(8, 4, 1, 45)
    assert axial_force_from_compression(geom, mat, 0.1) == pytest.approx(expected, rel=1e-12)


def test_axial_energy_example(geom, mat):
    f = axial_force_from_compression(geom, mat, 0.1)
    u = axial_energy(geom, mat, f)
    assert u == pytest.approx(0.5 * f * 0.1, rel=1e-14)
    assert u == pytest.approx(0.05286, rel=1e-3)
    assert axial_energy(geom, mat, 0.0) == 0.0
    assert axial_energy(geom, mat, 2 * f) == pytest.approx(4 * u, rel=1e-15)


def test_negative_inputs_rejected(geom, mat):
    with pytest.raises(ValueError):
        axial_force_from_compression(geom, mat, -0.1)
    with pytest.raises(ValueError):
        axial_energy(geom, mat, -1.0)
    with pytest.raises(ValueError):
        bending_energy(geom, mat, -1.0)
    with pytest.raises(ValueError):
        mode_amplitude(geom, -0.1)


@pytest.mark.parametrize("fn", ["compliance", "bending", "critical_force"])
def test_closed_form_matches_builtin_quadrature(geom, mat, fn):
    if fn == "compliance":
        a, b = axial_compliance(geom, "closed"), axial_compliance(geom, "quadrature")
    elif fn == "bending":
        a, b = bending_energy(geom, mat, 1.0, "closed"), bending_energy(geom, mat, 1.0, "quadrature")
    else:
        a, b = critical_force(geom, mat, "closed"), critical_force(geom, mat, "quadrature")
    assert a == pytest.approx(b, rel=1e-9)


# buckling

def test_critical_force_matches_quadrature_oracle(geom, mat):
    expected = oracles.critical_force(8, 4, 1, 45, 1.65)
    assert critical_buckling_force(geom, mat).critical_force == pytest.approx(expected, rel=1e-9)


def test_bending_energy_matches_quadrature_oracle(geom, mat):
    expected = oracles.bending(8, 4, 1, 45, 1.65, 1.0)
    assert bending_energy(geom, mat, 1.0) == pytest.approx(expected, rel=1e-9)


def test_bending_energy_zero_and_quadratic(geom, mat):
    assert bending_energy(geom, mat, 0.0) == 0.0
    u = bending_energy(geom, mat, 0.7)
    assert bending_energy(geom, mat, 1.4) == pytest.approx(4 * u, rel=1e-14)


def test_baseline_buckling_regression(geom, mat):
    # frozen from the quadrature oracle at the baseline design
    b = critical_buckling_force(geom, mat)
    assert b.critical_force == pytest.approx(1.59876114, rel=1e-8)
    assert b.critical_compression == pytest.approx(0.151168, rel=1e-5)
    assert b.critical_height == pytest.approx(3.78320, rel=1e-5)


def test_critical_force_linear_in_modulus_and_compression_independent(geom, mat):
    b1 = critical_buckling_force(geom, mat)
    b2 = critical_buckling_force(geom, mat.scaled(2.0))
    assert b2.critical_force == pytest.approx(2 * b1.critical_force, rel=1e-15)
    assert b2.critical_compression == pytest.approx(b1.critical_compression, rel=1e-15)


@pytest.mark.parametrize("k", [0.5, 0.8, 1.2])
def test_thickness_scalings(geom, mat, k):
    # closed forms: F_c ~ t^3 and compliance ~ 1/t, so the critical compression ~ t^2
    b1 = critical_buckling_force(geom, mat)
    bk = critical_buckling_force(geom.replace(thickness=k), mat)
    assert bk.critical_force == pytest.approx(k ** 3 * b1.critical_force, rel=1e-13)
    assert bk.critical_compression == pytest.approx(k ** 2 * b1.critical_compression, rel=1e-13)


def test_no_buckling_for_thick_shell(mat):
    with pytest.raises(NoBucklingError):
        critical_buckling_force(ShellGeometry(thickness=4.0), mat)


def test_mode_amplitude_example():
    geom = ShellGeometry()  # slant length sqrt(32)
    C = mode_amplitude(geom, 0.5)
    assert C == pytest.approx(2 / math.pi * math.sqrt(math.sqrt(32) * 0.5), rel=1e-15)
    assert C == pytest.approx(1.0708, rel=1e-3)
    assert oracles.slope_shortening(geom.slant_length, C) == pytest.approx(0.5, rel=1e-12)


def test_mode_amplitude_scaling(geom):
    assert mode_amplitude(geom, 0.0) == 0.0
    assert mode_amplitude(geom, 0.4) == pytest.approx(2 * mode_amplitude(geom, 0.1), rel=1e-15)


# single-shell energy

def test_energy_zero_at_rest(geom, mat):
    b = critical_buckling_force(geom, mat)
    assert strain_energy(geom, mat, b, 4.0) == pytest.approx(0.0, abs=1e-15)
    assert strain_energy(geom, mat, b, -4.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("h", [0.0, 1.7, 3.9, -2.5])
def test_energy_matches_quadrature_only_pipeline(geom, mat, h):
    b = critical_buckling_force(geom, mat)
    expected = oracles.single_shell_energy(8, 4, 1, 45, 1.65, h)
    assert strain_energy(geom, mat, b, h) == pytest.approx(expected, rel=1e-9)


def test_energy_continuous_at_buckling(geom, mat):
    b = critical_buckling_force(geom, mat)
    h = np.linspace(-4, 4, 2001)
    umax = strain_energy(geom, mat, b, h).max()
    eps = 1e-9
    below = strain_energy(geom, mat, b, b.critical_height + eps)
    above = strain_energy(geom, mat, b, b.critical_height - eps)
    assert abs(below - above) < 1e-9 * umax


@settings(max_examples=40, deadline=None)
@given(designs, st.floats(0.0, 1.0))
def test_energy_even_in_h(g, frac):
    m = MaterialModel(1.65)
    try:
        b = critical_buckling_force(g, m)
    except NoBucklingError:
        return
    h = frac * g.rest_height
    u_pos, u_neg = strain_energy(g, m, b, h), strain_energy(g, m, b, -h)
    assert u_pos == pytest.approx(u_neg, rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(designs, st.floats(0.0, 1.0), st.floats(0.1, 10.0))
def test_energy_linear_in_modulus(g, frac, E):
    m = MaterialModel(E)
    try:
        b1 = critical_buckling_force(g, m)
    except NoBucklingError:
        return
    b2 = critical_buckling_force(g, m.scaled(2.0))
    h = frac * g.rest_height
    assert strain_energy(g, m.scaled(2.0), b2, h) == pytest.approx(2 * strain_energy(g, m, b1, h),
                                                                   rel=1e-12, abs=1e-300)


@settings(max_examples=40, deadline=None)
@given(designs)
def test_compression_monotone_property(g):
    h = np.linspace(0, g.rest_height, 200)
    assert np.all(np.diff(slant_compression(g, h)) < 0)


@settings(max_examples=30, deadline=None)
@given(designs)
def test_closed_and_quadrature_agree_property(g):
    m = MaterialModel(1.65)
    assert critical_force(g, m) == pytest.approx(critical_force(g, m, "quadrature"), rel=1e-9)
    assert axial_compliance(g) == pytest.approx(axial_compliance(g, "quadrature"), rel=1e-9)

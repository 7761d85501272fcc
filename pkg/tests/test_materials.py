import math

import numpy as np
import pytest

from bistable_valve.materials import (ANCHOR_MODULUS, DEFAULT_TABLE, TABLE_ENV_VAR, HardnessTable,
                                      MaterialModel, calibrated_gent_modulus, gent_modulus,
                                      hardness_for_modulus, load_table, modulus_for_hardness,
                                      resolve_table)


def test_anchor_from_table():
    m = modulus_for_hardness(50)
    assert m.youngs_modulus == 1.65
    assert m.source == "table"
    assert (50.0, 1.65) in DEFAULT_TABLE.entries


def test_anchor_through_calibrated_formula():
    empty = HardnessTable(entries=())
    m = modulus_for_hardness(50, empty)
    assert m.youngs_modulus == pytest.approx(1.65, rel=1e-15)
    assert m.source == "fallback-formula"


def test_gent_formula_by_hand():
    s = 70.0
    raw = 0.0981 * (56 + 7.62336 * s) / (0.137505 * (254 - 2.54 * s))
    assert gent_modulus(s) == pytest.approx(raw, rel=1e-15)
    assert calibrated_gent_modulus(s) == pytest.approx(raw * 1.65 / gent_modulus(50), rel=1e-15)


def test_regression_values():
    # calibrated formula evaluated once and frozen
    assert modulus_for_hardness(30).youngs_modulus == pytest.approx(0.767532, rel=1e-5)
    assert modulus_for_hardness(70).youngs_modulus == pytest.approx(3.709090, rel=1e-5)


def test_monotone_over_printable_range():
    s = np.linspace(30, 70, 401)
    e = [modulus_for_hardness(v).youngs_modulus for v in s]
    assert np.all(np.diff(e) > 0)


@pytest.mark.parametrize("s", [19.9, 95.1, float("nan")])
def test_out_of_range_rejected(s):
    with pytest.raises(ValueError):
        modulus_for_hardness(s)


def test_table_validation():
    with pytest.raises(ValueError):
        HardnessTable(entries=((50, 1.65), (40, 1.0)))
    with pytest.raises(ValueError):
        HardnessTable(entries=((40, 2.0), (50, 1.65)))
    with pytest.raises(ValueError):
        HardnessTable(entries=((0, 1.0),))
    with pytest.raises(ValueError):
        HardnessTable(fallback="spline")


def test_log_interpolation_fallback():
    t = HardnessTable(entries=((40, 1.0), (60, 4.0)), fallback="linear-log-interpolation")
    assert modulus_for_hardness(50, t).youngs_modulus == pytest.approx(2.0, rel=1e-14)
    assert modulus_for_hardness(60, t).youngs_modulus == 4.0


def test_inverse_mapping():
    for s in (30.0, 42.5, 50.0, 70.0):
        e = modulus_for_hardness(s).youngs_modulus
        assert hardness_for_modulus(e) == pytest.approx(s, abs=1e-8)


def test_table_file_overrides(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# digital materials\n30=0.5\n\n70 = 4.0  # stiff\n")
    t = load_table(path)
    assert modulus_for_hardness(30, t).youngs_modulus == 0.5
    assert modulus_for_hardness(70, t).youngs_modulus == 4.0
    assert modulus_for_hardness(50, t).youngs_modulus == ANCHOR_MODULUS


def test_table_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("30: 0.5\n")
    with pytest.raises(ValueError):
        load_table(bad)
    with pytest.raises(OSError):
        load_table(tmp_path / "missing.txt")


def test_env_var_fallback(tmp_path, monkeypatch):
    path = tmp_path / "env.txt"
    path.write_text("60=3.0\n")
    monkeypatch.setenv(TABLE_ENV_VAR, str(path))
    assert modulus_for_hardness(60, resolve_table()).youngs_modulus == 3.0
    monkeypatch.delenv(TABLE_ENV_VAR)
    assert resolve_table() == DEFAULT_TABLE


def test_material_model_validation():
    with pytest.raises(ValueError):
        MaterialModel(0.0)
    with pytest.raises(ValueError):
        MaterialModel(math.inf)
    assert MaterialModel(2.0).scaled(1.5).youngs_modulus == 3.0

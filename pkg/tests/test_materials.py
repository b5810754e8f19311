import json
import math

import numpy as np
import pytest

from pairgen.materials import (CONSTANTS, DispersionRangeError, MaterialError, ModeSpec,
                               default_db_path, load_material_db, omega_from_wavelength,
                               refractive_index, snell_angle, wave_vector)
from oracles.bbo_index import bbo_ne, bbo_no


def test_constants_consistent():
    assert abs(1 / math.sqrt(CONSTANTS.eps0 * CONSTANTS.mu0) / CONSTANTS.c - 1) < 1e-9


def test_shipped_db_contents(db):
    assert set(db) == {"BBO", "GaN", "AlN", "vacuum"}
    assert db["BBO"].validity_um == (0.2, 2.6)
    assert db["BBO"].uniaxial
    assert all(m.provenance for m in db.values())


def test_vacuum_index(db):
    assert refractive_index(db["vacuum"], 1e15) == 1.0
    assert np.all(refractive_index(db["vacuum"], np.array([1e14, 5e15])) == 1.0)


def test_bbo_ordinary_against_oracle(db, w800):
    n = refractive_index(db["BBO"], w800, "o")
    assert n == pytest.approx(bbo_no(0.8), rel=1e-12)
    assert abs(n - 1.661) <= 1e-3


def test_bbo_extraordinary_principal(db, w800):
    n = refractive_index(db["BBO"], w800, "e", axis_angle=math.pi / 2)
    assert n == pytest.approx(bbo_ne(0.8), rel=1e-12)
    assert refractive_index(db["BBO"], w800, "e", axis_angle=0.0) == pytest.approx(bbo_no(0.8))


def test_out_of_range(db):
    with pytest.raises(DispersionRangeError):
        refractive_index(db["BBO"], omega_from_wavelength(50e-9), "o")


def test_missing_axis_angle(db, w800):
    with pytest.raises(ValueError, match="axis_angle"):
        refractive_index(db["BBO"], w800, "e")


def test_indices_smooth(db):
    # central second differences at fixed points converge as the step halves
    for mat in db.values():
        lo, hi = mat.validity_um
        lam = np.linspace(lo * 1.1, hi * 0.9, 50)
        for pol in mat.polarizations:
            kw = {"axis_angle": 0.7} if pol == "e" else {}

            def n_at(x):
                return refractive_index(mat, omega_from_wavelength(x * 1e-6), pol, **kw)

            curv = []
            for h in (1e-3 * lo, 0.5e-3 * lo):
                curv.append((n_at(lam + h) - 2 * n_at(lam) + n_at(lam - h)) / h ** 2)
            assert np.all(np.isfinite(curv[0]))
            assert np.all(np.abs(curv[0] - curv[1]) <= 0.01 * np.abs(curv[1]) + 1e-4)


def test_wave_vector_values():
    w = 2 * math.pi * CONSTANTS.c / 1e-6
    assert wave_vector(1.0, w, "F") == pytest.approx(2 * math.pi * 1e6, rel=1e-14)
    assert wave_vector(1.0, w, "B") == pytest.approx(-2 * math.pi * 1e6, rel=1e-14)
    assert wave_vector(2.0, w, "F", math.radians(60)) == pytest.approx(
        0.5 * wave_vector(2.0, w, "F"), rel=1e-12)
    assert wave_vector(1.7, w, "F", 0.3) == -wave_vector(1.7, w, "B", 0.3)


def test_snell_helper():
    t2 = snell_angle(1.0, 0.6, 2.3)
    assert abs(1.0 * math.sin(0.6) - 2.3 * math.sin(t2)) < 1e-12
    with pytest.raises(ValueError):
        snell_angle(2.3, 1.2, 1.0)


def test_mode_spec():
    assert ModeSpec("signal", "B").direction == "B"
    with pytest.raises(ValueError):
        ModeSpec("signal", "X")
    with pytest.raises(ValueError):
        ModeSpec("idler", "F", "o", math.pi / 2)


def _write(tmp_path, doc):
    p = tmp_path / "m.json"
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


def test_empty_file_is_empty_db(tmp_path):
    assert load_material_db(_write(tmp_path, "")) == {}


def test_empty_coefficients_rejected(tmp_path):
    doc = {"materials": [{"name": "X", "validity_um": [0.3, 2], "sellmeier": {"o": {"B": [], "C": []}}}]}
    with pytest.raises(MaterialError, match="empty sellmeier set"):
        load_material_db(_write(tmp_path, doc))


def test_unknown_key_rejected(tmp_path):
    doc = {"materials": [{"name": "X", "validity_um": [0.3, 2], "colour": "red",
                          "sellmeier": {"o": {"B": [1.0], "C": [0.01]}}}]}
    with pytest.raises(MaterialError, match="unknown key"):
        load_material_db(_write(tmp_path, doc))


def test_parse_error_reports_position(tmp_path):
    with pytest.raises(MaterialError, match="line 2"):
        load_material_db(_write(tmp_path, '{"materials": [\n  {,]}'))


def test_invariant_violation_names_material(tmp_path):
    doc = {"materials": [{"name": "Weird", "validity_um": [0.3, 2],
                          "sellmeier": {"o": {"A": 0.2, "B": [0.1], "C": [0.01]}}}]}
    with pytest.raises(MaterialError, match="Weird"):
        load_material_db(_write(tmp_path, doc))


def test_env_var_overrides_default(tmp_path, monkeypatch):
    p = _write(tmp_path, "")
    monkeypatch.setenv("PAIRGEN_MATERIALS", str(p))
    assert default_db_path() == p
    assert load_material_db() == {}

import math

import numpy as np
import pytest

from pairgen.bulk import (CHANNELS, BulkConfig, PumpSpec, boundary_correction_kernels,
                          bulk_kernel_pair, coupling_constant, normalize_d_eff,
                          phase_matching_angle, phase_mismatch, sinc, solve_continuity,
                          surface_amplitude, surface_from_boundaries, surface_volume_ratio,
                          total_output_amplitude, volume_amplitude)
from pairgen.materials import omega_from_wavelength
from oracles.coupling import coupling_magnitude

TYPE_II = {"p": "e", "s": "e", "i": "o"}


def test_sinc_series_branch():
    x = np.array([0.0, 1e-5, -3e-5, 9.99e-5, 1e-4, 0.5, 2 * np.pi])
    ref = np.array([1.0] + [np.sin(v) / v for v in x[1:]])
    assert np.allclose(sinc(x), ref, rtol=1e-15, atol=1e-16)
    assert np.isfinite(sinc(0.0))


def test_coupling_constant():
    assert coupling_constant(0.0, 1e15, 1e15, 1.5, 1.5) == 0
    g1 = coupling_constant(1e-12, 1e15, 2e15, 1.6, 1.7)
    g4 = coupling_constant(1e-12, 4e15, 8e15, 1.6, 1.7)
    assert g4 / g1 == pytest.approx(4.0, rel=1e-14)
    assert g1.real == 0.0 and g1.imag > 0
    w = float(omega_from_wavelength(800e-9))
    g = coupling_constant(1e-12, w, w, 1.66, 1.66)
    assert abs(g) == pytest.approx(3.775042582275603e-06, rel=1e-9)
    assert abs(g) == pytest.approx(coupling_magnitude(1e-12, 800e-9, 800e-9, 1.66, 1.66), rel=1e-9)


def test_phase_mismatch_signs():
    kp, ks, ki = 3.0, 1.0, 2.0
    assert phase_mismatch("F", "F", "F", kp, ks, ki) == 0.0
    assert phase_mismatch("F", "B", "B", kp, ks, ki) == kp + ks + ki
    assert phase_mismatch("B", "B", "B", kp, ks, ki) == -phase_mismatch("F", "F", "F", kp, ks, ki)


def test_dispersionless_mismatch_vanishes(db):
    cfg = BulkConfig(db["vacuum"], 1e-3, PumpSpec("cw", 2e15))
    k_p = 2e15 / 299792458.0
    assert abs(cfg.mismatch(("F", "F", "F"), 0.7e15, 1.3e15)) < 1e-14 * k_p


def test_volume_examples():
    g, e, L = 2j, 0.5, 1e-3
    assert abs(volume_amplitude(g, e, 0.0, 1e7, L)) == pytest.approx(abs(g * e) * L)
    assert abs(volume_amplitude(g, e, 2 * np.pi / L, 1e7, L)) < 1e-18
    small = [abs(volume_amplitude(g, e, 1e3, 1e7, L)) for L in (1e-9, 2e-9)]
    assert small[1] / small[0] == pytest.approx(2.0, rel=1e-6)


def test_surface_examples():
    g, e = 1j, 1.0
    assert surface_amplitude(g, e, 4.0, 6.0, 10.0, 4.0, 1e-3) == 0
    assert abs(surface_amplitude(g, e, 4.0, 6.0, 11.0, 4.0, 0.0)) == 0
    with pytest.raises(ValueError):
        surface_amplitude(g, e, 4.0, 6.0, 11.0, 0.0, 1e-3)
    with pytest.raises(ValueError):
        surface_volume_ratio(1.0, 0.0)
    assert surface_volume_ratio(0.0, 3.0) == 0.0


def test_surface_equals_ratio_times_volume(rng):
    n = 2000
    kp, ks, ki = (rng.uniform(1e6, 3e7, n) for _ in range(3))
    L = rng.uniform(1e-7, 1e-2, n)
    g = 1j * rng.uniform(0.1, 2, n)
    e = rng.normal(size=n) + 1j * rng.normal(size=n)
    for gam, a, b in CHANNELS:
        sg = {"F": 1, "B": -1}
        dk = phase_mismatch(gam, a, b, kp, ks, ki)
        vol = volume_amplitude(g, e, dk, sg[gam] * kp, L)
        for km in (ks, ki):
            surf = surface_amplitude(g, e, sg[a] * ks, sg[b] * ki, sg[gam] * kp, km, L)
            err = np.abs(surf - surface_volume_ratio(dk, km) * vol) / np.abs(vol)
            assert err.max() < 1e-12


def test_surface_vanishes_linearly_with_length(db):
    w800 = float(omega_from_wavelength(900e-9))
    cfg = BulkConfig(db["GaN"], 1.0, PumpSpec("cw", 2 * w800))
    ws = np.linspace(0.9, 1.1, 21) * w800
    consts = []
    for L in np.geomspace(1e-11, 1e-9, 5):
        cfg.length = L
        k = cfg.kernels(ws, 2 * w800 - ws, ("F", "B", "B"))
        consts.append(np.max(np.abs(k["surface_s"])) / L)
    consts = np.array(consts)
    assert np.max(consts) / np.min(consts) < 1.01


def test_phase_matched_total_equals_volume(db):
    wp = float(omega_from_wavelength(400e-9))
    th = phase_matching_angle(db["BBO"], TYPE_II, wp / 2, wp / 2, (0.3, 1.2))
    cfg = BulkConfig(db["BBO"], 5e-3, PumpSpec("cw", wp), 1e-12, TYPE_II, th)
    k = cfg.kernels(wp / 2, wp / 2)
    assert abs(k["dk"]) < 1e-6
    for m in ("s", "i"):
        assert abs(k[f"surface_{m}"]) / abs(k["volume"]) < 1e-12


def test_fresnel_total_switch(db):
    w800 = float(omega_from_wavelength(900e-9))
    cfg = BulkConfig(db["GaN"], 2e-6, PumpSpec("cw", 2 * w800), ambient=db["GaN"])
    k = cfg.kernels(0.9 * w800, 1.1 * w800)
    assert k["t_s"] == pytest.approx(1.0) and k["t_i"] == pytest.approx(1.0)
    tot = total_output_amplitude(k["volume"], k["surface_s"], 0.8, 0.9)
    assert tot == pytest.approx(0.72 * (k["volume"] + k["surface_s"]))
    vol_only = total_output_amplitude(k["volume"], k["surface_s"], 0.8, 0.9, include_surface=False)
    assert vol_only == pytest.approx(0.72 * k["volume"])


def test_effective_factor_identity(db, rng):
    cfg = BulkConfig(db["GaN"], 3e-6, PumpSpec("cw", 3e15), ambient=db["vacuum"])
    ws = rng.uniform(1.2e15, 1.8e15, 500)
    k = cfg.kernels(ws, 3e15 - ws)
    tt = k["t_s"] * k["t_i"]
    fs = total_output_amplitude(k["volume"], k["surface_s"], k["t_s"], k["t_i"])
    fi = total_output_amplitude(k["volume"], k["surface_i"], k["t_s"], k["t_i"])
    lhs = np.abs(fs * fi) / np.abs(tt * k["volume"]) ** 2
    rhs = np.abs(1 + k["ratio_s"]) * np.abs(1 + k["ratio_i"])
    assert np.max(np.abs(lhs - rhs) / rhs) < 1e-12


def test_boundary_corrections_closed_forms():
    g, e, ks = 2j, 0.3 + 0.1j, 1.1e7
    dF, dB = boundary_correction_kernels("input", g, e, ks)
    assert dF == dB == pytest.approx(1j * g * e / (2 * ks))
    assert boundary_correction_kernels("input", 0.0, e, ks) == (0, 0)
    dF, dB = boundary_correction_kernels("output", g, e, ks, 2.2e7, 1.0e7, 1e-4)
    assert dF == dB
    with pytest.raises(ValueError):
        boundary_correction_kernels("side", g, e, ks)
    with pytest.raises(ValueError):
        boundary_correction_kernels("input", g, e, -1.0)


def test_continuity_solver_matches_closed_forms(rng):
    n = 10_000
    ks = rng.uniform(1e6, 3e7, n)
    kp, ki = rng.uniform(1e6, 6e7, n), rng.uniform(1e6, 3e7, n)
    L = rng.uniform(1e-7, 1e-2, n)
    ge = 1j * rng.uniform(0.1, 2, n) * (rng.normal(size=n) + 1j * rng.normal(size=n))
    d_in = boundary_correction_kernels("input", ge, 1.0, ks)[0]
    s_in = solve_continuity("input", ks, 2 * ge)
    assert np.max(np.abs(s_in[0] - 2 * d_in) / np.abs(d_in)) < 1e-12
    assert np.max(np.abs(s_in[0] - s_in[1]) / np.abs(s_in[0])) < 1e-12
    src = 2 * ge * np.exp(1j * kp * L) * np.exp(-1j * ki * L)
    d_out = boundary_correction_kernels("output", ge, 1.0, ks, kp, ki, L)[0]
    s_out = solve_continuity("output", ks, src)
    assert np.max(np.abs(s_out[0] - 2 * d_out) / np.abs(d_out)) < 1e-12


def test_boundaries_rebuild_surface(rng):
    n = 2000
    kp, ks, ki = (rng.uniform(1e6, 3e7, n) for _ in range(3))
    L = rng.uniform(1e-7, 1e-2, n)
    g = 1j * rng.uniform(0.1, 2, n)
    e = rng.normal(size=n) + 1j * rng.normal(size=n)
    sg = {"F": 1, "B": -1}
    for gam, a, b in CHANNELS:
        for m, km in (("s", ks), ("i", ki)):
            ref = surface_amplitude(g, e, sg[a] * ks, sg[b] * ki, sg[gam] * kp, km, L)
            for solver in (None, solve_continuity):
                got = surface_from_boundaries(m, a, b, gam, g, e, ks, ki, kp, L, solver)
                err = np.abs(got - ref) / (np.abs(g * e) / km)
                assert np.all(err < 1e-13 * np.maximum(1.0, (kp + ks + ki) * L))


def test_d_eff_validation():
    assert normalize_d_eff(2.0)[("B", "F", "B")] == 2.0
    full = {"".join(c): (1.0 if c[0] == "F" else 0.5) for c in CHANNELS}
    assert normalize_d_eff(full)[("B", "B", "B")] == 0.5
    bad = dict(full, FFB=3.0)
    with pytest.raises(ValueError, match="direction"):
        normalize_d_eff(bad)
    with pytest.raises(ValueError, match="missing"):
        normalize_d_eff({"FFF": 1.0})


def test_pump_spec():
    p = PumpSpec("gaussian_pulse", 3e15, 250e-15)
    assert p.tau_g == pytest.approx(250e-15 / (2 * math.sqrt(math.log(2))))
    w = 3e15 + np.array([0.0, 1.0 / p.tau_g])
    assert np.allclose(p.spectrum(w), [1.0, math.exp(-0.5)])
    assert PumpSpec("cw", 1e15).spectrum(2e15) == 1.0
    for bad in (dict(kind="cw", omega_p0=-1.0), dict(kind="gaussian_pulse", omega_p0=1e15),
                dict(kind="laser", omega_p0=1e15)):
        with pytest.raises(ValueError):
            PumpSpec(**bad)
    with pytest.raises(ValueError):
        BulkConfig(None, 0.0, p)


def test_kernel_pair_shapes(db):
    wp = float(omega_from_wavelength(400e-9))
    cfg = BulkConfig(db["BBO"], 1e-3, PumpSpec("gaussian_pulse", wp, 250e-15), 1e-12, TYPE_II, 0.74)
    ax = np.linspace(0.49, 0.51, 16) * wp
    kp = bulk_kernel_pair(cfg, ax, ax, "total")
    assert kp.fs.values.shape == (16, 16)
    with pytest.raises(ValueError):
        bulk_kernel_pair(cfg, ax, ax, "everything")
    cfg.pump = PumpSpec("cw", wp)
    line = bulk_kernel_pair(cfg, ax, contribution="volume")
    assert line.fs.values.shape == (16,)
    assert np.array_equal(line.fs.values, line.fi.values)

import numpy as np
import pytest

from pairgen.amplitudes import AmplitudeGrid, AmplitudeLine
from pairgen.materials import CONSTANTS
from pairgen.numerics import GridError
from pairgen.observables import (HOMConfig, hom_rate, intensity_spectrum, joint_density,
                                 pair_number, photon_flux, photon_flux_direct, schmidt_entropy,
                                 temporal_amplitude)

W0 = 2.35e15


def gauss_grid(n=64, ss=4e12, si=4e12, chirp=0.0, span=6, ws0=W0, wi0=W0, phase=0.0):
    ws = np.linspace(ws0 - span * ss, ws0 + span * ss, n)
    wi = np.linspace(wi0 - span * si, wi0 + span * si, n)
    x, y = (ws[:, None] - ws0) / ss, (wi[None, :] - wi0) / si
    v = np.exp(-x ** 2 / 2 - y ** 2 / 2 + 1j * chirp * x * y + 1j * phase)
    return AmplitudeGrid(ws, wi, v)


def test_joint_density_and_window():
    g = gauss_grid(16)
    assert np.allclose(joint_density(g, g), np.abs(g.values) ** 2)
    line = AmplitudeLine(np.linspace(1e15, 2e15, 5), np.arange(1, 6) * (1 + 1j), 3e15)
    assert np.allclose(joint_density(line, line, 2.5), 2.5 * 2 * np.arange(1, 6) ** 2)
    with pytest.raises(GridError):
        joint_density(g, line)


def test_spectrum_of_separable_kernel():
    g = gauss_grid(401, ss=3e12, si=5e12)
    sp = intensity_spectrum(g, g, "s")
    x = (g.axis_s - W0) / 3e12
    exact = CONSTANTS.hbar * g.axis_s * np.exp(-x ** 2) * 5e12 * np.sqrt(np.pi)
    assert np.allclose(sp.values, exact, rtol=1e-9)
    spi = intensity_spectrum(g, g, "i")
    assert spi.axes[0][2] is g.axis_i
    with pytest.raises(ValueError):
        intensity_spectrum(g, g, "p")


def test_line_spectrum_axis_order():
    ws = np.linspace(1.1e15, 1.3e15, 7)
    line = AmplitudeLine(ws, np.linspace(1, 2, 7), 2.4e15)
    sp = intensity_spectrum(line, line, "i")
    assert np.all(np.diff(sp.axes[0][2]) > 0)


def test_pair_number_converges():
    exact = np.pi * 4e12 * 4e12
    vals = [pair_number(g, g) for g in (gauss_grid(33), gauss_grid(65), gauss_grid(129))]
    assert abs(vals[-1] - exact) / exact < 1e-6
    assert abs(vals[-1] - vals[-2]) / exact < 0.01


def test_temporal_single_bin_is_flat():
    g = gauss_grid(16)
    v = np.zeros((16, 16), complex)
    v[5, 9] = 1.0
    ta = temporal_amplitude(g.replace(v))
    assert np.allclose(np.abs(ta.values), np.abs(ta.values).flat[0], rtol=1e-12)


def test_temporal_parseval_grid():
    g = gauss_grid(48, chirp=3.0)
    ta = temporal_amplitude(g, pad=4)
    dts, dti = ta.tau_s[1] - ta.tau_s[0], ta.tau_i[1] - ta.tau_i[0]
    lhs = np.sum(np.abs(ta.values) ** 2) * dts * dti
    dws, dwi = g.axis_s[1] - g.axis_s[0], g.axis_i[1] - g.axis_i[0]
    wt = np.outer(g.axis_s, g.axis_i) / (ta.omega_s0 * ta.omega_i0)
    rhs = np.sum(wt * np.abs(g.values) ** 2) * dws * dwi
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_temporal_parseval_line():
    ws = np.linspace(2.2e15, 2.5e15, 301)
    v = np.exp(-((ws - 2.35e15) / 2e13) ** 2 + 1j * ((ws - 2.35e15) / 1e13) ** 2)
    line = AmplitudeLine(ws, v, 4.7e15)
    ta = temporal_amplitude(line)
    assert ta.tau_i is None
    lhs = np.sum(np.abs(ta.values) ** 2) * (ta.tau_s[1] - ta.tau_s[0])
    wt = ws * line.axis_i / (ta.omega_s0 * ta.omega_i0)
    rhs = np.sum(wt * np.abs(v) ** 2) * (ws[1] - ws[0]) / (2 * np.pi)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_flux_matches_direct_integral():
    # a narrow idler filter makes the omega_i / omega_i0 weight negligible
    fs = gauss_grid(32, ss=5e12, si=5e9, chirp=2.0)
    fi = fs.replace(fs.values * np.exp(1j * 0.3 * (fs.axis_s[:, None] - W0) / 5e12))
    fl = photon_flux(temporal_amplitude(fs), temporal_amplitude(fi))
    direct = photon_flux_direct(fs, fi, fl.axes[0][2])
    err = np.linalg.norm(fl.values - direct) / np.linalg.norm(direct)
    assert err < 1e-6


def test_flux_rejects_lines():
    line = AmplitudeLine(np.linspace(1e15, 2e15, 8), np.ones(8), 3e15)
    ta = temporal_amplitude(line)
    with pytest.raises(ValueError):
        photon_flux(ta, ta)


def sym_grid(n=48, chirp=0.0):
    g = gauss_grid(n, chirp=chirp)
    return g.replace(0.5 * (g.values + g.values.T))


def test_hom_no_interference_without_splitting():
    g = sym_grid()
    h = hom_rate(g, g, HOMConfig(np.linspace(-1e-12, 1e-12, 21), r=1.0, t=0.0))
    assert np.allclose(h.values, 1.0)


def test_hom_symmetric_kernel_full_dip():
    g = sym_grid(chirp=1.5)
    tau = np.linspace(-20e-12, 20e-12, 401)
    h = hom_rate(g, g, HOMConfig(tau))
    assert h.values[200] == pytest.approx(0.0, abs=1e-12)
    assert abs(h.values[0] - 1) < 1e-3 and abs(h.values[-1] - 1) < 1e-3


def test_hom_global_phase():
    g = sym_grid()
    tau = np.linspace(-2e-12, 2e-12, 41)
    a = hom_rate(g, g, HOMConfig(tau)).values
    p = g.replace(g.values * np.exp(0.7j))
    assert np.allclose(hom_rate(p, p, HOMConfig(tau)).values, a, atol=1e-14)


def test_hom_line():
    ws = np.linspace(2.3e15, 2.4e15, 201)
    v = np.exp(-((ws - 2.35e15) / 1e13) ** 2)
    line = AmplitudeLine(ws, v, 4.7e15)
    tau = np.linspace(-5e-12, 5e-12, 101)
    h = hom_rate(line, line, HOMConfig(tau))
    assert h.values[50] == pytest.approx(0.0, abs=1e-12)
    assert abs(h.values[0] - 1) < 1e-3
    skew = AmplitudeLine(ws, v, 4.71e15)
    with pytest.raises(GridError):
        hom_rate(skew, skew, HOMConfig(tau))


def test_hom_config_checks():
    with pytest.raises(ValueError):
        HOMConfig([0.0], r=1.0, t=1.0)


def test_schmidt_rank_one_and_identity():
    a, b = np.random.default_rng(3).normal(size=(2, 24))
    assert schmidt_entropy(np.outer(a, b)).entropy == pytest.approx(0.0, abs=1e-9)
    assert schmidt_entropy(np.eye(16)).entropy == pytest.approx(4.0, rel=1e-12)
    assert schmidt_entropy(gauss_grid(32)).entropy == pytest.approx(0.0, abs=1e-9)


def test_schmidt_phase_invariance():
    g = gauss_grid(40, chirp=2.0)
    e = schmidt_entropy(g).entropy
    assert e > 0.5
    assert schmidt_entropy(g.replace(g.values * np.exp(1.1j))).entropy == pytest.approx(e, rel=1e-10)


def test_schmidt_rejections():
    line = AmplitudeLine(np.linspace(1e15, 2e15, 8), np.ones(8), 3e15)
    with pytest.raises(ValueError):
        schmidt_entropy(line)
    with pytest.raises(ValueError):
        schmidt_entropy(np.zeros((4, 4)))

"""Photon-pair observables computed from signal/idler output kernels.

Every function accepts either :class:`AmplitudeGrid` kernels (pulsed pump,
full ``(omega_s, omega_i)`` plane) or :class:`AmplitudeLine` kernels (cw
pump, anti-diagonal ``omega_i = omega_p0 - omega_s``). On a cw line the
pump delta squared is replaced by ``2T/(2 pi)``; ``window_factor`` carries
that number and defaults to 1 so reported cw quantities are per unit
``2T/(2 pi)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .amplitudes import AmplitudeGrid, AmplitudeLine
from .materials import CONSTANTS
from .numerics import GridError, dft1_centered, dft2_centered, grid_step, integrate_1d, svd

__all__ = [
    "Observable",
    "TemporalAmplitude",
    "HOMConfig",
    "SchmidtResult",
    "joint_density",
    "intensity_spectrum",
    "pair_number",
    "temporal_amplitude",
    "photon_flux",
    "photon_flux_direct",
    "hom_rate",
    "schmidt_entropy",
]


@dataclass
class Observable:
    """Real 1-D or 2-D result with named axes ``[(label, unit, values), ...]``."""

    name: str
    axes: list
    values: np.ndarray
    unit: str = "arb."
    meta: dict = field(default_factory=dict)


@dataclass
class TemporalAmplitude:
    """Kernel in the time domain.

    For grids ``values[j, k]`` sits at ``(tau_s[j], tau_i[k])``. For cw lines
    the kernel depends only on ``tau_s - tau_i``; ``tau_s`` holds that
    difference, ``tau_i`` is ``None`` and ``values`` is 1-D.
    """

    tau_s: np.ndarray
    tau_i: np.ndarray | None
    values: np.ndarray
    omega_s0: float
    omega_i0: float
    field_label: str = "s"


def _check_pair(fs, fi):
    if type(fs) is not type(fi):
        raise GridError("signal and idler kernels must both be grids or both be lines")
    if not np.array_equal(fs.axis_s, fi.axis_s) or not np.array_equal(fs.axis_i, fi.axis_i):
        raise GridError("signal and idler kernels live on different grids")


def _is_line(k):
    return isinstance(k, AmplitudeLine)


def _weights_1d(axis):
    """Trapezoid weights on an arbitrary increasing axis."""
    d = np.diff(axis)
    w = np.zeros_like(axis)
    w[:-1] += 0.5 * d
    w[1:] += 0.5 * d
    return w


def _centers(k):
    if _is_line(k):
        ws0 = 0.5 * (k.axis_s[0] + k.axis_s[-1])
        return ws0, k.omega_p0 - ws0
    return 0.5 * (k.axis_s[0] + k.axis_s[-1]), 0.5 * (k.axis_i[0] + k.axis_i[-1])


# --------------------------------------------------------------------------
# spectral domain

def joint_density(fs, fi, window_factor: float = 1.0) -> np.ndarray:
    """``n = Re{F_s^* F_i}`` pointwise."""
    _check_pair(fs, fi)
    n = np.real(np.conj(fs.values) * fi.values)
    return n * window_factor if _is_line(fs) else n


def intensity_spectrum(fs, fi, which: str = "s", window_factor: float = 1.0) -> Observable:
    """Spectrum ``S_m(omega_m) = hbar omega_m int n d omega_other``."""
    n = joint_density(fs, fi, window_factor)
    hbar = CONSTANTS.hbar
    if which not in ("s", "i"):
        raise ValueError("which must be 's' or 'i'")
    if _is_line(fs):
        axis = fs.axis_s if which == "s" else fs.axis_i
        vals = hbar * axis * n
        if which == "i":
            axis, vals = axis[::-1], vals[::-1]
    elif which == "s":
        axis = fs.axis_s
        vals = hbar * axis * integrate_1d(n, fs.axis_i)
    else:
        axis = fs.axis_i
        vals = hbar * axis * integrate_1d(n.T, fs.axis_s)
    return Observable(f"spectrum_{which}", [(f"omega_{which}", "rad/s", axis)], vals, "J s/rad",
                      dict(fs.meta))


def pair_number(fs, fi, window_factor: float = 1.0) -> float:
    """Integrated pair number ``int int n`` over the sampled region."""
    n = joint_density(fs, fi, window_factor)
    if _is_line(fs):
        return float(integrate_1d(n, fs.axis_s))
    return float(integrate_1d(integrate_1d(n, fs.axis_i), fs.axis_s))


# --------------------------------------------------------------------------
# time domain

def temporal_amplitude(kernel, pad: int = 4, omega_s0=None, omega_i0=None) -> TemporalAmplitude:
    """Weighted Fourier transform of a kernel into the time domain.

    ``F(ts, ti) = (1/2pi) int int sqrt(ws wi / ws0 wi0) F(ws, wi)
    exp(-i ws ts - i wi ti)``. The reference frequencies default to the grid
    centres. For a cw line the result is the function of ``ts - ti``
    multiplying ``exp(-i omega_p0 ti)``.
    """
    c_s, c_i = _centers(kernel)
    ws0 = c_s if omega_s0 is None else omega_s0
    wi0 = c_i if omega_i0 is None else omega_i0
    if _is_line(kernel):
        w = np.sqrt(kernel.axis_s * kernel.axis_i / (ws0 * wi0))
        vals, tau = dft1_centered(w * kernel.values, kernel.axis_s, pad=pad)
        return TemporalAmplitude(tau, None, vals, ws0, wi0, kernel.field_label)
    w = np.sqrt(np.outer(kernel.axis_s, kernel.axis_i) / (ws0 * wi0))
    vals, ts, ti = dft2_centered(w * kernel.values, kernel.axis_s, kernel.axis_i, pad=pad)
    return TemporalAmplitude(ts, ti, vals, ws0, wi0, kernel.field_label)


def photon_flux(ts_amp: TemporalAmplitude, ti_amp: TemporalAmplitude) -> Observable:
    """Signal flux ``hbar ws0 int d tau_i Re{F_i^* F_s}``.

    The time axes are periodic DFT grids, so the ``tau_i`` integral is the
    periodic trapezoid (plain sum times step).
    """
    if ts_amp.tau_i is None or ti_amp.tau_i is None:
        raise ValueError("photon flux needs pulsed (two-dimensional) temporal kernels")
    if ts_amp.values.shape != ti_amp.values.shape:
        raise GridError("temporal kernels differ in shape")
    dti = ts_amp.tau_i[1] - ts_amp.tau_i[0]
    prod = np.real(np.conj(ti_amp.values) * ts_amp.values)
    vals = CONSTANTS.hbar * ts_amp.omega_s0 * prod.sum(axis=1) * dti
    return Observable("flux_s", [("tau_s", "s", ts_amp.tau_s)], vals, "arb.")


def photon_flux_direct(fs: AmplitudeGrid, fi: AmplitudeGrid, tau_s) -> np.ndarray:
    """Signal flux from the spectral triple integral (rectangle rule).

    ``(hbar/2pi) int dws sqrt(ws) int dws' sqrt(ws') int dwi
    Re{exp(i(ws - ws') tau) F_i^*(ws, wi) F_s(ws', wi)}``. This form does not
    assume a narrow idler spectrum.
    """
    _check_pair(fs, fi)
    ws, wi = fs.axis_s, fs.axis_i
    dws, dwi = grid_step(ws), grid_step(wi)
    tau_s = np.asarray(tau_s, float)
    ph = np.exp(1j * np.outer(tau_s, ws))  # (T, S)
    sq = np.sqrt(ws)
    a = np.einsum("ts,si->ti", ph * sq, np.conj(fi.values)) * dws
    b = np.einsum("ts,si->ti", np.conj(ph) * sq, fs.values) * dws
    return CONSTANTS.hbar / (2 * np.pi) * np.real(a * b).sum(axis=1) * dwi


# --------------------------------------------------------------------------
# Hong-Ou-Mandel interference

@dataclass
class HOMConfig:
    tau_grid: np.ndarray
    r: complex = 1 / np.sqrt(2)
    t: complex = 1 / np.sqrt(2)
    tau_offset: float = 0.0  # added to tau_grid before evaluation

    def __post_init__(self):
        self.tau_grid = np.asarray(self.tau_grid, float)
        if abs(abs(self.r) ** 2 + abs(self.t) ** 2 - 1) > 1e-9:
            raise ValueError("beam splitter must satisfy |r|^2 + |t|^2 = 1")


def hom_rate(fs, fi, cfg: HOMConfig) -> Observable:
    """Normalised coincidence rate ``R_n(tau) = 1 - rho(tau)``.

    ``rho`` interferes ``F_s^*(ws, wi)`` with the exchanged idler kernel
    ``F_i(wi, ws)``, so the signal and idler axes must map onto each other
    under exchange.
    """
    _check_pair(fs, fi)
    tau = cfg.tau_grid + cfg.tau_offset
    c = (np.conj(cfg.r) * cfg.t) ** 2
    norm = 0.125 * (abs(cfg.r) ** 4 + abs(cfg.t) ** 4)
    if _is_line(fs):
        ws, wi = fs.axis_s, fs.axis_i
        if not np.allclose(ws[::-1], wi, rtol=1e-12, atol=0):
            raise GridError("cw line must be symmetric about omega_p0/2 for HOM")
        ws0, wi0 = _centers(fs)
        w = ws * wi / (ws0 * wi0) * _weights_1d(ws)
        r0 = norm * np.sum(w * np.real(np.conj(fs.values) * fi.values))
        cross = w * np.conj(fs.values) * fi.values[::-1]
        rho = np.real(c * np.exp(1j * np.outer(tau, ws - wi)) @ cross)
    else:
        ws, wi = fs.axis_s, fs.axis_i
        if ws.size != wi.size or not np.allclose(ws, wi, rtol=1e-12, atol=0):
            raise GridError("HOM on a grid needs identical signal and idler axes")
        ws0, wi0 = _centers(fs)
        wt = np.outer(ws * _weights_1d(ws), wi * _weights_1d(wi)) / (ws0 * wi0)
        r0 = norm * np.sum(wt * np.real(np.conj(fs.values) * fi.values))
        g = wt * np.conj(fs.values) * fi.values.T
        # collapse onto diagonals of constant ws - wi = d * step
        n = ws.size
        step = grid_step(ws)
        diag = np.array([np.trace(g, offset=-d) for d in range(-(n - 1), n)])
        d = np.arange(-(n - 1), n) * step
        rho = np.real(c * np.exp(1j * np.outer(tau, d)) @ diag)
    if not r0 > 0:
        raise ValueError("no pairs: HOM normalisation R0 vanishes")
    rho = rho / (4 * r0)
    return Observable("hom", [("tau", "s", cfg.tau_grid)], 1.0 - rho, "1",
                      {"tau_offset": cfg.tau_offset})


# --------------------------------------------------------------------------
# Schmidt decomposition

@dataclass
class SchmidtResult:
    singular_values: np.ndarray
    weights: np.ndarray
    entropy: float


def schmidt_entropy(kernel) -> SchmidtResult:
    """Schmidt weights and entropy (bits) of a sampled two-photon kernel."""
    if _is_line(kernel):
        raise ValueError("Schmidt decomposition needs a two-dimensional kernel (pulsed pump)")
    m = np.asarray(kernel.values if hasattr(kernel, "values") else kernel, complex)
    if m.ndim != 2:
        raise ValueError("kernel must be a matrix")
    if isinstance(kernel, AmplitudeGrid):
        m = m * np.sqrt(grid_step(kernel.axis_s) * grid_step(kernel.axis_i))
    _, s, _ = svd(m)
    total = np.sum(s ** 2)
    if not total > 0:
        raise ValueError("all-zero kernel has no Schmidt decomposition")
    lam = s ** 2 / total
    nz = lam[lam > 0]
    entropy = float(max(0.0, -np.sum(nz * np.log2(nz))))
    return SchmidtResult(s, lam, entropy)

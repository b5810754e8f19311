"""Grids, trapezoidal quadrature, continuous-normalised DFTs and SVD."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

__all__ = [
    "UniformGrid",
    "GridError",
    "make_grid",
    "grid_step",
    "integrate_1d",
    "integrate_2d",
    "dft1_centered",
    "idft1_centered",
    "dft2_centered",
    "idft2_centered",
    "svd",
]


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class UniformGrid:
    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise GridError("grid step must be positive")
        if self.count < 2:
            raise GridError("grid needs at least two points")

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    @property
    def center(self) -> float:
        return 0.5 * (self.start + self.stop)


def make_grid(center: float, halfwidth: float, count: int) -> UniformGrid:
    """Symmetric grid about ``center`` with inclusive endpoints."""
    if count < 2:
        raise GridError(f"count must be >= 2, got {count}")
    if halfwidth <= 0:
        raise GridError("halfwidth must be positive")
    return UniformGrid(center - halfwidth, 2.0 * halfwidth / (count - 1), int(count))


def grid_step(axis, rtol: float = 1e-9) -> float:
    """Step of a uniform axis; raises ``GridError`` otherwise."""
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise GridError("axis must be 1-D with at least two points")
    d = np.diff(axis)
    step = (axis[-1] - axis[0]) / (axis.size - 1)
    if step <= 0 or np.max(np.abs(d - step)) > rtol * abs(step) + 1e-300:
        raise GridError("axis is not uniform and increasing")
    return float(step)


def _axis(grid):
    return grid.values if isinstance(grid, UniformGrid) else np.asarray(grid, dtype=float)


def integrate_1d(values, grid):
    x = _axis(grid)
    values = np.asarray(values)
    if values.shape[-1] != x.size:
        raise GridError("values do not match grid length")
    return trapezoid(values, x, axis=-1)


def integrate_2d(values, grid_s, grid_i):
    """Trapezoidal double integral; ``values[k, l]`` sits at ``(s_k, i_l)``."""
    xs, xi = _axis(grid_s), _axis(grid_i)
    values = np.asarray(values)
    if values.shape[-2:] != (xs.size, xi.size):
        raise GridError(f"values shape {values.shape} does not match grids "
                        f"({xs.size}, {xi.size})")
    return trapezoid(trapezoid(values, xi, axis=-1), xs, axis=-1)


# --------------------------------------------------------------------------
# Fourier transforms approximating continuous integrals
#
# Forward:  G(tau) = norm * int f(w) exp(-i w tau) dw   (rectangle rule)
# The output axis is tau_j = (j - M//2) * dtau, dtau = 2 pi / (M dw), where M
# is the padded length. The phase exp(-i w0 tau) accounts for the grid start.

def _tau_axis(m: int, dw: float) -> np.ndarray:
    dtau = 2 * np.pi / (m * dw)
    return (np.arange(m) - m // 2) * dtau


def _padded_len(n: int, pad: int) -> int:
    if pad < 1:
        raise GridError("pad factor must be >= 1")
    return int(n * pad)


def dft1_centered(values, axis, pad: int = 1, norm: float = 1 / (2 * np.pi)):
    """Continuous-normalised 1-D transform along the last dimension."""
    w = np.asarray(axis, dtype=float)
    dw = grid_step(w)
    values = np.asarray(values, dtype=complex)
    m = _padded_len(w.size, pad)
    tau = _tau_axis(m, dw)
    spec = np.fft.fftshift(np.fft.fft(values, n=m, axis=-1), axes=-1)
    out = norm * dw * np.exp(-1j * w[0] * tau) * spec
    return out, tau


def idft1_centered(values, tau, axis, norm: float = 1 / (2 * np.pi)):
    """Inverse of :func:`dft1_centered` sampled back on ``axis``.

    ``norm`` is the forward normalisation; the inverse uses ``1/(2 pi norm)``.
    """
    w = np.asarray(axis, dtype=float)
    dw = grid_step(w)
    m = tau.size
    dtau = 2 * np.pi / (m * dw)
    values = np.asarray(values, dtype=complex) * np.exp(1j * w[0] * tau)
    back = np.fft.ifft(np.fft.ifftshift(values, axes=-1), axis=-1) * m
    return back[..., : w.size] * dtau / (2 * np.pi * norm)


def dft2_centered(values, axis_s, axis_i, pad: int = 1, norm: float = 1 / (2 * np.pi)):
    """Continuous-normalised 2-D transform.

    Approximates ``norm * iint f(ws, wi) exp(-i ws ts - i wi ti) dws dwi``.
    Returns ``(G, tau_s, tau_i)``.
    """
    ws, wi = np.asarray(axis_s, float), np.asarray(axis_i, float)
    dws, dwi = grid_step(ws), grid_step(wi)
    values = np.asarray(values, dtype=complex)
    if values.shape != (ws.size, wi.size):
        raise GridError("values do not match axes")
    ms, mi = _padded_len(ws.size, pad), _padded_len(wi.size, pad)
    ts, ti = _tau_axis(ms, dws), _tau_axis(mi, dwi)
    spec = np.fft.fftshift(np.fft.fft2(values, s=(ms, mi)))
    phase = np.exp(-1j * ws[0] * ts)[:, None] * np.exp(-1j * wi[0] * ti)[None, :]
    return norm * dws * dwi * phase * spec, ts, ti


def idft2_centered(values, tau_s, tau_i, axis_s, axis_i, norm: float = 1 / (2 * np.pi)):
    ws, wi = np.asarray(axis_s, float), np.asarray(axis_i, float)
    dws, dwi = grid_step(ws), grid_step(wi)
    ms, mi = tau_s.size, tau_i.size
    dts, dti = 2 * np.pi / (ms * dws), 2 * np.pi / (mi * dwi)
    phase = np.exp(1j * ws[0] * tau_s)[:, None] * np.exp(1j * wi[0] * tau_i)[None, :]
    back = np.fft.ifft2(np.fft.ifftshift(np.asarray(values, complex) * phase)) * ms * mi
    return back[: ws.size, : wi.size] * dts * dti / (4 * np.pi ** 2 * norm)


def svd(matrix):
    """Thin SVD ``M = U diag(s) Vh`` with ``s`` non-negative and descending."""
    m = np.asarray(matrix)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return np.linalg.svd(m, full_matrices=False)

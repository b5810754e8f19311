"""Two-photon kernels of a single homogeneous chi(2) crystal.

Direction labels are ``"F"`` (+z) and ``"B"`` (-z). Wave-vector magnitudes
``k_p, k_s, k_i`` are positive; the signed values used inside phases follow
``k_F = +k``, ``k_B = -k``. A channel is the triple ``(gamma, alpha, beta)``
of pump, signal and idler directions.

Surface terms come from the field-continuity corrections at the two faces;
they satisfy ``F_surf = (dk / k_m) * F_vol`` exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .amplitudes import AmplitudeGrid, AmplitudeLine, GaussianFilter, KernelPair
from .materials import (CONSTANTS, DIRECTION_SIGN, Material, refractive_index,
                        wave_vector)

__all__ = [
    "DIRECTIONS",
    "CHANNELS",
    "PumpSpec",
    "BulkConfig",
    "sinc",
    "coupling_constant",
    "phase_mismatch",
    "volume_amplitude",
    "surface_amplitude",
    "surface_volume_ratio",
    "fresnel_transmissivity",
    "total_output_amplitude",
    "boundary_correction_kernels",
    "solve_continuity",
    "surface_from_boundaries",
    "normalize_d_eff",
    "phase_matching_angle",
    "group_delay_difference",
    "bulk_kernel_pair",
]

DIRECTIONS = ("F", "B")
CHANNELS = tuple(itertools.product(DIRECTIONS, repeat=3))

_SINC_SERIES_BELOW = 1e-4


def sinc(x):
    """``sin(x)/x`` with a Taylor branch for ``|x| < 1e-4``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_SERIES_BELOW
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PumpSpec:
    kind: str  # "cw" | "gaussian_pulse"
    omega_p0: float
    duration: float | None = None  # intensity FWHM, s
    amplitude_scale: float = 1.0
    direction: str = "F"

    def __post_init__(self):
        if self.kind not in ("cw", "gaussian_pulse"):
            raise ValueError(f"unknown pump kind {self.kind!r}")
        if not self.omega_p0 > 0:
            raise ValueError("omega_p0 must be positive")
        if self.kind == "gaussian_pulse" and not (self.duration and self.duration > 0):
            raise ValueError("a pulsed pump needs a positive duration")
        if self.direction not in DIRECTION_SIGN:
            raise ValueError("pump direction must be F or B")

    @property
    def is_cw(self) -> bool:
        return self.kind == "cw"

    @property
    def tau_g(self) -> float:
        """Gaussian time constant: intensity ``exp(-t^2/tau_g^2)``."""
        return self.duration / (2 * math.sqrt(math.log(2)))

    def spectrum(self, omega):
        """Spectral amplitude ``E_p(omega)``; the cw line weight for cw pumps."""
        omega = np.asarray(omega, dtype=float)
        if self.is_cw:
            return np.full_like(omega, self.amplitude_scale, dtype=float)
        return self.amplitude_scale * np.exp(-0.5 * ((omega - self.omega_p0) * self.tau_g) ** 2)


def normalize_d_eff(d) -> dict:
    """Expand a scalar or partial mapping into all eight channels.

    Mapping keys are strings like ``"FFB"`` (gamma, alpha, beta). The surface
    terms assume ``d`` is independent of the signal and idler directions.
    """
    if isinstance(d, (int, float)):
        return {ch: float(d) for ch in CHANNELS}
    out = {}
    for key, val in d.items():
        ch = tuple(key) if isinstance(key, str) else tuple(key)
        if ch not in CHANNELS:
            raise ValueError(f"bad d_eff channel {key!r}")
        out[ch] = float(val)
    missing = set(CHANNELS) - set(out)
    if missing:
        raise ValueError(f"d_eff missing channels {sorted(''.join(m) for m in missing)}")
    for g in DIRECTIONS:
        vals = {out[(g, a, b)] for a in DIRECTIONS for b in DIRECTIONS}
        if len(vals) != 1:
            raise ValueError(f"d_eff must not depend on signal/idler direction (gamma={g})")
    return out


def coupling_constant(d, omega_s, omega_i, n_s, n_i):
    """``g = (2i d / c) sqrt(omega_s omega_i / (2 pi n_s n_i))``."""
    return (2j * np.asarray(d) / CONSTANTS.c) * np.sqrt(
        np.asarray(omega_s) * np.asarray(omega_i) / (2 * np.pi * np.asarray(n_s) * np.asarray(n_i)))


def phase_mismatch(gamma, alpha, beta, k_p, k_s, k_i):
    """Signed mismatch ``k_p_gamma - k_s_alpha - k_i_beta`` from magnitudes."""
    sg = DIRECTION_SIGN
    return sg[gamma] * np.asarray(k_p) - sg[alpha] * np.asarray(k_s) - sg[beta] * np.asarray(k_i)


def volume_amplitude(g, e_p, dk, k_p_signed, length):
    """Volume kernel ``g E exp(i k_p L) exp(-i dk L/2) L sinc(dk L/2)``."""
    dk = np.asarray(dk)
    return (g * e_p * np.exp(1j * k_p_signed * length) * np.exp(-0.5j * dk * length)
            * length * sinc(0.5 * dk * length))


def surface_amplitude(g, e_p, k_s_signed, k_i_signed, k_p_signed, k_m, length):
    """Surface kernel ``(i/k_m) g E {exp(i(k_s+k_i)L) - exp(i k_p L)}``.

    ``k_m`` is the wave-vector magnitude of the field (signal or idler) the
    kernel refers to.
    """
    k_m = np.asarray(k_m)
    if np.any(k_m == 0):
        raise ValueError("k_m must be non-zero")
    # bracket = exp(i k_p L) exp(-i dk L/2) (-2i sin(dk L/2)); the factored
    # form avoids cancelling two large phases
    dk = np.asarray(k_p_signed) - np.asarray(k_s_signed) - np.asarray(k_i_signed)
    half = 0.5 * dk * length
    return (2 / k_m * g * e_p * np.exp(1j * k_p_signed * length) * np.exp(-1j * half)
            * np.sin(half))


def surface_volume_ratio(dk, k_m):
    k_m = np.asarray(k_m)
    if np.any(k_m == 0):
        raise ValueError("k_m must be non-zero")
    return np.asarray(dk) / k_m


def fresnel_transmissivity(n, n_out):
    """Amplitude transmissivity ``2n/(n + n_out)`` of an exit face."""
    return 2 * np.asarray(n) / (np.asarray(n) + np.asarray(n_out))


def total_output_amplitude(volume, surface, t_s, t_i, include_surface: bool = True):
    """``t_s t_i (F_vol + F_surf)``; the surface term is dropped on request."""
    inner = volume + surface if include_surface else volume
    return t_s * t_i * inner


# --------------------------------------------------------------------------
# face corrections

def boundary_correction_kernels(face, g, e_p, k_s, k_p_signed=None, k_i_signed=None,
                                length=None):
    """Closed-form corrections ``(delta_F, delta_B)`` of one channel term.

    Input face: ``delta = i g E / (2 k_s)``. Output face:
    ``delta = -i g E exp(i k_p L) exp(-i k_i L) / (2 k_s)``. Both corrections
    multiply the idler creation operator at z = 0.
    """
    k_s = np.asarray(k_s)
    if np.any(k_s <= 0):
        raise ValueError("k_s must be positive")
    if face == "input":
        d = 1j / (2 * k_s) * g * e_p
    elif face == "output":
        d = (-1j / (2 * k_s) * g * e_p * np.exp(1j * k_p_signed * length)
             * np.exp(-1j * k_i_signed * length))
    else:
        raise ValueError(f"face must be 'input' or 'output', got {face!r}")
    return d, d


def solve_continuity(face, k_s, source):
    """Solve the 2x2 field-continuity system for ``(delta_F, delta_B)``.

    ``source`` is the nonlinear magnetic-field term summed over channels.
    Input face::

        dF - dB = 0
        i k_sF dF - i k_sB dB + source = 0

    Output face::

        -dF + dB = 0
        -i k_sF dF + i k_sB dB + source = 0

    with ``k_sF = k_s`` and ``k_sB = -k_s``. Vectorised over samples.
    """
    k_s = np.asarray(k_s, dtype=float)
    source = np.asarray(source, dtype=complex)
    shape = np.broadcast(k_s, source).shape
    k_s = np.broadcast_to(k_s, shape)
    source = np.broadcast_to(source, shape)
    sign = {"input": 1.0, "output": -1.0}.get(face)
    if sign is None:
        raise ValueError(f"face must be 'input' or 'output', got {face!r}")
    a = np.empty(shape + (2, 2), dtype=complex)
    a[..., 0, 0] = sign
    a[..., 0, 1] = -sign
    a[..., 1, 0] = sign * 1j * k_s
    a[..., 1, 1] = -sign * 1j * (-k_s)
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    if np.any(det == 0):
        raise np.linalg.LinAlgError("singular continuity system")
    rhs = np.zeros(shape + (2, 1), dtype=complex)
    rhs[..., 1, 0] = -source
    x = np.linalg.solve(a, rhs)[..., 0]
    return x[..., 0], x[..., 1]


def surface_from_boundaries(field_label, alpha, beta, gamma, g, e_p, k_s, k_i, k_p, length,
                            solver=None):
    """Rebuild the surface kernel from the two face corrections.

    The input-face correction is carried across the crystal by the free
    phases ``exp(i k_m_alpha L)``; creation operators are referred to the
    output plane with ``exp(i k_partner L)``. ``solver`` (``solve_continuity``
    or ``None`` for the closed forms) selects how the corrections are
    obtained. Both directions of the generated field contribute equally to
    the source because ``g`` does not depend on them.
    """
    sg = DIRECTION_SIGN
    ksa, kib, kpg = sg[alpha] * k_s, sg[beta] * k_i, sg[gamma] * k_p
    if field_label == "s":
        k_own, k_own_signed, k_partner_signed = k_s, ksa, kib
    elif field_label == "i":
        k_own, k_own_signed, k_partner_signed = k_i, kib, ksa
    else:
        raise ValueError("field_label must be 's' or 'i'")
    n_dirs = len(DIRECTIONS)
    if solver is None:
        d_in = n_dirs * boundary_correction_kernels("input", g, e_p, k_own)[0]
        d_out = n_dirs * boundary_correction_kernels(
            "output", g, e_p, k_own, kpg, k_partner_signed, length)[0]
    else:
        d_in = solver("input", k_own, n_dirs * g * e_p)[0]
        d_out = solver("output", k_own, n_dirs * g * e_p * np.exp(1j * kpg * length)
                       * np.exp(-1j * k_partner_signed * length))[0]
    to_output_plane = np.exp(1j * k_partner_signed * length)
    return (np.exp(1j * k_own_signed * length) * d_in + d_out) * to_output_plane


# --------------------------------------------------------------------------
# crystal configuration

@dataclass
class BulkConfig:
    """Homogeneous crystal of length ``length`` between linear media.

    ``polarizations`` maps ``"p"``, ``"s"``, ``"i"`` to dispersion branches of
    ``material``; ``ambient`` is the medium beyond the exit face.
    """

    material: Material
    length: float
    pump: PumpSpec
    d_eff: object = 1e-12
    polarizations: dict = field(default_factory=lambda: {"p": "o", "s": "o", "i": "o"})
    axis_angle: float | None = None
    ambient: Material | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("crystal length must be positive")
        self.d_eff = normalize_d_eff(self.d_eff)

    def index(self, which: str, omega):
        return refractive_index(self.material, omega, self.polarizations[which], self.axis_angle)

    def ambient_index(self, omega):
        if self.ambient is None:
            return np.ones_like(np.asarray(omega, dtype=float))
        return refractive_index(self.ambient, omega, "o")

    def k(self, which: str, omega):
        return wave_vector(self.index(which, omega), omega)

    def mismatch(self, channel, omega_s, omega_i):
        g, a, b = channel
        omega_s, omega_i = np.asarray(omega_s), np.asarray(omega_i)
        return phase_mismatch(g, a, b, self.k("p", omega_s + omega_i),
                              self.k("s", omega_s), self.k("i", omega_i))

    def kernels(self, omega_s, omega_i, channel=("F", "F", "F"), e_p=None):
        """Volume and surface kernels plus exit transmissivities.

        Returns a dict with ``volume``, ``surface_s``, ``surface_i``, ``t_s``,
        ``t_i``, ``ratio_s`` and ``ratio_i`` broadcast over the inputs.
        """
        gamma, alpha, beta = channel
        omega_s, omega_i = np.asarray(omega_s, float), np.asarray(omega_i, float)
        omega_p = omega_s + omega_i
        n_p, n_s, n_i = self.index("p", omega_p), self.index("s", omega_s), self.index("i", omega_i)
        k_p, k_s, k_i = (wave_vector(n_p, omega_p), wave_vector(n_s, omega_s),
                         wave_vector(n_i, omega_i))
        if e_p is None:
            e_p = self.pump.spectrum(omega_p)
        g = coupling_constant(self.d_eff[channel], omega_s, omega_i, n_s, n_i)
        sg = DIRECTION_SIGN
        dk = phase_mismatch(gamma, alpha, beta, k_p, k_s, k_i)
        vol = volume_amplitude(g, e_p, dk, sg[gamma] * k_p, self.length)
        surf = {m: surface_amplitude(g, e_p, sg[alpha] * k_s, sg[beta] * k_i, sg[gamma] * k_p,
                                     km, self.length)
                for m, km in (("s", k_s), ("i", k_i))}
        return {
            "volume": vol,
            "surface_s": surf["s"],
            "surface_i": surf["i"],
            "ratio_s": surface_volume_ratio(dk, k_s),
            "ratio_i": surface_volume_ratio(dk, k_i),
            "t_s": fresnel_transmissivity(n_s, self.ambient_index(omega_s)),
            "t_i": fresnel_transmissivity(n_i, self.ambient_index(omega_i)),
            "dk": dk,
        }


def _select(parts, contribution):
    vol = parts["volume"]
    if contribution == "volume":
        return vol, vol
    if contribution == "surface":
        return parts["surface_s"], parts["surface_i"]
    if contribution == "total":
        return vol + parts["surface_s"], vol + parts["surface_i"]
    raise ValueError(f"contribution must be volume, surface or total; got {contribution!r}")


def bulk_kernel_pair(cfg: BulkConfig, axis_s, axis_i=None, contribution="total",
                     channel=("F", "F", "F"), filters=(None, None)) -> KernelPair:
    """Output kernels ``t_s t_i F^m`` of one channel, optionally filtered.

    For a cw pump ``axis_i`` is ignored and the kernels live on the line
    ``omega_i = omega_p0 - omega_s``.
    """
    axis_s = np.asarray(axis_s, float)
    if cfg.pump.is_cw:
        ws, wi = axis_s, cfg.pump.omega_p0 - axis_s
    else:
        if axis_i is None:
            raise ValueError("pulsed kernels need an idler axis")
        ws, wi = axis_s[:, None], np.asarray(axis_i, float)[None, :]
    parts = cfg.kernels(ws, wi, channel)
    fs, fi = _select(parts, contribution)
    weight = parts["t_s"] * parts["t_i"]
    f_s, f_i = filters
    if f_s is not None:
        weight = weight * f_s(ws)
    if f_i is not None:
        weight = weight * f_i(wi)
    meta = {"source": "bulk", "channel": "".join(channel), "contribution": contribution}
    if cfg.pump.is_cw:
        return KernelPair(AmplitudeLine(axis_s, weight * fs, cfg.pump.omega_p0, "s", meta),
                          AmplitudeLine(axis_s, weight * fi, cfg.pump.omega_p0, "i", meta))
    return KernelPair(AmplitudeGrid(axis_s, axis_i, weight * fs, "s", meta),
                      AmplitudeGrid(axis_s, axis_i, weight * fi, "i", meta))


# --------------------------------------------------------------------------
# dispersion helpers

def phase_matching_angle(material: Material, polarizations: dict, omega_s: float,
                         omega_i: float, bracket=(0.0, math.pi / 2)) -> float:
    """Axis angle where the collinear forward mismatch vanishes."""
    omega_p = omega_s + omega_i

    def dk(theta):
        n = {w: refractive_index(material, om, polarizations[w], theta)
             for w, om in (("p", omega_p), ("s", omega_s), ("i", omega_i))}
        return (n["p"] * omega_p - n["s"] * omega_s - n["i"] * omega_i) / CONSTANTS.c

    return brentq(dk, *bracket, xtol=1e-12)


def _dk_domega(cfg: BulkConfig, which: str, omega: float) -> float:
    h = omega * 1e-5
    return (cfg.k(which, omega + h) - cfg.k(which, omega - h)) / (2 * h)


def group_delay_difference(cfg: BulkConfig, omega_s: float, omega_i: float) -> float:
    """``L (1/u_s - 1/u_i)``: signal minus idler transit time through the crystal."""
    return cfg.length * (_dk_domega(cfg, "s", omega_s) - _dk_domega(cfg, "i", omega_i))

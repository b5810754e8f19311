"""Photon-pair emission from 1D stacks of linear and chi(2) layers.

Field amplitudes in a medium are written ``A exp(i kz (z - z_ref)) +
B exp(-i kz (z - z_ref))``. Transfer matrices act on column vectors
``(A, B)`` and map the left side of an element to its right side::

    propagation over L:   diag(exp(i kz L), exp(-i kz L))
    boundary 1 -> 2:      0.5 * [[1 + a, 1 - a], [1 - a, 1 + a]],  a = p1 / p2

where ``p = n cos(theta) = c kz / omega`` (s polarisation). Layer ``l``
occupies ``[z_{l-1}, z_l]``; media are indexed 0 (input ambient), 1..N
(layers) and N + 1 (output ambient).

Pairs generated in layer ``l`` are described by amplitudes at ``z_l``; the
escape coefficients carry them to the outside, including every multiple
reflection in the stack (or only direct passage when
``multiple_reflections`` is off).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .amplitudes import AmplitudeGrid, AmplitudeLine, KernelPair
from .bulk import (CHANNELS, DIRECTIONS, PumpSpec, coupling_constant, normalize_d_eff,
                   phase_mismatch, volume_amplitude)
from .materials import (CONSTANTS, DIRECTION_SIGN, Material, TotalInternalReflection,
                        refractive_index)

__all__ = [
    "Layer",
    "LayerStack",
    "BoundaryMatrix",
    "PumpProfile",
    "boundary_matrix",
    "propagation_matrix",
    "interface_matrix",
    "field_kz",
    "transverse_wavevectors",
    "stack_matrix",
    "pump_profile",
    "escape_coefficients",
    "layer_amplitude",
    "assemble_output",
    "layered_kernel_pair",
    "surface_ratios",
]

_FIELD_KEYS = ("p", "s", "i")


@dataclass
class Layer:
    length: float
    material: Material
    d_eff: object = 0.0
    polarizations: dict = field(default_factory=lambda: {"p": "o", "s": "o", "i": "o"})
    axis_angle: float | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("layer length must be positive")
        self.d_eff = normalize_d_eff(self.d_eff)

    @property
    def nonlinear(self) -> bool:
        return any(v != 0.0 for v in self.d_eff.values())

    def index(self, which, omega):
        return refractive_index(self.material, omega, self.polarizations[which], self.axis_angle)


@dataclass
class LayerStack:
    layers: list
    ambient_in: Material
    ambient_out: Material
    signal_angle: float = 0.0  # external, measured in ambient_out
    pump_angle: float = 0.0  # external, measured in ambient_in
    polarization: str = "s"
    multiple_reflections: bool = True

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a stack needs at least one layer")
        if self.polarization != "s":
            raise ValueError("only s polarisation is supported")
        for a in (self.signal_angle, self.pump_angle):
            if not -np.pi / 2 < a < np.pi / 2:
                raise ValueError("incidence angles must lie in (-pi/2, pi/2)")

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([ly.length for ly in self.layers])])

    def media_index(self, which, omega):
        """Refractive indices of all media, ambient_in first."""
        out = [refractive_index(self.ambient_in, omega, "o")]
        out += [ly.index(which, omega) for ly in self.layers]
        out.append(refractive_index(self.ambient_out, omega, "o"))
        return out


# --------------------------------------------------------------------------
# 2x2 algebra on stacked arrays: a matrix is a tuple (m00, m01, m10, m11)

def _mul(a, b):
    return (a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3])


def _inv(a):
    det = a[0] * a[3] - a[1] * a[2]
    return (a[3] / det, -a[1] / det, -a[2] / det, a[0] / det)


def _as_array(m):
    return np.stack([np.stack([m[0], m[1]], -1), np.stack([m[2], m[3]], -1)], -2)


def _interface(kz1, kz2):
    a = kz1 / kz2
    return (0.5 * (1 + a), 0.5 * (1 - a), 0.5 * (1 - a), 0.5 * (1 + a))


def _propagation(kz, length):
    e = np.exp(1j * kz * length)
    z = np.zeros_like(e)
    return (e, z, z, 1.0 / e)


class BoundaryMatrix(NamedTuple):
    r: complex
    t: complex
    theta2: float
    matrix: np.ndarray


def boundary_matrix(n1, n2, theta1=0.0, pol="s") -> BoundaryMatrix:
    """Fresnel coefficients and transfer matrix of a planar boundary.

    ``r`` and ``t`` are for a wave incident from medium 1; ``matrix`` maps the
    ``(A, B)`` amplitudes on side 1 to those on side 2. Its determinant is
    ``n1 cos(theta1) / (n2 cos(theta2))``.
    """
    if pol != "s":
        raise ValueError("only s polarisation is supported")
    if n1 < 1 or n2 < 1:
        raise ValueError("indices must be >= 1")
    s2 = n1 * np.sin(theta1) / n2
    if abs(s2) >= 1:
        raise TotalInternalReflection("total internal reflection at boundary")
    theta2 = float(np.arcsin(s2))
    p1, p2 = n1 * np.cos(theta1), n2 * np.cos(theta2)
    r = (p1 - p2) / (p1 + p2)
    t = 2 * p1 / (p1 + p2)
    m = _as_array(_interface(np.asarray(p1, complex), np.asarray(p2, complex)))
    return BoundaryMatrix(r, t, theta2, m)


def interface_matrix(kz1, kz2):
    """Boundary matrix from z wave-vector components (arrays allowed)."""
    return _as_array(_interface(np.asarray(kz1, complex), np.asarray(kz2, complex)))


def propagation_matrix(kz, length):
    """``diag(exp(i kz L), exp(-i kz L))`` (arrays allowed)."""
    return _as_array(_propagation(np.asarray(kz, complex), length))


# --------------------------------------------------------------------------
# geometry

def transverse_wavevectors(stack: LayerStack, omega_s, omega_i):
    """Transverse wave vectors ``(Q_p, Q_s, Q_i)``, conserved across the stack."""
    c = CONSTANTS.c
    omega_s, omega_i = np.asarray(omega_s, float), np.asarray(omega_i, float)
    omega_p = omega_s + omega_i
    q_p = omega_p / c * refractive_index(stack.ambient_in, omega_p, "o") * np.sin(stack.pump_angle)
    q_s = omega_s / c * refractive_index(stack.ambient_out, omega_s, "o") * np.sin(stack.signal_angle)
    return q_p, q_s, q_p - q_s


def field_kz(stack: LayerStack, which: str, omega, q):
    """Positive z components of the wave vector in every medium."""
    omega = np.asarray(omega, float)
    out = []
    for n in stack.media_index(which, omega):
        k2 = (n * omega / CONSTANTS.c) ** 2 - np.asarray(q) ** 2
        if np.any(k2 <= 0):
            raise TotalInternalReflection(f"field '{which}' is evanescent inside the stack")
        out.append(np.sqrt(k2))
    return out


def _lengths(stack):
    return [ly.length for ly in stack.layers]


def stack_matrix(kz, lengths):
    """Global matrix from ambient_in (at z_0) to ambient_out (at z_N)."""
    m = _interface(kz[0], kz[1])
    for l, length in enumerate(lengths, start=1):
        m = _mul(_propagation(kz[l], length), m)
        m = _mul(_interface(kz[l], kz[l + 1]), m)
    return m


# --------------------------------------------------------------------------
# pump

@dataclass
class PumpProfile:
    start: np.ndarray  # (N, ..., 2) forward/backward amplitudes at z_{l-1}+
    end: np.ndarray  # (N, ..., 2) amplitudes at z_l-
    r: np.ndarray
    t: np.ndarray
    kz: list


def _pump_iter(kz, lengths, amplitude, reflections):
    if reflections:
        s = stack_matrix(kz, lengths)
        r = -s[2] / s[3]
        t = s[0] + s[1] * r
        v = (amplitude * np.ones_like(r), amplitude * r)
        for l, length in enumerate(lengths, start=1):
            d = _interface(kz[l - 1], kz[l])
            v = (d[0] * v[0] + d[1] * v[1], d[2] * v[0] + d[3] * v[1])
            p = _propagation(kz[l], length)
            end = (p[0] * v[0], p[3] * v[1])
            yield l, v, end, amplitude * r, amplitude * t
            v = end
    else:
        a = amplitude * np.ones_like(kz[0], dtype=complex)
        for l, length in enumerate(lengths, start=1):
            a = a * 2 * kz[l - 1] / (kz[l - 1] + kz[l])
            start = (a, np.zeros_like(a))
            a = a * np.exp(1j * kz[l] * length)
            yield l, start, (a, np.zeros_like(a)), np.zeros_like(a), a * 2 * kz[-2] / (kz[-2] + kz[-1]) if l == len(lengths) else None


def pump_profile(stack: LayerStack, omega_p, amplitude=1.0) -> PumpProfile:
    """Forward/backward pump amplitudes inside every layer.

    The pump enters from ``ambient_in`` with amplitude ``amplitude``; nothing
    enters from ``ambient_out``. ``r`` and ``t`` are the stack's amplitude
    reflection and transmission.
    """
    omega_p = np.asarray(omega_p, float)
    q = omega_p / CONSTANTS.c * refractive_index(stack.ambient_in, omega_p, "o") * np.sin(stack.pump_angle)
    kz = field_kz(stack, "p", omega_p, q)
    starts, ends = [], []
    r = t = None
    for _, st, en, rr, tt in _pump_iter(kz, _lengths(stack), amplitude, stack.multiple_reflections):
        starts.append(np.stack(np.broadcast_arrays(*st), -1))
        ends.append(np.stack(np.broadcast_arrays(*en), -1))
        r = rr
        t = tt if tt is not None else t
    return PumpProfile(np.array(starts), np.array(ends), np.asarray(r), np.asarray(t), kz)


# --------------------------------------------------------------------------
# escape coefficients

def _escape_iter(kz, lengths, reflections):
    """Yield ``(l, T)`` with ``T[(out, src)]`` for every layer, in order.

    A pair source in layer ``l`` injects a forward wave to the right of
    ``z_l`` and a backward wave to its left, i.e. a jump ``(s_F, -s_B)`` in
    the ``(A, B)`` amplitudes at ``z_l``. Outgoing amplitudes are referenced
    to ``z_N`` (forward, ambient_out) and ``z_0`` (backward, ambient_in).
    """
    n = len(lengths)
    if reflections:
        s = stack_matrix(kz, lengths)
        m = _interface(kz[0], kz[1])
        for l, length in enumerate(lengths, start=1):
            m = _mul(_propagation(kz[l], length), m)
            rmat = _mul(s, _inv(m))
            b_f = -rmat[2] / s[3]
            b_b = rmat[3] / s[3]
            yield l, {
                ("F", "F"): rmat[0] + s[1] * b_f,
                ("B", "F"): b_f,
                ("F", "B"): -rmat[1] + s[1] * b_b,
                ("B", "B"): b_b,
            }
            if l < n:
                m = _mul(_interface(kz[l], kz[l + 1]), m)
        return

    def t_right(j):  # interface j -> j + 1
        return 2 * kz[j] / (kz[j] + kz[j + 1])

    def t_left(j):  # interface j + 1 -> j
        return 2 * kz[j + 1] / (kz[j] + kz[j + 1])

    forward_all = t_right(n)
    for j in range(n - 1, 0, -1):
        forward_all = forward_all * np.exp(1j * kz[j + 1] * lengths[j]) * t_right(j)
    prefix = np.ones_like(forward_all)
    backward = None
    for l, length in enumerate(lengths, start=1):
        if l > 1:
            prefix = prefix * t_right(l - 1) * np.exp(1j * kz[l] * length)
        phase = np.exp(1j * kz[l] * length)
        backward = phase * t_left(l - 1) if backward is None else phase * t_left(l - 1) * backward
        zero = np.zeros_like(forward_all)
        yield l, {("F", "F"): forward_all / prefix, ("B", "F"): zero,
                  ("F", "B"): zero, ("B", "B"): backward}


def escape_coefficients(stack: LayerStack, which: str, omega, q=0.0):
    """Escape coefficients of all layers, shape ``(N, ..., 2, 2)``.

    Index order is ``[layer, ..., out_direction, source_direction]`` with
    directions ordered ``(F, B)``.
    """
    kz = field_kz(stack, which, omega, q)
    out = []
    for _, t in _escape_iter(kz, _lengths(stack), stack.multiple_reflections):
        out.append(_as_array(np.broadcast_arrays(t[("F", "F")], t[("F", "B")],
                                                 t[("B", "F")], t[("B", "B")])))
    return np.array(out)


# --------------------------------------------------------------------------
# per-layer kernels

def _factor(contribution, ratio):
    if contribution == "volume":
        return 1.0
    if contribution == "surface":
        return ratio
    if contribution == "total":
        return 1.0 + ratio
    raise ValueError(f"contribution must be volume, surface or total; got {contribution!r}")


def layer_amplitude(layer: Layer, pump_start, omega_s, omega_i, kz_p, kz_s, kz_i,
                    alpha, beta, contribution="total"):
    """Kernels ``{o: F^{o,(l)}_{alpha beta}}`` of one layer for o in s, i.

    ``pump_start`` holds the forward and backward pump amplitudes at the
    layer's left edge (last axis); ``kz_*`` are positive z components inside
    the layer.
    """
    sg = DIRECTION_SIGN
    n_s, n_i = layer.index("s", omega_s), layer.index("i", omega_i)
    out = {"s": 0.0, "i": 0.0}
    for gi, gamma in enumerate(DIRECTIONS):
        d = layer.d_eff[(gamma, alpha, beta)]
        if d == 0.0:
            continue
        g = coupling_constant(d, omega_s, omega_i, n_s, n_i)
        dk = phase_mismatch(gamma, alpha, beta, kz_p, kz_s, kz_i)
        vol = volume_amplitude(g, pump_start[..., gi], dk, sg[gamma] * kz_p, layer.length)
        out["s"] = out["s"] + _factor(contribution, dk / kz_s) * vol
        out["i"] = out["i"] + _factor(contribution, dk / kz_i) * vol
    return out


def assemble_output(stack: LayerStack, pump: PumpSpec, omega_s, omega_i, contribution="total",
                    directions=(("F", "F"),)):
    """Output kernels ``{(o, alpha, beta): F^{o,out}_{alpha beta}}``.

    Superposes the pairs created in every nonlinear layer, each carried out
    of the stack by the signal and idler escape coefficients. Summation order
    is fixed (layer, then source directions) so results are reproducible.
    """
    omega_s, omega_i = np.broadcast_arrays(np.asarray(omega_s, float), np.asarray(omega_i, float))
    omega_p = omega_s + omega_i
    q_p, q_s, q_i = transverse_wavevectors(stack, omega_s, omega_i)
    kz_p = field_kz(stack, "p", omega_p, q_p)
    kz_s = field_kz(stack, "s", omega_s, q_s)
    kz_i = field_kz(stack, "i", omega_i, q_i)
    lengths = _lengths(stack)
    refl = stack.multiple_reflections
    e_p = pump.spectrum(omega_p)

    out = {(o, a, b): np.zeros(omega_s.shape, complex) for o in ("s", "i") for a, b in directions}
    pumps = _pump_iter(kz_p, lengths, 1.0, refl)
    esc_s = _escape_iter(kz_s, lengths, refl)
    esc_i = _escape_iter(kz_i, lengths, refl)
    for layer, (l, start, _, _, _), (_, ts), (_, ti) in zip(stack.layers, pumps, esc_s, esc_i):
        if not layer.nonlinear:
            continue
        p_start = np.stack(np.broadcast_arrays(start[0] * e_p, start[1] * e_p), -1)
        for a_src in DIRECTIONS:
            for b_src in DIRECTIONS:
                f = layer_amplitude(layer, p_start, omega_s, omega_i, kz_p[l], kz_s[l], kz_i[l],
                                    a_src, b_src, contribution)
                for a, b in directions:
                    w = ts[(a, a_src)] * ti[(b, b_src)]
                    out[("s", a, b)] += w * f["s"]
                    out[("i", a, b)] += w * f["i"]
    return out


def layered_kernel_pair(stack: LayerStack, pump: PumpSpec, axis_s, axis_i=None,
                        contribution="total", directions=("F", "F"),
                        filters=(None, None)) -> KernelPair:
    """Signal/idler output kernels for one pair of exit directions."""
    axis_s = np.asarray(axis_s, float)
    if pump.is_cw:
        ws, wi = axis_s, pump.omega_p0 - axis_s
    else:
        if axis_i is None:
            raise ValueError("pulsed kernels need an idler axis")
        ws, wi = axis_s[:, None], np.asarray(axis_i, float)[None, :]
    k = assemble_output(stack, pump, ws, wi, contribution, (tuple(directions),))
    a, b = directions
    fs, fi = k[("s", a, b)], k[("i", a, b)]
    f_s, f_i = filters
    if f_s is not None:
        fs, fi = fs * f_s(ws), fi * f_s(ws)
    if f_i is not None:
        fs, fi = fs * f_i(wi), fi * f_i(wi)
    meta = {"source": "layered", "directions": a + b, "contribution": contribution}
    if pump.is_cw:
        return KernelPair(AmplitudeLine(axis_s, fs, pump.omega_p0, "s", meta),
                          AmplitudeLine(axis_s, fi, pump.omega_p0, "i", meta))
    return KernelPair(AmplitudeGrid(axis_s, axis_i, fs, "s", meta),
                      AmplitudeGrid(axis_s, axis_i, fi, "i", meta))


def surface_ratios(layer: Layer, omega_s, omega_i, q_s=0.0, q_i=0.0, q_p=0.0):
    """Surface-to-volume ratios ``{(o, gamma, alpha, beta): dk / k_o}`` in one layer."""
    c = CONSTANTS.c
    omega_s, omega_i = np.asarray(omega_s, float), np.asarray(omega_i, float)

    def kz(which, omega, q):
        return np.sqrt((layer.index(which, omega) * omega / c) ** 2 - np.asarray(q) ** 2)

    k_p, k_s, k_i = kz("p", omega_s + omega_i, q_p), kz("s", omega_s, q_s), kz("i", omega_i, q_i)
    out = {}
    for ch in CHANNELS:
        dk = phase_mismatch(*ch, k_p, k_s, k_i)
        out[("s",) + ch] = dk / k_s
        out[("i",) + ch] = dk / k_i
    return out

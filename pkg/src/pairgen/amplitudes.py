"""Containers for sampled two-photon amplitudes and spectral filters."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .materials import CONSTANTS
from .numerics import GridError

__all__ = [
    "AmplitudeGrid",
    "AmplitudeLine",
    "KernelPair",
    "GaussianFilter",
    "CONTRIBUTIONS",
]

CONTRIBUTIONS = ("volume", "surface", "total")


@dataclass
class AmplitudeGrid:
    """Complex kernel sampled on a rectangular ``(omega_s, omega_i)`` grid."""

    axis_s: np.ndarray
    axis_i: np.ndarray
    values: np.ndarray
    field_label: str = "s"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis_s = np.asarray(self.axis_s, dtype=float)
        self.axis_i = np.asarray(self.axis_i, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.axis_s.size, self.axis_i.size):
            raise GridError(f"values shape {self.values.shape} does not match axes "
                            f"({self.axis_s.size}, {self.axis_i.size})")
        for ax in (self.axis_s, self.axis_i):
            if ax.size < 2 or np.any(np.diff(ax) <= 0):
                raise GridError("axes must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise GridError("kernel has non-finite entries")

    def replace(self, values, **meta) -> AmplitudeGrid:
        return AmplitudeGrid(self.axis_s, self.axis_i, values, self.field_label,
                             {**self.meta, **meta})


@dataclass
class AmplitudeLine:
    """Kernel of a cw-pumped source, living on ``omega_i = omega_p0 - omega_s``.

    The pump delta line is integrated out; ``values[k]`` is the weight at
    ``(axis_s[k], omega_p0 - axis_s[k])``.
    """

    axis_s: np.ndarray
    values: np.ndarray
    omega_p0: float
    field_label: str = "s"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis_s = np.asarray(self.axis_s, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.axis_s.shape or self.axis_s.ndim != 1:
            raise GridError("values must be 1-D and match axis_s")
        if self.axis_s.size < 2 or np.any(np.diff(self.axis_s) <= 0):
            raise GridError("axis_s must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise GridError("kernel has non-finite entries")

    @property
    def axis_i(self) -> np.ndarray:
        return self.omega_p0 - self.axis_s

    def replace(self, values, **meta) -> AmplitudeLine:
        return AmplitudeLine(self.axis_s, values, self.omega_p0, self.field_label,
                             {**self.meta, **meta})


class KernelPair(NamedTuple):
    """Signal- and idler-referenced kernels entering every observable."""

    fs: AmplitudeGrid | AmplitudeLine
    fi: AmplitudeGrid | AmplitudeLine


@dataclass(frozen=True)
class GaussianFilter:
    """Gaussian amplitude filter whose intensity transmission has FWHM ``fwhm``."""

    center: float  # rad/s
    fwhm: float  # rad/s, intensity

    @classmethod
    def from_wavelength(cls, center_wavelength: float, fwhm_wavelength: float):
        c = CONSTANTS.c
        center = 2 * np.pi * c / center_wavelength
        return cls(center, 2 * np.pi * c * fwhm_wavelength / center_wavelength ** 2)

    @property
    def sigma(self) -> float:
        """Standard deviation of the amplitude profile."""
        return self.fwhm / (2 * np.sqrt(np.log(2)))

    def __call__(self, omega):
        x = (np.asarray(omega, dtype=float) - self.center) / self.sigma
        return np.exp(-0.5 * x ** 2)

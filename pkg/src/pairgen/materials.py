"""Dispersion models, material database and wave vectors.

All quantities are SI internally: angular frequencies in rad/s, lengths in m.
Sellmeier coefficients are stored the way they are published, with
wavelengths in micrometres:

    n^2 = A + sum_j B_j * lam^2 / (lam^2 - C_j),   lam in um, C_j in um^2

``A`` defaults to 1 when a file omits it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import constants as _sc

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "SellmeierSet",
    "Material",
    "ModeSpec",
    "MaterialError",
    "DispersionRangeError",
    "TotalInternalReflection",
    "load_material_db",
    "default_db_path",
    "refractive_index",
    "wave_vector",
    "snell_angle",
    "omega_from_wavelength",
    "wavelength_from_omega",
    "DIRECTION_SIGN",
]

DIRECTION_SIGN = {"F": 1.0, "B": -1.0}
VACUUM_NAME = "vacuum"


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = _sc.c
    hbar: float = _sc.hbar
    eps0: float = _sc.epsilon_0
    mu0: float = _sc.mu_0


CONSTANTS = PhysicalConstants()


class MaterialError(ValueError):
    """Malformed material file or a material violating its invariants."""


class DispersionRangeError(ValueError):
    """Requested wavelength lies outside a material's validity range."""


class TotalInternalReflection(ValueError):
    """A field would become evanescent; such channels are not modelled."""


@dataclass(frozen=True)
class SellmeierSet:
    B: tuple[float, ...]
    C: tuple[float, ...]
    A: float = 1.0

    def n_squared(self, lam_um):
        lam2 = np.asarray(lam_um, dtype=float) ** 2
        out = np.full_like(lam2, self.A)
        for b, c in zip(self.B, self.C):
            out = out + b * lam2 / (lam2 - c)
        return out


@dataclass(frozen=True)
class Material:
    name: str
    sellmeier: dict[str, SellmeierSet]
    validity_um: tuple[float, float]
    uniaxial: bool = False
    provenance: str = ""

    @property
    def is_vacuum(self) -> bool:
        return self.name.lower() == VACUUM_NAME

    @property
    def polarizations(self) -> tuple[str, ...]:
        return tuple(self.sellmeier)


@dataclass(frozen=True)
class ModeSpec:
    field: str  # "pump" | "signal" | "idler"
    direction: str = "F"
    polarization: str = "o"
    propagation_angle: float = 0.0

    def __post_init__(self):
        if self.field not in ("pump", "signal", "idler"):
            raise ValueError(f"unknown field {self.field!r}")
        if self.direction not in DIRECTION_SIGN:
            raise ValueError(f"direction must be F or B, got {self.direction!r}")
        if not 0.0 <= self.propagation_angle < math.pi / 2:
            raise ValueError("propagation_angle must lie in [0, pi/2)")


# --------------------------------------------------------------------------
# file ingestion

_MATERIAL_KEYS = {"name", "uniaxial", "validity_um", "sellmeier", "provenance"}
_SET_KEYS = {"A", "B", "C"}


def default_db_path() -> Path:
    """Shipped database, overridable through ``PAIRGEN_MATERIALS``."""
    import os

    env = os.environ.get("PAIRGEN_MATERIALS")
    if env:
        return Path(env)
    return Path(str(resources.files("pairgen") / "data" / "materials.json"))


def _parse_material(entry, where: str) -> Material:
    if not isinstance(entry, dict):
        raise MaterialError(f"{where}: material entry must be an object")
    unknown = set(entry) - _MATERIAL_KEYS
    if unknown:
        raise MaterialError(f"{where}: unknown key(s) {sorted(unknown)}")
    if "name" not in entry or not isinstance(entry["name"], str) or not entry["name"]:
        raise MaterialError(f"{where}: missing or empty 'name'")
    name = entry["name"]
    where = f"{where} ({name})"
    for key in ("validity_um", "sellmeier"):
        if key not in entry:
            raise MaterialError(f"{where}: missing '{key}'")

    rng = entry["validity_um"]
    if (not isinstance(rng, (list, tuple)) or len(rng) != 2
            or not all(isinstance(v, (int, float)) for v in rng)):
        raise MaterialError(f"{where}: validity_um must be [lo, hi]")
    lo, hi = float(rng[0]), float(rng[1])
    if not 0.0 < lo < hi:
        raise MaterialError(f"{where}: validity_um must satisfy 0 < lo < hi")

    raw_sets = entry["sellmeier"]
    if not isinstance(raw_sets, dict) or not raw_sets:
        raise MaterialError(f"{where}: empty sellmeier set")
    sets = {}
    for pol, coeffs in raw_sets.items():
        if not isinstance(coeffs, dict):
            raise MaterialError(f"{where}: sellmeier.{pol} must be an object")
        unknown = set(coeffs) - _SET_KEYS
        if unknown:
            raise MaterialError(f"{where}: sellmeier.{pol}: unknown key(s) {sorted(unknown)}")
        B = coeffs.get("B", [])
        C = coeffs.get("C", [])
        if not B or not C:
            raise MaterialError(f"{where}: empty sellmeier set '{pol}'")
        if len(B) != len(C):
            raise MaterialError(f"{where}: sellmeier.{pol}: B and C lengths differ")
        sets[pol] = SellmeierSet(tuple(map(float, B)), tuple(map(float, C)),
                                 float(coeffs.get("A", 1.0)))

    uniaxial = bool(entry.get("uniaxial", False))
    if uniaxial and not {"o", "e"} <= set(sets):
        raise MaterialError(f"{where}: uniaxial material needs 'o' and 'e' sets")
    mat = Material(name, sets, (lo, hi), uniaxial, str(entry.get("provenance", "")))
    _check_invariants(mat)
    return mat


def _check_invariants(mat: Material, samples: int = 64) -> None:
    lam = np.linspace(*mat.validity_um, samples)
    for pol, s in mat.sellmeier.items():
        n2 = s.n_squared(lam)
        if mat.is_vacuum:
            ok = np.allclose(n2, 1.0, rtol=0, atol=1e-15)
        else:
            ok = np.all(np.isfinite(n2)) and np.all(n2 > 1.0)
        if not ok:
            raise MaterialError(
                f"material {mat.name!r}: index of '{pol}' is not real and > 1 "
                f"over validity range {mat.validity_um} um")


def load_material_db(path=None) -> dict[str, Material]:
    """Read a material file into a ``name -> Material`` mapping.

    The file holds ``{"materials": [...]}`` (a bare list is accepted too).
    An empty file is an empty database.
    """
    path = Path(path) if path is not None else default_db_path()
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        return {}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MaterialError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(doc, dict):
        unknown = set(doc) - {"materials"}
        if unknown:
            raise MaterialError(f"{path}: unknown top-level key(s) {sorted(unknown)}")
        entries = doc.get("materials", [])
    else:
        entries = doc
    if not isinstance(entries, list):
        raise MaterialError(f"{path}: 'materials' must be a list")
    db = {}
    for k, entry in enumerate(entries):
        mat = _parse_material(entry, f"{path}: materials[{k}]")
        if mat.name in db:
            raise MaterialError(f"{path}: duplicate material {mat.name!r}")
        db[mat.name] = mat
    return db


# --------------------------------------------------------------------------
# dispersion

def wavelength_from_omega(omega):
    return 2 * np.pi * CONSTANTS.c / np.asarray(omega, dtype=float)


def omega_from_wavelength(lam):
    return 2 * np.pi * CONSTANTS.c / np.asarray(lam, dtype=float)


def refractive_index(mat: Material, omega, pol: str = "o", axis_angle=None):
    """Refractive index of ``mat`` at angular frequency ``omega``.

    For the extraordinary ray of a uniaxial crystal ``axis_angle`` is the
    angle between the optical axis and the propagation direction, and

        1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2 .

    Accepts scalars or arrays; returns the same shape.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    if mat.is_vacuum:
        out = np.ones_like(omega)
        return out if out.ndim else float(out)

    lam_um = wavelength_from_omega(omega) * 1e6
    lo, hi = mat.validity_um
    if np.any(lam_um < lo) or np.any(lam_um > hi):
        raise DispersionRangeError(
            f"{mat.name}: wavelength {np.min(lam_um):.4g}-{np.max(lam_um):.4g} um "
            f"outside validity range [{lo}, {hi}] um")
    if pol not in mat.sellmeier:
        raise ValueError(f"{mat.name}: no dispersion data for polarization {pol!r}")

    if pol == "e" and mat.uniaxial:
        if axis_angle is None:
            raise ValueError(f"{mat.name}: axis_angle is required for the extraordinary ray")
        no2 = mat.sellmeier["o"].n_squared(lam_um)
        ne2 = mat.sellmeier["e"].n_squared(lam_um)
        inv = np.cos(axis_angle) ** 2 / no2 + np.sin(axis_angle) ** 2 / ne2
        out = 1.0 / np.sqrt(inv)
    else:
        out = np.sqrt(mat.sellmeier[pol].n_squared(lam_um))
    return out if out.ndim else float(out)


def wave_vector(n, omega, direction: str = "F", angle=0.0):
    """Signed z-component ``sign * n * omega * cos(angle) / c``."""
    sign = DIRECTION_SIGN[direction]
    return sign * np.asarray(n) * np.asarray(omega) * np.cos(angle) / CONSTANTS.c


def snell_angle(n1, theta1, n2):
    """Refracted angle from ``n1 sin(theta1) = n2 sin(theta2)``."""
    s = np.asarray(n1) * np.sin(theta1) / np.asarray(n2)
    if np.any(np.abs(s) >= 1.0):
        raise TotalInternalReflection("refracted field is evanescent")
    return np.arcsin(s)

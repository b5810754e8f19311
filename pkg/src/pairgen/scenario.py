"""Scenario files: unit-suffixed JSON resolved into SI simulation objects.

Validation walks the whole document before anything is computed and
reports the first problem together with its field path, e.g.
``layers[3].length: must be positive``.
"""
from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .amplitudes import CONTRIBUTIONS, GaussianFilter
from .bulk import CHANNELS, BulkConfig, PumpSpec, phase_matching_angle
from .layered import Layer, LayerStack
from .materials import (DispersionRangeError, MaterialError, load_material_db,
                        omega_from_wavelength, refractive_index, wavelength_from_omega)

__all__ = [
    "ScenarioError",
    "parse_quantity",
    "GridSpec",
    "OutputSpec",
    "Variant",
    "Scenario",
    "load_scenario",
    "resolve_scenario",
    "OUTPUT_TYPES",
]

OUTPUT_TYPES = ("spectrum", "joint_density", "temporal", "flux", "hom", "schmidt", "pair_number")


class ScenarioError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


# --------------------------------------------------------------------------
# units

_UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "μm": 1e-6, "nm": 1e-9},
    "time": {"s": 1.0, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15},
    "angle": {"rad": 1.0, "deg": math.pi / 180},
    "d_eff": {"m/V": 1.0, "pm/V": 1e-12},
}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(value, kind: str, path: str = "") -> float:
    """Convert ``"400 nm"``-style strings (or bare SI numbers) to SI floats."""
    if isinstance(value, bool):
        raise ScenarioError(path, f"expected a {kind} quantity, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ScenarioError(path, f"expected a {kind} quantity, got {value!r}")
    m = _QUANTITY.match(value)
    if not m:
        raise ScenarioError(path, f"cannot parse quantity {value!r}")
    number, unit = float(m.group(1)), m.group(2)
    units = _UNITS[kind]
    if unit == "":
        return number
    if unit not in units:
        raise ScenarioError(path, f"unknown {kind} unit {unit!r} (allowed: {', '.join(units)})")
    return number * units[unit]


# --------------------------------------------------------------------------
# resolved objects

@dataclass
class GridSpec:
    count: int = 256
    window_widths: float = 6.0
    reference_fwhm: float = 30e-9  # m, sets the window when no filter is given
    pad: int = 4


@dataclass
class OutputSpec:
    type: str
    options: dict = field(default_factory=dict)


@dataclass
class Variant:
    label: str
    geometry: object  # BulkConfig | LayerStack
    parameter: float | None = None


@dataclass
class Scenario:
    name: str
    kind: str
    pump: PumpSpec
    grid: GridSpec
    filters: tuple
    contributions: tuple
    outputs: list
    variants: list
    directions: tuple = ("F", "F")
    channel: tuple = ("F", "F", "F")
    sweep_parameter: str | None = None
    resolved: dict = field(default_factory=dict)

    @property
    def omega_center(self) -> float:
        return 0.5 * self.pump.omega_p0

    def halfwidth(self) -> float:
        f = self.filters[0] or self.filters[1]
        if f is not None:
            return self.grid.window_widths * f.sigma
        ref = GaussianFilter.from_wavelength(float(wavelength_from_omega(self.omega_center)),
                                             self.grid.reference_fwhm)
        return self.grid.window_widths * ref.sigma


# --------------------------------------------------------------------------
# helpers for walking the raw document

def _require(d, key, path):
    if key not in d:
        raise ScenarioError(f"{path}.{key}" if path else key, "missing required field")
    return d[key]


def _check_keys(d, allowed, path):
    if not isinstance(d, dict):
        raise ScenarioError(path, "expected an object")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ScenarioError(path, f"unknown key(s) {unknown}")


def _join(path, key):
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _set_path(doc, dotted: str, value):
    """Assign ``value`` at a path like ``layered.layers[0].length``."""
    tokens = re.findall(r"[^.\[\]]+|\[\d+\]", dotted)
    cur = doc
    for tok, nxt in zip(tokens, tokens[1:] + [None]):
        key = int(tok[1:-1]) if tok.startswith("[") else tok
        if nxt is None:
            cur[key] = value
        else:
            cur = cur[key]


# --------------------------------------------------------------------------
# sections

_TOP_KEYS = {"name", "kind", "description", "materials_path", "pump", "bulk", "layered", "grid",
             "filters", "contribution", "contributions", "outputs", "variants", "sweep"}


def _pump(raw, path):
    _check_keys(raw, {"kind", "wavelength", "duration", "amplitude_scale", "direction"}, path)
    kind = _require(raw, "kind", path)
    if kind not in ("cw", "gaussian_pulse"):
        raise ScenarioError(_join(path, "kind"), "must be 'cw' or 'gaussian_pulse'")
    lam = parse_quantity(_require(raw, "wavelength", path), "length", _join(path, "wavelength"))
    if not lam > 0:
        raise ScenarioError(_join(path, "wavelength"), "must be positive")
    duration = None
    if kind == "gaussian_pulse":
        duration = parse_quantity(_require(raw, "duration", path), "time", _join(path, "duration"))
        if not duration > 0:
            raise ScenarioError(_join(path, "duration"), "must be positive")
    direction = raw.get("direction", "F")
    if direction not in ("F", "B"):
        raise ScenarioError(_join(path, "direction"), "must be 'F' or 'B'")
    scale = raw.get("amplitude_scale", 1.0)
    if not isinstance(scale, (int, float)) or not scale > 0:
        raise ScenarioError(_join(path, "amplitude_scale"), "must be a positive number")
    return PumpSpec(kind, float(omega_from_wavelength(lam)), duration, float(scale), direction)


def _material(db, name, path):
    if not isinstance(name, str) or name not in db:
        raise ScenarioError(path, f"unknown material {name!r} (known: {', '.join(sorted(db))})")
    return db[name]


def _polarizations(raw, mat, path):
    pols = {"p": "o", "s": "o", "i": "o"}
    if raw is None:
        return pols
    _check_keys(raw, {"p", "s", "i"}, path)
    for k, v in raw.items():
        if v not in mat.sellmeier:
            raise ScenarioError(_join(path, k), f"{mat.name} has no {v!r} dispersion branch")
        pols[k] = v
    return pols


def _d_eff(raw, path):
    if isinstance(raw, dict):
        out = {}
        for key, val in raw.items():
            if key not in {"".join(c) for c in CHANNELS}:
                raise ScenarioError(_join(path, key), "channel keys look like 'FFF' or 'BFB'")
            out[key] = parse_quantity(val, "d_eff", _join(path, key))
        return out
    return parse_quantity(raw, "d_eff", path)


def _bulk(raw, db, pump, path):
    _check_keys(raw, {"material", "length", "d_eff", "polarizations", "axis_angle", "ambient",
                      "channel"}, path)
    mat = _material(db, _require(raw, "material", path), _join(path, "material"))
    length = parse_quantity(_require(raw, "length", path), "length", _join(path, "length"))
    if not length > 0:
        raise ScenarioError(_join(path, "length"), "must be positive")
    pols = _polarizations(raw.get("polarizations"), mat, _join(path, "polarizations"))
    angle = raw.get("axis_angle")
    if angle == "phase_matched":
        w = 0.5 * pump.omega_p0
        try:
            angle = phase_matching_angle(mat, pols, w, w, (1e-6, math.pi / 2 - 1e-6))
        except ValueError as exc:
            raise ScenarioError(_join(path, "axis_angle"), f"no phase-matching angle: {exc}")
    elif angle is not None:
        angle = parse_quantity(angle, "angle", _join(path, "axis_angle"))
    if "e" in pols.values() and mat.uniaxial and angle is None:
        raise ScenarioError(_join(path, "axis_angle"), "required for an extraordinary field")
    ambient = _material(db, raw.get("ambient", "vacuum"), _join(path, "ambient"))
    channel = raw.get("channel", "FFF")
    if channel not in {"".join(c) for c in CHANNELS}:
        raise ScenarioError(_join(path, "channel"), "must look like 'FFF'")
    d = _d_eff(raw.get("d_eff", "1 pm/V"), _join(path, "d_eff"))
    try:
        cfg = BulkConfig(mat, length, pump, d, pols, angle, ambient)
    except ValueError as exc:
        raise ScenarioError(path, str(exc))
    return cfg, tuple(channel)


def _layer(raw, db, path):
    _check_keys(raw, {"material", "length", "d_eff", "polarizations", "axis_angle"}, path)
    mat = _material(db, _require(raw, "material", path), _join(path, "material"))
    length = parse_quantity(_require(raw, "length", path), "length", _join(path, "length"))
    if not length > 0:
        raise ScenarioError(_join(path, "length"), "must be positive")
    pols = _polarizations(raw.get("polarizations"), mat, _join(path, "polarizations"))
    angle = raw.get("axis_angle")
    if angle is not None:
        angle = parse_quantity(angle, "angle", _join(path, "axis_angle"))
    if "e" in pols.values() and mat.uniaxial and angle is None:
        raise ScenarioError(_join(path, "axis_angle"), "required for an extraordinary field")
    d = _d_eff(raw.get("d_eff", 0.0), _join(path, "d_eff"))
    try:
        return Layer(length, mat, d, pols, angle)
    except ValueError as exc:
        raise ScenarioError(path, str(exc))


def _layers(items, db, path):
    if not isinstance(items, list) or not items:
        raise ScenarioError(path, "must be a non-empty list")
    out = []
    for k, item in enumerate(items):
        p = _join(path, k)
        if isinstance(item, dict) and "repeat" in item:
            _check_keys(item, {"repeat", "layers", "drop_last"}, p)
            n = item["repeat"]
            if not isinstance(n, int) or n < 1:
                raise ScenarioError(_join(p, "repeat"), "must be a positive integer")
            cell = _layers(_require(item, "layers", p), db, _join(p, "layers"))
            block = cell * n
            drop = item.get("drop_last", 0)
            if not isinstance(drop, int) or not 0 <= drop < len(block):
                raise ScenarioError(_join(p, "drop_last"), "must be an integer below the block size")
            out.extend(block[: len(block) - drop])
        else:
            out.append(_layer(item, db, p))
    return out


def _layered(raw, db, path):
    _check_keys(raw, {"layers", "ambient_in", "ambient_out", "signal_angle", "pump_angle",
                      "polarization", "multiple_reflections", "directions"}, path)
    layers = _layers(_require(raw, "layers", path), db, _join(path, "layers"))
    amb_in = _material(db, raw.get("ambient_in", "vacuum"), _join(path, "ambient_in"))
    amb_out = _material(db, raw.get("ambient_out", "vacuum"), _join(path, "ambient_out"))
    angles = {}
    for key in ("signal_angle", "pump_angle"):
        a = parse_quantity(raw.get(key, 0.0), "angle", _join(path, key))
        if not -math.pi / 2 < a < math.pi / 2:
            raise ScenarioError(_join(path, key), "must lie strictly between -90 and 90 deg")
        angles[key] = a
    pol = raw.get("polarization", "s")
    if pol != "s":
        raise ScenarioError(_join(path, "polarization"), "only 's' is supported")
    refl = raw.get("multiple_reflections", True)
    if not isinstance(refl, bool):
        raise ScenarioError(_join(path, "multiple_reflections"), "must be true or false")
    directions = raw.get("directions", "FF")
    if directions not in ("FF", "FB", "BF", "BB"):
        raise ScenarioError(_join(path, "directions"), "must be one of FF, FB, BF, BB")
    stack = LayerStack(layers, amb_in, amb_out, angles["signal_angle"], angles["pump_angle"],
                       pol, refl)
    return stack, tuple(directions)


def _filters(raw, center_lambda, path):
    if raw is None:
        return (None, None)
    _check_keys(raw, {"signal", "idler"}, path)
    out = []
    for key in ("signal", "idler"):
        v = raw.get(key)
        if v is None:
            out.append(None)
            continue
        fwhm = parse_quantity(v, "length", _join(path, key))
        if not fwhm > 0:
            raise ScenarioError(_join(path, key), "filter width must be positive")
        out.append(GaussianFilter.from_wavelength(center_lambda, fwhm))
    return tuple(out)


def _grid(raw, path):
    raw = raw or {}
    _check_keys(raw, {"count", "window_widths", "reference_fwhm", "pad"}, path)
    g = GridSpec()
    if "count" in raw:
        if not isinstance(raw["count"], int) or raw["count"] < 8:
            raise ScenarioError(_join(path, "count"), "must be an integer >= 8")
        g.count = raw["count"]
    if "window_widths" in raw:
        v = raw["window_widths"]
        if not isinstance(v, (int, float)) or not v > 0:
            raise ScenarioError(_join(path, "window_widths"), "must be positive")
        g.window_widths = float(v)
    if "reference_fwhm" in raw:
        g.reference_fwhm = parse_quantity(raw["reference_fwhm"], "length",
                                          _join(path, "reference_fwhm"))
        if not g.reference_fwhm > 0:
            raise ScenarioError(_join(path, "reference_fwhm"), "must be positive")
    if "pad" in raw:
        if not isinstance(raw["pad"], int) or raw["pad"] < 1:
            raise ScenarioError(_join(path, "pad"), "must be a positive integer")
        g.pad = raw["pad"]
    return g


_OUTPUT_OPTIONS = {
    "spectrum": set(),
    "joint_density": {"binary"},
    "temporal": {"field"},
    "flux": set(),
    "hom": {"r", "t", "tau_range", "count", "compensate_group_delay"},
    "schmidt": set(),
    "pair_number": set(),
}


def _outputs(raw, pump, filters, path):
    if not isinstance(raw, list) or not raw:
        raise ScenarioError(path, "must be a non-empty list")
    out = []
    for k, item in enumerate(raw):
        p = _join(path, k)
        if isinstance(item, str):
            item = {"type": item}
        if not isinstance(item, dict):
            raise ScenarioError(p, "expected an object or a type name")
        typ = _require(item, "type", p)
        if typ not in OUTPUT_TYPES:
            raise ScenarioError(_join(p, "type"), f"unknown output {typ!r}")
        opts = {k2: v for k2, v in item.items() if k2 != "type"}
        _check_keys(opts, _OUTPUT_OPTIONS[typ], p)
        if pump.is_cw and typ in ("flux", "schmidt", "joint_density"):
            raise ScenarioError(_join(p, "type"), f"'{typ}' needs a pulsed pump")
        if pump.is_cw and typ == "temporal" and filters == (None, None):
            raise ScenarioError(_join(p, "type"), "cw temporal kernels need spectral filters")
        if typ == "temporal":
            if opts.get("field", "s") not in ("s", "i"):
                raise ScenarioError(_join(p, "field"), "must be 's' or 'i'")
        if typ == "hom":
            r, t = opts.get("r", 2 ** -0.5), opts.get("t", 2 ** -0.5)
            for key, v in (("r", r), ("t", t)):
                if not isinstance(v, (int, float)):
                    raise ScenarioError(_join(p, key), "must be a real number")
            if abs(r * r + t * t - 1) > 1e-6:
                raise ScenarioError(p, "beam splitter needs r^2 + t^2 = 1")
            opts["r"], opts["t"] = float(r), float(t)
            opts["tau_range"] = parse_quantity(opts.get("tau_range", "2 ps"), "time",
                                               _join(p, "tau_range"))
            if not opts["tau_range"] > 0:
                raise ScenarioError(_join(p, "tau_range"), "must be positive")
            cnt = opts.get("count", 401)
            if not isinstance(cnt, int) or cnt < 3:
                raise ScenarioError(_join(p, "count"), "must be an integer >= 3")
            opts["count"] = cnt
            opts["compensate_group_delay"] = bool(opts.get("compensate_group_delay", False))
        out.append(OutputSpec(typ, opts))
    return out


def _check_ranges(scn: Scenario, path_of_geometry: str):
    """Every dispersion lookup the run will make must be in range."""
    hw = scn.halfwidth()
    wc = scn.omega_center
    if hw >= wc:
        raise ScenarioError("grid.window_widths", "frequency window reaches zero frequency")
    edges = np.array([wc - hw, wc + hw])
    pump_edges = np.array([scn.pump.omega_p0 - 2 * hw, scn.pump.omega_p0 + 2 * hw])
    for var in scn.variants:
        g = var.geometry
        try:
            if isinstance(g, BulkConfig):
                for w in ("s", "i"):
                    g.index(w, edges)
                g.index("p", pump_edges)
                g.ambient_index(edges)
            else:
                for k, ly in enumerate(g.layers):
                    for w in ("s", "i"):
                        ly.index(w, edges)
                    ly.index("p", pump_edges)
                for m in (g.ambient_in, g.ambient_out):
                    refractive_index(m, edges)
                    refractive_index(m, pump_edges)
        except DispersionRangeError as exc:
            raise ScenarioError(path_of_geometry, str(exc))


# --------------------------------------------------------------------------
# entry points

def load_scenario(path) -> dict:
    """Read a scenario (or a run manifest holding ``resolved_config``)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("", f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if isinstance(doc, dict) and "resolved_config" in doc:
        doc = doc["resolved_config"]
    if not isinstance(doc, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    return doc


def _expand_variants(doc):
    variants = doc.get("variants")
    sweep = doc.get("sweep")
    if variants is not None and sweep is not None:
        raise ScenarioError("sweep", "use either 'variants' or 'sweep', not both")
    if sweep is not None:
        _check_keys(sweep, {"parameter", "values", "kind"}, "sweep")
        param = _require(sweep, "parameter", "sweep")
        values = _require(sweep, "values", "sweep")
        kind = sweep.get("kind", "length")
        if kind not in _UNITS:
            raise ScenarioError("sweep.kind", f"must be one of {sorted(_UNITS)}")
        if not isinstance(values, list) or not values:
            raise ScenarioError("sweep.values", "must be a non-empty list")
        out = []
        for k, v in enumerate(values):
            num = parse_quantity(v, kind, f"sweep.values[{k}]")
            out.append((f"{param}={v}", {param: v}, num))
        return out, param
    if variants is None:
        return [("default", {}, None)], None
    if not isinstance(variants, list) or not variants:
        raise ScenarioError("variants", "must be a non-empty list")
    out = []
    for k, v in enumerate(variants):
        _check_keys(v, {"label", "set"}, f"variants[{k}]")
        label = _require(v, "label", f"variants[{k}]")
        sets = v.get("set", {})
        if not isinstance(sets, dict):
            raise ScenarioError(f"variants[{k}].set", "expected an object")
        out.append((str(label), sets, None))
    labels = [o[0] for o in out]
    if len(set(labels)) != len(labels):
        raise ScenarioError("variants", "labels must be unique")
    return out, None


def resolve_scenario(doc: dict, grid_count=None, contribution=None, materials_path=None) -> Scenario:
    """Validate a raw scenario and build the simulation objects."""
    doc = copy.deepcopy(doc)
    _check_keys(doc, _TOP_KEYS, "")
    if grid_count is not None:
        doc.setdefault("grid", {})["count"] = int(grid_count)
    if contribution is not None:
        doc.pop("contribution", None)
        doc["contributions"] = [contribution]
    if materials_path is not None:
        doc["materials_path"] = str(materials_path)

    name = doc.get("name", "scenario")
    kind = _require(doc, "kind", "")
    if kind not in ("bulk", "layered"):
        raise ScenarioError("kind", "must be 'bulk' or 'layered'")
    if kind not in doc:
        raise ScenarioError(kind, "missing geometry section")
    other = "layered" if kind == "bulk" else "bulk"
    if other in doc:
        raise ScenarioError(other, f"not allowed in a {kind} scenario")

    try:
        db = load_material_db(doc.get("materials_path"))
    except (OSError, MaterialError) as exc:
        raise ScenarioError("materials_path", str(exc))

    pump = _pump(_require(doc, "pump", ""), "pump")
    center_lambda = float(wavelength_from_omega(0.5 * pump.omega_p0))
    filters = _filters(doc.get("filters"), center_lambda, "filters")
    grid = _grid(doc.get("grid"), "grid")

    if "contribution" in doc and "contributions" in doc:
        raise ScenarioError("contribution", "give either 'contribution' or 'contributions'")
    contribs = doc.get("contributions", [doc.get("contribution")] if "contribution" in doc
                       else list(CONTRIBUTIONS))
    if not isinstance(contribs, list) or not contribs:
        raise ScenarioError("contributions", "must be a non-empty list")
    for k, c in enumerate(contribs):
        if c not in CONTRIBUTIONS:
            raise ScenarioError(f"contributions[{k}]", "must be volume, surface or total")
    contribs = tuple(c for c in CONTRIBUTIONS if c in contribs)

    outputs = _outputs(_require(doc, "outputs", ""), pump, filters, "outputs")

    expanded, sweep_param = _expand_variants(doc)
    variants = []
    directions, channel = ("F", "F"), ("F", "F", "F")
    for label, sets, num in expanded:
        vdoc = copy.deepcopy(doc)
        for dotted, value in sets.items():
            if not (dotted.startswith("bulk.") or dotted.startswith("layered.")):
                raise ScenarioError("variants", f"can only override geometry, got {dotted!r}")
            try:
                _set_path(vdoc, dotted, value)
            except (KeyError, IndexError, TypeError):
                raise ScenarioError(dotted, "no such field to override")
        if kind == "bulk":
            geom, channel = _bulk(vdoc["bulk"], db, pump, "bulk")
        else:
            geom, directions = _layered(vdoc["layered"], db, "layered")
        variants.append(Variant(label, geom, num))

    scn = Scenario(name, kind, pump, grid, filters, contribs, outputs, variants, directions,
                   channel, sweep_param)
    _check_ranges(scn, kind)
    scn.resolved = _resolved_dict(doc, scn)
    return scn


def _resolved_dict(doc, scn: Scenario) -> dict:
    """Fully explicit configuration; feeding it back reproduces the run."""
    out = copy.deepcopy(doc)
    out.pop("contribution", None)
    out["contributions"] = list(scn.contributions)
    out["grid"] = {"count": scn.grid.count, "window_widths": scn.grid.window_widths,
                   "reference_fwhm": scn.grid.reference_fwhm, "pad": scn.grid.pad}
    if scn.kind == "bulk" and out["bulk"].get("axis_angle") == "phase_matched" \
            and "variants" not in out and "sweep" not in out:
        out["bulk"]["axis_angle"] = scn.variants[0].geometry.axis_angle
    return out

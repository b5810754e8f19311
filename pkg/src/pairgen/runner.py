"""Evaluate a resolved scenario into output tables."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .bulk import BulkConfig, bulk_kernel_pair, group_delay_difference
from .layered import layered_kernel_pair
from .materials import wavelength_from_omega
from .numerics import make_grid
from .observables import (HOMConfig, hom_rate, intensity_spectrum, joint_density, pair_number,
                          photon_flux, schmidt_entropy, temporal_amplitude)
from .scenario import Scenario

log = logging.getLogger(__name__)

__all__ = ["Table", "RunResult", "frequency_axis", "kernel_pair", "run"]


@dataclass
class Table:
    """Column-oriented table; ``columns`` holds ``(header, values)`` pairs."""

    columns: list
    kind: str = ""
    meta: dict = field(default_factory=dict)

    def header(self):
        return [h for h, _ in self.columns]

    def rows(self):
        cols = [np.asarray(v) if not isinstance(v, list) else v for _, v in self.columns]
        n = len(cols[0])
        return ([c[k] for c in cols] for k in range(n))


@dataclass
class RunResult:
    tables: dict
    summary: dict
    grid: dict
    binaries: dict = field(default_factory=dict)


def frequency_axis(scn: Scenario) -> np.ndarray:
    return make_grid(scn.omega_center, scn.halfwidth(), scn.grid.count).values


def kernel_pair(scn: Scenario, geometry, axis, contribution):
    if isinstance(geometry, BulkConfig):
        return bulk_kernel_pair(geometry, axis, None if scn.pump.is_cw else axis, contribution,
                                scn.channel, scn.filters)
    return layered_kernel_pair(geometry, scn.pump, axis, None if scn.pump.is_cw else axis,
                               contribution, scn.directions, scn.filters)


class _Collector:
    def __init__(self, *headers):
        self.headers = headers
        self.cols = [[] for _ in headers]

    def add(self, *cols):
        n = max(np.size(c) for c in cols)
        for store, c in zip(self.cols, cols):
            if np.ndim(c) == 0:
                store.extend([c] * n)
            else:
                store.extend(list(np.asarray(c)))

    def table(self, kind, **meta):
        return Table(list(zip(self.headers, self.cols)), kind, meta)


def run(scn: Scenario) -> RunResult:
    axis = frequency_axis(scn)
    types = {o.type: o for o in scn.outputs}
    coll = {}
    summary = {"hom_tau_offset_s": {}, "schmidt": {}, "pair_number": {}}
    binaries = {}
    pairs = {}

    if "spectrum" in types:
        coll["spectrum"] = _Collector("omega_s_rad_per_s", "wavelength_s_nm", "variant",
                                      "contribution", "S_s")
    if "joint_density" in types:
        coll["joint_density"] = _Collector("omega_s_rad_per_s", "omega_i_rad_per_s", "variant",
                                           "contribution", "n")
    if "temporal" in types:
        coll["temporal"] = _Collector("tau_s_s", "variant", "contribution", "re", "im", "abs")
    if "flux" in types:
        coll["flux"] = _Collector("tau_s_s", "variant", "contribution", "flux_s")
    if "hom" in types:
        coll["hom"] = _Collector("tau_s", "variant", "contribution", "R_n")
    if "schmidt" in types:
        coll["schmidt"] = _Collector("variant", "contribution", "entropy_bits", "schmidt_number")

    for var in scn.variants:
        for contrib in scn.contributions:
            log.info("variant %s, contribution %s", var.label, contrib)
            fs, fi = kernel_pair(scn, var.geometry, axis, contrib)
            if "spectrum" in types:
                sp = intensity_spectrum(fs, fi, "s")
                coll["spectrum"].add(axis, wavelength_from_omega(axis) * 1e9, var.label, contrib,
                                     sp.values)
            if "joint_density" in types:
                n = joint_density(fs, fi)
                ws, wi = np.meshgrid(axis, axis, indexing="ij")
                coll["joint_density"].add(ws.ravel(), wi.ravel(), var.label, contrib, n.ravel())
                if types["joint_density"].options.get("binary"):
                    binaries[f"joint_density_{var.label}_{contrib}"] = n
            if "temporal" in types:
                which = types["temporal"].options.get("field", "s")
                ta = temporal_amplitude(fs if which == "s" else fi, pad=scn.grid.pad)
                v = ta.values if ta.tau_i is None else ta.values[:, ta.tau_i.size // 2]
                coll["temporal"].add(ta.tau_s, var.label, contrib, v.real, v.imag, np.abs(v))
            if "flux" in types:
                fl = photon_flux(temporal_amplitude(fs, pad=scn.grid.pad),
                                 temporal_amplitude(fi, pad=scn.grid.pad))
                coll["flux"].add(fl.axes[0][2], var.label, contrib, fl.values)
            if "hom" in types:
                o = types["hom"].options
                tau = np.linspace(-o["tau_range"], o["tau_range"], o["count"])
                offset = 0.0
                if o["compensate_group_delay"] and isinstance(var.geometry, BulkConfig):
                    offset = 0.5 * group_delay_difference(var.geometry, scn.omega_center,
                                                          scn.pump.omega_p0 - scn.omega_center)
                summary["hom_tau_offset_s"][var.label] = offset
                h = hom_rate(fs, fi, HOMConfig(tau, o["r"], o["t"], offset))
                coll["hom"].add(tau, var.label, contrib, h.values)
            if "schmidt" in types:
                sr = schmidt_entropy(fs)
                k = 1.0 / float(np.sum(sr.weights ** 2))
                coll["schmidt"].add(var.label, contrib, sr.entropy, k)
                summary["schmidt"].setdefault(var.label, {})[contrib] = sr.entropy
            if "pair_number" in types:
                pairs.setdefault(var.label, {"parameter": var.parameter})[contrib] = \
                    pair_number(fs, fi)

    tables = {}
    names = {"spectrum": "spectrum", "joint_density": "joint_density", "flux": "flux_s",
             "hom": "hom", "schmidt": "schmidt"}
    for key, c in coll.items():
        fname = f"temporal_{types['temporal'].options.get('field', 's')}" if key == "temporal" \
            else names[key]
        tables[fname] = c.table(key)

    if pairs:
        cols = {"variant": [], "parameter": []}
        for c in scn.contributions:
            cols[f"N_{c}"] = []
        ratio = "volume" in scn.contributions and "surface" in scn.contributions
        if ratio:
            cols["surface_to_volume"] = []
        for label, row in pairs.items():
            cols["variant"].append(label)
            cols["parameter"].append(np.nan if row["parameter"] is None else row["parameter"])
            for c in scn.contributions:
                cols[f"N_{c}"].append(row[c])
            if ratio:
                cols["surface_to_volume"].append(row["surface"] / row["volume"])
        tables["pair_number"] = Table(list(cols.items()), "pair_number",
                                      {"parameter": scn.sweep_parameter})
        summary["pair_number"] = pairs

    grid = {
        "domain": "cw_line" if scn.pump.is_cw else "plane",
        "omega_center_rad_per_s": scn.omega_center,
        "halfwidth_rad_per_s": scn.halfwidth(),
        "count": scn.grid.count,
        "step_rad_per_s": float(axis[1] - axis[0]),
        "pad": scn.grid.pad,
    }
    return RunResult(tables, summary, grid, binaries)

"""PNG figures of run tables (Agg backend, reproducible bytes)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["render"]

_STYLE = {"volume": "-", "surface": "--", "total": ":"}
_PNG_META = {"Software": None}


def _groups(table, xkey, ykey):
    cols = dict(table.columns)
    x = np.asarray(cols[xkey], float)
    y = np.asarray(cols[ykey], float)
    var = np.asarray(cols["variant"])
    con = np.asarray(cols["contribution"])
    seen = []
    for v, c in zip(var, con):
        if (v, c) not in seen:
            seen.append((v, c))
    for v, c in seen:
        m = (var == v) & (con == c)
        yield v, c, x[m], y[m]


def _lines(table, xkey, ykey, xlabel, ylabel, path, xscale=1.0, normalize=False, trim=False):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    lo, hi = np.inf, -np.inf
    for v, c, x, y in _groups(table, xkey, ykey):
        if normalize and np.max(np.abs(y)) > 0:
            y = y / np.max(np.abs(y))
        label = c if v == "default" else f"{v}, {c}"
        ax.plot(x * xscale, y, _STYLE.get(c, "-"), lw=1.2, label=label)
        big = x[np.abs(y) > 1e-3 * np.max(np.abs(y))] * xscale
        if big.size:
            lo, hi = min(lo, big.min()), max(hi, big.max())
    if trim and np.isfinite(lo) and hi > lo:
        pad = 0.25 * (hi - lo)
        ax.set_xlim(lo - pad, hi + pad)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)


def _ratio_map(table, path, parameter):
    """Contour of total/volume spectra over a swept parameter."""
    cols = dict(table.columns)
    var = np.asarray(cols["variant"])
    con = np.asarray(cols["contribution"])
    x = np.asarray(cols["wavelength_s_nm"], float)
    s = np.asarray(cols["S_s"], float)
    labels = list(dict.fromkeys(var))
    rows = []
    for v in labels:
        tot = s[(var == v) & (con == "total")]
        vol = s[(var == v) & (con == "volume")]
        with np.errstate(divide="ignore", invalid="ignore"):
            rows.append(tot / vol)
    ratio = np.array(rows)
    xs = x[(var == labels[0]) & (con == "total")]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    im = ax.pcolormesh(xs, np.arange(len(labels)), np.log10(np.abs(ratio)), shading="nearest")
    ax.set_yticks(np.arange(len(labels)))
    ax.set_yticklabels([lab.split("=")[-1] for lab in labels], fontsize=6)
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel(parameter or "variant")
    fig.colorbar(im, ax=ax, label="log10 S(total)/S(volume)")
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)


def _pair_ratio(table, path, parameter):
    cols = dict(table.columns)
    if "surface_to_volume" not in cols:
        return False
    x = np.asarray(cols["parameter"], float)
    y = np.asarray(cols["surface_to_volume"], float)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    if np.all(np.isfinite(x)):
        ax.semilogy(x * 1e6, y, "o-", ms=3)
        ax.set_xlabel(f"{parameter} (um)")
    else:
        ax.semilogy(np.arange(y.size), y, "o-", ms=3)
        ax.set_xlabel("variant")
    ax.set_ylabel("N(surface) / N(volume)")
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)
    return True


def _density(table, path):
    cols = dict(table.columns)
    var = np.asarray(cols["variant"])
    con = np.asarray(cols["contribution"])
    pick = (var == var[0]) & (con == con[-1])
    ws = np.asarray(cols["omega_s_rad_per_s"], float)[pick]
    wi = np.asarray(cols["omega_i_rad_per_s"], float)[pick]
    n = np.asarray(cols["n"], float)[pick]
    size = int(round(np.sqrt(n.size)))
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(n.reshape(size, size).T, origin="lower", aspect="auto",
                   extent=[ws.min(), ws.max(), wi.min(), wi.max()])
    ax.set_xlabel("omega_s (rad/s)")
    ax.set_ylabel("omega_i (rad/s)")
    ax.set_title(f"{var[0]}, {con[-1]}", fontsize=8)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, dpi=110, metadata=_PNG_META)
    plt.close(fig)


def render(name, table, out_dir, parameter=None):
    """Draw ``table`` into ``out_dir/<name>.png``; returns the paths written."""
    path = out_dir / f"{name}.png"
    kind = table.kind
    written = [path]
    if kind == "spectrum":
        _lines(table, "wavelength_s_nm", "S_s", "signal wavelength (nm)", "S_s (arb.)", path)
        labels = set(dict(table.columns)["variant"])
        cons = set(dict(table.columns)["contribution"])
        if len(labels) > 2 and {"total", "volume"} <= cons:
            ratio_path = out_dir / "spectrum_ratio.png"
            _ratio_map(table, ratio_path, parameter)
            written.append(ratio_path)
    elif kind == "temporal":
        _lines(table, "tau_s_s", "abs", "tau_s (ps)", "|F(tau_s, 0)| (normalised)", path,
               1e12, normalize=True, trim=True)
    elif kind == "flux":
        _lines(table, "tau_s_s", "flux_s", "tau_s (ps)", "signal flux (normalised)", path,
               1e12, normalize=True, trim=True)
    elif kind == "hom":
        _lines(table, "tau_s", "R_n", "delay (ps)", "R_n", path, 1e12)
    elif kind == "pair_number":
        if not _pair_ratio(table, path, parameter):
            return []
    elif kind == "joint_density":
        _density(table, path)
    else:
        return []
    return written

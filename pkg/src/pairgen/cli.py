"""Command-line front end.

    pairgen run <scenario.json> [--out DIR] [--grid N] [--contribution C]
    pairgen materials list [--db PATH]

Exit codes: 0 success, 2 invalid input, 1 failure during computation.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .amplitudes import CONTRIBUTIONS
from .materials import MaterialError, default_db_path, load_material_db
from .scenario import ScenarioError, load_scenario, resolve_scenario

log = logging.getLogger("pairgen")

EXIT_OK, EXIT_RUNTIME, EXIT_INVALID = 0, 1, 2


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10e")
    return str(v)


def write_csv(path: Path, table) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.header())
        for row in table.rows():
            w.writerow([_fmt(v) for v in row])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def cmd_run(args) -> int:
    from .plotting import render
    from .runner import run

    try:
        doc = load_scenario(args.scenario)
        scn = resolve_scenario(doc, args.grid, args.contribution)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioError as exc:
        print(f"invalid scenario {args.scenario}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    out = Path(args.out) if args.out else Path("out") / scn.name
    try:
        result = run(scn)
    except Exception as exc:  # surfaced with scenario context
        log.debug("run failed", exc_info=True)
        print(f"run of scenario {scn.name!r} failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_RUNTIME

    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, table in sorted(result.tables.items()):
        path = out / f"{name}.csv"
        write_csv(path, table)
        written.append(path)
        if not args.no_plots:
            written.extend(render(name, table, out, scn.sweep_parameter))
    for name, arr in sorted(result.binaries.items()):
        path = out / f"{name}.bin"
        np.ascontiguousarray(arr, dtype="<f8").tofile(path)
        side = out / f"{name}.json"
        side.write_text(json.dumps({"shape": list(arr.shape), "dtype": "float64",
                                    "byte_order": "little", "layout": "row-major",
                                    "axes": ["omega_s", "omega_i"]}, indent=2) + "\n")
        written.extend([path, side])

    manifest = {
        "scenario": scn.name,
        "software": {"pairgen": __version__, "numpy": np.__version__},
        "resolved_config": scn.resolved,
        "grid": result.grid,
        "summary": result.summary,
        "outputs": {p.name: _sha256(p) for p in sorted(written, key=lambda p: p.name)},
    }
    (out / "manifest.json").write_text(
        json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(written)} files to {out}")
    return EXIT_OK


def cmd_materials_list(args) -> int:
    path = Path(args.db) if args.db else default_db_path()
    try:
        db = load_material_db(path)
    except (OSError, MaterialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"{'name':<10} {'validity (um)':<18} polarizations")
    for name, mat in db.items():
        lo, hi = mat.validity_um
        print(f"{name:<10} {f'{lo:g}-{hi:g}':<18} {','.join(mat.polarizations)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pairgen",
                                description="Volume and surface photon-pair generation.")
    p.add_argument("--version", action="version", version=f"pairgen {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("scenario")
    r.add_argument("--out", help="output directory (default out/<name>)")
    r.add_argument("--grid", type=int, help="frequency samples per axis")
    r.add_argument("--contribution", choices=CONTRIBUTIONS)
    r.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    r.set_defaults(func=cmd_run)

    m = sub.add_parser("materials", help="material database")
    msub = m.add_subparsers(dest="action", required=True)
    ml = msub.add_parser("list", help="list materials")
    ml.add_argument("--db", help="material file (default: $PAIRGEN_MATERIALS or shipped)")
    ml.set_defaults(func=cmd_materials_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

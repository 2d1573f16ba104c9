"""Command-line front end: ``extremal eig | index | verify | scan``.

Settings come from an optional flat ``key=value`` file (``--config``) and
are overridden by flags.  Exit codes: 0 ok, 1 verification failure,
2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

from . import harness
from .errors import ConvergenceError, ExtremalError, ResonanceError, TruncationInconclusiveError
from .geometry import SURFACES, area, band, disk, get_surface, symmetric_band
from .radial_eig import DEFAULT_N, fk_profile_point, solve_lambda1
from .stability import DEFAULT_KMAX, DEFAULT_NULL_TOL, morse_index

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
CSV_DIGITS = 12


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    surface: str = "sphere-band"
    disk: Optional[float] = None
    band: Optional[tuple] = None
    n: int = DEFAULT_N
    kmax: int = DEFAULT_KMAX
    null_tol: float = DEFAULT_NULL_TOL
    out: str = "extremal-out"
    format: str = "json"
    workers: int = 1

    def digest(self, **extra) -> str:
        """Digest of everything that can change the numbers (not ``out`` or
        ``workers``)."""
        values = {k: v for k, v in asdict(self).items() if k not in ("out", "workers")}
        return harness.config_digest({**values, **extra})


_PARSERS = {
    "surface": str, "disk": float, "n": int, "kmax": int, "null_tol": float,
    "out": str, "format": str, "workers": int,
    "band": lambda s: tuple(float(x) for x in s.replace(",", " ").split()),
}


def load_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for no, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _PARSERS:
            raise UsageError(f"{path}:{no}: unknown key {key!r}")
        try:
            out[key] = _PARSERS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{no}: bad value for {key}: {value!r}") from None
    return out


def resolve_config(args) -> RunConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = tuple(flag) if f.name == "band" else flag
    cfg = RunConfig(**values)
    if cfg.surface not in SURFACES:
        raise UsageError(f"unknown surface {cfg.surface!r}; choose from {sorted(SURFACES)}")
    if cfg.format not in ("json", "csv"):
        raise UsageError("format must be json or csv")
    if cfg.band is not None and len(cfg.band) != 2:
        raise UsageError("band needs two radii")
    if cfg.n < 32 or cfg.kmax < 1 or cfg.workers < 1 or not cfg.null_tol > 0:
        raise UsageError("n >= 32, kmax >= 1, workers >= 1 and null_tol > 0 are required")
    return cfg


def domain_from(cfg: RunConfig):
    if (cfg.disk is None) == (cfg.band is None):
        raise UsageError("give exactly one of --disk R0 or --band R1 R2")
    s = get_surface(cfg.surface)
    if cfg.disk is not None:
        return disk(s, cfg.disk)
    return band(s, *cfg.band)


def grid_parts(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"grid must be numeric, got {text!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty grid {text!r}")
    return start, stop, step


def parse_grid(text: str) -> list:
    return harness.frange(*grid_parts(text))


def fmt(x) -> str:
    return harness.format_value(x, CSV_DIGITS)


def _write_json(path: str, payload: dict):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _csv_text(columns, rows, digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_digest={digest}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


def _write_csv(path: str, columns, rows, digest: str):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(_csv_text(columns, rows, digest))


# ---------------------------------------------------------------------------


def cmd_eig(args) -> int:
    cfg = resolve_config(args)
    dom = domain_from(cfg)
    eig = solve_lambda1(dom, n=cfg.n)
    digest = cfg.digest(command="eig")
    summary = {"config_digest": digest, **eig.summary()}
    print(f"domain        {dom.label()}")
    print(f"lambda1       {fmt(eig.lambda1)}")
    print(f"area          {fmt(area(dom))}")
    print("normal_derivs " + " ".join(fmt(c) for c in eig.normal_derivs))
    print(f"extremality   {fmt(eig.extremality_defect)}")
    print(f"config_digest {digest}")
    if cfg.format == "csv":
        _write_csv(os.path.join(cfg.out, "eig.csv"), ["r", "phi"],
                   list(zip(eig.mesh.nodes, eig.phi)), digest)
    _write_json(os.path.join(cfg.out, "eig.json"), summary)
    return EXIT_OK


def cmd_index(args) -> int:
    cfg = resolve_config(args)
    dom = domain_from(cfg)
    digest = cfg.digest(command="index")
    try:
        rep = morse_index(dom, kmax=cfg.kmax, null_tol=cfg.null_tol, n=cfg.n)
    except TruncationInconclusiveError as exc:
        _write_json(os.path.join(cfg.out, "index.json"),
                    {"config_digest": digest, "inconclusive": str(exc), **exc.report.to_dict()})
        raise
    rows = rep.table_rows()
    width = max(r[1] for r in rows)
    columns = ["k", "m"] + [f"eig_{i + 1}" for i in range(width)]
    print(f"domain   {dom.label()}")
    print(f"lambda1  {fmt(rep.lambda1)}")
    print("  ".join(f"{c:>18s}" for c in columns))
    for r in rows:
        print("  ".join(f"{fmt(x):>18s}" for x in r))
    print(f"morse_index {rep.morse_index}  nullity {rep.nullity} "
          f"(expected {rep.expected_nullity})  verdict {rep.verdict}")
    print(f"stop: {rep.stop_reason}")
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"config_digest {digest}")
    _write_json(os.path.join(cfg.out, "index.json"), {"config_digest": digest, **rep.to_dict()})
    _write_csv(os.path.join(cfg.out, "index.csv"), columns,
               [r + [""] * (width - r[1]) for r in rows], digest)
    return EXIT_OK


def cmd_verify(args) -> int:
    ids = harness.scenario_ids() if args.all else [harness.resolve_id(i) for i in args.scenarios]
    if not ids:
        raise UsageError("name at least one scenario or pass --all")
    unknown = [i for i in ids if i not in harness.REGISTRY]
    if unknown:
        raise UsageError(f"unknown scenario(s): {', '.join(unknown)}; "
                         f"known: {', '.join(harness.scenario_ids())}")
    overrides = {}
    if args.grid:
        lo, hi, step = grid_parts(args.grid)
        for i in ids:
            if "grid" not in harness.REGISTRY[i].defaults:
                raise UsageError(f"scenario {i} has no grid parameter")
        overrides["grid"] = (lo, hi, step)
    if args.n is not None:
        overrides["n"] = args.n
    out = args.out or "extremal-out"

    def run(i):
        cfg = dict(overrides)
        if "workers" in harness.REGISTRY[i].defaults:
            cfg["workers"] = args.workers
        return harness.run_scenario(i, cfg)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(run, ids))
    config = {"scenarios": ids, "overrides": overrides}
    report = harness.build_report(results, config)
    harness.write_report(report, results, out, CSV_DIGITS)
    for s in results:
        npass = sum(c.passed for c in s.checks)
        print(f"{s.status.upper():12s} {s.id} ({npass}/{len(s.checks)} checks)")
        for c in s.checks:
            if not c.passed:
                print(f"    failed: {c.name}: computed {fmt(c.computed)} expected "
                      f"{fmt(c.expected)} tol {c.tol:g} ({c.mode})")
        if "error" in s.diagnostics:
            print(f"    error: {s.diagnostics['error']}")
    print(f"config_digest {report['config_digest']}")
    print(f"report {os.path.join(out, 'report.json')}")
    if any(s.status == harness.FAIL for s in results):
        return EXIT_FAIL
    if any(s.status == harness.INCONCLUSIVE for s in results):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = resolve_config(args)
    grid = parse_grid(args.r0)
    digest = cfg.digest(command="scan", kind=args.kind, r0=grid)
    if args.kind == "fk":
        columns = ["r0", "area", "lambda1", "product"]

        def row(r0):
            pt = fk_profile_point(r0, cfg.n)
            return [r0, pt.area, pt.lambda1, pt.product]
    elif args.kind == "index":
        columns = ["r0", "index", "nullity"]

        def row(r0):
            rep = morse_index(_scan_domain(cfg, r0), kmax=cfg.kmax, null_tol=cfg.null_tol, n=cfg.n)
            return [r0, rep.morse_index, rep.nullity]
    else:
        columns = ["r0", "area", "lambda1"]

        def row(r0):
            d = _scan_domain(cfg, r0)
            return [r0, area(d), solve_lambda1(d, n=cfg.n).lambda1]

    # validate every grid point before the first solve
    for r0 in grid:
        if args.kind == "fk":
            disk(get_surface("sphere-polar"), r0)
        else:
            _scan_domain(cfg, r0)
    # results are ordered by grid index whatever the completion order
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(row, grid))
    text = _csv_text(columns, rows, digest)
    sys.stdout.write(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    return EXIT_OK


def _scan_domain(cfg: RunConfig, r0: float):
    s = get_surface(cfg.surface)
    return disk(s, r0) if s.chart_kind == "polar" else symmetric_band(s, r0)


# ---------------------------------------------------------------------------


def _add_common(p, domain: bool = True):
    p.add_argument("--config", help="key=value settings file; flags override it")
    p.add_argument("--surface", choices=sorted(SURFACES))
    if domain:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--disk", type=float, metavar="R0", help="geodesic disk radius (radians)")
        g.add_argument("--band", type=float, nargs=2, metavar=("R1", "R2"),
                       help="band radii (radians)")
    p.add_argument("--n", type=int, help=f"radial mesh nodes (default {DEFAULT_N})")
    p.add_argument("--out", help="output directory (default extremal-out)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--workers", type=int, help="worker threads for grid points")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extremal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eig", help="first Dirichlet eigenpair of a disk or band")
    _add_common(p)
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("index", help="Morse index, nullity and verdict")
    _add_common(p)
    p.add_argument("--kmax", type=int, help=f"highest Fourier mode (default {DEFAULT_KMAX})")
    p.add_argument("--null-tol", dest="null_tol", type=float,
                   help=f"relative null tolerance (default {DEFAULT_NULL_TOL:g})")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("verify", help="run verification scenarios")
    p.add_argument("scenarios", nargs="*", metavar="SCENARIO")
    p.add_argument("--all", action="store_true", help="run every registered scenario")
    p.add_argument("--grid", help="start:stop:step override for grid scenarios")
    p.add_argument("--n", type=int, help="radial mesh nodes")
    p.add_argument("--out", help="report directory (default extremal-out)")
    p.add_argument("--workers", type=int, default=1, help="scenarios run in parallel")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="parameter sweeps as CSV")
    p.add_argument("kind", choices=("lambda1", "index", "fk"))
    p.add_argument("--r0", required=True, help="start:stop:step grid (radians)")
    p.add_argument("--output", help="also write the CSV here")
    _add_common(p, domain=False)
    p.add_argument("--kmax", type=int)
    p.add_argument("--null-tol", dest="null_tol", type=float)
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ResonanceError, TruncationInconclusiveError, ExtremalError,
            ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

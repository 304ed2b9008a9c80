"""Command line front-end: moment caches, verification reports, zero tables."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import CapExceeded, CorruptFile, DigestMismatch, PlanarMOPError
from .moments import N_CAP, MomentTables, cache_load, cache_store
from .polynomials import roots, solve_planar, staircase
from .quadrature import DEFAULT_SPEC, build_contour
from .suites import SUITES, Context, run_suite
from .weight import config_to_dict, load_config

log = logging.getLogger("planarmop")


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def check_cap(n: int) -> int:
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > N_CAP:
        raise CapExceeded(f"n = {n} exceeds the supported cap {N_CAP}")
    return n


def cache_path(out: Path, tables: MomentTables) -> Path:
    return out / f"moments-{tables.digest()[:12]}.json"


def load_tables(cfg, out: Path | None) -> MomentTables:
    """Reuse a cache in ``out`` when one matches the configuration; warn and
    start afresh when it is unreadable."""
    tables = MomentTables(cfg, DEFAULT_SPEC)
    if out is None:
        return tables
    path = cache_path(out, tables)
    if path.exists():
        try:
            return cache_load(path, cfg, DEFAULT_SPEC)
        except (CorruptFile, DigestMismatch) as exc:
            log.warning("ignoring moment cache %s (%s); recomputing", path, exc)
    return tables


def _needed(tables: MomentTables, n: int) -> list:
    l = tables.cfg.l
    return [staircase(m, l).vector for m in range(1, n + 1)]


def cmd_moments(args) -> int:
    cfg = load_config(args.config)
    n = check_cap(args.n_max if args.n_max is not None else (args.n if args.n is not None else 8))
    out = Path(args.out)
    tables = load_tables(cfg, out)
    before = (len(tables.mu), len(tables.nu))
    tables.extend(n, _needed(tables, n))
    path = cache_path(out, tables)
    if (len(tables.mu), len(tables.nu)) == before and path.exists():
        print(f"cache hit: {path}")
    else:
        cache_store(path, tables)
        print(f"wrote {path} ({len(tables.mu)} mu, {len(tables.nu)} nu)")
    return 0


def _jsonable(rec: dict) -> dict:
    return {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in rec.items()}


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    n_max = check_cap(args.n_max if args.n_max is not None else (args.n if args.n is not None else 6))
    out = Path(args.out) if args.out else None
    tables = load_tables(cfg, out)
    ctx = Context(cfg, tables, n_max=n_max, seed=args.seed, tol=args.tol,
                  precision=args.precision, name=Path(args.config).stem)
    records = run_suite(ctx, args.suite)
    ok = all(r["pass"] for r in records)
    report = {
        "suite": args.suite,
        "config": config_to_dict(cfg),
        "contour": build_contour(cfg).kind,
        "n_max": n_max,
        "seed": args.seed,
        "tol": args.tol,
        "precision": args.precision,
        "checks": [_jsonable(r) for r in records],
        "pass": ok,
    }
    for r in records:
        status = "PASS" if r["pass"] else "FAIL"
        print(f"{status} {r['check']:<26} {r['instance']:<48} {r['residual']:.3e} <= {r['contract']:.1e}")
    failed = sum(not r["pass"] for r in records)
    print(f"{len(records) - failed}/{len(records)} checks passed")
    if out is not None:
        atomic_write(out / f"report-{args.suite}.json", json.dumps(report, indent=1, sort_keys=True) + "\n")
    return 0 if ok else 1


def cmd_zeros(args) -> int:
    cfg = load_config(args.config)
    if args.n is not None:
        degrees = [check_cap(args.n)] if args.n > 0 else []
    else:
        degrees = list(range(1, check_cap(args.n_max if args.n_max is not None else 6) + 1))
    tables = load_tables(cfg, None)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["degree", "re", "im"])
    for n in degrees:
        p, _ = solve_planar(tables, n, args.precision)
        for z in roots(p):
            writer.writerow([n, repr(float(z.real)), repr(float(z.imag))])
    path = Path(args.out) / "zeros.csv"
    atomic_write(path, buf.getvalue())
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="planarmop", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_default=None):
        p.add_argument("--config", required=True, help="JSON file with nodes and exponents")
        p.add_argument("--n", type=int, help="single degree")
        p.add_argument("--n-max", type=int, dest="n_max", help="largest degree")
        p.add_argument("--precision", choices=("f64", "extended"), default="f64")
        p.add_argument("--out", default=out_default, help="output directory")

    p = sub.add_parser("moments", help="compute or extend the moment cache")
    common(p, "out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    common(p)
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--tol", type=float, help="override every contract with this tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zeros", help="write the zeros of p_n as CSV")
    common(p, "out")
    p.set_defaults(func=cmd_zeros)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PlanarMOPError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

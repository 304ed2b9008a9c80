"""Verification suites: each returns a list of check records

    {"check", "instance", "residual", "contract", "pass"}

where ``residual <= contract`` decides ``pass``.  A ``tol`` argument, when
given, replaces every contract.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chi as chimod
from .chi import add, indices_of_length, unit, vec
from .errors import PlanarMOPError
from .moments import MomentTables, get_evaluator, verify_prop1
from .polynomials import sample_points, span_rank_check, verify_theorem1
from .rh import asymptotic_check, build_sampler, hp_order_check, jump_study
from .transfer import (compute_A, det_A_closed, det_A_forms, det_recursion_check, first_row_identity,
                       verify_B_action, verify_B_moments)
from .weight import WeightConfig

SUITES = ("prop1", "lemmas", "theorem1", "det", "bmatrix", "rh", "hp")


@dataclass
class Context:
    cfg: WeightConfig
    tables: MomentTables
    n_max: int = 6
    seed: int = 0
    tol: float | None = None
    precision: str = "f64"
    name: str = "config"

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def record(ctx: Context, check: str, instance, residual: float, contract: float) -> dict:
    contract = ctx.tol if ctx.tol is not None else contract
    residual = float(residual)
    ok = bool(np.isfinite(residual) and residual <= contract)
    return {"check": check, "instance": f"{ctx.name}: {instance}", "residual": residual,
            "contract": contract, "pass": ok}


def failure(ctx: Context, check: str, instance, exc: Exception) -> dict:
    rec = record(ctx, check, f"{instance} [{type(exc).__name__}: {exc}]", math.inf, 0.0)
    rec["pass"] = False
    return rec


# ---------------------------------------------------------------- suites


def suite_prop1(ctx: Context, pairs: int = 20) -> list:
    rng = ctx.rng(1)
    out = []
    for t in range(pairs):
        deg = int(rng.integers(0, 6))
        m = int(rng.integers(0, 5))
        coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        r = verify_prop1(ctx.cfg, coeffs, m, ctx.tables.spec)
        out.append(record(ctx, "prop1.area_vs_contour", f"deg={deg} m={m} #{t}", r["relative"], 1e-6))
    return out


def _lemma_points(ctx: Context, count: int = 10):
    return sample_points(ctx.cfg, count, ctx.rng(2))


def suite_lemmas(ctx: Context, kmax: int = 4, points: int = 10) -> list:
    cfg, l = ctx.cfg, ctx.cfg.l
    ev = get_evaluator(cfg, ctx.tables.spec)
    zs = _lemma_points(ctx, points)
    ps = ev.point_set(zs)

    def tchi(k):
        return ev.values(ps, vec(k), tilde=True)

    def rel(lhs, terms):
        res = np.abs(lhs - sum(terms))
        scale = np.max(np.abs(np.vstack([lhs] + list(terms))), axis=0)
        return float(np.max(res / scale))

    out = []
    c, ab = cfg.exponents, cfg.abar
    for size in range(1, kmax + 1):
        for k in indices_of_length(l, size):
            if min(k) >= 1:
                terms = [(c[j] + k[j]) * tchi(add(k, unit(l, j), -1)) for j in range(l)]
                out.append(record(ctx, "lemma1", f"k={k}", rel(zs * tchi(k), terms), 1e-9))
            for s in range(1, min(k) + 1):
                coeffs = chimod.corollary_expansion(cfg, k, s)
                terms = [cf * tchi(add(k, t, -1)) for t, cf in coeffs.items()]
                out.append(record(ctx, "corollary", f"k={k} s={s}", rel(zs ** s * tchi(k), terms), 1e-9))
    for size in range(0, kmax):
        for k in indices_of_length(l, size):
            for n in range(l):
                for m in range(n + 1, l):
                    t1, t2 = tchi(add(k, unit(l, n))), tchi(add(k, unit(l, m)))
                    t3 = (ab[n] - ab[m]) * tchi(k)
                    res = np.abs(t1 - t2 + t3) / np.max(np.abs(np.vstack([t1, t2, t3])), axis=0)
                    out.append(record(ctx, "lemma2", f"k={k} n={n} m={m}", float(np.max(res)), 1e-9))
    out.extend(branch_checks(ctx))
    return out


def decay_direction(cfg: WeightConfig) -> float:
    """Middle of the widest angular gap between node directions."""
    b = np.sort(np.asarray(cfg.cut_angles))
    gaps = np.diff(np.concatenate([b, [b[0] + 2 * math.pi]]))
    i = int(np.argmax(gaps))
    return float(b[i] + 0.5 * gaps[i])


def branch_checks(ctx: Context, radii=(2.5, 3.0, 3.5, 4.0)) -> list:
    ev = get_evaluator(ctx.cfg, ctx.tables.spec)
    theta = decay_direction(ctx.cfg)
    out = []
    for m in (0, 1):
        for power in (0, 2):
            r = chimod.decay_check(ev, m, power, theta, radii)
            worst = max(r["ratio"]) / r["bound"]
            out.append(record(ctx, "branch.decay", f"m={m} k={power} theta={theta:.3f}", worst, 1.0))
    for j in range(ctx.cfg.l):
        for m in (0, 1):
            r = chimod.tail_continuity(ev, m, j, 2.0, 1e-8)
            out.append(record(ctx, "branch.continuity", f"j={j} m={m} p=2a_j eps=1e-8",
                              r["relative"], 1e-6))
    return out


def suite_theorem1(ctx: Context) -> list:
    out = []
    for n in range(1, ctx.n_max + 1):
        try:
            r = verify_theorem1(ctx.tables, n, ctx.precision)
            out.append(record(ctx, "theorem1.coefficients", f"n={n} nvec={r['nvec']}", r["relative"], 1e-6))
        except PlanarMOPError as exc:
            out.append(failure(ctx, "theorem1.coefficients", f"n={n}", exc))
    for n in range(1, min(ctx.n_max, 6) + 1):
        r = span_rank_check(ctx.cfg, n, seed=ctx.seed, spec=ctx.tables.spec)
        ranks = r["ranks"]
        out.append(record(ctx, "prop2.rank", f"n={n} ranks={ranks}",
                          max(abs(x - n) for x in ranks), 0.0))
    return out


def suite_det(ctx: Context) -> list:
    out = []
    for n in range(1, 21):
        f1, f2 = det_A_forms(ctx.cfg, n)
        out.append(record(ctx, "det.closed_forms_agree", f"n={n}",
                          abs(f1 - f2) / max(abs(f1), abs(f2)), 1e-12))
    for n in range(1, min(ctx.n_max, 8) + 1):
        try:
            a = compute_A(ctx.tables, n, ctx.precision)
            closed = det_A_closed(ctx.cfg, n)
            out.append(record(ctx, "det.numeric_vs_closed", f"n={n}",
                              abs(a.det - closed) / abs(closed), 1e-6 if n <= 6 else 1e-4))
        except PlanarMOPError as exc:
            out.append(failure(ctx, "det.numeric_vs_closed", f"n={n}", exc))
    for n in range(1, ctx.n_max + 1):
        r = det_recursion_check(ctx.cfg, n)
        out.append(record(ctx, "det.recursion_blocks", f"n={n}", r["residual_blocks"], 1e-10))
        out.append(record(ctx, "det.recursion_closed", f"n={n}", r["residual_closed"], 1e-10))
    return out


def suite_bmatrix(ctx: Context, points: int = 5) -> list:
    out = []
    zs = sample_points(ctx.cfg, points, ctx.rng(3))
    for n in range(1, ctx.n_max + 1):
        worst = max(verify_B_action(ctx.cfg, n, z, ctx.tables.spec)["relative"] for z in zs)
        out.append(record(ctx, "bmatrix.action", f"n={n} points={points}", worst, 1e-8))
        out.append(record(ctx, "bmatrix.moments", f"n={n}", verify_B_moments(ctx.tables, n)["relative"], 1e-8))
        out.append(record(ctx, "bmatrix.first_row", f"n={n}", first_row_identity(ctx.tables, n)["relative"], 1e-8))
    return out


def _samplers(ctx: Context):
    for n in range(ctx.cfg.l, ctx.n_max + 1):
        yield n, build_sampler(ctx.cfg, n, ctx.tables, ctx.precision)


def suite_rh(ctx: Context) -> list:
    out = []
    for n, s in _samplers(ctx):
        js = jump_study(s)
        for p in js["points"]:
            dev = max(abs(x - 1.0) for x in p["slopes"])
            out.append(record(ctx, "rh.jump_linear", f"n={n} piece={p['piece']} tau={p['tau']:.2f}", dev, 0.2))
        a = asymptotic_check(s)
        out.append(record(ctx, "rh.asymptotic_slope", f"n={n} radii={a['radii'][0]:.3g}x(1,2,4)",
                          abs(a["slope"] + 1.0), 0.1))
        ratio = max(d / f for d, f in zip(a["det_deviation"], a["det_floor"]))
        out.append(record(ctx, "rh.det_Y", f"n={n} |det Y - 1| / rounding floor", ratio, 1.0))
    return out


def suite_hp(ctx: Context) -> list:
    out = []
    for n, s in _samplers(ctx):
        for j in range(ctx.cfg.l):
            r = hp_order_check(s, j)
            out.append(record(ctx, "hp.order", f"n={n} j={j} target={r['target']}",
                              abs(r["slope"] - r["target"]), 0.2))
            out.append(record(ctx, "hp.q_consistency", f"n={n} j={j}", r["q_consistency"], 1e-8))
    return out


RUNNERS = {
    "prop1": suite_prop1,
    "lemmas": suite_lemmas,
    "theorem1": suite_theorem1,
    "det": suite_det,
    "bmatrix": suite_bmatrix,
    "rh": suite_rh,
    "hp": suite_hp,
}


def run_suite(ctx: Context, name: str) -> list:
    names = SUITES if name == "all" else (name,)
    out = []
    for nm in names:
        try:
            out.extend(RUNNERS[nm](ctx))
        except PlanarMOPError as exc:
            out.append(failure(ctx, nm, "suite aborted", exc))
    return out

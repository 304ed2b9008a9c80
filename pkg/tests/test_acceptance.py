"""Acceptance criteria 1-10, each at its stated tolerance.

Every criterion records one PASS/FAIL line; the lines are printed in the
pytest terminal summary (see conftest.py).  Run standalone with
``python3 tests/test_acceptance.py``.
"""
import math
import time

import numpy as np
import pytest

from planarmop.moments import MomentTables
from planarmop.polynomials import solve_planar
from planarmop.reference import random_configs, reference_configs
from planarmop.suites import (Context, branch_checks, suite_bmatrix, suite_det, suite_hp, suite_lemmas,
                              record, suite_prop1, suite_rh, suite_theorem1)

BUDGET_SECONDS = 15 * 60


@pytest.fixture(scope="module")
def contexts(tables):
    """K1-K3 share the session tables; the ten random configurations get their own."""
    out = {}
    for name, cfg in reference_configs().items():
        out[name] = Context(cfg, tables[name], n_max=6, name=name)
    for k, cfg in enumerate(random_configs()):
        name = f"random[{k}]"
        out[name] = Context(cfg, MomentTables(cfg), n_max=6, name=name)
    return out


def _reference(contexts):
    return [contexts[k] for k in ("K1", "K2", "K3")]


def _run(acceptance_log, number, title, body):
    """Time ``body``, which returns a list of check records, and log one line."""
    t0 = time.perf_counter()
    records = body()
    elapsed = time.perf_counter() - t0
    failed = [r for r in records if not r["pass"]]
    worst = max((r["residual"] / r["contract"] if r["contract"] else
                 (0.0 if r["residual"] == 0 else math.inf)) for r in records)
    line = (f"criterion {number:>2} {'PASS' if not failed else 'FAIL'}  {title}: "
            f"{len(records) - len(failed)}/{len(records)} checks, worst residual/contract {worst:.3g}, "
            f"{elapsed:.1f}s")
    for r in failed[:5]:
        line += f"\n    failed: {r['check']} {r['instance']} residual={r['residual']:.3e} contract={r['contract']:.1e}"
    acceptance_log[number] = {"line": line, "seconds": elapsed, "pass": not failed}
    assert not failed, line


def test_criterion_01_area_equals_contour(contexts, acceptance_log):
    def body():
        t0 = time.perf_counter()
        recs = [r for ctx in _reference(contexts) for r in suite_prop1(ctx, pairs=20)]
        recs.append(record(contexts["K1"], "prop1.runtime", "K1-K3 seconds / 120",
                            (time.perf_counter() - t0) / 120.0, 1.0))
        return recs
    _run(acceptance_log, 1, "area integral equals contour integral (K1-K3, 20 pairs each)", body)


def test_criterion_02_gaussian_moment_oracle(contexts, acceptance_log):
    def body():
        ctx = contexts["K1"]
        expect = {(0, 0): 2 * math.pi, (1, 0): -math.pi, (1, 1): 3 * math.pi}
        return [record(ctx, "oracle.mu", f"mu_{j}{k}", abs(ctx.tables.get_mu(j, k) - v), 1e-8)
                for (j, k), v in expect.items()]
    _run(acceptance_log, 2, "K1 moments mu_00, mu_10, mu_11 = 2pi, -pi, 3pi", body)


def test_criterion_03_chi_recurrences(contexts, acceptance_log):
    def body():
        out = []
        for ctx in contexts.values():
            out += [r for r in suite_lemmas(ctx) if not r["check"].startswith("branch.")]
        return out
    _run(acceptance_log, 3, "chi recurrences at 10 random z, |k| <= 4, all 13 configs", body)


def test_criterion_04_decay_and_continuity(contexts, acceptance_log):
    def body():
        return [r for ctx in contexts.values() for r in branch_checks(ctx)]
    _run(acceptance_log, 4, "tail decay bound on rho in {2.5,3,3.5,4} and continuity across cuts, all 13 configs",
         body)


def test_criterion_05_planar_equals_multiple(contexts, acceptance_log):
    def body():
        out = []
        for name, n_max in (("K1", 8), ("K2", 6), ("K3", 6)):
            ctx = contexts[name]
            ctx8 = Context(ctx.cfg, ctx.tables, n_max=n_max, name=name)
            out += [r for r in suite_theorem1(ctx8) if r["check"] == "theorem1.coefficients"]
        p, _ = solve_planar(contexts["K1"].tables, 1)
        out.append(record(contexts["K1"], "oracle.p1", "p_1 = z + 1/2",
                           float(np.max(np.abs(p.coeffs - [0.5, 1.0]))), 1e-8))
        return out
    _run(acceptance_log, 5, "planar p_n equals multiple p_n (K1 n<=8, K2/K3 n<=6) and K1 p_1", body)


def test_criterion_06_determinant(contexts, acceptance_log):
    def body():
        out = []
        for ctx in contexts.values():
            out += suite_det(Context(ctx.cfg, ctx.tables, n_max=8, name=ctx.name))
        return out
    _run(acceptance_log, 6, "det A_n numeric vs closed form (n<=8), closed forms (n<=20), recursion, all 13 configs", body)


def test_criterion_07_transfer_matrices(contexts, acceptance_log):
    def body():
        return [r for name in ("K2", "K3") for r in suite_bmatrix(contexts[name], points=5)]
    _run(acceptance_log, 7, "B-matrix action at 5 random z and first-row identity, K2/K3, n<=6", body)


def test_criterion_08_riemann_hilbert(contexts, acceptance_log):
    def body():
        out = []
        for ctx in contexts.values():
            out += suite_rh(ctx)
            out += suite_hp(ctx)
        return out
    _run(acceptance_log, 8, "RH jump linearity, asymptotic slope, det Y, Hermite-Pade order, all 13 configs",
         body)


def test_criterion_09_span_ranks(contexts, acceptance_log):
    def body():
        return [r for ctx in contexts.values() for r in suite_theorem1(ctx) if r["check"] == "prop2.rank"]
    _run(acceptance_log, 9, "numerical ranks of both spans and their union, n<=6, all 13 configs", body)


def test_criterion_10_runtime(acceptance_log):
    spent = sum(v["seconds"] for k, v in acceptance_log.items() if k != 10)
    missing = [k for k in range(1, 10) if k not in acceptance_log]
    ok = not missing and spent <= BUDGET_SECONDS
    line = (f"criterion 10 {'PASS' if ok else 'FAIL'}  full verification runtime {spent:.1f}s "
            f"(budget {BUDGET_SECONDS}s)" + (f", criteria not run: {missing}" if missing else ""))
    acceptance_log[10] = {"line": line, "seconds": 0.0, "pass": ok}
    assert ok, line


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))

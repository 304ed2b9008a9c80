"""Planar and multiple orthogonal polynomials built from the moment tables."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .chi import as_index, add, indices_of_length, unit, vec
from .errors import InvalidIndex, NoConvergence, RankDeficientSampling, SingularSystem
from .moments import MomentTables, build_D, get_evaluator
from .weight import WeightConfig

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StaircaseIndex:
    n: int
    l: int
    kappa: int
    r: int

    @property
    def vector(self) -> tuple[int, ...]:
        return (self.kappa + 1,) * self.r + (self.kappa,) * (self.l - self.r)


def staircase(n: int, l: int) -> StaircaseIndex:
    if n < 0 or l < 1:
        raise InvalidIndex("need n >= 0 and l >= 1")
    kappa, r = divmod(n, l)
    return StaircaseIndex(n, l, kappa, r)


@dataclass(frozen=True)
class MonicPoly:
    coeffs: np.ndarray  # ascending, last entry 1

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.size == 0 or c[-1] != 1:
            raise ValueError("leading coefficient must be exactly 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


# ------------------------------------------------------------ linear algebra


def linsolve(M: np.ndarray, rhs: np.ndarray, precision: str = "f64"):
    """Solve M x = rhs with partial pivoting plus refinement; returns (x, cond)."""
    M = np.asarray(M, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    if M.size == 0:
        return np.zeros(0, dtype=complex), 1.0
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1e15:
        raise SingularSystem(f"moment system is numerically singular (cond={cond:.3g})", cond)
    if precision == "extended":
        import mpmath

        with mpmath.workdps(40):
            A = mpmath.matrix([[mpmath.mpc(v) for v in row] for row in M])
            b = mpmath.matrix([mpmath.mpc(v) for v in rhs])
            x = mpmath.lu_solve(A, b)
            return np.array([complex(v) for v in x]), cond
    lu = scipy.linalg.lu_factor(M)
    x = scipy.linalg.lu_solve(lu, rhs)
    for _ in range(2):
        x = x + scipy.linalg.lu_solve(lu, rhs - M @ x)
    log.debug("solve: n=%d cond=%.3g", M.shape[0], cond)
    return x, cond


def determinant(M: np.ndarray, precision: str = "f64") -> complex:
    if precision == "extended":
        import mpmath

        with mpmath.workdps(40):
            return complex(mpmath.det(mpmath.matrix([[mpmath.mpc(v) for v in row] for row in M])))
    return complex(np.linalg.det(M))


# ------------------------------------------------------------ solvers


def solve_planar(tables: MomentTables, n: int, precision: str = "f64"):
    """Monic p_n orthogonal to 1..z^{n-1} in the planar inner product, and h_n."""
    if n == 0:
        return MonicPoly(np.array([1.0])), tables.get_mu(0, 0).real
    D = build_D(tables, n + 1)
    alpha, cond = linsolve(D[:n, :n], -D[:n, n], precision)
    coeffs = np.append(alpha, 1.0)
    h = complex(np.dot(coeffs, D[n, :]))
    return MonicPoly(coeffs), h.real


def _nu_rows(tables: MomentTables, nvec, ncols: int, drop: int | None = None):
    rows = []
    for j, nj in enumerate(nvec):
        top = nj - (1 if j == drop else 0)
        for k in range(top):
            rows.append([tables.get_nu(nvec, j, t + k) for t in range(ncols)])
    return np.array(rows, dtype=complex).reshape(len(rows), ncols)


def solve_multiple(tables: MomentTables, nvec, precision: str = "f64") -> MonicPoly:
    """Type II multiple orthogonal polynomial p_n of degree |n|."""
    nvec = as_index(nvec, tables.cfg.l)
    n = sum(nvec)
    if n == 0:
        return MonicPoly(np.array([1.0]))
    rows = _nu_rows(tables, nvec, n + 1)
    alpha, _ = linsolve(rows[:, :n], -rows[:, n], precision)
    return MonicPoly(np.append(alpha, 1.0))


def solve_q(tables: MomentTables, nvec, i: int, precision: str = "f64") -> MonicPoly:
    """Monic q_n^{(i)} of degree |n| - 1 (zero-based i); block i loses its last condition."""
    nvec = as_index(nvec, tables.cfg.l)
    n = sum(nvec)
    if n < 1:
        raise InvalidIndex("|n| must be >= 1")
    if nvec[i] < 1:
        raise InvalidIndex(f"entry {i} of {nvec} is zero")
    if n == 1:
        return MonicPoly(np.array([1.0]))
    rows = _nu_rows(tables, nvec, n, drop=i)
    alpha, _ = linsolve(rows[:, : n - 1], -rows[:, n - 1], precision)
    return MonicPoly(np.append(alpha, 1.0))


def planar_residual(tables: MomentTables, poly: MonicPoly) -> float:
    n = poly.degree
    if n == 0:
        return 0.0
    D = build_D(tables, n + 1)
    return float(np.max(np.abs(D[:n, :] @ poly.coeffs)) / np.max(np.abs(D)))


def multiple_residual(tables: MomentTables, nvec, poly: MonicPoly, drop: int | None = None) -> float:
    rows = _nu_rows(tables, nvec, poly.degree + 1, drop=drop)
    if rows.size == 0:
        return 0.0
    return float(np.max(np.abs(rows @ poly.coeffs)) / np.max(np.abs(rows)))


def verify_theorem1(tables: MomentTables, n: int, precision: str = "f64") -> dict:
    if n < 1:
        raise InvalidIndex("n must be >= 1")
    st = staircase(n, tables.cfg.l)
    p, h = solve_planar(tables, n, precision)
    pm = solve_multiple(tables, st.vector, precision)
    dev = float(np.max(np.abs(p.coeffs - pm.coeffs)))
    norm = float(np.max(np.abs(p.coeffs)))
    return {"n": n, "nvec": st.vector, "deviation": dev, "relative": dev / norm,
            "planar": p.coeffs, "multiple": pm.coeffs, "h": h}


# ------------------------------------------------------------ span check


def sample_points(cfg: WeightConfig, count: int, rng: np.random.Generator, margin: float = 0.05,
                  outer: float = 2.5):
    """Random points in an annulus around the nodes, away from node directions."""
    rmax = max(abs(a) for a in cfg.nodes)
    rmin = min(abs(a) for a in cfg.nodes)
    out = []
    betas = cfg.cut_angles
    while len(out) < count:
        rho = rng.uniform(0.4 * rmin, outer * rmax)
        th = rng.uniform(0.0, 2.0 * math.pi)
        gap = np.min(np.abs((th - betas + math.pi) % (2 * math.pi) - math.pi))
        if gap > margin:
            out.append(rho * complex(math.cos(th), math.sin(th)))
    return np.array(out)


def numerical_rank(A: np.ndarray, rel: float = 1e-8) -> tuple[int, np.ndarray]:
    norms = np.linalg.norm(A, axis=0)
    A = A / np.where(norms > 0, norms, 1.0)
    sv = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(sv > rel * sv[0])), sv


def span_rank_check(cfg: WeightConfig, n: int, count: int | None = None, seed: int = 0,
                    spec=None) -> dict:
    """Ranks of {tchi_k : |k| < n}, {z^k tchi_{n-e_j}} and of their union."""
    l = cfg.l
    count = 4 * n + 8 if count is None else count
    if count < 2 * n:
        raise RankDeficientSampling(f"need at least {2 * n} sample points, got {count}")
    ev = get_evaluator(cfg, spec) if spec is not None else get_evaluator(cfg)
    zs = sample_points(cfg, count, np.random.default_rng(seed))
    ps = ev.point_set(zs)
    left = [ev.values(ps, vec(k), tilde=True) for m in range(n) for k in indices_of_length(l, m)]
    nvec = staircase(n, l).vector
    right = []
    for j, nj in enumerate(nvec):
        if nj == 0:
            continue
        base = ev.values(ps, vec(add(nvec, unit(l, j), -1)), tilde=True)
        right.extend(zs ** k * base for k in range(nj))
    A1 = np.column_stack(left)
    A2 = np.column_stack(right)
    # equilibrate sample rows; a diagonal row scaling leaves every rank unchanged
    w = np.linalg.norm(np.column_stack([A1, A2]), axis=1)[:, None]
    A1, A2 = A1 / w, A2 / w
    r1, s1 = numerical_rank(A1)
    r2, s2 = numerical_rank(A2)
    r3, s3 = numerical_rank(np.column_stack([A1, A2]))
    return {"n": n, "ranks": (r1, r2, r3), "pass": r1 == r2 == r3 == n,
            "singular_values": (s1, s2, s3)}


# ------------------------------------------------------------ roots


def roots(poly, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """Zeros of a monic polynomial by Aberth-Ehrlich simultaneous iteration."""
    c = np.asarray(poly.coeffs if isinstance(poly, MonicPoly) else poly, dtype=complex)
    c = c / c[-1]
    n = c.size - 1
    if n < 1:
        raise ValueError("degree must be >= 1")
    dc = np.polynomial.polynomial.polyder(c)
    radius = max(abs(c[0]) ** (1.0 / n), 1e-3) if c[0] != 0 else 1.0
    radius = min(radius, 1.0 + np.max(np.abs(c[:-1])))
    ang = 2 * math.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * ang) - c[-2] / n
    for _ in range(max_iter):
        p = np.polynomial.polynomial.polyval(z, c)
        dp = np.polynomial.polynomial.polyval(z, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            step = ratio / (1.0 - ratio * inv.sum(axis=1))
        step = np.where(np.isfinite(step), step, 0.0)
        z = z - step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(z))):
            break
    else:
        raise NoConvergence("Aberth iteration did not converge", z, float(np.max(np.abs(step))))
    resid = np.max(np.abs(np.polynomial.polynomial.polyval(z, c)))
    if resid > 1e-10 * np.max(np.abs(c)) * max(1.0, np.max(np.abs(z))) ** n:
        raise NoConvergence("root residual above tolerance", z, float(resid))
    return z[np.lexsort((z.imag, z.real))]

"""Riemann-Hilbert matrix Y, its jump on the contour, and Hermite-Pade orders.

Row 0 of Y is built from p_n, row j+1 from gamma_j q_n^{(j)}; columns 1..l
hold Cauchy transforms (1/2 pi i) int P(w) chi_{n-e_i}(w) / (w - z) dw.
The + side of the contour is its left (the interior).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chi import add, unit, vec
from .errors import DegenerateNormalization, InvalidIndex, TooCloseToContour
from .moments import MomentTables, get_evaluator
from .polynomials import MonicPoly, solve_multiple, solve_q, staircase, StaircaseIndex
from .quadrature import DEFAULT_SPEC, QuadratureSpec, nearest_on_contour
from .weight import WeightConfig

FOCUS_FLOOR = 1e-7  # absolute grading scale used near jump test points


def loglog_slope(x, y) -> float:
    x = np.log(np.asarray(x, dtype=float))
    y = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class YSampler:
    cfg: WeightConfig
    index: StaircaseIndex
    p: MonicPoly
    q: list
    gamma: np.ndarray
    spec: QuadratureSpec = DEFAULT_SPEC
    _nodes: dict = field(default_factory=dict, repr=False)

    @property
    def nvec(self):
        return self.index.vector

    @property
    def ev(self):
        return get_evaluator(self.cfg, self.spec)

    @property
    def eps_off(self) -> float:
        return 1e-4 * self.ev.gamma.diameter

    def node_data(self, focus=None):
        """Contour nodes, weights and the functions integrated against 1/(w - z)."""
        key = tuple(focus) if focus else None
        if key not in self._nodes:
            ev = self.ev
            w, dw, _, ps = ev.gamma_set(focus)
            l = self.cfg.l
            chis = np.column_stack([
                ev.values(ps, vec(add(self.nvec, unit(l, i), -1))) for i in range(l)])
            polys = [self.p(w)] + [g * qj(w) for g, qj in zip(self.gamma, self.q)]
            F = np.stack([P[:, None] * chis for P in polys])  # (l+1, nw, l)
            self._nodes[key] = (w, dw, F)
        return self._nodes[key]

    def row_polys(self, z):
        return np.array([self.p(z)] + [g * qj(z) for g, qj in zip(self.gamma, self.q)])


def build_sampler(cfg: WeightConfig, n: int, tables: MomentTables | None = None,
                  precision: str = "f64") -> YSampler:
    """Solve p_n, q^{(j)} and gamma_j for the staircase index of length n (needs n >= l)."""
    st = staircase(n, cfg.l)
    if st.kappa < 1:
        raise InvalidIndex(f"every entry of the index must be >= 1; need n >= l = {cfg.l}")
    tables = tables if tables is not None else MomentTables(cfg)
    p = solve_multiple(tables, st.vector, precision)
    q = [solve_q(tables, st.vector, j, precision) for j in range(cfg.l)]
    gam = gamma_constants(tables, st.vector, q)
    return YSampler(cfg, st, p, q, gam, tables.spec)


def gamma_constants(tables: MomentTables, nvec, q) -> np.ndarray:
    """gamma_j = -((1/2 pi i) int q^{(j)} w^{n_j - 1} chi_{n-e_j} dw)^{-1}."""
    out = []
    for j, qj in enumerate(q):
        m = nvec[j] - 1
        terms = np.array([c * tables.get_nu(nvec, j, t + m) for t, c in enumerate(qj.coeffs)])
        inner = complex(np.sum(terms)) / math.pi  # nu carries 1/2i
        scale = float(np.max(np.abs(terms))) / math.pi
        if abs(inner) < 1e-12 * scale or inner == 0:
            raise DegenerateNormalization(f"normalization integral for row {j + 1} vanishes")
        out.append(-1.0 / inner)
    return np.array(out)


def _cauchy(sampler: YSampler, zs, focus=None) -> np.ndarray:
    """Cauchy transforms for every row and column: shape (len(zs), l+1, l)."""
    w, dw, F = sampler.node_data(focus)
    K = dw[None, :] / (w[None, :] - np.asarray(zs)[:, None]) / (2j * math.pi)
    return np.einsum("zw,rwi->zri", K, F)


def assemble_Y(sampler: YSampler, z: complex, focus=None, min_distance=None) -> np.ndarray:
    z = complex(z)
    gamma = sampler.ev.gamma
    k, tau, foot, dist = nearest_on_contour(gamma, z)
    limit = sampler.eps_off if min_distance is None else min_distance
    if dist < limit:
        raise TooCloseToContour(f"z is {dist:.3g} from the contour (limit {limit:.3g})")
    if focus is None and dist < 0.25 * gamma.pieces[k].length:
        focus = ((k, tau, dist / (8.0 * gamma.pieces[k].length)),)
    C = _cauchy(sampler, [z], focus)[0]
    return np.column_stack([sampler.row_polys(z), C])


def jump_matrix(sampler: YSampler, zeta: complex) -> np.ndarray:
    l = sampler.cfg.l
    J = np.eye(l + 1, dtype=complex)
    for i in range(l):
        J[0, i + 1] = sampler.ev.chi_vec(add(sampler.nvec, unit(l, i), -1), zeta)
    return J


def _test_point(sampler: YSampler, piece: int, tau: float):
    pc = sampler.ev.gamma.pieces[piece]
    zeta = complex(pc.point(tau))
    d = complex(pc.deriv(tau))
    return zeta, 1j * d / abs(d), pc.length


def jump_residual(sampler: YSampler, piece: int, tau: float, eps: float, focus=None) -> np.ndarray:
    """Per-row max |Y(zeta + eps nu) - Y(zeta - eps nu) J(zeta)|, nu the inward normal."""
    if not 1e-6 <= eps <= 1e-2:
        raise ValueError("eps must lie in [1e-6, 1e-2]")
    zeta, nu, length = _test_point(sampler, piece, tau)
    if focus is None:
        focus = ((piece, tau, FOCUS_FLOOR / length),)
    yp = assemble_Y(sampler, zeta + eps * nu, focus, min_distance=0.5 * eps)
    ym = assemble_Y(sampler, zeta - eps * nu, focus, min_distance=0.5 * eps)
    D = yp - ym @ jump_matrix(sampler, zeta)
    return np.max(np.abs(D), axis=1)


def jump_study(sampler: YSampler, eps=(1e-2, 1e-3, 1e-4), per_piece: int = 3) -> dict:
    """Jump residuals at ``per_piece`` interior points of every contour piece."""
    gamma = sampler.ev.gamma
    taus = [(t + 1) / (per_piece + 1) for t in range(per_piece)]
    focus = tuple((k, t, FOCUS_FLOOR / pc.length)
                  for k, pc in enumerate(gamma.pieces) for t in taus)
    points = []
    for k in range(len(gamma.pieces)):
        for t in taus:
            res = np.array([jump_residual(sampler, k, t, e, focus) for e in eps])  # (neps, l+1)
            slopes = [loglog_slope(eps, res[:, r]) for r in range(res.shape[1])]
            points.append({"piece": k, "tau": t, "residuals": res.tolist(), "slopes": slopes,
                           "pass": all(abs(s - 1.0) <= 0.2 for s in slopes)})
    return {"n": sampler.index.n, "eps": list(eps), "points": points,
            "pass": all(p["pass"] for p in points)}


def normalized_M(sampler: YSampler, z: complex) -> np.ndarray:
    Y = assemble_Y(sampler, z)
    scale = np.array([z ** (-sampler.index.n)] + [z ** ni for ni in sampler.nvec])
    return Y * scale[None, :]


def laurent_moments(sampler: YSampler, kmax: int) -> np.ndarray:
    """m[r, i, k] = int P_r(w) w^k chi_{n-e_i}(w) dw for k <= kmax."""
    w, dw, F = sampler.node_data()
    powers = w[None, :] ** np.arange(kmax + 1)[:, None]
    return np.einsum("rwi,kw->rik", F * dw[None, :, None], powers)


def _entry_moments(sampler: YSampler, rows=None, cols=None):
    """(k0, |m_k|) for every Cauchy entry; k0 is the first index that should survive
    (n_i, or n_i - 1 on the normalised diagonal)."""
    nv = sampler.nvec
    m = np.abs(laurent_moments(sampler, max(nv) + 4))
    l = sampler.cfg.l
    rows = range(l + 1) if rows is None else rows
    cols = range(l) if cols is None else cols
    return [(nv[i] - 1 if r == i + 1 else nv[i], m[r, i]) for r in rows for i in cols]


def window_score(entries, r0: float, span: float = 4.0) -> float:
    """Relative size of the neglected Laurent terms at r0 and of the
    should-be-zero terms (quadrature and solve residue) at span * r0."""
    lead = max(mk[k0] * (span * r0) ** -1.0 for k0, mk in entries)
    bad = 0.0
    for k0, mk in entries:
        tail = sum(mk[k0 + t] * r0 ** (-t - 1.0) for t in range(1, 4))
        junk = sum(mk[k] * (span * r0) ** (k0 - k - 1.0) for k in range(k0))
        bad = max(bad, tail, junk)
    return bad / lead


def default_radii(sampler: YSampler, rows=None, cols=None) -> list:
    """Three radii r0, 2 r0, 4 r0 with r0 >= 10 max|a| minimising ``window_score``."""
    R = max(abs(a) for a in sampler.cfg.nodes)
    entries = _entry_moments(sampler, rows, cols)
    grid = 10.0 * R * 2.0 ** (np.arange(0, 41) / 4.0)
    scores = [window_score(entries, r0) for r0 in grid]
    r0 = float(grid[int(np.argmin(scores))])
    return [r0, 2 * r0, 4 * r0]


def det_rounding_floor(sampler: YSampler, z: complex, M: np.ndarray, safety: float = 100.0) -> float:
    """First-order bound on the rounding error of det M.

    Each Cauchy entry is a sum whose terms have absolute size |F dw / (w - z)|;
    its rounding error is scaled by z^{n_i} and enters det M through the cofactor.
    """
    w, dw, F = sampler.node_data()
    K = np.abs(dw) / np.abs(w - z) / (2 * math.pi)
    A = np.einsum("w,rwi->ri", K, np.abs(F)) * np.abs(z) ** np.array(sampler.nvec)[None, :]
    cof = np.abs(np.linalg.det(M) * np.linalg.inv(M)).T
    return float(safety * np.finfo(float).eps * (1.0 + np.sum(cof[:, 1:] * A)))


def asymptotic_check(sampler: YSampler, radii=None, theta: float = 0.7) -> dict:
    """Slope of log ||M - I|| against log |z|; det Y - 1 must stay below its rounding floor."""
    radii = default_radii(sampler) if radii is None else list(radii)
    dev, ddev, floors = [], [], []
    I = np.eye(sampler.cfg.l + 1)
    for rho in radii:
        z = rho * complex(math.cos(theta), math.sin(theta))
        M = normalized_M(sampler, z)
        dev.append(float(np.max(np.abs(M - I))))
        ddev.append(float(abs(np.linalg.det(M) - 1.0)))
        floors.append(det_rounding_floor(sampler, z, M))
    s = loglog_slope(radii, dev)
    det_ok = all(d <= f for d, f in zip(ddev, floors))
    return {"n": sampler.index.n, "radii": radii, "deviation": dev, "slope": s,
            "det_deviation": ddev, "det_floor": floors, "det_pass": det_ok,
            "pass": abs(s + 1.0) <= 0.1 and det_ok}


# ---------------------------------------------------------------- Hermite-Pade


def hp_parts(sampler: YSampler, j: int, zs):
    """p f_j - Q by the literal subtraction and by the equivalent single integral,
    and Q both from its coefficient expansion and by direct quadrature."""
    ev = sampler.ev
    l = sampler.cfg.l
    key = vec(add(sampler.nvec, unit(l, j), -1))
    w, dw, _, ps = ev.gamma_set()
    chi = ev.values(ps, key)
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    alpha = sampler.p.coeffs
    n = alpha.size - 1
    Mp = np.array([np.sum(w ** t * chi * dw) for t in range(n)])
    qc = np.array([sum(alpha[t] * Mp[t - 1 - m] for t in range(m + 1, n + 1)) for m in range(n)])
    Q = np.polynomial.polynomial.polyval(zs, qc) if n else np.zeros_like(zs)
    f = (chi * dw)[None, :] / (zs[:, None] - w[None, :])
    pz = sampler.p(zs)
    pw = sampler.p(w)
    literal = pz * f.sum(axis=1) - Q
    single = (f * pw[None, :]).sum(axis=1)
    Q_direct = (f * (pz[:, None] - pw[None, :])).sum(axis=1)
    return literal, single, Q_direct, Q


def hp_order_check(sampler: YSampler, j: int, radii=None, theta: float = 0.7) -> dict:
    """Decay order of p f_j - Q_j.  The slope uses the cancellation-free form
    int p(s) chi(s) / (z - s) ds; the literal difference is compared with it
    at the smallest radius, where no digits are lost."""
    radii = default_radii(sampler, rows=[0], cols=[j]) if radii is None else list(radii)
    zs = np.array(radii) * complex(math.cos(theta), math.sin(theta))
    literal, single, Qd, Qc = hp_parts(sampler, j, zs)
    s = loglog_slope(radii, np.abs(single))
    target = -(sampler.nvec[j] + 1)
    R = max(abs(a) for a in sampler.cfg.nodes)
    z0 = np.array([2.0 * R * complex(math.cos(theta), math.sin(theta))])
    lit0, sing0, Qd0, Qc0 = hp_parts(sampler, j, z0)
    q_cons = float(abs(Qd0[0] - Qc0[0]) / max(abs(Qc0[0]), 1e-300))
    e_cons = float(abs(lit0[0] - sing0[0]) / max(abs(sing0[0]), 1e-300))
    return {"n": sampler.index.n, "j": j, "radii": radii, "error": np.abs(single).tolist(),
            "slope": s, "target": target, "q_consistency": q_cons, "error_consistency": e_cons,
            "pass": abs(s - target) <= 0.2 and q_cons <= 1e-8}

"""Weighted incomplete Laplace transforms ("chi functions") of the weight.

For a polynomial factor P(s) every chi function has the form

    W(z) * int P(s) Wbar(s) exp(-z s) ds

along the ray {conj(z) t : t >= 0} (possibly truncated), optionally minus
the same integrand over the segment [0, conj(a_1)].  Substituting
s = u / z turns the ray into u in [0, inf) with weight exp(-u), and the
branch points conj(a_j) of Wbar become u = z conj(a_j), towards which the
u-panels are graded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np

from .errors import InvalidIndex, UndefinedDirection
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    contour_rule,
    build_contour,
    graded_breaks,
    panel_rule,
    u_cutoff,
)
from .weight import TWO_PI, W_array, WeightConfig, Wbar_array

EPS_DIR = 1e-6


# ------------------------------------------------------------ multi-indices


def as_index(k, l: int) -> tuple[int, ...]:
    k = tuple(int(v) for v in k)
    if len(k) != l:
        raise InvalidIndex(f"multi-index {k} does not have length {l}")
    if any(v < 0 for v in k):
        raise InvalidIndex(f"multi-index {k} has a negative entry")
    return k


def unit(l: int, j: int) -> tuple[int, ...]:
    """e_j with a zero-based j."""
    return tuple(1 if i == j else 0 for i in range(l))


def add(k, e, sign: int = 1) -> tuple[int, ...]:
    return tuple(a + sign * b for a, b in zip(k, e))


def leq(s, k) -> bool:
    return all(a <= b for a, b in zip(s, k))


def indices_of_length(l: int, n: int):
    """All multi-indices of length l with |k| = n."""
    if l == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in indices_of_length(l - 1, n - first):
            yield (first,) + rest


# ------------------------------------------------------------ factors
# A factor key is ("mono", m) for s^m or ("vec", k) for prod_j (s - conj a_j)^{k_j}.


def mono(m: int):
    return ("mono", int(m))


def vec(k):
    return ("vec", tuple(int(v) for v in k))


def factor_degree(key) -> int:
    return key[1] if key[0] == "mono" else sum(key[1])


def factor_values(cfg: WeightConfig, key, s: np.ndarray) -> np.ndarray:
    if key[0] == "mono":
        return s ** key[1]
    out = np.ones_like(s)
    for ab, kj in zip(cfg.abar, key[1]):
        if kj:
            out = out * (s - ab) ** kj
    return out


# ------------------------------------------------------------ evaluators


@dataclass
class PointSet:
    """Quadrature rules for the ray integrals at a batch of points z."""
    z: np.ndarray
    W: np.ndarray
    s: np.ndarray
    base: np.ndarray
    offsets: np.ndarray
    cache: dict = field(default_factory=dict)


class ChiEvaluator:
    """Evaluates chi_m, chi_m^inf, chi_k and tilde-chi_k for one configuration."""

    def __init__(self, cfg: WeightConfig, spec: QuadratureSpec = DEFAULT_SPEC,
                 max_degree: int = 24, eps_dir: float = EPS_DIR):
        self.cfg = cfg
        self.spec = spec
        self.max_degree = max_degree
        self.eps_dir = eps_dir
        self._csum = float(np.sum(cfg.c))
        self._U = u_cutoff(max_degree + self._csum + 1.0, spec.log_floor)
        self._segment = None
        self._gamma = None
        self._gamma_sets = {}

    # -- raw rules -------------------------------------------------------

    def _u_breaks(self, z: complex, lo: float, hi: float) -> np.ndarray:
        sings = []
        for ab in self.cfg.abar:
            sig = z * ab
            sings.append((sig.real, abs(sig.imag)))
        return graded_breaks(lo, hi, sings, coarse=4.0, min_size=self.spec.min_scale * max(1.0, hi))

    def _ray_rule(self, z: complex, lo: float = 0.0, hi: float | None = None):
        """Nodes s and weights so that sum(w P(s)) = int P Wbar exp(-zs) ds."""
        if hi is None:
            hi = max(self._U, lo + self._U)
        br = self._u_breaks(z, lo, hi)
        u, w = panel_rule(br, self.spec.order)
        s = u / z
        base = Wbar_array(self.cfg, s) * np.exp(-u) * w / z
        return s, base

    def point_set(self, zs, lo=None, hi=None) -> PointSet:
        """Batch rules; ``lo``/``hi`` override the u-range (functions of z)."""
        zs = np.asarray(zs, dtype=complex).ravel()
        ss, bs, offs = [], [], []
        n = 0
        for z in zs:
            a = 0.0 if lo is None else lo(z)
            b = None if hi is None else hi(z)
            s, base = self._ray_rule(complex(z), a, b)
            offs.append(n)
            n += s.size
            ss.append(s)
            bs.append(base)
        return PointSet(zs, W_array(self.cfg, zs), np.concatenate(ss), np.concatenate(bs),
                        np.asarray(offs))

    def segment_rule(self):
        """Rule for int_0^{conj a_1} P Wbar exp(-zs) ds: nodes s, weights (without exp)."""
        if self._segment is None:
            ab1 = self.cfg.abar[0]
            sings = [(1.0, 0.0)]
            for ab in self.cfg.abar[1:]:
                t = ab / ab1
                sings.append((t.real, abs(t.imag)))
            br = graded_breaks(0.0, 1.0, sings, coarse=0.25, min_size=self.spec.min_scale)
            tau, w = panel_rule(br, self.spec.order)
            s = ab1 * tau
            self._segment = (s, Wbar_array(self.cfg, s) * w * ab1)
        return self._segment

    def values(self, ps: PointSet, key, tilde: bool = False) -> np.ndarray:
        ck = (key, tilde)
        if ck not in ps.cache:
            if factor_degree(key) > self.max_degree:
                raise ValueError(f"factor degree exceeds max_degree={self.max_degree}")
            raw = np.add.reduceat(ps.base * factor_values(self.cfg, key, ps.s), ps.offsets)
            if tilde:
                s, w = self.segment_rule()
                wp = w * factor_values(self.cfg, key, s)
                raw = raw - np.exp(-np.outer(ps.z, s)) @ wp
            ps.cache[ck] = ps.W * raw
        return ps.cache[ck]

    # -- contour ---------------------------------------------------------

    @property
    def gamma(self):
        if self._gamma is None:
            self._gamma = build_contour(self.cfg)
        return self._gamma

    def gamma_set(self, focus=None):
        """Contour nodes/weights and the ray rules at each node (cached)."""
        key = tuple(focus) if focus else None
        if key not in self._gamma_sets:
            z, dz, idx = contour_rule(self.gamma, self.spec, focus)
            self._gamma_sets[key] = (z, dz, idx, self.point_set(z))
        return self._gamma_sets[key]

    def contour_integral(self, key, weight_fn=None, tilde: bool = False, focus=None) -> complex:
        """int_Gamma weight_fn(z) chi_key(z) dz."""
        z, dz, _, ps = self.gamma_set(focus)
        v = self.values(ps, key, tilde)
        if weight_fn is not None:
            v = v * weight_fn(z)
        return complex(np.sum(v * dz))

    # -- point evaluations -------------------------------------------------

    def _admissible(self, z: complex) -> complex:
        z = complex(z)
        if z == 0:
            raise UndefinedDirection("chi functions are not defined at z = 0")
        th = math.atan2(z.imag, z.real)
        for beta in self.cfg.cut_angles:
            d = abs((th - beta + math.pi) % TWO_PI - math.pi)
            if d <= self.eps_dir:
                raise UndefinedDirection(f"arg z is within {self.eps_dir} of a node argument")
        return z

    def _single(self, z, key, lo=0.0, hi=None, tilde=False, check=True) -> complex:
        if check:
            z = self._admissible(z)
        s, base = self._ray_rule(complex(z), lo, hi)
        val = np.sum(base * factor_values(self.cfg, key, s))
        if tilde:
            ss, w = self.segment_rule()
            val -= np.sum(w * factor_values(self.cfg, key, ss) * np.exp(-z * ss))
        return complex(W_array(self.cfg, z) * val)

    # ``check=False`` skips the direction guard; only meaningful when every
    # exponent crossing that direction is an integer.

    def chi_m_finite(self, m: int, z: complex, check: bool = True) -> complex:
        z = self._admissible(z) if check else complex(z)
        return self._single(z, mono(m), 0.0, abs(z) ** 2, check=False)

    def chi_m_inf(self, m: int, z: complex, check: bool = True) -> complex:
        return self._single(z, mono(m), check=check)

    def chi_vec(self, k, z: complex, check: bool = True) -> complex:
        return self._single(z, vec(as_index(k, self.cfg.l)), check=check)

    def chi_tilde(self, k, z: complex, check: bool = True) -> complex:
        return self._single(z, vec(as_index(k, self.cfg.l)), tilde=True, check=check)

    def chi_tail(self, m: int, z: complex) -> complex:
        """chi_m^inf(z) - chi_m(z), i.e. W(z) times the integral from conj z outward.

        Defined off the segments [0, a_j]; in particular on the cuts beyond a_j.
        """
        z = complex(z)
        return self._single(z, mono(m), abs(z) ** 2, abs(z) ** 2 + self._U, check=False)


# ------------------------------------------------------------ lemma checks


def lemma1_residual(ev: ChiEvaluator, k, z: complex) -> dict:
    """z tchi_k - sum_j (c_j + k_j) tchi_{k - e_j}; needs every k_j >= 1."""
    l = ev.cfg.l
    k = as_index(k, l)
    if any(v == 0 for v in k):
        raise InvalidIndex(f"Lemma 1 residual needs all entries >= 1, got {k}")
    lhs = z * ev.chi_tilde(k, z)
    terms = [(ev.cfg.exponents[j] + k[j]) * ev.chi_tilde(add(k, unit(l, j), -1), z) for j in range(l)]
    res = abs(lhs - sum(terms))
    scale = max([abs(lhs)] + [abs(t) for t in terms])
    return {"residual": res, "scale": scale, "relative": res / scale if scale else res}


def lemma2_residual(ev: ChiEvaluator, k, n: int, m: int, z: complex) -> dict:
    """tchi_{k+e_n} - tchi_{k+e_m} + (conj a_n - conj a_m) tchi_k with zero-based n, m."""
    l = ev.cfg.l
    k = as_index(k, l)
    if n == m:
        raise InvalidIndex("Lemma 2 needs n != m")
    ab = ev.cfg.abar
    t1 = ev.chi_tilde(add(k, unit(l, n)), z)
    t2 = ev.chi_tilde(add(k, unit(l, m)), z)
    t3 = (ab[n] - ab[m]) * ev.chi_tilde(k, z)
    res = abs(t1 - t2 + t3)
    scale = max(abs(t1), abs(t2), abs(t3))
    return {"residual": res, "scale": scale, "relative": res / scale if scale else res}


def corollary_expansion(cfg: WeightConfig, k, s: int) -> dict:
    """Coefficients with z^s tchi_k = sum coeff[t] tchi_{k - t} over |t| = s."""
    l = cfg.l
    k = as_index(k, l)
    if s < 1 or s > min(k):
        raise InvalidIndex(f"need 1 <= s <= min(k) = {min(k)}, got s = {s}")
    coeffs = {tuple([0] * l): 1.0}
    for _ in range(s):
        nxt = {}
        for t, cf in coeffs.items():
            cur = add(k, t, -1)
            for j in range(l):
                tj = add(t, unit(l, j))
                nxt[tj] = nxt.get(tj, 0.0) + cf * (cfg.exponents[j] + cur[j])
        coeffs = nxt
    return coeffs


def corollary_residual(ev: ChiEvaluator, k, s: int, z: complex) -> dict:
    coeffs = corollary_expansion(ev.cfg, k, s)
    lhs = z ** s * ev.chi_tilde(k, z)
    terms = [cf * ev.chi_tilde(add(k, t, -1), z) for t, cf in coeffs.items()]
    res = abs(lhs - sum(terms))
    scale = max([abs(lhs)] + [abs(t) for t in terms])
    return {"residual": res, "scale": scale, "relative": res / scale if scale else res}


def decay_check(ev: ChiEvaluator, m: int, power: float, theta: float, radii) -> dict:
    """Check |z^k (chi_m^inf - chi_m)| <= C exp(-(|z|-1)^2) along a ray from 0."""
    radii = sorted(float(r) for r in radii)
    if radii[0] <= 2:
        raise ValueError("radii must exceed 2")
    g, ratio = [], []
    for rho in radii:
        z = rho * complex(math.cos(theta), math.sin(theta))
        ev._admissible(z)
        val = rho ** power * abs(ev.chi_tail(m, z))
        g.append(val)
        ratio.append(val / math.exp(-(rho - 1.0) ** 2))
    bound = 10.0 * ratio[0]
    return {
        "radii": radii,
        "g": g,
        "ratio": ratio,
        "bound": bound,
        "monotone": all(b < a for a, b in zip(g, g[1:])),
        "pass": all(r <= bound for r in ratio),
    }


def tail_continuity(ev: ChiEvaluator, m: int, j: int, t: float = 2.0, eps: float = 1e-8) -> dict:
    """Compare chi_m^inf - chi_m on both sides of the cut from a_j at a_j t."""
    a = ev.cfg.nodes[j]
    p = a * t
    nrm = 1j * a / abs(a)
    plus = ev.chi_tail(m, p + eps * nrm)
    minus = ev.chi_tail(m, p - eps * nrm)
    diff = abs(plus - minus)
    scale = max(abs(plus), abs(minus))
    return {"plus": plus, "minus": minus, "difference": diff,
            "relative": diff / scale if scale else diff}

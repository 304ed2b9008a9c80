"""Contours, path quadrature and the planar area-integral oracle.

Two quadrature engines live here:

* ``integrate_path``: a general adaptive Gauss-Kronrod (7/15) integrator for
  segments, rays and closed contours, with an error estimate.
* graded composite Gauss-Legendre rules (``graded_breaks`` + ``panel_rule``)
  whose panels shrink geometrically towards known (near-)singular points.
  These produce reusable node sets, which the chi/moment code relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NoConvergence, OriginNotEnclosed
from .weight import WeightConfig, TWO_PI

GRADING_RATIO = 4.0


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-12
    abs_floor: float = 1e-30
    max_depth: int = 20
    tail_cut: float | None = None

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    @property
    def order(self) -> int:
        # Gauss points per panel; panels are sized so that the nearest
        # singularity sits at Bernstein parameter >= 1 + sqrt(2).
        n = math.ceil(-math.log(self.rel_tol) / (2.0 * math.log(1.0 + math.sqrt(2.0))))
        return int(min(max(n + 2, 4), 40))

    @property
    def min_scale(self) -> float:
        """Smallest relative panel size used by geometric grading."""
        return GRADING_RATIO ** (-self.max_depth)

    @property
    def log_floor(self) -> float:
        return -math.log(self.abs_floor)


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def graded_breaks(a: float, b: float, sings=(), coarse: float | None = None,
                  ratio: float = GRADING_RATIO, min_size: float = 0.0) -> np.ndarray:
    """Panel breakpoints on [a, b] refined geometrically towards singularities.

    ``sings`` holds pairs (x0, delta): a singular point whose foot on the
    real line is x0 and whose distance to the line is delta.  Breakpoints
    x0 +- delta*ratio^k make every panel no longer than its distance to the
    singular point.
    """
    pts = [a, b]
    if coarse is not None and coarse > 0:
        m = int(math.ceil((b - a) / coarse))
        pts.extend(np.linspace(a, b, m + 1)[1:-1].tolist())
    for x0, delta in sings:
        delta = max(float(delta), min_size, 1e-300)
        if x0 < a:
            delta = max(delta, a - x0)
            x0 = a
        elif x0 > b:
            delta = max(delta, x0 - b)
            x0 = b
        if a < x0 < b:
            pts.append(x0)
        h = delta
        while x0 - h > a or x0 + h < b:
            if a < x0 - h:
                pts.append(x0 - h)
            if x0 + h < b:
                pts.append(x0 + h)
            h *= ratio
    pts = np.unique(np.asarray(pts, dtype=float))
    return pts


def panel_rule(breaks: np.ndarray, order: int):
    """Composite Gauss-Legendre nodes/weights on the panels given by ``breaks``."""
    x, w = gauss_legendre(order)
    lo = breaks[:-1, None]
    hl = 0.5 * np.diff(breaks)[:, None]
    nodes = (lo + hl * (x[None, :] + 1.0)).ravel()
    weights = (hl * w[None, :]).ravel()
    return nodes, weights


# ---------------------------------------------------------------- contour


@dataclass(frozen=True)
class LinePiece:
    start: complex
    end: complex

    def point(self, tau):
        return self.start + (self.end - self.start) * np.asarray(tau)

    def deriv(self, tau):
        return np.full(np.shape(tau), self.end - self.start, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def project(self, z: complex) -> float:
        d = self.end - self.start
        return float(((z - self.start) * np.conj(d)).real / abs(d) ** 2)


@dataclass(frozen=True)
class ArcPiece:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def point(self, tau):
        th = self.theta0 + (self.theta1 - self.theta0) * np.asarray(tau)
        return self.center + self.radius * np.exp(1j * th)

    def deriv(self, tau):
        th = self.theta0 + (self.theta1 - self.theta0) * np.asarray(tau)
        return 1j * self.radius * (self.theta1 - self.theta0) * np.exp(1j * th)

    @property
    def length(self) -> float:
        return self.radius * abs(self.theta1 - self.theta0)

    def project(self, z: complex) -> float:
        th = math.atan2((z - self.center).imag, (z - self.center).real)
        span = self.theta1 - self.theta0
        return float(((th - self.theta0) % TWO_PI) / span)

    @property
    def start(self):
        return complex(self.point(0.0))

    @property
    def end(self):
        return complex(self.point(1.0))


@dataclass(frozen=True)
class SpiralPiece:
    """z(tau) = exp(L0 + tau (L1 - L0)): log-linear in modulus and argument."""
    L0: complex
    L1: complex

    def point(self, tau):
        return np.exp(self.L0 + (self.L1 - self.L0) * np.asarray(tau))

    def deriv(self, tau):
        return (self.L1 - self.L0) * self.point(tau)

    @property
    def length(self) -> float:
        return float(abs(self.L1 - self.L0) * abs(self.point(0.5)))  # close enough for scaling

    def project(self, z: complex) -> float:
        t = np.linspace(0.0, 1.0, 257)
        k = int(np.argmin(np.abs(self.point(t) - z)))
        lo, hi = t[max(k - 1, 0)], t[min(k + 1, 256)]
        for _ in range(60):
            m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
            if abs(self.point(m1) - z) < abs(self.point(m2) - z):
                hi = m2
            else:
                lo = m1
        return float(0.5 * (lo + hi))


@dataclass(frozen=True)
class ContourGamma:
    """Closed counterclockwise curve through the nodes, enclosing 0.

    Piece k runs from vertex k to vertex k+1 (cyclically).
    """
    pieces: tuple
    vertices: tuple[complex, ...]
    kind: str
    counterclockwise: bool = True

    @property
    def diameter(self) -> float:
        pts = np.concatenate([np.atleast_1d(p.point(np.linspace(0, 1, 65))) for p in self.pieces])
        return float(np.max(np.abs(pts[:, None] - pts[None, :])))

    def winding_number(self, point: complex = 0j) -> float:
        z, dz, _ = contour_rule(self, QuadratureSpec(rel_tol=1e-10, max_depth=4))
        return float((np.sum(dz / (z - point)) / (2j * math.pi)).real)

    def contains(self, point: complex) -> bool:
        return abs(self.winding_number(point) - 1.0) < 0.5


def _polygon(cfg: WeightConfig) -> ContourGamma:
    a = list(cfg.nodes)
    pieces = tuple(LinePiece(a[k], a[(k + 1) % len(a)]) for k in range(len(a)))
    return ContourGamma(pieces, tuple(a), "polygon")


def gamma_polygon(cfg: WeightConfig) -> ContourGamma:
    """Strict polygon a_1 a_2 ... a_l a_1; raises if it does not enclose 0."""
    if cfg.l < 3:
        raise OriginNotEnclosed(f"a polygon on {cfg.l} node(s) is degenerate")
    ang = cfg.cut_angles
    gaps = np.diff(np.concatenate([ang, [ang[0] + TWO_PI]]))
    if np.any(gaps >= math.pi - 1e-12):
        raise OriginNotEnclosed("node polygon does not contain the origin in its interior")
    gamma = _polygon(cfg)
    if abs(gamma.winding_number() - 1.0) > 1e-6:
        raise OriginNotEnclosed("polygon winding number about 0 is not 1")
    return gamma


def _two_node_circle(cfg: WeightConfig) -> ContourGamma:
    a1, a2 = cfg.nodes
    m = 0.5 * (a1 + a2)
    h = 0.5 * abs(a2 - a1)
    chord = (a2 - a1) / abs(a2 - a1)
    d = 1j * chord
    q = -(m * np.conj(d)).real
    if q < 0:
        d, q = -d, -q
    # center m + t d: origin inside iff |m|^2 - 2 t q < h^2
    if q < 1e-14:
        if abs(m) >= h:
            raise OriginNotEnclosed("origin lies on the line through a_1, a_2 outside the chord")
        t = 0.0
    else:
        t = q
        if abs(m) ** 2 - 2 * t * q >= h * h * (1 - 1e-9):
            t = (abs(m) ** 2 - h * h) / q
    center = m + t * d
    radius = abs(a1 - center)
    if abs(center) >= radius * (1 - 1e-12):
        raise OriginNotEnclosed("no usable circle through a_1, a_2 encloses the origin")
    th1 = math.atan2((a1 - center).imag, (a1 - center).real)
    th2 = th1 + ((math.atan2((a2 - center).imag, (a2 - center).real) - th1) % TWO_PI)
    pieces = (ArcPiece(center, radius, th1, th2), ArcPiece(center, radius, th2, th1 + TWO_PI))
    return ContourGamma(pieces, (a1, a2), "arc2")


def spiral_contour(cfg: WeightConfig) -> ContourGamma:
    """Star-shaped curve through the nodes, log-linear in (log r, arg) between
    consecutive nodes; it stays in each angular sector and has |z| >= min |a_j|."""
    logs = [complex(math.log(abs(a)), b) for a, b in zip(cfg.nodes, cfg.cut_angles)]
    l = cfg.l
    pieces = []
    for k in range(l):
        L0, L1 = logs[k], logs[(k + 1) % l]
        if k == l - 1:
            L1 = L1 + TWO_PI * 1j
        pieces.append(SpiralPiece(L0, L1))
    return ContourGamma(tuple(pieces), tuple(cfg.nodes), "spiral")


def origin_distance(gamma: ContourGamma) -> float:
    t = np.linspace(0.0, 1.0, 2049)
    return float(min(np.min(np.abs(p.point(t))) for p in gamma.pieces))


CLEARANCE = 0.9  # fall back to the spiral when the preferred curve passes closer to 0


def build_contour(cfg: WeightConfig) -> ContourGamma:
    """Contour used by all computations.

    Circle for l=1, two circular arcs for l=2, the node polygon otherwise.  If
    that curve exists but comes within CLEARANCE * min|a_j| of the origin, the integrands
    blow up like |z|^{-k} there and the sums cancel badly, so the spiral
    contour is used instead (all integrals are independent of the choice).
    """
    if cfg.l == 1:
        a = cfg.nodes[0]
        beta = float(cfg.cut_angles[0])
        return ContourGamma((ArcPiece(0j, abs(a), beta, beta + TWO_PI),), (a,), "circle")
    gamma = _two_node_circle(cfg) if cfg.l == 2 else gamma_polygon(cfg)
    rmin = min(abs(a) for a in cfg.nodes)
    if origin_distance(gamma) < CLEARANCE * rmin:
        return spiral_contour(cfg)
    return gamma


def contour_rule(gamma: ContourGamma, spec: QuadratureSpec = DEFAULT_SPEC, focus=None):
    """Nodes z, weights dz and piece index for integrating over ``gamma``.

    Panels are graded towards every vertex and towards the point of each
    piece nearest the origin, where chi_m grows like |z|^{-m-1}.  ``focus`` optionally lists
    (piece index, tau0, delta) triples for extra grading, used for Cauchy
    transforms evaluated close to the contour.
    """
    zs, ws, idx = [], [], []
    for k, piece in enumerate(gamma.pieces):
        sings = [(0.0, spec.min_scale), (1.0, spec.min_scale)]
        t0 = min(max(piece.project(0j), 0.0), 1.0)
        sings.append((t0, abs(complex(piece.point(t0))) / piece.length))
        if focus:
            sings += [(t0, dl) for (pk, t0, dl) in focus if pk == k]
        br = graded_breaks(0.0, 1.0, sings, coarse=0.125, min_size=spec.min_scale)
        tau, w = panel_rule(br, spec.order)
        zs.append(piece.point(tau))
        ws.append(piece.deriv(tau) * w)
        idx.append(np.full(tau.shape, k))
    return np.concatenate(zs), np.concatenate(ws), np.concatenate(idx)


def nearest_on_contour(gamma: ContourGamma, z: complex):
    """(piece index, tau, point, distance) of the closest contour point to z."""
    best = None
    for k, piece in enumerate(gamma.pieces):
        t = min(max(piece.project(z), 0.0), 1.0)
        p = complex(piece.point(t))
        d = abs(z - p)
        if best is None or d < best[3]:
            best = (k, t, p, d)
    return best


# ---------------------------------------------------------- adaptive GK

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_GK_X = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_W = np.zeros(15)
_G_W[1::2] = np.concatenate([_WG[:3], [_WG[3]], _WG[:3][::-1]])


@dataclass(frozen=True)
class PathSegment:
    """Finite segment start->end, or a ray start + direction * t, t >= 0."""
    kind: str
    start: complex
    end: complex | None = None
    direction: complex | None = None
    decay: float | None = None

    def __post_init__(self):
        if self.kind == "segment":
            if self.end is None or self.end == self.start:
                raise ValueError("segment needs two distinct endpoints")
        elif self.kind == "ray":
            if self.direction is None or abs(self.direction) == 0:
                raise ValueError("ray needs a nonzero direction")
            if self.decay is None or not self.decay > 0:
                raise ValueError("ray needs a positive decay rate")
        else:
            raise ValueError(f"unknown path kind {self.kind!r}")

    @staticmethod
    def segment(a, b):
        return PathSegment("segment", complex(a), complex(b))

    @staticmethod
    def ray(base, direction, decay):
        d = complex(direction)
        return PathSegment("ray", complex(base), direction=d / abs(d), decay=float(decay))


def _gk_adaptive(g, a: float, b: float, spec: QuadratureSpec):
    """Adaptive GK15 of a vectorized real-parameter function on [a, b]."""
    def panel(lo, hi):
        c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
        v = g(c + h * _GK_X)
        k = h * np.dot(_GK_W, v)
        gs = h * np.dot(_G_W, v)
        return k, abs(k - gs)

    stack = [(a, b, 0)]
    total, err_total = 0j, 0.0
    accepted = []
    while stack:
        lo, hi, depth = stack.pop()
        val, err = panel(lo, hi)
        accepted.append((lo, hi, depth, val, err))
        total += val
        err_total += err
    # refine until the global criterion holds
    for _ in range(100000):
        tol = max(spec.rel_tol * abs(total), spec.abs_floor)
        if err_total <= tol:
            return total, err_total
        accepted.sort(key=lambda p: p[4])
        lo, hi, depth, val, err = accepted.pop()
        if depth >= spec.max_depth * 2:
            accepted.append((lo, hi, depth, val, err))
            raise NoConvergence("maximum panel depth reached", total, err_total)
        mid = 0.5 * (lo + hi)
        total -= val
        err_total -= err
        for (x0, x1) in ((lo, mid), (mid, hi)):
            v, e = panel(x0, x1)
            accepted.append((x0, x1, depth + 1, v, e))
            total += v
            err_total += e
    raise NoConvergence("panel budget exhausted", total, err_total)


def integrate_path(f, path, spec: QuadratureSpec = DEFAULT_SPEC, poly_degree: float = 0.0):
    """Integrate a vectorized complex function along a segment, ray or closed contour.

    Returns (value, error estimate).  For rays the parameter range is
    truncated where exp(-decay t) (1+t)^poly_degree drops below the absolute
    floor, and the truncated tail bound is added to the error.
    """
    if isinstance(path, ContourGamma):
        total, err = 0j, 0.0
        for piece in path.pieces:
            v, e = _gk_piece(f, piece, spec)
            total += v
            err += e
        return total, err
    if path.kind == "segment":
        d = path.end - path.start
        return _gk_adaptive(lambda t: f(path.start + d * t) * d, 0.0, 1.0, spec)
    lam = path.decay
    T = _ray_cutoff(lam, poly_degree, spec.log_floor)
    if spec.tail_cut is not None:
        T = min(T, spec.tail_cut)
    # split geometrically so early panels resolve the decay scale
    edges = [0.0] + [min(T, (2.0 ** k) / lam) for k in range(-2, 64) if (2.0 ** k) / lam < T] + [T]
    total, err = 0j, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        v, e = _gk_adaptive(lambda t: f(path.start + path.direction * t) * path.direction, lo, hi, spec)
        total += v
        err += e
    tail = math.exp(-lam * T) * (1 + T) ** poly_degree / lam
    return total, err + tail


def _gk_piece(f, piece, spec):
    return _gk_adaptive(lambda t: f(piece.point(t)) * piece.deriv(t), 0.0, 1.0, spec)


def _ray_cutoff(lam: float, degree: float, log_floor: float) -> float:
    """T with exp(-lam T)(1+T)^degree below exp(-log_floor) times its peak."""
    peak_t = max(degree / lam - 1.0, 0.0)
    peak = degree * math.log1p(peak_t) - lam * peak_t
    T = max(peak_t, 1.0 / lam)
    while degree * math.log1p(T) - lam * T > peak - log_floor:
        T *= 1.25
    return T


def u_cutoff(degree: float, log_floor: float) -> float:
    """U with u^degree e^{-u} below exp(-log_floor) times its maximum."""
    return _ray_cutoff(1.0, degree, log_floor)


# ---------------------------------------------------------- area oracle


@dataclass
class AreaRule:
    """Tensor polar rule for integrals against exp(-|z|^2)|W(z)|^2 dA."""
    z: np.ndarray
    w: np.ndarray
    max_power: int


def _radial_cutoff(q: float, log_floor: float) -> float:
    # r^q exp(-r^2) is largest at r^2 = q/2
    r0 = math.sqrt(max(q, 1.0) / 2.0)
    peak = q * math.log(r0) - r0 * r0
    R = r0 + 1.0
    while q * math.log(R) - R * R > peak - log_floor:
        R += 0.25
    return R


@lru_cache(maxsize=16)
def area_rule(cfg: WeightConfig, spec: QuadratureSpec = DEFAULT_SPEC, max_power: int = 16) -> AreaRule:
    q = 1.0 + max_power + 2.0 * float(np.sum(cfg.c))
    R = _radial_cutoff(q, spec.log_floor)
    min_size = max(spec.min_scale, 1e-10)
    r_sing = [(abs(a), 0.0) for a in cfg.nodes]
    rb = graded_breaks(0.0, R, r_sing, coarse=0.5, min_size=min_size)
    th_sing = []
    for beta in cfg.cut_angles:
        th_sing.append((beta, 0.0))
        if beta < 1e-9:
            th_sing.append((TWO_PI, 0.0))
    tb = graded_breaks(0.0, TWO_PI, th_sing, coarse=0.25, min_size=min_size)
    order = max(spec.order, 12)
    r, wr = panel_rule(rb, order)
    th, wt = panel_rule(tb, order)
    z = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    w = (wr[:, None] * r[:, None] * wt[None, :]).ravel()
    logdens = -np.abs(z) ** 2
    with np.errstate(divide="ignore"):
        for a, c in zip(cfg.nodes, cfg.exponents):
            logdens = logdens + 2.0 * c * np.log(np.abs(z - a))
    w = w * np.exp(logdens)
    return AreaRule(z, w, max_power)


def area_moment_table(cfg: WeightConfig, size: int, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """T[j, k] = int z^j conj(z)^k exp(-|z|^2)|W|^2 dA for j, k < size."""
    rule = area_rule(cfg, spec, max(16, 2 * (size - 1)))
    powers = rule.z[None, :] ** np.arange(size)[:, None]
    return (powers * rule.w[None, :]) @ np.conj(powers).T


def area_moment_oracle(cfg: WeightConfig, j: int, k: int, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    if j < 0 or k < 0:
        raise ValueError("moment indices must be non-negative")
    rule = area_rule(cfg, spec, max(16, j + k))
    return complex(np.sum(rule.z ** j * np.conj(rule.z) ** k * rule.w))

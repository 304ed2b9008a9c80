"""Planar moments mu_{jk} and contour moments nu^{(i)}_{jk}, and their matrices.

Node indices i are zero-based throughout.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .chi import ChiEvaluator, add, mono, unit, vec
from .errors import CorruptFile, DigestMismatch, InvalidIndex
from .quadrature import DEFAULT_SPEC, QuadratureSpec, area_rule
from .weight import WeightConfig, config_from_dict, config_to_dict

N_CAP = 12


@lru_cache(maxsize=3)
def get_evaluator(cfg: WeightConfig, spec: QuadratureSpec = DEFAULT_SPEC) -> ChiEvaluator:
    return ChiEvaluator(cfg, spec)


def mu_moment(cfg: WeightConfig, j: int, k: int, spec: QuadratureSpec = DEFAULT_SPEC) -> complex:
    """(1/2i) int_Gamma z^j chi_k^inf(z) dz."""
    if j < 0 or k < 0:
        raise InvalidIndex("moment indices must be non-negative")
    ev = get_evaluator(cfg, spec)
    return ev.contour_integral(mono(k), lambda z: z ** j) / 2j


def nu_moment(cfg: WeightConfig, nvec, i: int, p: int, spec: QuadratureSpec = DEFAULT_SPEC,
              route: str = "chi") -> complex:
    """(1/2i) int_Gamma z^p chi_{n - e_i}(z) dz; ``route='tilde'`` uses tilde-chi."""
    nvec = tuple(int(v) for v in nvec)
    if nvec[i] < 1:
        raise InvalidIndex(f"entry {i} of {nvec} is zero, so n - e_i is not an index")
    if p < 0:
        raise InvalidIndex("p must be non-negative")
    ev = get_evaluator(cfg, spec)
    key = vec(add(nvec, unit(len(nvec), i), -1))
    return ev.contour_integral(key, lambda z: z ** p, tilde=(route == "tilde")) / 2j


@dataclass
class MomentTables:
    """Cached moments.  ``mu[(j, k)]``; ``nu[(nvec, i, p)]`` keyed by total power p."""
    cfg: WeightConfig
    spec: QuadratureSpec = DEFAULT_SPEC
    mu: dict = field(default_factory=dict)
    nu: dict = field(default_factory=dict)
    mu_area: dict = field(default_factory=dict)

    def digest(self) -> str:
        return table_digest(self.cfg, self.spec)

    def get_mu(self, j: int, k: int) -> complex:
        if (j, k) not in self.mu:
            self.mu[(j, k)] = mu_moment(self.cfg, j, k, self.spec)
        return self.mu[(j, k)]

    def get_nu(self, nvec, i: int, p: int) -> complex:
        key = (tuple(nvec), i, p)
        if key not in self.nu:
            self.nu[key] = nu_moment(self.cfg, nvec, i, p, self.spec)
        return self.nu[key]

    def extend(self, n: int, nvecs=()) -> "MomentTables":
        """Make sure mu_{jk}, j,k <= n, and nu for the given multi-indices are present."""
        for j in range(n + 1):
            for k in range(n + 1):
                self.get_mu(j, k)
        for nvec in nvecs:
            for i, ni in enumerate(nvec):
                if ni == 0:
                    continue
                for p in range(2 * sum(nvec) + 1):
                    self.get_nu(nvec, i, p)
        return self


def table_digest(cfg: WeightConfig, spec: QuadratureSpec) -> str:
    import hashlib
    payload = json.dumps({"config": config_to_dict(cfg), "spec": asdict(spec)}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def build_D(tables: MomentTables, n: int) -> np.ndarray:
    """D[k, j] = mu_{j,k}, for j, k < n."""
    if n < 1:
        raise InvalidIndex("n must be >= 1")
    D = np.empty((n, n), dtype=complex)
    for k in range(n):
        for j in range(n):
            D[k, j] = tables.get_mu(j, k)
    return D


def build_d(tables: MomentTables, nvec) -> np.ndarray:
    """Stacked blocks; block i has rows k < n_i with entries nu^{(i)}_{j,k}, j < |n|."""
    nvec = tuple(int(v) for v in nvec)
    n = sum(nvec)
    rows = []
    for i, ni in enumerate(nvec):
        for k in range(ni):
            rows.append([tables.get_nu(nvec, i, j + k) for j in range(n)])
    return np.array(rows, dtype=complex).reshape(n, n)


def verify_prop1(cfg: WeightConfig, coeffs, m: int, spec: QuadratureSpec = DEFAULT_SPEC) -> dict:
    """Area integral of p(z) conj(z)^m vs (1/2i) int_Gamma p chi_m^inf dz."""
    coeffs = np.asarray(coeffs, dtype=complex)
    rule = area_rule(cfg, spec, max(16, len(coeffs) - 1 + m))
    area = complex(np.sum(np.polynomial.polynomial.polyval(rule.z, coeffs) * np.conj(rule.z) ** m * rule.w))
    ev = get_evaluator(cfg, spec)
    contour = ev.contour_integral(mono(m), lambda z: np.polynomial.polynomial.polyval(z, coeffs)) / 2j
    res = abs(area - contour)
    # absolute integral of the integrand; exact zeros occur for integer exponents
    scale = float(np.sum(np.abs(np.polynomial.polynomial.polyval(rule.z, coeffs)) * np.abs(rule.z) ** m
                         * np.abs(rule.w)))
    return {"area": area, "contour": contour, "residual": res, "scale": scale,
            "relative": res / scale if scale else res}


# ------------------------------------------------------------------ cache


def _c2l(v: complex):
    return [v.real, v.imag]


def cache_store(path, tables: MomentTables) -> None:
    doc = {
        "digest": tables.digest(),
        "config": config_to_dict(tables.cfg),
        "spec": asdict(tables.spec),
        "mu": [[j, k, *_c2l(v)] for (j, k), v in sorted(tables.mu.items())],
        "nu": [[list(nv), i, p, *_c2l(v)] for (nv, i, p), v in sorted(tables.nu.items())],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)


def cache_load(path, cfg: WeightConfig | None = None, spec: QuadratureSpec | None = None) -> MomentTables:
    """Load a cache; when ``cfg``/``spec`` are given the stored digest must match them."""
    try:
        doc = json.loads(Path(path).read_text())
        stored_cfg = config_from_dict(doc["config"])
        stored_spec = QuadratureSpec(**doc["spec"])
        digest = doc["digest"]
        mu = {(int(j), int(k)): complex(re, im) for j, k, re, im in doc["mu"]}
        nu = {(tuple(int(x) for x in nv), int(i), int(p)): complex(re, im)
              for nv, i, p, re, im in doc["nu"]}
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CorruptFile(f"cannot read moment cache {path}: {exc}") from exc
    if digest != table_digest(stored_cfg, stored_spec):
        raise DigestMismatch("stored digest does not match the stored configuration")
    if cfg is not None and table_digest(cfg, spec or stored_spec) != digest:
        raise DigestMismatch("moment cache was computed for a different configuration")
    return MomentTables(stored_cfg, stored_spec, mu, nu)

"""The branched weight W(z) = prod_j (z - a_j)^{c_j} and its reflection.

Each factor j uses the argument window (beta_j, beta_j + 2*pi) with
beta_j = arg a_j, so W is analytic off the rays {a_j t : t >= 1}.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    ArgumentCollision,
    EmptyConfig,
    NonPositiveExponent,
    OnBranchCut,
    ZeroNode,
)

TWO_PI = 2.0 * math.pi
EPS_ARG = 1e-8
EPS_NODE = 1e-12
EPS_CUT = 1e-12


@dataclass(frozen=True)
class WeightConfig:
    nodes: tuple[complex, ...]
    exponents: tuple[float, ...]

    @property
    def l(self) -> int:
        return len(self.nodes)

    @property
    def cut_angles(self) -> np.ndarray:
        return np.array([_arg02pi(a) for a in self.nodes])

    @property
    def a(self) -> np.ndarray:
        return np.array(self.nodes, dtype=complex)

    @property
    def abar(self) -> np.ndarray:
        return np.conj(self.a)

    @property
    def c(self) -> np.ndarray:
        return np.array(self.exponents, dtype=float)

    def digest(self) -> str:
        payload = json.dumps(config_to_dict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()


def _arg02pi(z: complex) -> float:
    t = math.atan2(z.imag, z.real)
    return t + TWO_PI if t < 0 else t


def validate_config(nodes, exponents) -> WeightConfig:
    nodes = [complex(a) for a in nodes]
    exponents = [float(c) for c in exponents]
    if len(nodes) == 0:
        raise EmptyConfig("at least one node is required")
    if len(nodes) != len(exponents):
        raise EmptyConfig("nodes and exponents differ in length")
    for a in nodes:
        if abs(a) < EPS_NODE:
            raise ZeroNode(f"node {a} is (numerically) zero")
    for c in exponents:
        if not c > 0:
            raise NonPositiveExponent(f"exponent {c} is not positive")
    order = sorted(range(len(nodes)), key=lambda j: _arg02pi(nodes[j]))
    nodes = [nodes[j] for j in order]
    exponents = [exponents[j] for j in order]
    angles = [_arg02pi(a) for a in nodes]
    for j in range(len(angles)):
        gap = (angles[(j + 1) % len(angles)] - angles[j]) % TWO_PI
        if len(angles) > 1 and (gap < EPS_ARG or TWO_PI - gap < EPS_ARG):
            raise ArgumentCollision(
                f"nodes {nodes[j]} and {nodes[(j + 1) % len(nodes)]} share an argument"
            )
    return WeightConfig(tuple(nodes), tuple(exponents))


def config_to_dict(cfg: WeightConfig) -> dict:
    return {
        "nodes": [[a.real, a.imag] for a in cfg.nodes],
        "exponents": list(cfg.exponents),
    }


def config_from_dict(doc: dict) -> WeightConfig:
    nodes = []
    for item in doc["nodes"]:
        if isinstance(item, (list, tuple)):
            nodes.append(complex(item[0], item[1]))
        else:
            nodes.append(complex(item))
    return validate_config(nodes, doc["exponents"])


def load_config(path) -> WeightConfig:
    return config_from_dict(json.loads(Path(path).read_text()))


def save_config(cfg: WeightConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2) + "\n")


def cut_distance(cfg: WeightConfig, z, j: int):
    """Distance from z to the ray {a_j t : t >= 1}."""
    a = cfg.nodes[j]
    z = np.asarray(z, dtype=complex)
    t = np.maximum((z * np.conj(a)).real / abs(a) ** 2, 1.0)
    return np.abs(z - a * t)


def log_W(cfg: WeightConfig, z):
    """Branch of log W on C minus the cuts, vectorized; no cut checks.

    At a node the value is -inf (W extends continuously by 0).
    """
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    with np.errstate(divide="ignore"):
        for a, c, beta in zip(cfg.nodes, cfg.exponents, cfg.cut_angles):
            d = z - a
            phi = beta + np.mod(np.angle(d) - beta, TWO_PI)
            out += c * (np.log(np.abs(d)) + 1j * phi)
    return out


def W_array(cfg: WeightConfig, z):
    with np.errstate(invalid="ignore"):
        w = np.exp(log_W(cfg, z))
    return np.where(np.isnan(w), 0.0, w)


def Wbar_array(cfg: WeightConfig, s):
    return np.conj(W_array(cfg, np.conj(np.asarray(s, dtype=complex))))


def _check_off_cuts(cfg: WeightConfig, z: complex) -> bool:
    """Return True when z is a node; raise when z lies on a cut."""
    scale = max(1.0, abs(z))
    for j, a in enumerate(cfg.nodes):
        if abs(z - a) <= EPS_CUT * scale:
            return True
        if float(cut_distance(cfg, z, j)) <= EPS_CUT * scale:
            raise OnBranchCut(f"z={z} lies on the cut from a_{j + 1}={a}")
    return False


def eval_W(cfg: WeightConfig, z: complex) -> complex:
    z = complex(z)
    if _check_off_cuts(cfg, z):
        return 0j
    return complex(W_array(cfg, z))


def eval_Wbar(cfg: WeightConfig, s: complex) -> complex:
    return eval_W(cfg, complex(s).conjugate()).conjugate()


def jump_factor_check(cfg: WeightConfig, j: int, t: float, eps: float) -> float:
    """|W_+ - exp(-2 pi i c_j) W_-| at a_j t, with the + side to the left of the cut.

    The cut is directed towards infinity, so the + side is reached by a
    counterclockwise rotation of the direction a_j.
    """
    if t <= 1:
        raise ValueError("t must exceed 1 so that a_j t is inside the cut")
    a = cfg.nodes[j]
    p = a * t
    normal = 1j * a / abs(a)
    w_plus = eval_W(cfg, p + eps * normal)
    w_minus = eval_W(cfg, p - eps * normal)
    return abs(w_plus - np.exp(-2j * math.pi * cfg.exponents[j]) * w_minus)

"""Reference weight configurations and the seeded random family."""
from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import OriginNotEnclosed
from .quadrature import build_contour
from .weight import WeightConfig, validate_config


def reference_configs() -> dict[str, WeightConfig]:
    w = cmath.exp(2j * math.pi / 3)
    return {
        "K1": validate_config([1 + 0j], [1.0]),
        "K2": validate_config([1 + 0j, 1j], [1.0, 2.0]),
        "K3": validate_config([1 + 0j, w, w * w], [0.5, 1.5, 2.5]),
    }


def random_config(rng: np.random.Generator, l: int, min_gap: float = 0.3,
                  radius=(0.5, 2.0), exponent=(0.2, 3.0)) -> WeightConfig:
    """Rejection-sample nodes with circular angle gaps >= min_gap and a contour around 0."""
    while True:
        ang = np.sort(rng.uniform(0.0, 2 * math.pi, l))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
        if l > 1 and np.min(gaps) < min_gap:
            continue
        rad = rng.uniform(*radius, l)
        c = rng.uniform(*exponent, l)
        cfg = validate_config([complex(r * math.cos(t), r * math.sin(t)) for r, t in zip(rad, ang)],
                              [float(x) for x in c])
        try:
            build_contour(cfg)
        except OriginNotEnclosed:
            continue
        return cfg


def random_configs(seed: int = 2024, count: int = 10) -> list[WeightConfig]:
    """``count`` configurations with l cycling through 1, 2, 3."""
    rng = np.random.default_rng(seed)
    return [random_config(rng, k % 3 + 1) for k in range(count)]

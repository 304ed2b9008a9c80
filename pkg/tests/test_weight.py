import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarmop.errors import (ArgumentCollision, EmptyConfig, NonPositiveExponent, OnBranchCut,
                              ZeroNode)
from planarmop.weight import (config_from_dict, config_to_dict, eval_W, eval_Wbar, jump_factor_check,
                              load_config, save_config, validate_config)


def test_single_node_value():
    cfg = validate_config([1], [1])
    assert eval_W(cfg, 2j) == pytest.approx(2j - 1, abs=1e-15)
    assert eval_W(cfg, 1) == 0


def test_half_exponent_branch():
    cfg = validate_config([1], [0.5])
    # arg(z - 1) in (0, 2 pi): for z = 0 the argument is pi, so W(0) = e^{i pi / 2}
    assert eval_W(cfg, 0) == pytest.approx(1j, abs=1e-15)
    assert eval_W(cfg, 1 + 1j) == pytest.approx(cmath.exp(0.5j * math.pi / 2), abs=1e-15)


def test_sorted_by_argument():
    cfg = validate_config([1j, -1, 1], [2, 3, 1])
    assert cfg.nodes == (1, 1j, -1)
    assert cfg.exponents == (1, 2, 3)


@pytest.mark.parametrize("nodes, exps, exc", [
    ([], [], EmptyConfig),
    ([0], [1], ZeroNode),
    ([1], [0], NonPositiveExponent),
    ([1], [-1], NonPositiveExponent),
    ([1, 2], [1, 1], ArgumentCollision),
])
def test_invalid_configs(nodes, exps, exc):
    with pytest.raises(exc):
        validate_config(nodes, exps)


def test_on_cut_raises():
    cfg = validate_config([1], [1.5])
    with pytest.raises(OnBranchCut):
        eval_W(cfg, 3.0)


@pytest.mark.parametrize("c", [0.5, 1.3, 2.0])
def test_jump_factor(c):
    cfg = validate_config([1j], [c])
    assert jump_factor_check(cfg, 0, 2.0, 1e-10) < 1e-8


def test_roundtrip(tmp_path):
    cfg = validate_config([1, 1j], [1, 2])
    assert config_from_dict(config_to_dict(cfg)) == cfg
    save_config(cfg, tmp_path / "c.json")
    assert load_config(tmp_path / "c.json") == cfg


finite = st.floats(-3, 3, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.3, 2.5), st.floats(0, 2 * math.pi), st.floats(0.1, 3), finite, finite)
def test_modulus_and_reflection(r, th, c, x, y):
    a = complex(r * math.cos(th), r * math.sin(th))
    cfg = validate_config([a], [c])
    z = complex(x, y)
    if abs(z - a) < 1e-3:
        return
    try:
        w = eval_W(cfg, z)
    except OnBranchCut:
        return
    assert abs(w) == pytest.approx(abs(z - a) ** c, rel=1e-12)
    assert eval_Wbar(cfg, z.conjugate()) == pytest.approx(w.conjugate(), rel=1e-12)

import math

import numpy as np
import pytest

from planarmop.errors import InvalidIndex, TooCloseToContour
from planarmop.rh import (assemble_Y, asymptotic_check, build_sampler, hp_order_check, jump_residual,
                          jump_study, loglog_slope)


@pytest.fixture(scope="module")
def sampler_k2(tables):
    return build_sampler(tables["K2"].cfg, 4, tables["K2"])


def test_slope():
    x = np.array([1.0, 10.0, 100.0])
    assert loglog_slope(x, 3 * x ** -2) == pytest.approx(-2.0)


def test_requires_full_index(tables):
    with pytest.raises(InvalidIndex):
        build_sampler(tables["K3"].cfg, 2, tables["K3"])


def test_first_row_is_polynomial(sampler_k2):
    z = 3.0 + 1.0j
    Y = assemble_Y(sampler_k2, z)
    assert Y[0, 0] == pytest.approx(sampler_k2.p(z))
    assert Y.shape == (3, 3)


def test_too_close(sampler_k2):
    zeta = complex(sampler_k2.ev.gamma.pieces[0].point(0.5))
    with pytest.raises(TooCloseToContour):
        assemble_Y(sampler_k2, zeta)


def test_jump_linear(sampler_k2):
    assert jump_study(sampler_k2)["pass"]


def test_jump_eps_range(sampler_k2):
    with pytest.raises(ValueError):
        jump_residual(sampler_k2, 0, 0.5, 0.1)


def test_asymptotics(sampler_k2):
    r = asymptotic_check(sampler_k2)
    assert abs(r["slope"] + 1) <= 0.1
    assert r["det_pass"]


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_hermite_pade(tables, name):
    cfg = tables[name].cfg
    s = build_sampler(cfg, cfg.l + 1, tables[name])
    for j in range(cfg.l):
        r = hp_order_check(s, j)
        assert abs(r["slope"] - r["target"]) <= 0.2
        assert r["q_consistency"] <= 1e-8

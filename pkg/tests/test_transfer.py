import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarmop.errors import InternalMismatch
from planarmop.polynomials import sample_points, staircase
from planarmop.transfer import (build_B, compute_A, det_A_closed,
                                det_A_forms, det_recursion_check, expand_C, first_row_identity,
                                verify_B_action, verify_B_moments)
from planarmop.weight import validate_config


def test_det_k1_small():
    # n = 1: empty products; n = 2: sign -1 and (c + 1)^1
    cfg = validate_config([1], [1])
    assert det_A_closed(cfg, 1) == pytest.approx(1.0)
    assert det_A_closed(cfg, 2) == pytest.approx(-2.0)


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_closed_forms_agree(refs, name):
    for n in range(1, 21):
        f1, f2 = det_A_forms(refs[name], n)
        assert abs(f1 - f2) <= 1e-12 * max(abs(f1), abs(f2))


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_numeric_det(tables, name):
    for n in range(1, 7):
        a = compute_A(tables[name], n)
        closed = det_A_closed(tables[name].cfg, n)
        assert abs(a.det - closed) <= 1e-6 * abs(closed)


@pytest.mark.parametrize("name", ["K2", "K3"])
def test_recursion(refs, name):
    for n in range(1, 9):
        r = det_recursion_check(refs[name], n)
        assert r["residual_blocks"] < 1e-10
        assert r["residual_closed"] < 1e-10


def test_variant_recursion_sign():
    """The variant ratio differs from the block product by a sign when kappa is odd and r = 0."""
    cfg = validate_config([1, 1j], [1, 2])
    n = 2  # kappa = 1, r = 0
    assert det_recursion_check(cfg, n)["residual_variant"] == pytest.approx(2.0, rel=1e-12)


def test_recursion_numeric(tables):
    r = det_recursion_check(tables["K2"].cfg, 3, tables["K2"])
    assert r["residual_numeric"] < 1e-8


def test_block_shapes(refs):
    chain = build_B(refs["K3"], 4)
    assert chain.B.shape == (5, 5)
    assert np.allclose(np.abs(np.linalg.det(chain.B3)), 1.0)


@pytest.mark.parametrize("name", ["K2", "K3"])
def test_B_action(refs, tables, name):
    zs = sample_points(refs[name], 3, np.random.default_rng(7))
    for n in range(1, 5):
        for z in zs:
            assert verify_B_action(refs[name], n, z)["relative"] < 1e-8
        assert verify_B_moments(tables[name], n)["relative"] < 1e-8
        assert first_row_identity(tables[name], n)["relative"] < 1e-8


def test_mismatch_guard(monkeypatch, refs):
    import planarmop.transfer as tr
    monkeypatch.setattr(tr, "det_A_forms", lambda cfg, n: (1.0, 2.0))
    with pytest.raises(InternalMismatch):
        tr.det_A_closed(refs["K2"], 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=3), st.floats(0, 2 * math.pi))
def test_expand_C(nvec, phase):
    l = len(nvec)
    cfg = validate_config([cmath.exp(1j * (phase + 2 * math.pi * j / l)) for j in range(l)], [1.0] * l)
    C = expand_C(cfg, nvec)
    assert len(C) == sum(nvec) + 1 and C[-1] == 1
    z = 0.3 + 0.2j
    expected = np.prod([(z - ab) ** ni for ab, ni in zip(cfg.abar, nvec)])
    assert np.polynomial.polynomial.polyval(z, C) == pytest.approx(expected, rel=1e-10, abs=1e-12)

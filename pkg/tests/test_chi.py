import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planarmop import chi as chimod
from planarmop.chi import add, unit
from planarmop.errors import InvalidIndex
from planarmop.moments import get_evaluator
from planarmop.polynomials import sample_points
from planarmop.weight import validate_config


def test_chi0_closed_form():
    # W(z) int_0^2 (s - 1) e^{-2 s} ds with W(2) = 1
    ev = get_evaluator(validate_config([1], [1]))
    expected = -0.25 - 0.75 * math.exp(-4)
    assert ev.chi_m_finite(0, 2.0, check=False) == pytest.approx(expected, abs=1e-13)


def test_chi_inf_closed_form():
    # int_0^inf (s - 1) e^{-z s} ds = 1/z^2 - 1/z, times W(z) = z - 1
    ev = get_evaluator(validate_config([1], [1]))
    z = 0.7 + 1.1j
    assert ev.chi_m_inf(0, z) == pytest.approx((z - 1) * (1 / z ** 2 - 1 / z), abs=1e-13)


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_chi_recurrences_pointwise(refs, name):
    cfg = refs[name]
    ev = get_evaluator(cfg)
    l = cfg.l
    for z in sample_points(cfg, 3, np.random.default_rng(5)):
        k = (2,) * l
        assert chimod.lemma1_residual(ev, k, z)["relative"] < 1e-9
        assert chimod.corollary_residual(ev, k, 2, z)["relative"] < 1e-9
        if l > 1:
            assert chimod.lemma2_residual(ev, (1,) * l, 0, 1, z)["relative"] < 1e-9


def test_recurrence_index_errors(refs):
    ev = get_evaluator(refs["K2"])
    with pytest.raises(InvalidIndex):
        chimod.lemma1_residual(ev, (0, 1), 1 + 1j)
    with pytest.raises(InvalidIndex):
        chimod.lemma2_residual(ev, (1, 1), 0, 0, 1 + 1j)
    with pytest.raises(InvalidIndex):
        chimod.corollary_expansion(refs["K2"], (1, 2), 2)


def test_decay_and_continuity(refs):
    ev = get_evaluator(refs["K2"])
    r = chimod.decay_check(ev, 1, 2, 4.0, [2.5, 3.0, 3.5, 4.0])
    assert r["pass"] and r["monotone"]
    assert chimod.tail_continuity(ev, 0, 0)["relative"] < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(1, 3),
       st.lists(st.floats(0.2, 3), min_size=3, max_size=3))
def test_power_expansion_coefficients(k, s, c):
    """Coefficients match a brute-force expansion of s one-step rules."""
    l = len(k)
    if s > min(k):
        return
    cfg = validate_config([np.exp(2j * math.pi * j / l) for j in range(l)], c[:l])
    coeffs = chimod.corollary_expansion(cfg, k, s)
    assert all(sum(t) == s for t in coeffs)
    ref = {tuple(k): 1.0}
    for _ in range(s):
        nxt = {}
        for idx, cf in ref.items():
            for j in range(l):
                nxt_idx = add(idx, unit(l, j), -1)
                nxt[nxt_idx] = nxt.get(nxt_idx, 0.0) + cf * (cfg.exponents[j] + idx[j])
        ref = nxt
    for t, cf in coeffs.items():
        assert cf == pytest.approx(ref[add(tuple(k), t, -1)], rel=1e-12)

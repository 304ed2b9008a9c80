import json
import math

import numpy as np
import pytest

from planarmop.errors import CorruptFile, DigestMismatch, InvalidIndex
from planarmop.moments import (MomentTables, build_D, build_d, cache_load, cache_store, mu_moment,
                               nu_moment, verify_prop1)
from planarmop.quadrature import area_moment_table
from planarmop.weight import validate_config


@pytest.mark.parametrize("j, k, value", [(0, 0, 2 * math.pi), (1, 0, -math.pi), (0, 1, -math.pi),
                                         (1, 1, 3 * math.pi), (3, 3, 30 * math.pi), (2, 0, 0.0)])
def test_k1_closed_form(tables, j, k, value):
    # |z - 1|^2 = |z|^2 - z - conj z + 1 and int z^j conj(z)^k e^{-|z|^2} dA = pi j! delta_jk
    assert tables["K1"].get_mu(j, k) == pytest.approx(value, abs=1e-8)


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_contour_moments_match_area(refs, tables, name):
    D = build_D(tables[name], 5)
    T = area_moment_table(refs[name], 5)
    # D[k, j] = mu_{j k} = int z^j conj(z)^k
    assert np.max(np.abs(D - T.T)) < 1e-9 * np.max(np.abs(T))


def test_D_hermitian(tables):
    D = build_D(tables["K3"], 5)
    assert np.max(np.abs(D - D.conj().T)) < 1e-10 * np.max(np.abs(D))
    assert np.all(np.linalg.eigvalsh(0.5 * (D + D.conj().T)) > 0)


def test_area_matches_contour_for_polynomial(refs):
    r = verify_prop1(refs["K2"], [1, 2j, -0.5, 0.25], 3)
    assert r["relative"] < 1e-6


def test_d_shape(tables):
    d = build_d(tables["K2"], (2, 1))
    assert d.shape == (3, 3)


def test_index_errors(refs):
    with pytest.raises(InvalidIndex):
        mu_moment(refs["K1"], -1, 0)
    with pytest.raises(InvalidIndex):
        nu_moment(refs["K2"], (0, 1), 0, 0)


def test_nu_routes_agree(refs):
    a = nu_moment(refs["K2"], (2, 1), 0, 3)
    b = nu_moment(refs["K2"], (2, 1), 0, 3, route="tilde")
    assert abs(a - b) < 1e-10 * abs(a)


def test_cache_roundtrip(tmp_path, refs):
    t = MomentTables(refs["K2"]).extend(3, [(2, 1)])
    path = tmp_path / "m.json"
    cache_store(path, t)
    back = cache_load(path, refs["K2"])
    assert back.mu == t.mu and back.nu == t.nu


def test_cache_errors(tmp_path, refs):
    t = MomentTables(refs["K1"]).extend(2)
    path = tmp_path / "m.json"
    cache_store(path, t)
    with pytest.raises(DigestMismatch):
        cache_load(path, validate_config([2], [1]))
    doc = json.loads(path.read_text())
    doc["config"]["nodes"] = [[1.5, 0.0]]
    path.write_text(json.dumps(doc))
    with pytest.raises(DigestMismatch):
        cache_load(path)
    path.write_text("{not json")
    with pytest.raises(CorruptFile):
        cache_load(path)

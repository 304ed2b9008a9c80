import cmath
import math

import numpy as np
import pytest

from planarmop.errors import OriginNotEnclosed
from planarmop.quadrature import (QuadratureSpec, area_moment_oracle, build_contour, contour_rule,
                                  gamma_polygon, graded_breaks, integrate_path, origin_distance,
                                  PathSegment)
from planarmop.weight import validate_config


def test_contour_kinds(refs):
    assert build_contour(refs["K1"]).kind == "circle"
    assert build_contour(refs["K2"]).kind == "arc2"
    # the triangle edges pass within |a|/2 of the origin, so the spiral (here the unit circle) is used
    assert build_contour(refs["K3"]).kind == "spiral"


def test_polygon_kept_when_clear():
    cfg = validate_config([cmath.exp(2j * math.pi * k / 8) for k in range(8)], [1.0] * 8)
    assert build_contour(cfg).kind == "polygon"


@pytest.mark.parametrize("name", ["K1", "K2", "K3"])
def test_contour_encloses_origin(refs, name):
    gamma = build_contour(refs[name])
    assert gamma.winding_number() == pytest.approx(1.0, abs=1e-10)
    for a in refs[name].nodes:
        assert min(abs(complex(p.point(0.0)) - a) for p in gamma.pieces) < 1e-12


def test_polygon_not_enclosing():
    cfg = validate_config([1, cmath.exp(0.5j), cmath.exp(1j)], [1, 1, 1])
    with pytest.raises(OriginNotEnclosed):
        gamma_polygon(cfg)
    with pytest.raises(OriginNotEnclosed):
        build_contour(cfg)


def test_spiral_fallback():
    # polygon edge passes close to 0
    cfg = validate_config([1, cmath.exp(3.0j), cmath.exp(4.0j)], [1, 1, 1])
    gamma = build_contour(cfg)
    assert gamma.kind == "spiral"
    assert origin_distance(gamma) >= 0.99
    assert gamma.winding_number() == pytest.approx(1.0, abs=1e-10)


def test_contour_rule_integrates_polynomials(refs):
    z, dz, _ = contour_rule(build_contour(refs["K3"]))
    assert abs(np.sum(z ** 3 * dz)) < 1e-13
    assert np.sum(dz / z) == pytest.approx(2j * math.pi, abs=1e-13)


def test_graded_breaks_refine():
    br = graded_breaks(0.0, 1.0, [(0.0, 1e-6)])
    assert br[0] == 0.0 and br[1] <= 1e-6 * 1.001 and br[-1] == 1.0
    assert np.all(np.diff(br) > 0)


def test_ray_integral():
    v, err = integrate_path(lambda s: s * np.exp(-s), PathSegment.ray(0j, 1.0, 1.0))
    assert v == pytest.approx(1.0, abs=1e-12)


def test_area_oracle_gaussian():
    # weight |z - 1|^2 e^{-|z|^2}; int |z|^{2k} e^{-|z|^2} dA = pi k!
    cfg = validate_config([1], [1])
    assert area_moment_oracle(cfg, 0, 0) == pytest.approx(2 * math.pi, rel=1e-12)
    assert area_moment_oracle(cfg, 3, 3) == pytest.approx(30 * math.pi, rel=1e-12)
    assert area_moment_oracle(cfg, 2, 0) == pytest.approx(0.0, abs=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0)
    assert QuadratureSpec().order >= 12

import math

import numpy as np
import pytest

from core.errors import QuadratureError
from core.models import QuadratureConfig
from core.quadrature import QUADPACK_FLOOR, SingularProduct, adaptive_quad, gauss_table


def test_gauss_table_is_cached_and_read_only():
    nodes, weights = gauss_table(12)
    assert gauss_table(12)[0] is nodes
    assert weights.sum() == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_adaptive_quad_smooth_integrand(quad):
    value = adaptive_quad(np.cos, 0.0, math.pi / 2, quad)
    assert value == pytest.approx(1.0, abs=1e-14)


def test_adaptive_quad_reports_subdivision_limit():
    cfg = QuadratureConfig(limit=1)
    with pytest.raises(QuadratureError):
        adaptive_quad(lambda x: np.where(x < 0.3, 0.0, 1.0), 0.0, 1.0, cfg)


def test_adaptive_quad_rejects_tolerance_below_rounding_floor():
    cfg = QuadratureConfig(abs_tol=1e-30, rel_tol=QUADPACK_FLOOR / 1000)
    with pytest.raises(QuadratureError):
        adaptive_quad(np.cos, 0.0, math.pi / 2, cfg)


def test_endpoint_singularities_arcsine(quad):
    # int_{-1}^{1} dx / sqrt(1 - x^2) = pi
    weight = SingularProduct([-1.0, 1.0], [-0.5, -0.5])
    assert weight.integrate(0, 1, quad) == pytest.approx(math.pi, rel=1e-13)


def test_integrate_from_anchor(quad):
    # int_1^2 dx / sqrt(x - 1) = 2
    weight = SingularProduct([1.0], [-0.5])
    assert weight.integrate_from(0, 1.0, quad) == pytest.approx(2.0, rel=1e-13)


def test_tail_power_law(quad):
    # int_2^inf x^{-3/2} dx = sqrt(2)
    weight = SingularProduct([0.0], [-1.5])
    assert weight.tail(2.0, 1.0, quad) == pytest.approx(math.sqrt(2), rel=1e-13)


def test_tail_needs_total_exponent():
    weight = SingularProduct([0.0], [-0.5])
    with pytest.raises(QuadratureError):
        weight.tail(2.0, 1.0, QuadratureConfig())


def test_reversed_interval_rejected(quad):
    weight = SingularProduct([-1.0, 1.0], [-0.5, -0.5])
    with pytest.raises(QuadratureError):
        weight.integrate(1, 0, quad)


def test_precise_offsets_override_points(quad):
    # a pair separated by 1e-20 cannot be represented as two floats near 0.5
    points = [0.5, 0.5]
    offsets = np.array([[0.0, 1e-20], [-1e-20, 0.0]])
    weight = SingularProduct(points, [-0.5, -0.5], offsets)
    assert weight.length(0, 1) == 1e-20
    # int over a gap of length d of 1/sqrt((x-p)(q-x)) is pi for any d
    assert weight.integrate(0, 1, quad) == pytest.approx(math.pi, rel=1e-12)

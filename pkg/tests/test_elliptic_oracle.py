import math

import pytest

from scripts.elliptic_oracle import rectangle_functionals, rectangle_lambda, rectangle_modulus


def test_square():
    A, J = rectangle_functionals(0.0)
    assert A == pytest.approx(J, rel=1e-15)
    assert rectangle_lambda(1.0) == pytest.approx(0.0, abs=1e-12)


def test_modulus_is_decreasing():
    values = [rectangle_modulus(lam) for lam in (-0.9, -0.5, 0.0, 0.5, 0.9)]
    assert values == sorted(values, reverse=True)


@pytest.mark.parametrize("a", [0.25, 0.5, 2.0, 4.0])
def test_lambda_inverts_modulus(a):
    assert rectangle_modulus(rectangle_lambda(a)) == pytest.approx(a, rel=1e-12)


def test_reciprocal_aspect_reflects_lambda():
    assert rectangle_lambda(0.5) == pytest.approx(-rectangle_lambda(2.0), abs=1e-12)


def test_domain():
    with pytest.raises(ValueError):
        rectangle_functionals(1.0)
    with pytest.raises(ValueError):
        rectangle_lambda(-1.0)
    assert not math.isnan(rectangle_modulus(0.3))

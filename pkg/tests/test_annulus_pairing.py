import math

import pytest

from core.annulus_pairing import (
    PolarRule,
    angular_average,
    angular_nodes,
    decay_check,
    harmonic_sequence,
    l1_norm,
    pair_mu_phi,
    random_laurent,
)
from core.errors import DomainError, InvalidParametersError
from core.models import LaurentDifferential, RoundAnnulus

ANNULUS = RoundAnnulus(2.0)
SCALE = 4 * math.pi * math.log(2.0)


def test_only_c_minus2_pairs():
    assert pair_mu_phi(ANNULUS, LaurentDifferential.monomial(-2)) == pytest.approx(SCALE, rel=1e-12)
    for k in range(-8, 7):
        if k != -2:
            assert abs(pair_mu_phi(ANNULUS, LaurentDifferential.monomial(k))) <= 1e-10


def test_random_laurent_identity(rng):
    for _ in range(10):
        d = random_laurent(rng)
        c = d.coefficient(-2)
        pairing = pair_mu_phi(ANNULUS, d)
        assert abs(pairing - SCALE * c) <= 1e-10 * abs(pairing)
        assert angular_average(ANNULUS, d, 1.0) == pytest.approx(2 * math.pi * c, rel=1e-12)


def test_angular_average_is_radius_independent(rng):
    d = random_laurent(rng)
    inner = angular_average(ANNULUS, d, 0.6)
    outer = angular_average(ANNULUS, d, 1.8)
    assert abs(inner - outer) <= 1e-10


def test_angular_average_rejects_outside_radius():
    with pytest.raises(DomainError):
        angular_average(ANNULUS, LaurentDifferential.monomial(0), 2.5)


def test_angular_nodes():
    assert angular_nodes(LaurentDifferential(())) == 64
    assert angular_nodes(LaurentDifferential.monomial(40)) == 85
    assert angular_nodes(LaurentDifferential.monomial(0), PolarRule(theta_nodes=128)) == 128
    with pytest.raises(DomainError):
        angular_nodes(LaurentDifferential.monomial(40), PolarRule(theta_nodes=64))


def test_l1_norm_of_closed_forms():
    assert l1_norm(ANNULUS, LaurentDifferential.monomial(-2)) == pytest.approx(SCALE, rel=1e-12)
    area = math.pi * (4.0 - 0.25)
    assert l1_norm(ANNULUS, LaurentDifferential.monomial(0)) == pytest.approx(area, rel=1e-12)


def test_pairing_is_linear():
    d = LaurentDifferential.from_dict({-2: 3 - 1j, 1: 2.0})
    assert pair_mu_phi(ANNULUS, d) == pytest.approx(SCALE * (3 - 1j), rel=1e-12)


def test_decay_despite_growing_l1_norm():
    rows = decay_check(ANNULUS, harmonic_sequence(8, 2.0))
    assert [row.index for row in rows] == list(range(1, 9))
    for row in rows:
        assert abs(row.pairing - row.expected) <= 1e-10
        assert row.c_minus2 == pytest.approx(1.0 / row.index)
    assert abs(rows[-1].pairing) < abs(rows[0].pairing)
    assert rows[-1].l1_norm > rows[0].l1_norm


def test_harmonic_sequence_without_growth():
    sequence = harmonic_sequence(3, 2.0, growth=0.0)
    assert [d.window for d in sequence] == [(-2, -2)] * 3


def test_round_annulus_validation():
    with pytest.raises(InvalidParametersError):
        RoundAnnulus(1.0)

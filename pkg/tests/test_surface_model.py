from fractions import Fraction

import numpy as np
import pytest

from core.errors import DegenerateDecompositionError, DomainError, InvalidParametersError
from core.models import CoverSpec, LShapeParams, SurfaceType
from core.surface_model import (
    CLAIM_COVERS,
    PolygonGrid,
    SampledDensity,
    build_polygon,
    cover_type,
    decompose_annuli,
    double_surface,
    euler_characteristic,
    fol_derivative,
    fol_on_locus,
    hol_value,
    pair_with_psi,
    polyplane_point,
    punctured_base_type,
    rational_lcm,
    stretch_heights,
    twist_data,
)

F = Fraction
BASE = LShapeParams(F(1), F(1), F(1, 2))


def test_polygon_vertices_and_area():
    polygon = build_polygon(BASE)
    assert polygon.vertex("P5") == (0, 0)
    assert polygon.vertex("P1") == (1, 0)
    assert polygon.vertex("Q") == (F(1, 2), 1)
    assert polygon.vertex("P4") == (0, 2)
    assert polygon.area == F(3, 2)
    assert polygon.edge_lengths["P2Q"] == F(1, 2)
    assert polygon.edge_lengths["P4P5"] == 2


def test_polygon_area_is_a_plus_bq_for_floats():
    polygon = build_polygon(LShapeParams(0.7, 0.3, 0.25))
    assert polygon.area == pytest.approx(0.7 + 0.3 * 0.25)


def test_invalid_parameters():
    with pytest.raises(InvalidParametersError):
        LShapeParams(0, 1, F(1, 2))
    with pytest.raises(InvalidParametersError):
        LShapeParams(1, -1, F(1, 2))
    with pytest.raises(InvalidParametersError):
        LShapeParams(1, 1, 1)


def test_doubled_surface_cone_angles():
    surface = double_surface(BASE)
    angles = {cone.label: cone.angle for cone in surface.cone_points}
    assert angles == {"P5": 1, "P1": 1, "P2": 1, "Q": 3, "P3": 1, "P4": 1}
    assert surface.area == 3
    assert surface.boundary_length == 2
    assert {g.edge for g in surface.gluings} == {"P1P2", "P2Q", "QP3", "P3P4", "P4P5"}
    assert [c.order for c in surface.cone_points if c.label == "Q"] == [1]


@pytest.mark.parametrize("params", [BASE, LShapeParams(F(2), F(0), F(1, 3)), LShapeParams(F(1, 2), F(3), F(3, 4))])
def test_gauss_bonnet_gives_a_disc(params):
    assert euler_characteristic(double_surface(params)) == 1


def test_degenerate_surface_has_no_zero():
    surface = double_surface(LShapeParams(F(1), F(0), F(1, 2)))
    labels = [cone.label for cone in surface.cone_points]
    assert "Q" not in labels
    assert all(cone.order < 0 for cone in surface.cone_points if cone.angle != 2)


def test_annulus_decomposition():
    decomposition = decompose_annuli(BASE)
    assert decomposition.moduli == (F(1), F(1, 2))
    assert decomposition.weights == (F(1, 3), F(2, 3))
    assert decomposition.total_area == double_surface(BASE).area
    assert sum(decomposition.weights) == 1


def test_degenerate_decomposition_raises():
    with pytest.raises(DegenerateDecompositionError):
        decompose_annuli(LShapeParams(F(1), F(0), F(1, 2)))


@pytest.mark.parametrize(
    "params, t, exponents",
    [
        ((1, 1, F(1, 2)), 2, (2, 1)),
        ((2, 1, F(1, 2)), 1, (1, 1)),
        ((1, 1, F(1, 3)), 2, (3, 1)),
    ],
)
def test_twist_data_examples(params, t, exponents):
    data = twist_data(LShapeParams(*(F(v) for v in params)))
    assert data.t == t
    assert data.exponents == exponents


def test_twist_data_rejects_floats():
    with pytest.raises(InvalidParametersError):
        twist_data(LShapeParams(1.0, 1.0, 0.5))


def test_twist_data_degenerate():
    with pytest.raises(DegenerateDecompositionError):
        twist_data(LShapeParams(F(1), F(0), F(1, 2)))


def test_rational_lcm():
    assert rational_lcm([F(1, 2), F(1, 3)]) == 1
    assert rational_lcm([F(2, 3), F(4, 9)]) == F(4, 3)
    assert rational_lcm([F(3)]) == 3


def test_twist_exponents_integral_for_random_triples(rng):
    for _ in range(25):
        den = int(rng.integers(2, 10))
        params = LShapeParams(
            F(int(rng.integers(1, 20)), int(rng.integers(1, 8))),
            F(int(rng.integers(1, 20)), int(rng.integers(1, 8))),
            F(int(rng.integers(1, den)), den),
        )
        data = twist_data(params)
        for m, n in zip(data.moduli, data.exponents):
            assert m * data.t == n
        # minimality: no proper divisor t/k works for both annuli
        for k in range(2, 8):
            assert not all((m * data.t / k).denominator == 1 for m in data.moduli)


def test_polyplane_coordinates_and_fol():
    params = LShapeParams(F(3, 2), F(1, 4), F(1, 2))
    assert polyplane_point(BASE, params) == (F(1, 4), F(3, 2))
    assert fol_on_locus(BASE, F(3, 2), F(1, 4)) == F(3, 2) + F(1, 4) * F(1, 2)
    assert hol_value(BASE, 1j, 1j) == pytest.approx(1j)


def test_polyplane_point_off_locus():
    with pytest.raises(DomainError):
        polyplane_point(BASE, LShapeParams(F(1), F(1), F(1, 3)))


def test_stretch_heights():
    assert stretch_heights(BASE, 2j, 3j) == (2.0, 3.0)
    with pytest.raises(DomainError):
        stretch_heights(BASE, -1j, 1j)


def test_pairing_constant_density_gives_area():
    params = LShapeParams(1.0, 1.0, 0.5)
    grid = PolygonGrid(params)
    density = SampledDensity.from_function(grid, lambda sheet, x, y: np.ones_like(x))
    assert pair_with_psi(density, params) == pytest.approx(3.0, rel=1e-14)
    assert fol_derivative(density, params) == pytest.approx(-3j, rel=1e-14)


def test_pairing_polynomial_density():
    # int over L(1, 1, 1/2) of x dx dy = 1/2 + (1/8) = 5/8 per sheet
    params = LShapeParams(1.0, 1.0, 0.5)
    grid = PolygonGrid(params)
    density = SampledDensity.from_function(grid, lambda sheet, x, y: x if sheet == 1 else -x)
    assert abs(pair_with_psi(density, params)) < 1e-14
    density = SampledDensity.from_function(grid, lambda sheet, x, y: x)
    assert pair_with_psi(density, params) == pytest.approx(1.25, rel=1e-14)


def test_pairing_rejects_foreign_grid():
    grid = PolygonGrid(LShapeParams(1.0, 1.0, 0.5))
    density = SampledDensity.from_function(grid, lambda sheet, x, y: np.ones_like(x))
    with pytest.raises(DomainError):
        pair_with_psi(density, LShapeParams(1.0, 2.0, 0.5))


@pytest.mark.parametrize("spec, expected", CLAIM_COVERS)
def test_claim_covers(spec, expected):
    assert cover_type(spec) == expected


def test_claim_cover_bases():
    bases = [punctured_base_type(spec).as_tuple() for spec, _ in CLAIM_COVERS]
    assert bases == [(0, 3, 1), (0, 3, 1), (0, 3, 1), (0, 2, 2), (1, 0, 1)]


def test_cover_parity():
    with pytest.raises(InvalidParametersError):
        cover_type(CoverSpec(0, 0, 0, 0, 1, 1))
    with pytest.raises(InvalidParametersError):
        cover_type(CoverSpec(0, 0, 0, 0, 1, 0))
    # unbranched double cover of a torus with one hole
    assert cover_type(CoverSpec(1, 0, 0, 0, 1, 0)) == SurfaceType(1, 0, 2)


def test_cover_spec_validation():
    with pytest.raises(InvalidParametersError):
        CoverSpec(0, -1, 0, 0, 0, 2)

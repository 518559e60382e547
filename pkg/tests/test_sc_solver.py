import math

import numpy as np
import pytest
from scipy import integrate

from core.errors import DomainError, InvalidParametersError, QuadratureError, SolverError
from core.models import LShapeParams, Prevertices, SolverConfig
from core.sc_solver import (
    BoundaryMap,
    ScIntegrand,
    closure_sides,
    forward_boundary,
    forward_offset,
    integrand_value,
    inverse_boundary,
    inverse_offset,
    side_functionals,
    side_residual,
    solve_parameters,
    sup_deviation,
    sweep_r,
)
from scripts.elliptic_oracle import rectangle_functionals, rectangle_lambda

REFERENCE = Prevertices(0.3, -0.2)


@pytest.fixture(scope="module")
def solved():
    return solve_parameters(LShapeParams(1.0, 1.0, 0.5))


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.3, 0.8])
def test_rectangle_functionals_match_elliptic_integrals(lam):
    sides = side_functionals(Prevertices(lam, 0.5 * (lam - 1.0)))
    A, J = rectangle_functionals(lam)
    assert sides.A == pytest.approx(A, rel=1e-12)
    assert sides.J == pytest.approx(J, rel=1e-12)
    assert sides.B == 0.0


def test_square_has_symmetric_prevertex():
    assert rectangle_lambda(1.0) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_rectangle_solve_matches_oracle(a):
    p = solve_parameters(LShapeParams(a, 0.0, 0.5))
    assert p.r == 0.0
    assert p.lam == pytest.approx(rectangle_lambda(a), abs=1e-10)
    assert side_functionals(p).q == pytest.approx(0.5, rel=1e-10)


def test_round_trip(solved):
    for got, want in zip(side_functionals(solved).sides(), (1.0, 1.0, 0.5)):
        assert got == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize(
    "target",
    [(0.5, 0.25, 0.3), (2.0, 0.5, 0.7), (1.5, 1.0, 0.25), (0.8, 0.05, 0.6)],
)
def test_round_trip_other_shapes(target):
    p = solve_parameters(LShapeParams(*target))
    assert p.r > 0
    for got, want in zip(side_functionals(p).sides(), target):
        assert got == pytest.approx(want, rel=1e-8)


def test_round_trip_with_tolerance_below_rounding_floor():
    p = solve_parameters(LShapeParams(1.0, 1.0, 0.5), SolverConfig(tol=1e-15))
    assert side_residual(p, (1.0, 1.0, 0.5)) <= 1e-8


def test_round_trip_crowded_prevertices():
    # lambda - zeta is about 2e-8 here, so the sides cannot reach 1e-10 in binary64
    target = (1.9026, 0.8159, 0.2016)
    p = solve_parameters(LShapeParams(*target))
    assert p.lam - p.zeta < 1e-6
    assert side_residual(p, target) <= 1e-8


@pytest.mark.slow
def test_round_trip_random_targets(rng):
    for _ in range(20):
        target = (rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.0), rng.uniform(0.2, 0.8))
        p = solve_parameters(LShapeParams(*target))
        assert side_residual(p, target) <= 1e-8, target


def _arc_integral(p: Prevertices, lo: int, hi: int) -> complex:
    """Principal-branch SC integrand integrated over the upper half circle from point lo to point hi"""
    points = [-1.0, p.zeta - p.r, p.zeta, p.lam, 1.0]
    exponents = [-0.5, 0.5, -0.5, -0.5, -0.5]
    centre, radius = 0.5 * (points[lo] + points[hi]), 0.5 * (points[hi] - points[lo])

    def integrand(theta: float) -> complex:
        turn = np.exp(0.5j * theta)
        value = 1j * radius * turn * turn  # dw/dtheta
        for k, (point, exponent) in enumerate(zip(points, exponents)):
            # endpoint factors are divided by theta or pi - theta, which the alg weight puts back
            if k == hi:
                factor = 1j * radius * np.sinc(theta / (2 * np.pi)) * turn
            elif k == lo:
                factor = radius * np.sinc((np.pi - theta) / (2 * np.pi)) * turn
            else:
                factor = centre - point + radius * turn * turn
            value *= np.sqrt(factor) if exponent > 0 else 1.0 / np.sqrt(factor)
        return value

    wvar = (exponents[hi], exponents[lo])
    kwargs = dict(weight="alg", wvar=wvar, epsabs=1e-15, epsrel=1e-13, limit=200)
    real = integrate.quad(lambda t: integrand(t).real, 0.0, np.pi, **kwargs)[0]
    imag = integrate.quad(lambda t: integrand(t).imag, 0.0, np.pi, **kwargs)[0]
    # theta runs from hi back to lo
    return -complex(real, imag)


@pytest.mark.parametrize(
    "lo, hi, side, direction",
    [
        (0, 1, "side_top", -1.0),
        (1, 2, "side_B", 1j),
        (2, 3, "side_Q", -1.0),
        (3, 4, "side_right", -1j),
    ],
)
def test_magnitudes_match_complex_contour(quad, lo, hi, side, direction):
    p = REFERENCE.with_r(0.05)
    magnitude = getattr(ScIntegrand(p), side)(quad)
    contour = _arc_integral(p, lo, hi)
    assert abs(contour - direction * magnitude) <= 1e-10 * magnitude


def test_closure_sides(solved):
    top, right = closure_sides(solved)
    assert top == pytest.approx(0.5, rel=1e-8)
    assert right == pytest.approx(2.0, rel=1e-8)


def test_warm_start_reaches_the_same_solution(solved):
    again = solve_parameters(LShapeParams(1.0, 1.0, 0.5), initial=solved)
    assert again.lam == pytest.approx(solved.lam, abs=1e-9)
    assert again.zeta == pytest.approx(solved.zeta, abs=1e-9)
    assert again.r == pytest.approx(solved.r, abs=1e-9)


def test_initial_guess_needs_positive_r():
    with pytest.raises(SolverError):
        solve_parameters(LShapeParams(1.0, 1.0, 0.5), initial=REFERENCE)


def test_prevertex_ordering():
    with pytest.raises(InvalidParametersError):
        Prevertices(0.1, 0.2)
    with pytest.raises(InvalidParametersError):
        Prevertices(0.3, -0.2, -0.1)
    with pytest.raises(InvalidParametersError):
        Prevertices(0.3, -0.2, 0.9)


def test_collision_raises():
    with pytest.raises(QuadratureError):
        side_functionals(REFERENCE.with_r(1e-17))


def test_integrand_value():
    p = REFERENCE.with_r(0.1)
    x = 2.0
    expected = math.sqrt(x - p.zeta + p.r) / math.sqrt((x + 1) * (x - p.zeta) * (x - p.lam) * (x - 1))
    assert integrand_value(p, x)[0] == pytest.approx(expected, rel=1e-15)


def test_upper_side_grows_with_r():
    rows = sweep_r(REFERENCE, [0.0, 0.05, 0.1, 0.2])
    assert rows[0].B == 0.0
    assert all(later.B > earlier.B for earlier, later in zip(rows, rows[1:]))


def test_forward_boundary_endpoints():
    assert forward_boundary(REFERENCE, 1.0) == 0.0
    assert forward_boundary(REFERENCE, math.inf) == 1.0
    values = [forward_boundary(REFERENCE, x) for x in (1.01, 1.5, 2.0, 3.0, 100.0)]
    assert all(0 < v < 1 for v in values)
    assert values == sorted(values)
    with pytest.raises(DomainError):
        forward_boundary(REFERENCE, 0.5)


@pytest.mark.parametrize("s", [0.1, 0.5, 0.9, 0.999])
def test_inverse_boundary(s):
    p = REFERENCE.with_r(0.05)
    x = inverse_boundary(p, s)
    assert x >= 1.0
    assert forward_boundary(p, x) == pytest.approx(s, abs=1e-12)


@pytest.mark.parametrize("s", [1e-9, 1e-6, 1e-3, 0.1, 0.5, 0.9, 0.999])
def test_inverse_offset_keeps_digits_near_the_corner(s):
    p = REFERENCE.with_r(0.05)
    dx = inverse_offset(p, s)
    assert dx > 0.0
    assert forward_offset(p, dx) == pytest.approx(s, rel=1e-12, abs=1e-15)


def test_forward_inverse_identity_on_grid():
    p = REFERENCE.with_r(0.05)
    grid = np.concatenate(([1e-12, 1e-8, 1e-6], np.linspace(0.0, 0.99, 34)))
    back = np.array([forward_offset(p, inverse_offset(p, s)) for s in grid])
    assert np.max(np.abs(back - grid)) <= 1e-10


def test_inverse_boundary_domain():
    assert inverse_boundary(REFERENCE, 0.0) == 1.0
    with pytest.raises(DomainError):
        inverse_boundary(REFERENCE, 1.0)


def test_boundary_map_endpoints_and_monotonicity():
    bmap = BoundaryMap(REFERENCE, REFERENCE.with_r(0.05))
    assert bmap(0.0) == 0.0
    assert bmap(1.0) == 1.0
    xs = np.linspace(0.0, 1.0, 21)
    g, dg = bmap.evaluate(xs)
    assert np.all(np.diff(g) > 0)
    assert np.all(dg > 0)
    assert g[5] == pytest.approx(bmap(xs[5]), abs=1e-13)


@pytest.mark.parametrize("x", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_boundary_derivative_matches_central_difference(x):
    bmap = BoundaryMap(REFERENCE, REFERENCE.with_r(0.05))
    h = 1e-5
    central = (bmap(x + h) - bmap(x - h)) / (2 * h)
    assert bmap.derivative(x) == pytest.approx(central, abs=1e-6)


def test_identity_boundary_map():
    bmap = BoundaryMap(REFERENCE, REFERENCE)
    assert bmap.is_identity
    g, dg = bmap.evaluate([0.0, 0.25, 1.0])
    assert list(g) == [0.0, 0.25, 1.0]
    assert list(dg) == [1.0, 1.0, 1.0]
    assert sup_deviation(bmap, [0.0, 0.5, 1.0]) == (0.0, 0.0)


def test_boundary_map_rejects_mismatched_prevertices():
    with pytest.raises(DomainError):
        BoundaryMap(REFERENCE.with_r(0.05), REFERENCE)
    with pytest.raises(DomainError):
        BoundaryMap(REFERENCE, Prevertices(0.4, -0.2, 0.05))
    with pytest.raises(DomainError):
        BoundaryMap(REFERENCE, REFERENCE.with_r(0.05))(1.5)


def test_deviation_is_linear_in_r():
    xs = np.linspace(0.0, 1.0, 41)
    small = sup_deviation(BoundaryMap(REFERENCE, REFERENCE.with_r(1e-3)), xs)
    double = sup_deviation(BoundaryMap(REFERENCE, REFERENCE.with_r(2e-3)), xs)
    for one, two in zip(small, double):
        assert 1.5 < two / one < 2.5

"""
L-shaped polygons L(a, b, q), their doubles S(a, b, q) with psi = dz^2, the
Jenkins-Strebel annulus decomposition, twist data and the double-cover type
calculator.
"""

import logging
import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Tuple

import numpy as np

from core.errors import DegenerateDecompositionError, DomainError, InvalidParametersError
from core.models import (
    Annulus,
    AnnulusDecomposition,
    ConePoint,
    CoverSpec,
    DoubledSurface,
    Gluing,
    LPolygon,
    LShapeParams,
    SurfaceType,
    TwistData,
)
from core.quadrature import gauss_table

logger = logging.getLogger(__name__)

VERTEX_ORDER = ("P5", "P1", "P2", "Q", "P3", "P4")
EDGES = ("P5P1", "P1P2", "P2Q", "QP3", "P3P4", "P4P5")


def _shoelace(points) -> object:
    total = 0
    for (x0, y0), (x1, y1) in zip(points, points[1:] + points[:1]):
        total += x0 * y1 - x1 * y0
    return total / 2


def build_polygon(params: LShapeParams) -> LPolygon:
    """Vertices in the normalization P5 = (0, 0), P1 = (1, 0)"""
    a, b, q = params.a, params.b, params.q
    one, zero = type(a)(1) if isinstance(a, Rational) else 1.0, 0
    coords = (
        (zero, zero),
        (one, zero),
        (one, a),
        (q, a),
        (q, a + b),
        (zero, a + b),
    )
    vertices = tuple(zip(VERTEX_ORDER, coords))
    edge_lengths = {
        "P5P1": one,
        "P1P2": a,
        "P2Q": one - q,
        "QP3": b,
        "P3P4": q,
        "P4P5": a + b,
    }
    return LPolygon(params=params, vertices=vertices, edge_lengths=edge_lengths, area=_shoelace(list(coords)))


def double_surface(params: LShapeParams) -> DoubledSurface:
    """Glue two copies of L(a, b, q) along all edges except P5P1"""
    polygon = build_polygon(params)
    gluings = tuple(
        Gluing(edge, polygon.edge_lengths[edge])
        for edge in EDGES
        if edge != "P5P1" and polygon.edge_lengths[edge] != 0
    )
    # interior angle pi/2 doubles to a cone angle pi (simple pole of psi)
    cones = [
        ConePoint("P5", Fraction(1), on_boundary=True),
        ConePoint("P1", Fraction(1), on_boundary=True),
        ConePoint("P2", Fraction(1)),
    ]
    if params.is_degenerate:
        # Q and P3 coincide on a straight edge: a regular marked point
        cones.append(ConePoint("P3", Fraction(2)))
    else:
        cones.append(ConePoint("Q", Fraction(3)))
        cones.append(ConePoint("P3", Fraction(1)))
    cones.append(ConePoint("P4", Fraction(1)))
    return DoubledSurface(
        polygon=polygon,
        gluings=gluings,
        boundary_edges=("P5P1/1", "P5P1/2"),
        cone_points=tuple(cones),
    )


def euler_characteristic(surface: DoubledSurface) -> Fraction:
    """Gauss-Bonnet with geodesic boundary: sum over interior points of (2 - angle/pi) / 2"""
    interior = sum((2 - cone.angle for cone in surface.cone_points if not cone.on_boundary), Fraction(0))
    boundary = sum((1 - cone.angle for cone in surface.cone_points if cone.on_boundary), Fraction(0))
    return (interior + boundary) / 2


def decompose_annuli(params: LShapeParams) -> AnnulusDecomposition:
    """Pi_1 = double of [0,q] x [a,a+b], Pi_2 = double of [0,1] x [0,a]"""
    if params.is_degenerate:
        raise DegenerateDecompositionError(
            f"b = 0 in {params}: psi has no zero and Pi_1 has zero height"
        )
    a, b, q = params.a, params.b, params.q
    norm = a + b * q
    upper = Annulus(
        index=1,
        circumference=2 * q,
        height=b,
        modulus=b / (2 * q),
        area=2 * b * q,
        weight=b * q / norm,
    )
    lower = Annulus(
        index=2,
        circumference=2,
        height=a,
        modulus=a / 2,
        area=2 * a,
        weight=a / norm,
    )
    return AnnulusDecomposition(params=params, annuli=(upper, lower))


def _as_fraction(value) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, Rational):
        raise InvalidParametersError(f"exact rational input required, got {value!r}")
    return Fraction(value)


def rational_lcm(values) -> Fraction:
    """Smallest positive rational that is an integer multiple of every value"""
    values = [Fraction(v) for v in values]
    if any(v <= 0 for v in values):
        raise InvalidParametersError("lcm needs positive rationals")
    num = 1
    den = 0
    for v in values:
        num = math.lcm(num, v.numerator)
        den = math.gcd(den, v.denominator)
    return Fraction(num, den)


def twist_data(params: LShapeParams) -> TwistData:
    """t = lcm(1/m_1, 1/m_2) and n_j = m_j t"""
    exact = LShapeParams(*(_as_fraction(v) for v in (params.a, params.b, params.q)))
    moduli = decompose_annuli(exact).moduli
    t = rational_lcm([1 / m for m in moduli])
    exponents = tuple(m * t for m in moduli)
    if any(n.denominator != 1 for n in exponents):
        raise ArithmeticError(f"non-integral twist exponents {exponents}")
    return TwistData(t=t, moduli=tuple(moduli), exponents=tuple(int(n) for n in exponents))


def stretch_heights(params: LShapeParams, lam1: complex, lam2: complex) -> Tuple[float, float]:
    """Heights of Pi_1, Pi_2 after the polyplane stretch: h_j -> Im(lambda_j) h_j"""
    for lam in (lam1, lam2):
        if not complex(lam).imag > 0:
            raise DomainError(f"{lam} is not in the upper half-plane")
    decomposition = decompose_annuli(params)
    h1, h2 = (ann.height for ann in decomposition.annuli)
    return complex(lam1).imag * h1, complex(lam2).imag * h2


def polyplane_point(base: LShapeParams, params: LShapeParams) -> Tuple[Fraction, Fraction]:
    """Imaginary parts of (lambda_1, lambda_2) with Emb_0(lambda) = S(a, b, q0)"""
    if params.q != base.q:
        raise DomainError(f"{params} is not on the locus q = {base.q}")
    if base.is_degenerate:
        raise DegenerateDecompositionError("base point needs b0 > 0")
    return params.b / base.b, params.a / base.a


def hol_value(base: LShapeParams, lam1, lam2):
    """Hol(Emb_0(lambda_1, lambda_2)) = alpha_1 lambda_1 + alpha_2 lambda_2"""
    alpha1, alpha2 = decompose_annuli(base).weights
    return alpha1 * lam1 + alpha2 * lam2


def fol_on_locus(base: LShapeParams, a, b):
    """Im Fol(S(a, b, q0)) where Fol = (a0 + b0 q0) Hol; equals a + b q0"""
    params = LShapeParams(a, b, base.q)
    im1, im2 = polyplane_point(base, params)
    return (base.a + base.b * base.q) * hol_value(base, im1, im2)


# --- pairing with psi = dz^2 -------------------------------------------------


class PolygonGrid:
    """Tensor Gauss-Legendre grid on the two rectangles covering L(a, b, q)"""

    def __init__(self, params: LShapeParams, order: int = 24):
        self.params = params
        self.order = order
        a, b, q = params.as_float()
        nodes, weights = gauss_table(order)
        blocks = [(0.0, 1.0, 0.0, a)]
        if b > 0:
            blocks.append((0.0, q, a, a + b))
        xs, ys, ws = [], [], []
        for x0, x1, y0, y1 in blocks:
            hx, hy = 0.5 * (x1 - x0), 0.5 * (y1 - y0)
            gx = 0.5 * (x0 + x1) + hx * nodes
            gy = 0.5 * (y0 + y1) + hy * nodes
            X, Y = np.meshgrid(gx, gy, indexing="ij")
            W = np.outer(weights * hx, weights * hy)
            xs.append(X.ravel())
            ys.append(Y.ravel())
            ws.append(W.ravel())
        self.x = np.concatenate(xs)
        self.y = np.concatenate(ys)
        self.weights = np.concatenate(ws)

    @property
    def size(self) -> int:
        return self.x.size


class SampledDensity:
    """Complex density nu sampled on a PolygonGrid, one array per sheet"""

    def __init__(self, grid: PolygonGrid, sheet1: np.ndarray, sheet2: np.ndarray):
        sheet1 = np.asarray(sheet1, dtype=complex)
        sheet2 = np.asarray(sheet2, dtype=complex)
        if sheet1.shape != (grid.size,) or sheet2.shape != (grid.size,):
            raise DomainError(
                f"density shape {sheet1.shape}/{sheet2.shape} does not match grid of size {grid.size}"
            )
        self.grid = grid
        self.sheets = (sheet1, sheet2)

    @classmethod
    def from_function(cls, grid: PolygonGrid, nu: Callable[[int, np.ndarray, np.ndarray], np.ndarray]):
        values = [np.broadcast_to(nu(sheet, grid.x, grid.y), grid.x.shape) for sheet in (1, 2)]
        return cls(grid, *values)


def pair_with_psi(density: SampledDensity, params: LShapeParams) -> complex:
    """Quadrature of int_S nu psi in the flat chart where psi = dz^2"""
    if density.grid.params != params:
        raise DomainError(f"density sampled on {density.grid.params}, paired on {params}")
    w = density.grid.weights
    return complex(sum(np.dot(w, values) for values in density.sheets))


def fol_derivative(density: SampledDensity, params: LShapeParams) -> complex:
    """dFol(nu) = -i int nu psi at S(a, b, q0)"""
    return -1j * pair_with_psi(density, params)


# --- fully ramified double covers --------------------------------------------


def _euler(surface_type: SurfaceType) -> int:
    return 2 - 2 * surface_type.g - surface_type.n - surface_type.b


def cover_type(spec: CoverSpec) -> SurfaceType:
    """Type (g, n, b) of the fully ramified double cover of Y branched over Q"""
    odd = spec.branch_count + spec.a1 + spec.k1
    if odd % 2 != 0:
        raise InvalidParametersError(f"q + a1 + k1 = {odd} must be even")
    if odd == 0 and spec.l == 0:
        # every loop lifts: the only double cover of a planar base is trivial
        raise InvalidParametersError("q + a1 + k1 must be positive on a genus-zero base")
    g = 2 * spec.l - 1 + odd // 2
    result = SurfaceType(g=g, n=spec.k1 + 2 * spec.k2, b=spec.a1 + 2 * spec.a2)
    base = SurfaceType(spec.l, spec.k1 + spec.k2, spec.a1 + spec.a2)
    if _euler(result) != 2 * _euler(base) - spec.branch_count:
        raise ArithmeticError(f"Riemann-Hurwitz mismatch for {spec}")
    return result


def punctured_base_type(spec: CoverSpec) -> SurfaceType:
    """Type of Y minus Q: the branch points become punctures"""
    return SurfaceType(spec.l, spec.k1 + spec.k2 + spec.branch_count, spec.a1 + spec.a2)


# Covers used to reduce the general case to the 3-punctured disc
CLAIM_COVERS = (
    (CoverSpec(l=0, k1=0, k2=1, a1=0, a2=1, branch_count=2), SurfaceType(0, 2, 2)),
    (CoverSpec(l=0, k1=0, k2=0, a1=1, a2=0, branch_count=3), SurfaceType(1, 0, 1)),
    (CoverSpec(l=0, k1=1, k2=0, a1=1, a2=0, branch_count=2), SurfaceType(1, 1, 1)),
    (CoverSpec(l=0, k1=0, k2=0, a1=0, a2=2, branch_count=2), SurfaceType(0, 0, 4)),
    (CoverSpec(l=1, k1=0, k2=0, a1=0, a2=1, branch_count=0), SurfaceType(1, 0, 2)),
)

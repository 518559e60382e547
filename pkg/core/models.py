from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Rational, Real
from typing import Dict, Optional, Tuple

from core.errors import InvalidParametersError

Number = Real  # Fraction, int or float


def _is_exact(value) -> bool:
    return isinstance(value, Rational)


@dataclass(frozen=True)
class LShapeParams:
    """The triple (a, b, q) defining L(a, b, q) and its double S(a, b, q)"""

    a: Number
    b: Number
    q: Number

    def __post_init__(self):
        if not self.a > 0:
            raise InvalidParametersError(f"a must be positive, got {self.a}")
        if not self.b >= 0:
            raise InvalidParametersError(f"b must be nonnegative, got {self.b}")
        if not 0 < self.q < 1:
            raise InvalidParametersError(f"q must lie in (0, 1), got {self.q}")

    @property
    def is_rational(self) -> bool:
        return all(_is_exact(v) for v in (self.a, self.b, self.q))

    @property
    def is_degenerate(self) -> bool:
        return self.b == 0

    def as_float(self) -> Tuple[float, float, float]:
        return float(self.a), float(self.b), float(self.q)


@dataclass(frozen=True)
class LPolygon:
    """L-shaped polygon with vertices listed as P5, P1, P2, Q, P3, P4"""

    params: LShapeParams
    vertices: Tuple[Tuple[str, Tuple[Number, Number]], ...]
    edge_lengths: Dict[str, Number] = field(hash=False, compare=False)
    area: Number

    def vertex(self, label: str) -> Tuple[Number, Number]:
        for name, point in self.vertices:
            if name == label:
                return point
        raise KeyError(label)


@dataclass(frozen=True)
class ConePoint:
    """Singular point of the flat metric, angle stored in units of pi"""

    label: str
    angle: Fraction
    on_boundary: bool = False

    @property
    def order(self) -> int:
        # order of psi = dz^2 at the point: angle (k + 2) * pi
        return int(self.angle) - 2


@dataclass(frozen=True)
class Gluing:
    """Identification of an edge on sheet 1 with the same edge on sheet 2"""

    edge: str
    length: Number


@dataclass(frozen=True)
class DoubledSurface:
    """Two copies of L(a, b, q) glued along every edge except P5P1"""

    polygon: LPolygon
    gluings: Tuple[Gluing, ...]
    boundary_edges: Tuple[str, ...]
    cone_points: Tuple[ConePoint, ...]

    @property
    def area(self) -> Number:
        return 2 * self.polygon.area

    @property
    def boundary_length(self) -> Number:
        return 2 * self.polygon.edge_lengths["P5P1"]


@dataclass(frozen=True)
class Annulus:
    """One cylinder of closed horizontal trajectories"""

    index: int
    circumference: Number
    height: Number
    modulus: Number
    area: Number
    weight: Number


@dataclass(frozen=True)
class AnnulusDecomposition:
    """Jenkins-Strebel decomposition of S(a, b, q) into two annuli"""

    params: LShapeParams
    annuli: Tuple[Annulus, Annulus]

    @property
    def total_area(self) -> Number:
        return sum(ann.area for ann in self.annuli)

    @property
    def moduli(self) -> Tuple[Number, Number]:
        return tuple(ann.modulus for ann in self.annuli)

    @property
    def weights(self) -> Tuple[Number, Number]:
        return tuple(ann.weight for ann in self.annuli)


@dataclass(frozen=True)
class TwistData:
    """Least common multiple of the reciprocal moduli and the twist exponents"""

    t: Fraction
    moduli: Tuple[Fraction, Fraction]
    exponents: Tuple[int, int]


@dataclass(frozen=True)
class CoverSpec:
    """Base surface of type (l, k, a) with punctures/holes split for a double cover"""

    l: int
    k1: int
    k2: int
    a1: int
    a2: int
    branch_count: int

    def __post_init__(self):
        values = (self.l, self.k1, self.k2, self.a1, self.a2, self.branch_count)
        if any(not isinstance(v, int) or v < 0 for v in values):
            raise InvalidParametersError(f"cover data must be nonnegative integers: {values}")


@dataclass(frozen=True)
class SurfaceType:
    """Topological type (genus, punctures, holes)"""

    g: int
    n: int
    b: int

    def as_tuple(self) -> Tuple[int, int, int]:
        return self.g, self.n, self.b


@dataclass(frozen=True)
class Prevertices:
    """Schwarz-Christoffel accessory parameters: prevertices -1 < zeta-r <= zeta < lambda < 1"""

    lam: float
    zeta: float
    r: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise InvalidParametersError(f"r must be nonnegative, got {self.r}")
        if not -1 < self.zeta - self.r <= self.zeta < self.lam < 1:
            raise InvalidParametersError(
                f"prevertex ordering violated: lambda={self.lam}, zeta={self.zeta}, r={self.r}"
            )

    def with_r(self, r: float) -> "Prevertices":
        return Prevertices(self.lam, self.zeta, r)

    @property
    def collapsed(self) -> "Prevertices":
        return Prevertices(self.lam, self.zeta, 0.0)


@dataclass(frozen=True)
class SideFunctionals:
    """The side integrals A, B, J, Q of the Schwarz-Christoffel map"""

    A: float
    B: float
    J: float
    Q: float

    @property
    def a(self) -> float:
        return self.A / self.J

    @property
    def b(self) -> float:
        return self.B / self.J

    @property
    def q(self) -> float:
        return self.Q / self.J

    def sides(self) -> Tuple[float, float, float]:
        return self.a, self.b, self.q


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for the adaptive singular quadrature"""

    abs_tol: float = 1e-15
    rel_tol: float = 1e-13
    limit: int = 200
    tail_cutoff: float = 2.0

    def __post_init__(self):
        if not (0 < self.abs_tol < 1 and 0 < self.rel_tol < 1):
            raise InvalidParametersError("quadrature tolerances must lie in (0, 1)")
        if self.limit < 1:
            raise InvalidParametersError("subdivision limit must be at least 1")
        if self.tail_cutoff <= 1:
            raise InvalidParametersError("tail_cutoff must exceed the last finite prevertex 1")

    def tightened(self, factor: float = 0.5) -> "QuadratureConfig":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


@dataclass(frozen=True)
class SolverConfig:
    """Damped Newton / bracketing controls for the parameter problem"""

    tol: float = 1e-10
    # relative residual at which a line search stalled by rounding still counts as solved
    stall_tol: float = 1e-8
    max_iter: int = 60
    fd_step: float = 1e-6
    max_halvings: int = 30
    continuation_steps: int = 8
    quadrature: QuadratureConfig = QuadratureConfig()

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise InvalidParametersError("solver tolerance must lie in (0, 1)")
        if not 0 < self.stall_tol < 1:
            raise InvalidParametersError("stall tolerance must lie in (0, 1)")
        if self.max_iter < 1:
            raise InvalidParametersError("max_iter must be at least 1")

    @property
    def accept_tol(self) -> float:
        return max(self.tol, self.stall_tol)


@dataclass(frozen=True)
class BaseConfig:
    """Rational base point (a0, b0, q0) of both paths"""

    a0: Fraction
    b0: Fraction
    q0: Fraction

    def __post_init__(self):
        for name in ("a0", "b0", "q0"):
            if not _is_exact(getattr(self, name)):
                raise InvalidParametersError(f"{name} must be rational")
        if not (self.a0 > 0 and self.b0 > 0 and 0 < self.q0 < 1):
            raise InvalidParametersError(f"invalid base point ({self.a0}, {self.b0}, {self.q0})")

    @property
    def params(self) -> LShapeParams:
        return LShapeParams(self.a0, self.b0, self.q0)


@dataclass(frozen=True)
class PathPoint:
    """One sample of the sigma_1 / sigma_2 construction"""

    t: float
    lam: float
    zeta: float
    r: float
    a: float
    b: float
    fol_proxy: float
    residual: float = 0.0

    @property
    def collapsed(self) -> Prevertices:
        return Prevertices(self.lam, self.zeta, 0.0)

    @property
    def prevertices(self) -> Prevertices:
        return Prevertices(self.lam, self.zeta, self.r)


@dataclass(frozen=True)
class AsymptoticFit:
    """Fitted leading coefficients of r(t) and of the Fol proxy"""

    t: Tuple[float, ...]
    rho: Tuple[float, ...]
    c1: float
    beta1: float
    beta2: float
    residual_rms: float
    rho_variation: Tuple[Tuple[float, float, float], ...]
    beta1_by_decade: Tuple[Tuple[float, float, float], ...]
    # (t_lo, t_hi, mean of (fol - a0) log(1/t) / t^2, its relative variation)
    beta2_by_decade: Tuple[Tuple[float, float, float, float], ...] = ()


@dataclass(frozen=True)
class CollarSpec:
    """Collar [0,1] x [0, height] on both sheets and its quadrature grid"""

    height: float
    nx: int = 256
    ny: int = 64

    def __post_init__(self):
        if not self.height > 0:
            raise InvalidParametersError(f"collar height must be positive, got {self.height}")
        if self.nx < 16 or self.ny < 16:
            raise InvalidParametersError("collar grid needs at least 16 nodes per direction")


@dataclass(frozen=True)
class RoundAnnulus:
    """The annulus 1/r0 < |z| < r0"""

    r0: float

    def __post_init__(self):
        if not self.r0 > 1:
            raise InvalidParametersError(f"r0 must exceed 1, got {self.r0}")


@dataclass(frozen=True)
class LaurentDifferential:
    """psi = f dz^2 with f(z) = sum_k c_k z^k over a finite window"""

    coefficients: Tuple[Tuple[int, complex], ...]

    @classmethod
    def from_dict(cls, coefficients: Dict[int, complex]) -> "LaurentDifferential":
        return cls(tuple(sorted((int(k), complex(c)) for k, c in coefficients.items())))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "LaurentDifferential":
        return cls(((int(k), complex(c)),))

    def coefficient(self, k: int) -> complex:
        return sum((c for j, c in self.coefficients if j == k), 0j)

    @property
    def window(self) -> Optional[Tuple[int, int]]:
        if not self.coefficients:
            return None
        ks = [k for k, _ in self.coefficients]
        return min(ks), max(ks)


@dataclass(frozen=True)
class SecondOrderRow:
    """Second-order Fol comparison at one t"""

    t: float
    r: float
    sup_mu: float
    abs_pair: float
    proxy: float
    reference: float

    @property
    def ratio(self) -> float:
        return self.proxy / self.reference


@dataclass(frozen=True)
class SecondOrderReport:
    rows: Tuple[SecondOrderRow, ...]
    collar_height: float
    factor: float = 3.0

    @property
    def spread(self) -> float:
        ratios = [row.ratio for row in self.rows]
        return max(ratios) / min(ratios)

    @property
    def bounded(self) -> bool:
        return self.spread < self.factor

"""
Pairing of mu_phi = (z^2/|z|^2) dzbar/dz with holomorphic quadratic differentials
psi = f dz^2 on the round annulus 1/r0 < |z| < r0.

In polar coordinates the pairing is int int g(rho e^{i theta}) / rho d(theta) d(rho)
with g = z^2 f, so only c_{-2} survives the angular integral and

    int mu_phi psi = 2 I log r0,   I = int_0^{2 pi} g(rho e^{i theta}) d(theta) = 2 pi c_{-2}.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from core.errors import DomainError
from core.models import LaurentDifferential, RoundAnnulus
from core.quadrature import gauss_table

logger = logging.getLogger(__name__)

MIN_ANGULAR_NODES = 64


@dataclass(frozen=True)
class PolarRule:
    """Trapezoid nodes in theta, Gauss-Legendre nodes in s = log(rho)"""

    theta_nodes: Optional[int] = None
    radial_order: int = 32


@dataclass(frozen=True)
class DecayRow:
    index: int
    c_minus2: complex
    pairing: complex
    expected: complex
    l1_norm: float


def angular_nodes(d: LaurentDifferential, rule: PolarRule = PolarRule()) -> int:
    """Enough trapezoid nodes to resolve every e^{i(k+2) theta} exactly"""
    window = d.window
    spread = 0 if window is None else max(abs(window[0] + 2), abs(window[1] + 2))
    needed = max(MIN_ANGULAR_NODES, 2 * spread + 1)
    if rule.theta_nodes is not None:
        if rule.theta_nodes < needed:
            raise DomainError(f"{rule.theta_nodes} angular nodes cannot resolve frequency {spread}")
        return rule.theta_nodes
    return needed


def _g_values(d: LaurentDifferential, z: np.ndarray) -> np.ndarray:
    """g(z) = z^2 f(z)"""
    total = np.zeros_like(z, dtype=complex)
    for k, c in d.coefficients:
        total += c * z ** (k + 2)
    return total


def angular_average(ann: RoundAnnulus, d: LaurentDifferential, rho: float, rule: PolarRule = PolarRule()) -> complex:
    """I = int_0^{2 pi} g(rho e^{i theta}) d(theta); independent of rho"""
    if not 1.0 / ann.r0 < rho < ann.r0:
        raise DomainError(f"radius {rho} outside (1/{ann.r0}, {ann.r0})")
    n = angular_nodes(d, rule)
    theta = 2 * np.pi * np.arange(n) / n
    return complex(2 * np.pi * np.mean(_g_values(d, rho * np.exp(1j * theta))))


def pair_mu_phi(ann: RoundAnnulus, d: LaurentDifferential, rule: PolarRule = PolarRule()) -> complex:
    """int over the annulus of (z^2/|z|^2) f(z) dx dy"""
    n = angular_nodes(d, rule)
    theta = 2 * np.pi * np.arange(n) / n
    nodes, weights = gauss_table(rule.radial_order)
    log_r0 = math.log(ann.r0)
    # s = log(rho) over (-log r0, log r0); dx dy / |z|^2 = ds d(theta)
    s = log_r0 * nodes
    z = np.exp(s)[:, None] * np.exp(1j * theta)[None, :]
    inner = 2 * np.pi * np.mean(_g_values(d, z), axis=1)
    return complex(log_r0 * np.dot(weights, inner))


def l1_norm(ann: RoundAnnulus, d: LaurentDifferential, rule: PolarRule = PolarRule()) -> float:
    """int over the annulus of |f| dx dy"""
    n = max(angular_nodes(d, rule), 4 * MIN_ANGULAR_NODES)
    theta = 2 * np.pi * np.arange(n) / n
    nodes, weights = gauss_table(rule.radial_order)
    log_r0 = math.log(ann.r0)
    rho = np.exp(log_r0 * nodes)
    z = rho[:, None] * np.exp(1j * theta)[None, :]
    f = _g_values(d, z) / z ** 2
    # dx dy = rho^2 ds d(theta)
    inner = 2 * np.pi * np.mean(np.abs(f), axis=1) * rho ** 2
    return float(log_r0 * np.dot(weights, inner))


def decay_check(
    ann: RoundAnnulus, sequence: Sequence[LaurentDifferential], rule: PolarRule = PolarRule()
) -> List[DecayRow]:
    """Pairings along a sequence; they follow 4 pi c_{-2} log r0"""
    rows = []
    scale = 4 * np.pi * math.log(ann.r0)
    for n, d in enumerate(sequence, start=1):
        c = d.coefficient(-2)
        rows.append(
            DecayRow(
                index=n,
                c_minus2=c,
                pairing=pair_mu_phi(ann, d, rule),
                expected=scale * c,
                l1_norm=l1_norm(ann, d, rule),
            )
        )
    logger.debug(f"Decay check over {len(rows)} differentials on r0={ann.r0}")
    return rows


def random_laurent(rng: np.random.Generator, k_min: int = -6, k_max: int = 6) -> LaurentDifferential:
    """Laurent polynomial with standard complex normal coefficients"""
    ks = range(k_min, k_max + 1)
    return LaurentDifferential.from_dict(
        {k: complex(rng.standard_normal(), rng.standard_normal()) for k in ks}
    )


def harmonic_sequence(length: int, r0: float, growth: float = 1.0) -> List[LaurentDifferential]:
    """c_{-2} = 1/n while z^n and z^{-n-4} terms grow the L1 norm

    The extra terms still tend to zero on every compact sub-annulus.
    """
    sequence = []
    for n in range(1, length + 1):
        coefficients = {-2: 1.0 / n}
        if growth:
            coefficients[n] = growth * n * n / r0 ** n
            coefficients[-n - 4] = growth * n * n / r0 ** (n + 4)
        sequence.append(LaurentDifferential.from_dict(coefficients))
    return sequence

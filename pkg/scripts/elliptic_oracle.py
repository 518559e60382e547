import argparse
import json
import math

from scipy.optimize import brentq
from scipy.special import ellipk

# keeps m = (1 + lambda)/2 strictly inside (0, 1)
EDGE = 1e-15


def rectangle_functionals(lam: float):
    """(A, J) of the rectangle map with prevertices -1, lambda, 1, inf

    With m = (1 + lambda)/2: J = sqrt(2) K(m) and A = sqrt(2) K(1 - m).
    Both parameters are formed directly to avoid cancellation.
    """
    if not -1 < lam < 1:
        raise ValueError(f"lambda must lie in (-1, 1), got {lam}")
    m = 0.5 * (1 + lam)
    m_complement = 0.5 * (1 - lam)
    return math.sqrt(2) * ellipk(m_complement), math.sqrt(2) * ellipk(m)


def rectangle_modulus(lam: float) -> float:
    """Aspect a = A/J of the rectangle [0,1] x [0,a]"""
    A, J = rectangle_functionals(lam)
    return A / J


def rectangle_lambda(a: float) -> float:
    """Prevertex lambda of the rectangle of aspect a (a is decreasing in lambda)"""
    if not a > 0:
        raise ValueError(f"aspect must be positive, got {a}")
    return brentq(
        lambda lam: rectangle_modulus(lam) - a,
        -1 + EDGE,
        1 - EDGE,
        xtol=1e-16,
        rtol=1e-15,
        maxiter=400,
    )


def main():
    parser = argparse.ArgumentParser(description="Rectangle conformal map via complete elliptic integrals")
    parser.add_argument("aspect", type=float, nargs="+", help="rectangle aspect a = height / width")
    args = parser.parse_args()

    results = []
    for a in args.aspect:
        lam = rectangle_lambda(a)
        A, J = rectangle_functionals(lam)
        results.append({"a": a, "lambda": lam, "A": A, "J": J})
    print(json.dumps(results, indent=2))


if __name__ == "__main__":
    main()

import logging
import math
from typing import List, Tuple

import numpy as np

from config.settings import RunConfig
from core.annulus_pairing import (
    angular_average,
    decay_check,
    harmonic_sequence,
    l1_norm,
    pair_mu_phi,
    random_laurent,
)
from core.models import LaurentDifferential, RoundAnnulus
from handlers.common import EXIT_FAILED, EXIT_OK, run_metadata
from utils.tables import SweepTable

logger = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-8
SELECTION_ATOL = 1e-10
MONOMIAL_RANGE = range(-8, 7)

Check = Tuple[str, bool, str]


def annulus_checks(r0: float, rng: np.random.Generator, count: int = 20) -> Tuple[List[Check], SweepTable]:
    """Identity, selection rule, radius independence and decay on one annulus"""
    ann = RoundAnnulus(r0)
    log_r0 = math.log(r0)
    checks: List[Check] = []

    exact = 4 * math.pi * log_r0
    value = pair_mu_phi(ann, LaurentDifferential.monomial(-2))
    err = abs(value - exact)
    checks.append(("monomial k=-2", err <= IDENTITY_RTOL * exact, f"pairing={value.real:.15g} error={err:.2e}"))

    worst = max(abs(pair_mu_phi(ann, LaurentDifferential.monomial(k))) for k in MONOMIAL_RANGE if k != -2)
    checks.append(("monomials k!=-2", worst <= SELECTION_ATOL, f"max |pairing|={worst:.2e}"))

    table = SweepTable("annulus", ("index", "c_minus2_re", "c_minus2_im", "pairing_re", "pairing_im", "identity_error", "l1_norm"))
    worst_identity = 0.0
    worst_radius = 0.0
    rho1, rho2 = 1 + 0.1 * (r0 - 1), 1 + 0.9 * (r0 - 1)
    for n in range(1, count + 1):
        d = random_laurent(rng)
        pairing = pair_mu_phi(ann, d)
        average = angular_average(ann, d, rho1)
        identity_error = abs(pairing - 2 * average * log_r0) / max(abs(pairing), 1e-300)
        worst_identity = max(worst_identity, identity_error)
        worst_radius = max(worst_radius, abs(average - angular_average(ann, d, rho2)))
        c = d.coefficient(-2)
        table.add_row(
            {
                "index": n,
                "c_minus2_re": c.real,
                "c_minus2_im": c.imag,
                "pairing_re": pairing.real,
                "pairing_im": pairing.imag,
                "identity_error": identity_error,
                "l1_norm": l1_norm(ann, d),
            }
        )
    checks.append(("identity 2 I log r0", worst_identity <= IDENTITY_RTOL, f"max relative error={worst_identity:.2e}"))
    checks.append(("radius independence", worst_radius <= SELECTION_ATOL, f"max |I(rho1) - I(rho2)|={worst_radius:.2e}"))

    rows = decay_check(ann, harmonic_sequence(8, r0))
    decay_error = max(abs(row.pairing - row.expected) for row in rows)
    growing = rows[-1].l1_norm > rows[0].l1_norm
    checks.append(
        (
            "decay with growing L1 norm",
            decay_error <= IDENTITY_RTOL * exact and growing,
            f"max error={decay_error:.2e} L1 {rows[0].l1_norm:.4g} -> {rows[-1].l1_norm:.4g}",
        )
    )
    return checks, table


def cmd_annulus_check(config: RunConfig, r0: float = 2.0, count: int = 20) -> int:
    """Run the round-annulus pairing checks and write the per-sample table"""
    rng = np.random.default_rng(config.seed)
    checks, table = annulus_checks(r0, rng, count)
    table.metadata.update(run_metadata(config))
    table.metadata.update({"r0": format(r0, ".17g"), "seed": config.seed})
    table.write(config.output_dir, config.output_format)
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return EXIT_OK if all(passed for _, passed, _ in checks) else EXIT_FAILED

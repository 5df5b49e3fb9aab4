from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    eps_zero: float = 1e-12    # norm / stddev below this is degenerate
    eps_eq: float = 1e-9       # two scalars closer than this are "the same point"
    eps_par: float = 1e-9      # parallelogram detection, multiplied by data scale
    eps_proto: float = 1e-6    # readout matching radius
    eps_sep: float = 1e-6      # relative separation required of sampled directions
    eps_deriv: float = 1e-8    # |f'(0)| below this means no descent direction
    eps_margin: float = 1e-10  # a break must beat LSSR by this much
    eps_pd: float = 1e-10      # relative floor on the smallest eigenvalue of N


DEFAULT = Tolerances()


def from_env(base: Tolerances = DEFAULT) -> Tolerances:
    """Apply the ``LNNET_EPS_EQ`` override, if set."""
    raw = os.environ.get("LNNET_EPS_EQ")
    if raw is None or raw.strip() == "":
        return base
    return replace(base, eps_eq=float(raw))

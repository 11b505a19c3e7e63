"""Central numeric tolerances and defaults.

Every comparison threshold used by the library lives here so tests and the
CLI agree on a single source of truth.  Instances are immutable; pass a
modified copy (``dataclasses.replace``) to loosen or tighten a single check.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # pointwise agreement of evaluated functions
    pointwise: float = 1e-9
    # coefficient-level agreement (Fourier coefficients, weights)
    coeff: float = 1e-12
    # |c[0]| <= mean_zero * max|c| counts as mean-zero
    mean_zero: float = 1e-12
    # unit-vector check for directions
    unit_direction: float = 1e-12
    # relative gap under which two atom locations merge
    atom_merge: float = 1e-6
    # max |f| allowed on the grid boundary, relative to max |f|
    boundary_decay: float = 1e-8
    # imaginary residue allowed when a real value is assembled from a
    # conjugate-symmetric spectrum
    imag_residual: float = 1e-10
    # detection threshold for "is this float an integer"
    integer_detect: float = 1e-12


DEFAULT_TOL = Tolerances()

# default two-sided truncation order for periodic spectral sums
DEFAULT_N_TERMS = 512


def default_seed() -> int:
    """Seed for every randomized routine; LIZKIT_SEED overrides."""
    env = os.environ.get("LIZKIT_SEED")
    if env is not None:
        return int(env)
    return 20260823

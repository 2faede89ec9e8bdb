"""Triplet-spin condensation-witness simulator.

Builds dipole-coupled spin-1 Hamiltonians on configurable geometries,
computes microwave transition amplitudes and the particle-hole RDM
large-eigenvalue witness, and runs distance, size, 2D-geometry and
Monte Carlo noise experiments with seeded reproducibility.
"""

__version__ = "1.0.0"

from .errors import NumericError, ResourceError, ValidationError
from .linalg import EigenSystem, MatrixFreeOperator, eig_lowest_k, eigh_dense
from .model import (
    DIPOLE_KAPPA_GHZ_NM3,
    SPACING_DEFAULT_ANGSTROM,
    ZFS_DEFAULT_GHZ,
    ManyBodyOperator,
    MicrowaveSpec,
    NoiseSpec,
    SpinGeometry,
    chain_y,
    dipole_coupling,
    grid_2d,
    microwave_t,
    perturb,
    total_h,
)
from .witness import (
    collective_operator,
    lambda_witness,
    modified_ph_rdm,
    one_body_rdm,
    ph_rdm,
    sqrt_relation_check,
    transition_amplitudes,
    witness_for_state,
)

__all__ = [
    "__version__",
    "NumericError",
    "ResourceError",
    "ValidationError",
    "EigenSystem",
    "MatrixFreeOperator",
    "eig_lowest_k",
    "eigh_dense",
    "DIPOLE_KAPPA_GHZ_NM3",
    "SPACING_DEFAULT_ANGSTROM",
    "ZFS_DEFAULT_GHZ",
    "ManyBodyOperator",
    "MicrowaveSpec",
    "NoiseSpec",
    "SpinGeometry",
    "chain_y",
    "dipole_coupling",
    "grid_2d",
    "microwave_t",
    "perturb",
    "total_h",
    "collective_operator",
    "lambda_witness",
    "modified_ph_rdm",
    "one_body_rdm",
    "ph_rdm",
    "sqrt_relation_check",
    "transition_amplitudes",
    "witness_for_state",
]

"""Doubled damped oscillator: parameter maps, soldering of chiral doublets,
Hamiltonian diagonalization and pseudo-hermitian quantization."""

from .errors import DampedQError
from .params import (
    ChiralParams,
    ChiralRegime,
    DerivedFrequencies,
    DhoParams,
    Regime,
    RegimeKind,
    chiral_to_physical,
    classify,
    frequencies,
    physical_to_chiral,
    ratio_from_chiral,
)
from .solder import (
    QuadraticLagrangian,
    SolderReport,
    chiral_lagrangian,
    composite_lagrangian,
    solder_auxiliary,
    solder_direct,
)
from .classical import (
    PhaseState,
    Trajectory,
    analytic_solution,
    chiral_flow,
    integrate_doubled,
    noether_charge,
)
from .hamiltonian import (
    CanonicalMap,
    QuadraticHamiltonian,
    canonical_map_ct,
    first_order_hamiltonian,
    legendre_composite,
    map_tn2,
    split_hamiltonian,
)
from .pseudoq import (
    AntilinearOp,
    BiorthogonalSystem,
    LadderReport,
    OperatorMatrix,
    biorthogonal_diagonalize,
    build_ladder,
    composite_spectrum,
    eta_operator,
    fock_matrix_hamiltonian,
)

__version__ = "0.1.0"

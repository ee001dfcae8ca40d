"""Wigner rotation matrices, their even/odd orthogonality sums, and Fisher
information for two-mode interferometric phase estimation."""

from .errors import CapabilityError, DegenerateLikelihoodError, DomainError, NumericalIntegrityError
from .wigner import (
    DMatrix,
    EulerAngles,
    HalfInt,
    ParitySelector,
    big_D,
    d_matrix,
    d_matrix_oracle,
    log_factorial,
    parity_orthogonality_contract,
    parity_orthogonality_matrix,
    parity_orthogonality_sum,
    small_d,
    small_d_matrix,
    symmetry_negate_column,
)
from .states import (
    PhotonSectorEnsemble,
    SectorBlock,
    SectorState,
    TwoModePureState,
    ec_ensemble,
    ec_pure_state,
    mean_jz,
    noon,
    phase_average,
)
from .dynamics import EvolvedState, PhaseConfig, apply_phase, apply_rotation, generator_moments
from .metrology import (
    PHI_GRID,
    FisherReport,
    MeasurementKind,
    OutcomeDistribution,
    cfi_from_distribution,
    cfi_parity,
    dpc_distribution,
    h_ec,
    h_joo,
    parity_expectation,
    qfi_ensemble,
    qfi_pure,
)
from .estimation import crb_report, mle_phase, sample_outcomes

__version__ = "0.1.0"

"""Projector logic, Lüders/Born conditional probability and axiom verification."""

from .boolean import BooleanSubalgebra, boolean_closure, common_atoms, verify_boolean_identities
from .classical import (
    FiniteEventSpace,
    FrequencyTable,
    PlausibilityCalculus,
    ProbabilityTable,
    conditional_ratio,
    kolmogorov_check,
    renyi_check,
    sum_rule_residual,
)
from .errors import ConditioningOnNullError, InputError, NonCommutingError, OracleStarvationError
from .lattice import classify_pair, commutes, complement, join, meet
from .linalg import (
    DEFAULT_TOL,
    DensityMatrix,
    Projector,
    ToleranceProfile,
    identity,
    projector_from_basis,
    random_state,
    trace_inner,
    zero,
)
from .oracle import MeasurementRun, delta_oracle, sample_proposition, sample_sequential
from .quantum import (
    born,
    conditioned_state,
    delta_curve,
    delta_scan,
    frame_additivity_check,
    lueders,
    product_rule_residual,
    quantum_renyi_check,
    quantum_renyi_suite,
    two_qubit_delta,
    two_qubit_family,
)
from .report import AxiomReport

__version__ = "0.1.0"

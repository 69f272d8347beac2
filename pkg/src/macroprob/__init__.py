"""Collective versus microscopic measurement of N identical spins.

Exact simulation in the (N+1)-dimensional symmetric subspace with an
analytic Gaussian pointer.
"""
from .disturbance import AccuracySetting, accuracy_tradeoff_sweep, no_flip_probability, uncertainty_check
from .ensemble import (
    CollectiveOperator,
    SymmetricState,
    commutator_norm,
    commutator_residual,
    frequency_operator_residual,
    from_product_state,
    residual_norm,
    sample_microscopic,
)
from .errors import (
    ConfigError,
    ContractViolation,
    ImpossibleOutcomeError,
    InconsistentMomentsError,
    InvalidArgument,
    SingularSystemError,
)
from .pointer import (
    CoupledState,
    GaussianPointer,
    PointerSuperposition,
    couple_exact,
    couple_perturbative,
    delta_chi_norm,
    overlap,
    pointer_shift_value,
)
from .postselect import PostSelection, consistency_gap, delta_p_exact, delta_p_perturbative, interference_profile
from .qudit import QuditSpec, moments_from_probs, probs_from_moments
from .spin import PAULI_X, PAULI_Y, PAULI_Z, Observable2, SpinState, decompose, expectation, rotate_to_axis

__version__ = "0.1.0"

"""Private quantum states, local-filtering distillation, and bound certificates."""

from .bounds import (
    BoundReport,
    EfCertificate,
    PairBound,
    binary_entropy,
    ed_lower_bound,
    ef_certificate,
    hashing_rate,
    key_rate,
)
from .filtering import (
    FilterError,
    FilterOutcome,
    FilterSet,
    PredictedOutcome,
    apply_filter,
    build_filters,
    predict_outcome,
)
from .linalg import (
    Factor,
    HermitianEig,
    LayoutError,
    SubsystemLayout,
    factor_permutation,
    hermitian_eig,
    kron,
    kron_all,
    layout,
    partial_trace,
    permute_factors,
    schmidt_max,
    trace_distance,
    von_neumann_entropy,
)
from .overlap import (
    OverlapResult,
    a_values,
    brute_force_eta,
    cross_operator,
    eta_optimize,
    optimize_pair,
)
from .private_states import (
    PrivateState,
    PrivateStateSpec,
    build_private_state,
    depolarized_spec,
    eigenvectors_of_pdit,
    key_string_probabilities,
    random_spec,
    tensor_power_spec,
    tensor_power_state,
    with_shield,
)
from .serialize import (
    matrix_from_json,
    matrix_to_json,
    read_json,
    spec_from_json,
    spec_to_json,
    state_from_json,
    state_to_json,
    write_json,
)
from .states import (
    DensityMatrix,
    StateValidationError,
    UnitaryOp,
    bell_vector,
    random_density,
    random_unitary,
    validate_state,
    validate_unitary,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

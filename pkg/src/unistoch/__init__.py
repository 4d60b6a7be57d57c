"""Correspondence between unitary quantum dynamics and indivisible stochastic processes."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DEFAULT_TOLERANCE,
    HADAMARD,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PVM,
    TOL_ALG,
    TOL_INT,
    Basis,
    Check,
    DimensionError,
    SingularMatrixError,
    Tolerance,
    UnistochError,
    ValidationError,
    configuration_basis,
    configuration_pvm,
    dagger,
    is_projector,
    is_psd,
    is_self_adjoint,
    is_unitary,
    partial_trace_internal,
    pvm_from_unitary,
    schur_hadamard,
    tensor,
)
from .correspondence import (  # noqa: E402
    Beable,
    EvolutionOperator,
    born_probabilities,
    born_rule,
    born_rule_state,
    density_matrix,
    dictionary_gamma,
    dictionary_rhs,
    emergeable,
    emergeable_rate,
    evolve_density,
    expect_obs,
    factor_rank_one,
    gamma_from_theta,
    initial_density,
    observable_matrix,
    state_vector,
    theta_from_gamma,
    to_heisenberg,
)
from .dilation import (  # noqa: E402
    DilatedSystem,
    KrausSet,
    apply_conjugation_real,
    bit_flip_kraus,
    blockwise_gauge,
    dilate_trivial,
    evolve_density_kraus,
    factorization_error,
    gamma_from_kraus,
    get_block,
    is_orthogonal,
    kraus_from_theta,
    realify,
    reconstruct_gamma,
    stinespring_unitary,
)
from .dynamics import (  # noqa: E402
    Hamiltonian,
    Residual,
    UnitaryFamily,
    check_ehrenfest,
    check_heisenberg_eom,
    extract_hamiltonian,
    family_from_constant_h,
    family_from_piecewise,
    identity_family,
    integrate_schrodinger,
    integrate_von_neumann,
    phase_distance,
)
from .gauge import (  # noqa: E402
    FWBundle,
    FWTransform,
    check_covariant_derivative,
    fw_gauge,
    fw_invariance,
    sh_gauge,
    transform_hamiltonian,
)
from .stochastic import (  # noqa: E402
    DivisibilityReport,
    InverseClass,
    Process,
    TransitionMatrix,
    candidate_intermediate,
    expectation,
    is_divisible_at,
    is_permutation,
    is_stochastic,
    markov_power,
    pauli_x_gamma,
    propagate,
    stochastic_inverse_classify,
)
from .symmetry import (  # noqa: E402
    Classification,
    SymmetryCandidate,
    SymmetryVerdict,
    check_antiunitary_form,
    check_dynamical_symmetry,
    check_wigner,
    involution_generator,
    noether_check,
)

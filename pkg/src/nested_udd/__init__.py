"""Nested Uhrig dynamical decoupling of two-qubit states in a spin bath.

The package builds control operators for a protected two-qubit subspace,
generates nested UDD pulse schedules, propagates the exact joint dynamics
of system plus bath, measures decoherence via trace distance, and predicts
by operator-algebra reduction which layer orderings suppress decoherence
to high order.
"""

from nested_udd.linalg import (
    HermEig,
    NumericalFault,
    herm_eig,
    kron,
    partial_trace_bath,
    propagator,
    trace_distance,
)
from nested_udd.operators import (
    CONTROL_NAMES,
    DEFAULT_BATH_SPINS,
    BasisConvention,
    ControlOperator,
    OperatorBasis,
    SystemState,
    build_basis,
    build_control,
    get_convention,
    lift_to_full,
)
from nested_udd.algebra import (
    AlgebraSpan,
    ChainStep,
    ClosureResult,
    ReductionChain,
    SplitResult,
    conjugation_split,
    full_span,
    identity_span,
    multiplicative_closure,
    ordering_exchangeable,
    predict_chain,
    span_from_labels,
    span_from_operators,
)
from nested_udd.model import (
    BATH_TAG,
    MODEL_TAG,
    STATE_TAG,
    JointState,
    SpinBathModel,
    build_model,
    derive_seed,
    initial_joint_state,
    model_from_coefficients,
    random_bath_state,
    random_full_state,
    random_protected_state,
)
from nested_udd.schedule import (
    Event,
    EventList,
    LayerSpec,
    LayeredSchedule,
    compose_coincident,
    flatten,
    free_evolution,
    nested_times,
    udd_times,
)
from nested_udd.evolve import (
    RunResult,
    evolve,
    evolve_vector,
    run_once,
)
from nested_udd.experiment import (
    CSV_COLUMNS,
    DEFAULT_MASTER_SEED,
    FitResult,
    SweepConfig,
    SweepResult,
    SweepRow,
    fit_order,
    four_layer_sweep,
    preset_config,
    sweep,
    write_csv,
)

__version__ = "0.1.0"

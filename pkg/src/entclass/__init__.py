"""entclass: SLOCC classification and entanglement invariants for 2x2xn pure states.

A pure state of two qubits plus one n-level system falls into one of nine
classes under stochastic local operations; this package computes the full
invariant suite that separates them (local ranks, the rank of the magic-basis
bilinear form, the 2x2x2 and 2x2x3 hyperdeterminants, concurrence and the
three-tangle), classifies states, exposes the five-graded conversion order
with executable witnesses, verifies the averaged-measure inequality by
seeded measurement trials, and replays entanglement swapping and
distillation protocols through the classifier.
"""

__version__ = "0.1.0"

from .classify import (
    EXPECTED_RANK_RTR,
    LEGAL_SIGNATURES,
    PartialOrder,
    classify,
    grade,
    hasse_edges,
    partial_order,
    reachable,
    witness_chain,
    witness_map,
)
from .errors import (
    AmbiguityError,
    AnnihilationError,
    EntclassError,
    FormatError,
    NormalizationError,
    NumericalInstabilityError,
    ProofChainError,
    SignatureError,
    StateFileError,
    ZeroStateError,
)
from .invariants import (
    BILINEAR_SIGN,
    DET_DEGREES,
    KNOWN_STABILIZER_DIMS,
    MAGIC_BASIS,
    SPIN_FLIP,
    CkwReport,
    DimensionCount,
    InvariantReport,
    RtrResult,
    adjust_format,
    ckw_residual,
    concurrence,
    det222,
    det223,
    invariant_report,
    local_ranks,
    nonlocal_dimension,
    r_matrix,
    rank_rtr,
    three_tangle,
)
from .labels import ClassLabel
from .monotone import (
    MEASURES,
    AmgmBounds,
    MonotoneCheck,
    MonteCarloSummary,
    Outcome,
    OutcomeEnsemble,
    PovmPair,
    amgm_bound_report,
    apply_povm,
    check_monotone,
    equality_case_povm,
    monte_carlo,
    random_povm_pair,
)
from .numerics import (
    DEFAULT_POLICY,
    MAX_MATRIX_DIM,
    RNG_ALGORITHM,
    RandomSource,
    TolerancePolicy,
    numerical_rank,
    random_sl,
    random_state,
    random_unitary,
    svd,
)
from .protocols import (
    BELL_VECTORS,
    ProtocolOutcome,
    distill_from_generic,
    distill_ghz_branches,
    entanglement_swap,
    two_bell,
)
from .tensor import (
    MAX_LEVELS,
    DensityMatrix,
    LocalOperation,
    StateTensor,
    apply_local,
    flatten,
    make_state,
    reduced_density,
    reduced_density_pair,
    representative,
    unflatten,
)

__all__ = [
    "__version__",
    # labels / classification
    "ClassLabel",
    "classify",
    "grade",
    "hasse_edges",
    "reachable",
    "witness_map",
    "witness_chain",
    "partial_order",
    "PartialOrder",
    "LEGAL_SIGNATURES",
    "EXPECTED_RANK_RTR",
    # tensors
    "StateTensor",
    "LocalOperation",
    "DensityMatrix",
    "make_state",
    "representative",
    "apply_local",
    "flatten",
    "unflatten",
    "reduced_density",
    "reduced_density_pair",
    "MAX_LEVELS",
    # numerics
    "TolerancePolicy",
    "DEFAULT_POLICY",
    "RandomSource",
    "RNG_ALGORITHM",
    "MAX_MATRIX_DIM",
    "svd",
    "numerical_rank",
    "random_sl",
    "random_unitary",
    "random_state",
    # invariants
    "InvariantReport",
    "RtrResult",
    "CkwReport",
    "DimensionCount",
    "MAGIC_BASIS",
    "SPIN_FLIP",
    "BILINEAR_SIGN",
    "DET_DEGREES",
    "KNOWN_STABILIZER_DIMS",
    "invariant_report",
    "local_ranks",
    "r_matrix",
    "rank_rtr",
    "det222",
    "det223",
    "adjust_format",
    "concurrence",
    "three_tangle",
    "ckw_residual",
    "nonlocal_dimension",
    # monotone
    "PovmPair",
    "Outcome",
    "OutcomeEnsemble",
    "MonotoneCheck",
    "AmgmBounds",
    "MonteCarloSummary",
    "MEASURES",
    "random_povm_pair",
    "equality_case_povm",
    "apply_povm",
    "check_monotone",
    "amgm_bound_report",
    "monte_carlo",
    # protocols
    "ProtocolOutcome",
    "BELL_VECTORS",
    "two_bell",
    "entanglement_swap",
    "distill_ghz_branches",
    "distill_from_generic",
    # errors
    "EntclassError",
    "FormatError",
    "ZeroStateError",
    "AnnihilationError",
    "NormalizationError",
    "SignatureError",
    "NumericalInstabilityError",
    "AmbiguityError",
    "ProofChainError",
    "StateFileError",
]

"""Exception types shared across the package."""


class EntclassError(Exception):
    """Base class for all package-specific errors."""


class FormatError(EntclassError, ValueError):
    """A tensor, matrix, or operation has the wrong dimensions for the call."""


class ZeroStateError(EntclassError, ValueError):
    """An all-zero amplitude set was supplied where a state is required."""


class AnnihilationError(ZeroStateError):
    """A local operation mapped the state to zero (a vanishing branch)."""


class NormalizationError(EntclassError, ValueError):
    """An operation requiring a unit-norm state received an unnormalized one."""


class SignatureError(EntclassError, ArithmeticError):
    """The computed local-rank signature is not one a 2x2xn pure state can have."""

    def __init__(self, signature):
        self.signature = tuple(signature)
        super().__init__(f"illegal local-rank signature {self.signature}")


class NumericalInstabilityError(EntclassError, ArithmeticError):
    """Two independent computation routes for the same quantity disagree."""


class AmbiguityError(EntclassError):
    """Determinant-based and rank-based class votes disagree.

    Both votes are kept so callers can inspect how fragile the input is.
    """

    def __init__(self, signature, det_vote, rank_vote, rank_rtr):
        self.signature = tuple(signature)
        self.det_vote = det_vote
        self.rank_vote = rank_vote
        self.rank_rtr = rank_rtr
        super().__init__(
            f"classification ambiguous for signature {self.signature}: "
            f"determinant test votes {det_vote}, rank(R^T R)={rank_rtr} votes {rank_vote}"
        )


class ProofChainError(EntclassError, ArithmeticError):
    """A step of the averaged-measure inequality chain failed beyond tolerance."""


class StateFileError(EntclassError, ValueError):
    """A state file could not be parsed; the message carries field context."""

"""Dense multipartite pure-state tensors and local filtering operations.

A state lives on an l-partite Hilbert space with per-party dimensions
(k_1, ..., k_l); its amplitudes form a dense complex array with one axis
per party, indexed in the computational basis. Local operations act one
matrix per party; invertible factors realize SLOCC equivalence, while
rank-deficient or rectangular factors realize the one-way conversions
that order the classes.

Party indices are 0-based throughout the library. Reports at the CLI
boundary translate to the 1-based convention (r1, r2, r3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AnnihilationError,
    FormatError,
    NormalizationError,
    ZeroStateError,
)
from .labels import ClassLabel

#: Per-party dimension cap. Everything the classifier needs fits in n <= 4;
#: the cap keeps dense storage trivially small and makes typos fail loudly.
MAX_LEVELS = 16

_NORM_ATOL = 1e-12
_INVERTIBLE_REL_EPS = 1e-9


def _as_factor(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2:
        raise FormatError(f"local factor must be a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise FormatError("local factor contains non-finite entries")
    m = m.copy()
    m.setflags(write=False)
    return m


def _is_invertible(matrix: np.ndarray) -> bool:
    rows, cols = matrix.shape
    if rows != cols:
        return False
    svals = np.linalg.svd(matrix, compute_uv=False)
    if svals[0] == 0.0:
        return False
    return bool(svals[-1] > _INVERTIBLE_REL_EPS * svals[0] * rows)


@dataclass(frozen=True, eq=False)
class StateTensor:
    """A pure state: per-party dimensions and a dense complex amplitude array.

    The amplitude array is stored row-major with shape equal to ``dims`` and
    frozen after construction. The zero tensor is rejected; normalization is
    explicit (``normalize``) because classification and the polynomial
    invariants are scale-covariant and exact integer amplitudes are useful.
    """

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(k) for k in self.dims)
        if len(dims) < 1 or any(k < 1 for k in dims):
            raise FormatError(f"invalid dims {dims}")
        if any(k > MAX_LEVELS for k in dims):
            raise FormatError(f"dims {dims} exceed the per-party cap {MAX_LEVELS}")
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != dims:
            if amps.size == math.prod(dims):
                amps = amps.reshape(dims)
            else:
                raise FormatError(
                    f"amplitude array of size {amps.size} does not fill dims {dims}"
                )
        if not np.all(np.isfinite(amps)):
            raise FormatError("amplitudes contain non-finite entries")
        if not np.any(amps):
            raise ZeroStateError("the zero tensor is not a state")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def party_count(self) -> int:
        return len(self.dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, atol: float = _NORM_ATOL) -> bool:
        return abs(self.norm**2 - 1.0) <= atol

    def normalize(self) -> "StateTensor":
        return StateTensor(self.dims, self.amplitudes / self.norm)

    def require_normalized(self, atol: float = 1e-9) -> None:
        if abs(self.norm**2 - 1.0) > atol:
            raise NormalizationError(
                f"state has squared norm {self.norm**2:.6g}, expected 1"
            )

    def allclose(self, other: "StateTensor", atol: float = 1e-12) -> bool:
        return self.dims == other.dims and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=atol)
        )

    def __repr__(self) -> str:
        nnz = int(np.count_nonzero(self.amplitudes))
        return f"StateTensor(dims={self.dims}, nonzero={nnz}, norm={self.norm:.6g})"


@dataclass(frozen=True, eq=False)
class LocalOperation:
    """One matrix per party, applied as a tensor product.

    Factor i has shape (k_i', k_i): the output dimension may differ from the
    input dimension (rectangular Clare-side maps). The invertibility flag of
    each factor is computed at construction; a factor is invertible iff it is
    square with full numerical rank.
    """

    factors: tuple[np.ndarray, ...]
    invertible: tuple[bool, ...] = field(init=False)

    def __post_init__(self):
        factors = tuple(_as_factor(m) for m in self.factors)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(
            self, "invertible", tuple(_is_invertible(m) for m in factors)
        )

    @property
    def party_count(self) -> int:
        return len(self.factors)

    @property
    def all_invertible(self) -> bool:
        return all(self.invertible)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "LocalOperation":
        return cls(tuple(np.eye(int(k), dtype=complex) for k in dims))

    @classmethod
    def single_party(cls, dims: Sequence[int], party: int, matrix) -> "LocalOperation":
        """Embed one factor at ``party``, identity elsewhere."""
        factors = [np.eye(int(k), dtype=complex) for k in dims]
        factors[party] = np.asarray(matrix, dtype=complex)
        return cls(tuple(factors))

    def after(self, other: "LocalOperation") -> "LocalOperation":
        """The composition self∘other (``other`` acts first)."""
        if self.party_count != other.party_count:
            raise FormatError("cannot compose operations on different party counts")
        composed = []
        for mine, theirs in zip(self.factors, other.factors):
            if mine.shape[1] != theirs.shape[0]:
                raise FormatError(
                    f"factor shapes {mine.shape} and {theirs.shape} do not chain"
                )
            composed.append(mine @ theirs)
        return LocalOperation(tuple(composed))

    def __repr__(self) -> str:
        shapes = ", ".join(f"{m.shape[0]}x{m.shape[1]}" for m in self.factors)
        return f"LocalOperation({shapes}, invertible={self.invertible})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix: Hermitian, unit trace, positive semidefinite."""

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        dim = int(self.dim)
        rho = np.asarray(self.entries, dtype=complex)
        if rho.shape != (dim, dim):
            raise FormatError(f"density matrix shape {rho.shape} != ({dim}, {dim})")
        scale = max(1.0, float(np.abs(rho).max()))
        if np.abs(rho - rho.conj().T).max() > 1e-12 * scale:
            raise FormatError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(rho).real - 1.0) > 1e-9 or abs(np.trace(rho).imag) > 1e-12:
            raise FormatError(f"density matrix trace {np.trace(rho):.6g} != 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise FormatError("density matrix has a negative eigenvalue")
        rho = rho.copy()
        rho.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "entries", rho)


def make_state(
    dims: Sequence[int],
    entries: Iterable[tuple[Sequence[int], complex]] | dict,
) -> StateTensor:
    """Build a state from sparse (index tuple, amplitude) entries.

    Unspecified amplitudes are zero. The result is NOT normalized; callers
    normalize explicitly. Duplicate index tuples, out-of-range indices, and
    all-zero amplitude sets are rejected.
    """
    dims = tuple(int(k) for k in dims)
    if isinstance(entries, dict):
        entries = entries.items()
    amps = np.zeros(dims, dtype=complex)
    seen: set[tuple[int, ...]] = set()
    for index, value in entries:
        idx = tuple(int(i) for i in index)
        if len(idx) != len(dims):
            raise FormatError(f"index {idx} has wrong arity for dims {dims}")
        if any(i < 0 or i >= k for i, k in zip(idx, dims)):
            raise FormatError(f"index {idx} out of range for dims {dims}")
        if idx in seen:
            raise FormatError(f"duplicate index tuple {idx}")
        seen.add(idx)
        amps[idx] = complex(value)
    return StateTensor(dims, amps)


_SQRT2 = math.sqrt(2.0)

#: Representative states of the nine classes, as sparse patterns on (2, 2, n).
_REPRESENTATIVE_PATTERNS: dict[ClassLabel, tuple[tuple[tuple[int, int, int], complex], ...]] = {
    ClassLabel.SEP: (((0, 0, 0), 1),),
    ClassLabel.B1: (((0, 0, 1), 1), ((0, 1, 0), 1)),
    ClassLabel.B2: (((0, 0, 1), 1), ((1, 0, 0), 1)),
    ClassLabel.B3: (((0, 1, 0), 1), ((1, 0, 0), 1)),
    ClassLabel.W: (((0, 0, 1), 1), ((0, 1, 0), 1), ((1, 0, 0), 1)),
    ClassLabel.GHZ: (((0, 0, 0), 1), ((1, 1, 1), 1)),
    ClassLabel.C223_DEG: (((0, 0, 0), 1), ((0, 1, 1), 1), ((1, 1, 2), 1)),
    ClassLabel.C223_GEN: (
        ((0, 0, 0), 1),
        ((0, 1, 1), 1 / _SQRT2),
        ((1, 0, 1), 1 / _SQRT2),
        ((1, 1, 2), 1),
    ),
    ClassLabel.GEN224: (((0, 0, 0), 1), ((0, 1, 1), 1), ((1, 0, 2), 1), ((1, 1, 3), 1)),
}


def representative(label: ClassLabel | str, n: int = 2) -> StateTensor:
    """The normalized representative of a class, embedded in dims (2, 2, n).

    Requires n >= 2 and n at least the class's minimal Clare dimension
    (4 for the generic 2x2x4 class, 3 for both 2x2x3 classes).
    """
    label = ClassLabel.parse(label)
    n = int(n)
    if n < 2:
        raise FormatError(f"representative requires n >= 2, got {n}")
    if n > MAX_LEVELS:
        raise FormatError(f"n={n} exceeds the per-party cap {MAX_LEVELS}")
    needed = label.min_clare_dim
    if n < needed:
        raise FormatError(
            f"class {label.display_name} needs Clare dimension >= {needed}, got {n}"
        )
    return make_state((2, 2, n), _REPRESENTATIVE_PATTERNS[label]).normalize()


def apply_local(operation: LocalOperation, psi: StateTensor) -> StateTensor:
    """Contract one factor per party: psi' = (M_1 x ... x M_l) psi.

    Output dims are the factors' output dimensions; the result is not
    normalized. A numerically zero result raises AnnihilationError: vanishing
    branches are conditioned away, not returned as states.
    """
    if operation.party_count != psi.party_count:
        raise FormatError(
            f"operation has {operation.party_count} factors for a "
            f"{psi.party_count}-party state"
        )
    out = psi.amplitudes
    for axis, factor in enumerate(operation.factors):
        if factor.shape[1] != psi.dims[axis]:
            raise FormatError(
                f"factor {axis} has shape {factor.shape}, party dimension is "
                f"{psi.dims[axis]}"
            )
        out = np.moveaxis(np.tensordot(factor, out, axes=(1, axis)), 0, axis)
    scale = psi.norm * math.prod(
        max(float(np.linalg.norm(m)), 1e-300) for m in operation.factors
    )
    if float(np.linalg.norm(out)) <= 1e-14 * scale:
        raise AnnihilationError("local operation annihilated the state")
    return StateTensor(out.shape, out)


def flatten(psi: StateTensor) -> np.ndarray:
    """The 4xn matrix of a (2, 2, n) state: row index 2*i1 + i2, column i3."""
    if psi.party_count != 3 or psi.dims[0] != 2 or psi.dims[1] != 2:
        raise FormatError(f"flatten requires dims (2, 2, n), got {psi.dims}")
    return psi.amplitudes.reshape(4, psi.dims[2]).copy()


def unflatten(matrix) -> StateTensor:
    """Inverse of ``flatten``: a 4xn matrix back to a (2, 2, n) state."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != 4:
        raise FormatError(f"unflatten requires a 4xn matrix, got shape {m.shape}")
    return StateTensor((2, 2, m.shape[1]), m.reshape(2, 2, m.shape[1]))


def _unfolding(amplitudes: np.ndarray, party: int) -> np.ndarray:
    """Party-vs-rest coefficient matrix, shape (k_party, rest)."""
    moved = np.moveaxis(amplitudes, party, 0)
    return moved.reshape(moved.shape[0], -1)


def reduced_density(psi: StateTensor, party: int) -> DensityMatrix:
    """Partial trace over all parties except ``party`` (0-based).

    Requires a normalized state; a trace deviation above 1e-9 is rejected.
    """
    if not 0 <= party < psi.party_count:
        raise FormatError(f"party {party} out of range for {psi.party_count} parties")
    psi.require_normalized(atol=1e-9)
    a = _unfolding(psi.amplitudes, party)
    return DensityMatrix(psi.dims[party], a @ a.conj().T)


def reduced_density_pair(psi: StateTensor, first: int, second: int) -> DensityMatrix:
    """Partial trace keeping the ordered pair (first, second) of parties."""
    if first == second:
        raise FormatError("the two kept parties must differ")
    for p in (first, second):
        if not 0 <= p < psi.party_count:
            raise FormatError(f"party {p} out of range")
    psi.require_normalized(atol=1e-9)
    rest = [p for p in range(psi.party_count) if p not in (first, second)]
    moved = np.transpose(psi.amplitudes, (first, second, *rest))
    k = psi.dims[first] * psi.dims[second]
    a = moved.reshape(k, -1)
    return DensityMatrix(k, a @ a.conj().T)

"""SLOCC invariants of 2x2xn pure states.

Local ranks, the magic-basis bilinear form R^T R with its rank and singular
values, the hyperdeterminants of the 2x2x2 and 2x2x3 formats (degree 4 and
degree 6 polynomial invariants), Clare-side format adjustment, two-qubit
concurrence, the three-tangle, the monogamy-identity residual for three
qubits, and the count of nonlocal parameters of a format.

The hyperdeterminants are evaluated literally, term by term, so the code
can be audited against the defining polynomials; there is no clever
factorization. Zero tests use the shared tolerance policy scaled by the
state norm raised to the invariant's homogeneity degree, which makes every
decision scale-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import FormatError, NumericalInstabilityError
from .numerics import DEFAULT_POLICY, TolerancePolicy, numerical_rank, svd
from .tensor import (
    MAX_LEVELS,
    DensityMatrix,
    LocalOperation,
    StateTensor,
    _unfolding,
    apply_local,
    flatten,
    reduced_density,
    reduced_density_pair,
)

#: The magic-basis transform: the fixed 4x4 unitary realizing the
#: isomorphism SL2 x SL2 ~ SO4 on the joint Alice-Bob index. Under it,
#: two-qubit local operations become complex orthogonal matrices.
MAGIC_BASIS = np.array(
    [
        [1, 0, 0, 1],
        [0, 1j, 1j, 0],
        [0, -1, 1, 0],
        [1j, 0, 0, -1j],
    ],
    dtype=complex,
) / math.sqrt(2)
MAGIC_BASIS.setflags(write=False)

_ISY = np.array([[0.0, 1.0], [-1.0, 0.0]])
#: The two-qubit spin-flip form (i sigma_y) x (i sigma_y), a real 4x4 matrix.
SPIN_FLIP = np.kron(_ISY, _ISY)
SPIN_FLIP.setflags(write=False)


def _magic_basis_selftest() -> int:
    """Fix the sign relating MAGIC_BASIS^T MAGIC_BASIS to the spin-flip form.

    Only ranks and singular-value magnitudes are consumed downstream, so any
    consistent sign would do; asserting the relation at import time protects
    the dual-route checks against a silently edited constant.
    """
    product = MAGIC_BASIS.T @ MAGIC_BASIS
    if np.allclose(product, SPIN_FLIP, atol=1e-14):
        return 1
    if np.allclose(product, -SPIN_FLIP, atol=1e-14):
        return -1
    raise RuntimeError("magic-basis transform does not square to the spin-flip form")


#: +1 or -1; established once at import.
BILINEAR_SIGN = _magic_basis_selftest()


@dataclass(frozen=True)
class InvariantReport:
    """Every invariant the classifier consumes, plus decision margins.

    ``local_ranks`` uses the 1-based party convention (r1, r2, r3).
    ``det222``/``det223`` are present only when the rank-adjusted format
    admits them (r3 <= 2 and r3 <= 3 respectively); their phases depend on
    the Clare rotation used for adjustment, so only moduli are contractual.
    ``margins`` maps each thresholded decision to its signed distance from
    the threshold (positive = comfortably decided).
    """

    local_ranks: tuple[int, int, int]
    rank_rtr: int
    singular_values_rtr: tuple[float, ...]
    det222: complex | None
    det223: complex | None
    norm: float
    tolerances: TolerancePolicy
    margins: dict[str, float]


class RtrResult(NamedTuple):
    rank: int
    singular_values: tuple[float, ...]


class CkwReport(NamedTuple):
    """Monogamy decomposition of the Clare-vs-pair entanglement."""

    c3_rest_sq: float
    c13_sq: float
    c23_sq: float
    tangle: float
    residual: float


@dataclass(frozen=True)
class DimensionCount:
    """Nonlocal complex parameters left in the generic orbit of a format.

    raw = (prod k_i - 1) - sum (k_i^2 - 1) + delta, where delta is the
    dimension of the stabilizer of the local special-linear action on the
    generic orbit. delta has no general formula here and is caller-supplied;
    see KNOWN_STABILIZER_DIMS for the documented values.
    """

    dims: tuple[int, ...]
    delta: int
    raw: int
    nonnegative: int

    def __post_init__(self):
        expected = (
            math.prod(self.dims) - 1 - sum(k * k - 1 for k in self.dims) + self.delta
        )
        if self.raw != expected or self.nonnegative != max(self.raw, 0):
            raise ValueError("inconsistent DimensionCount fields")


#: Stabilizer dimensions for the formats whose parameter counts are pinned.
KNOWN_STABILIZER_DIMS: dict[tuple[int, ...], int] = {
    (2, 2, 2, 2): 0,
    (2, 2, 4): 6,
}


def _require_format(psi: StateTensor, n: int | None = None) -> None:
    if psi.party_count != 3 or psi.dims[0] != 2 or psi.dims[1] != 2:
        raise FormatError(f"expected dims (2, 2, n), got {psi.dims}")
    if n is not None and psi.dims[2] != n:
        raise FormatError(f"expected dims (2, 2, {n}), got {psi.dims}")


def local_ranks(
    psi: StateTensor, policy: TolerancePolicy = DEFAULT_POLICY
) -> tuple[int, int, int]:
    """Ranks of the three reduced density matrices of a normalized state.

    Computed twice: as the rank of each party-vs-rest unfolding and as the
    rank of each reduced density matrix. The two routes must agree; a
    disagreement means the state sits too close to a rank boundary for the
    current tolerance policy.
    """
    _require_format(psi)
    psi.require_normalized(atol=1e-9)
    ranks = []
    for party in range(3):
        a = _unfolding(psi.amplitudes, party)
        rank_unfold = numerical_rank(a, policy)
        rho = a @ a.conj().T
        eigs = np.linalg.eigvalsh(rho)
        top = float(eigs[-1]) if eigs.size else 0.0
        if top <= 0.0:
            rank_rho = 0
        else:
            thr = policy.rank_threshold(top, rho.shape[0])
            rank_rho = int(np.count_nonzero(eigs > thr))
        if rank_unfold != rank_rho:
            raise NumericalInstabilityError(
                f"party {party}: unfolding rank {rank_unfold} != "
                f"density rank {rank_rho}"
            )
        ranks.append(rank_unfold)
    return tuple(ranks)


def r_matrix(psi: StateTensor) -> np.ndarray:
    """The magic-basis image of the flattened state: a 4xn matrix."""
    return MAGIC_BASIS @ flatten(psi)


def rank_rtr(
    psi: StateTensor, policy: TolerancePolicy = DEFAULT_POLICY
) -> RtrResult:
    """Rank and descending singular values of R^T R.

    R^T R is computed both from the magic-basis image and directly as the
    spin-flip bilinear form on the flattened state; the two n x n matrices
    must agree (up to the sign fixed at import), else the call fails rather
    than return a silently unstable invariant.

    The rank threshold is taken relative to the squared state norm, the
    natural scale of this quadratic invariant (it bounds every singular
    value of R^T R). Thresholding against the matrix's own largest singular
    value would promote pure matmul roundoff to full rank whenever the form
    vanishes identically, as it does on the biseparable classes.
    """
    f = flatten(psi)
    r = MAGIC_BASIS @ f
    via_magic = r.T @ r
    via_flip = BILINEAR_SIGN * (f.T @ SPIN_FLIP @ f)
    norm_sq = float(np.linalg.norm(f)) ** 2
    if np.abs(via_magic - via_flip).max() > 1e-10 * max(1.0, norm_sq):
        raise NumericalInstabilityError(
            "magic-basis and spin-flip routes to R^T R disagree"
        )
    svals = np.linalg.svd(via_magic, compute_uv=False)
    thr = policy.rank_threshold(norm_sq, via_magic.shape[0])
    rank = int(np.count_nonzero(svals > thr))
    return RtrResult(rank, tuple(float(s) for s in svals))


def det222(psi: StateTensor) -> complex:
    """The degree-4 hyperdeterminant of a 2x2x2 state, evaluated literally.

    Four squared pair terms, minus twice the six cross terms, plus four
    times the two odd-permutation terms.
    """
    _require_format(psi, 2)
    p = psi.amplitudes
    squares = (
        p[0, 0, 0] ** 2 * p[1, 1, 1] ** 2
        + p[0, 0, 1] ** 2 * p[1, 1, 0] ** 2
        + p[0, 1, 0] ** 2 * p[1, 0, 1] ** 2
        + p[1, 0, 0] ** 2 * p[0, 1, 1] ** 2
    )
    crosses = (
        p[0, 0, 0] * p[0, 0, 1] * p[1, 1, 0] * p[1, 1, 1]
        + p[0, 0, 0] * p[0, 1, 0] * p[1, 0, 1] * p[1, 1, 1]
        + p[0, 0, 0] * p[1, 0, 0] * p[0, 1, 1] * p[1, 1, 1]
        + p[0, 0, 1] * p[0, 1, 0] * p[1, 0, 1] * p[1, 1, 0]
        + p[0, 0, 1] * p[1, 0, 0] * p[0, 1, 1] * p[1, 1, 0]
        + p[0, 1, 0] * p[1, 0, 0] * p[0, 1, 1] * p[1, 0, 1]
    )
    quads = (
        p[0, 0, 0] * p[0, 1, 1] * p[1, 0, 1] * p[1, 1, 0]
        + p[0, 0, 1] * p[0, 1, 0] * p[1, 0, 0] * p[1, 1, 1]
    )
    return complex(squares - 2 * crosses + 4 * quads)


def det223(psi: StateTensor) -> complex:
    """The degree-6 hyperdeterminant of a 2x2x3 state.

    The difference of two products of 3x3 determinants built from the rows
    of the flattened state (rows indexed by the joint Alice-Bob bit pair).
    """
    _require_format(psi, 3)
    a = psi.amplitudes
    row = {
        (0, 0): a[0, 0, :],
        (0, 1): a[0, 1, :],
        (1, 0): a[1, 0, :],
        (1, 1): a[1, 1, :],
    }

    def det3(r1, r2, r3) -> complex:
        return complex(np.linalg.det(np.array([row[r1], row[r2], row[r3]])))

    return det3((0, 0), (0, 1), (1, 0)) * det3((0, 1), (1, 0), (1, 1)) - det3(
        (0, 0), (0, 1), (1, 1)
    ) * det3((0, 0), (1, 0), (1, 1))


#: Homogeneity degrees of the two hyperdeterminants.
DET_DEGREES = {"det222": 4, "det223": 6}


def adjust_format(
    psi: StateTensor, target: int, policy: TolerancePolicy = DEFAULT_POLICY
) -> tuple[StateTensor, LocalOperation]:
    """Rotate Clare so all support sits on her first r3 levels, then cut to
    ``target`` levels.

    The rotation comes from the SVD of the flattened state and is unitary,
    so invariant moduli computed after adjustment are well-defined class
    properties. Requires target >= r3 (anything smaller would lose rank);
    target above the current Clare dimension pads with empty levels.
    Returns the adjusted state and the Clare-side operation used.
    """
    _require_format(psi)
    n = psi.dims[2]
    target = int(target)
    if target < 1 or target > MAX_LEVELS:
        raise FormatError(f"target Clare dimension {target} out of range")
    f = flatten(psi)
    _, svals, v = svd(f)
    if svals[0] == 0.0:
        r3 = 0
    else:
        thr = policy.rank_threshold(float(svals[0]), max(f.shape))
        r3 = int(np.count_nonzero(svals > thr))
    if target < r3:
        raise FormatError(
            f"target Clare dimension {target} is below the state's rank {r3}"
        )
    # Flattened state maps as F -> F K^T under a Clare factor K, so K = V^T
    # sends F to U diag(s), concentrating support on the first r3 columns.
    rotation = v.T
    if target <= n:
        clare = rotation[:target, :]
    else:
        clare = np.vstack([rotation, np.zeros((target - n, n), dtype=complex)])
    operation = LocalOperation(
        (np.eye(2, dtype=complex), np.eye(2, dtype=complex), clare)
    )
    return apply_local(operation, psi), operation


def concurrence(rho: DensityMatrix | np.ndarray) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    max(s0 - s1 - s2 - s3, 0) where the s_i are the decreasing square roots
    of the eigenvalues of rho (spin-flip) rho* (spin-flip). They are obtained
    as the singular values of sqrt(rho) (spin-flip) sqrt(rho*): the same
    spectrum, but backward-stable where eigenvalues of the non-Hermitian
    product would lose half the working precision near zero.
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(4, rho)
    if rho.dim != 4:
        raise FormatError(f"concurrence requires a 4x4 density matrix, got {rho.dim}")
    eigs, vecs = np.linalg.eigh(rho.entries)
    root = (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.conj().T
    s = np.linalg.svd(root @ SPIN_FLIP @ root.conj(), compute_uv=False)
    return float(max(s[0] - s[1] - s[2] - s[3], 0.0))


def three_tangle(psi: StateTensor) -> float:
    """The three-tangle of a normalized 2x2x2 state: 4 |det222|."""
    _require_format(psi, 2)
    psi.require_normalized(atol=1e-9)
    return 4.0 * abs(det222(psi))


def ckw_residual(psi: StateTensor) -> CkwReport:
    """Monogamy decomposition of a normalized three-qubit pure state.

    The Clare-vs-pair tangle (4 det of Clare's reduced state, the one-vs-rest
    tangle of a pure state) splits into the two pairwise squared concurrences
    plus the three-tangle; the residual of that identity is the verification
    target and should vanish to roundoff.
    """
    _require_format(psi, 2)
    psi.require_normalized(atol=1e-9)
    rho3 = reduced_density(psi, 2)
    c3_rest_sq = float(4.0 * np.linalg.det(rho3.entries).real)
    c13 = concurrence(reduced_density_pair(psi, 0, 2))
    c23 = concurrence(reduced_density_pair(psi, 1, 2))
    tangle = three_tangle(psi)
    residual = c3_rest_sq - c13**2 - c23**2 - tangle
    return CkwReport(c3_rest_sq, c13**2, c23**2, tangle, residual)


def nonlocal_dimension(dims, delta: int) -> DimensionCount:
    """Count of nonlocal complex parameters in the generic orbit of a format.

    delta (the stabilizer dimension) must be supplied; the values for
    documented formats live in KNOWN_STABILIZER_DIMS.
    """
    dims = tuple(int(k) for k in dims)
    delta = int(delta)
    if delta < 0:
        raise ValueError(f"stabilizer dimension must be nonnegative, got {delta}")
    if any(k < 1 for k in dims) or len(dims) < 2:
        raise FormatError(f"invalid format {dims}")
    raw = math.prod(dims) - 1 - sum(k * k - 1 for k in dims) + delta
    return DimensionCount(dims, delta, raw, max(raw, 0))


def _rank_margin(values: np.ndarray, threshold: float) -> float:
    """Distance of a rank decision from its threshold.

    The minimum over the gap of the smallest kept value above the threshold
    and of the largest dropped value below it; large is comfortable.
    """
    values = np.asarray(values, dtype=float)
    kept = values[values > threshold]
    dropped = values[values <= threshold]
    gaps = []
    if kept.size:
        gaps.append(float(kept.min() - threshold))
    if dropped.size:
        gaps.append(float(threshold - dropped.max()))
    return min(gaps) if gaps else 0.0


def invariant_report(
    psi: StateTensor, policy: TolerancePolicy = DEFAULT_POLICY
) -> InvariantReport:
    """Assemble the full invariant suite for a (2, 2, n) state.

    The state is normalized internally (the original norm is recorded);
    determinant invariants are computed on the rank-adjusted formats when
    those formats apply.
    """
    _require_format(psi)
    norm = psi.norm
    psin = psi if psi.is_normalized() else psi.normalize()

    ranks = local_ranks(psin, policy)
    rtr = rank_rtr(psin, policy)
    r3 = ranks[2]

    margins: dict[str, float] = {}

    rank_margins = []
    for party in range(3):
        a = _unfolding(psin.amplitudes, party)
        svals = np.linalg.svd(a, compute_uv=False)
        thr = policy.rank_threshold(float(svals[0]), max(a.shape))
        rank_margins.append(_rank_margin(svals, thr))
    margins["local_ranks"] = min(rank_margins)
    rtr_svals = np.asarray(rtr.singular_values)
    margins["rank_rtr"] = _rank_margin(
        rtr_svals, policy.rank_threshold(1.0, rtr_svals.size)
    )

    det222_val: complex | None = None
    det223_val: complex | None = None
    if r3 <= 2:
        adjusted2, _ = adjust_format(psin, 2, policy)
        det222_val = det222(adjusted2)
        margins["det222"] = abs(det222_val) - policy.det_threshold(adjusted2.norm, 4)
    if r3 <= 3:
        adjusted3, _ = adjust_format(psin, 3, policy)
        det223_val = det223(adjusted3)
        margins["det223"] = abs(det223_val) - policy.det_threshold(adjusted3.norm, 6)

    return InvariantReport(
        local_ranks=ranks,
        rank_rtr=rtr.rank,
        singular_values_rtr=rtr.singular_values,
        det222=det222_val,
        det223=det223_val,
        norm=norm,
        tolerances=policy,
        margins=margins,
    )

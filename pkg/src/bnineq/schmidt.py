"""Schmidt decompositions across a bipartition of tensor factors, and the
unitary freedom they carry on degenerate coefficient blocks.

A decomposition of ``psi`` across a split (L | R) is a set of coefficients
lambda_a >= 0 summing to 1 together with orthonormal families of vectors on
the two sides such that ``psi = sum_a sqrt(lambda_a) l_a (x) r_a`` (after
restoring the original factor order).  When several coefficients coincide
the decomposition is not unique: the vectors of a degenerate block may be
mixed by any unitary, with the conjugate unitary applied on the other side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectra
from .exceptions import InputError
from .tensor import FactorShape, PureState, partial_trace, permute_factors

#: Relative gap under which neighbouring Schmidt coefficients are treated
#: as degenerate.
BLOCK_TOL = 1e-8

#: Schmidt coefficients at or below this value are discarded as zero rank.
RANK_TOL = 1e-12

#: A left marginal must be this close (entrywise) to maximally mixed for
#: decomposition_from_basis to apply.
MAXIMALLY_MIXED_ATOL = 1e-8

_ORTHO_ATOL = 1e-10


@dataclass(frozen=True)
class BipartiteSplit:
    """Ordered, disjoint factor groups covering all factors of a state.

    Positions are 1-based.  ``left + right`` must be a permutation of
    ``1..n``; the stated order inside each group fixes how the grouped
    subspace is indexed.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self) -> None:
        left = tuple(int(p) for p in self.left)
        right = tuple(int(p) for p in self.right)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        if not left or not right:
            raise InputError("both sides of a split must be nonempty")
        n = len(left) + len(right)
        if sorted(left + right) != list(range(1, n + 1)):
            raise InputError(
                f"split sides {left} | {right} must partition factor positions 1..{n}"
            )

    @property
    def n_factors(self) -> int:
        return len(self.left) + len(self.right)


def _side_dims(shape: FactorShape, positions: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(shape.dims[p - 1] for p in positions)


def _check_split(shape: FactorShape, split: BipartiteSplit) -> None:
    if split.n_factors != shape.n_factors:
        raise InputError(
            f"split over {split.n_factors} factors does not match a "
            f"{shape.n_factors}-factor state"
        )


def _arranged_matrix(psi: PureState, split: BipartiteSplit) -> np.ndarray:
    """The state as a (left-dim x right-dim) matrix in split order."""
    arranged = permute_factors(psi, split.left + split.right)
    d_left = 1
    for d in _side_dims(psi.shape, split.left):
        d_left *= d
    return arranged.amplitudes.reshape(d_left, -1)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Coefficients and vector families of a Schmidt form.

    The constructor checks structure only (matching lengths and shapes,
    coefficients nonnegative, descending, summing to 1).  Orthonormality
    of the families and agreement with a source state are the business of
    :func:`verify_decomposition`, which deliberately accepts defective
    hand-built instances so it can report how bad they are.
    """

    split: BipartiteSplit
    coefficients: np.ndarray
    left_vectors: tuple[PureState, ...]
    right_vectors: tuple[PureState, ...]

    def __post_init__(self) -> None:
        lam = np.array(self.coefficients, dtype=np.float64).reshape(-1)
        lam.setflags(write=False)
        object.__setattr__(self, "coefficients", lam)
        object.__setattr__(self, "left_vectors", tuple(self.left_vectors))
        object.__setattr__(self, "right_vectors", tuple(self.right_vectors))
        k = lam.size
        if k == 0:
            raise InputError("a decomposition needs at least one term")
        if len(self.left_vectors) != k or len(self.right_vectors) != k:
            raise InputError(
                f"{k} coefficients but {len(self.left_vectors)} left / "
                f"{len(self.right_vectors)} right vectors"
            )
        if np.any(lam < 0.0):
            raise InputError(f"negative Schmidt coefficient: {float(lam.min())!r}")
        if np.any(np.diff(lam) > 0.0):
            raise InputError("Schmidt coefficients must be sorted in descending order")
        total = float(lam.sum())
        if abs(total - 1.0) > 1e-10:
            raise InputError(f"Schmidt coefficients sum to {total!r}, expected 1")
        left_shape = self.left_vectors[0].shape
        right_shape = self.right_vectors[0].shape
        if len(left_shape.dims) != len(self.split.left) or len(right_shape.dims) != len(
            self.split.right
        ):
            raise InputError("vector factor counts do not match the split")
        if any(v.shape.dims != left_shape.dims for v in self.left_vectors) or any(
            v.shape.dims != right_shape.dims for v in self.right_vectors
        ):
            raise InputError("all vectors on one side must share one shape")

    @property
    def rank(self) -> int:
        return int(self.coefficients.size)

    def left_matrix(self) -> np.ndarray:
        """Left vectors as columns."""
        return np.column_stack([v.amplitudes for v in self.left_vectors])

    def right_matrix(self) -> np.ndarray:
        return np.column_stack([v.amplitudes for v in self.right_vectors])


def schmidt_decompose(
    psi: PureState, split: BipartiteSplit, rank_tol: float = RANK_TOL
) -> SchmidtDecomposition:
    """Schmidt decomposition of ``psi`` across ``split`` via SVD.

    The squared singular values of the reshaped state become the
    coefficients (descending); terms with coefficient <= ``rank_tol`` are
    dropped.  Right vectors absorb the conjugation needed for the
    reconstruction identity, i.e. they are the conjugated right-singular
    vectors.
    """
    _check_split(psi.shape, split)
    m = _arranged_matrix(psi, split)
    u, s, v = spectra.svd(m)
    lam = s.astype(np.float64) ** 2
    kept = [int(a) for a in range(lam.size) if lam[a] > rank_tol]
    if not kept:
        raise InputError("state has no Schmidt coefficient above rank_tol")
    left_shape = FactorShape(_side_dims(psi.shape, split.left))
    right_shape = FactorShape(_side_dims(psi.shape, split.right))
    lefts = tuple(PureState(left_shape, u[:, a]) for a in kept)
    rights = tuple(PureState(right_shape, np.conj(v[:, a])) for a in kept)
    return SchmidtDecomposition(split, lam[kept], lefts, rights)


def _family_violation(vectors_matrix: np.ndarray) -> float:
    """Worst orthonormality defect of a family of column vectors: the
    largest of |norm - 1| per column and |<v_i, v_j>| for i != j."""
    gram = vectors_matrix.conj().T @ vectors_matrix
    norms = np.sqrt(np.abs(np.diag(gram).real))
    worst = float(np.max(np.abs(norms - 1.0)))
    off = gram - np.diag(np.diag(gram))
    if off.size:
        worst = max(worst, float(np.max(np.abs(off))))
    return worst


def verify_decomposition(psi: PureState, dec: SchmidtDecomposition) -> float:
    """Worst violation of the Schmidt-form contract for ``psi``.

    Computes the Euclidean norm of (psi - reconstruction), the
    orthonormality defects of both vector families, and the deviation of
    the coefficient sum from 1, and returns the largest of these.  A sound
    decomposition scores around machine epsilon; use this as the validity
    gate for hand-built decompositions.
    """
    _check_split(psi.shape, dec.split)
    if dec.left_vectors[0].shape.dims != _side_dims(psi.shape, dec.split.left):
        raise InputError("left vector dimensions do not match the state")
    if dec.right_vectors[0].shape.dims != _side_dims(psi.shape, dec.split.right):
        raise InputError("right vector dimensions do not match the state")
    lmat = dec.left_matrix()
    rmat = dec.right_matrix()
    rec = (lmat * np.sqrt(dec.coefficients)) @ rmat.T
    target = _arranged_matrix(psi, dec.split)
    residual = float(np.linalg.norm(target - rec))
    worst = max(residual, _family_violation(lmat), _family_violation(rmat))
    worst = max(worst, abs(float(dec.coefficients.sum()) - 1.0))
    return worst


def degenerate_blocks(coefficients, block_tol: float = BLOCK_TOL) -> tuple[tuple[int, ...], ...]:
    """Group indices of descending coefficients into degenerate blocks.

    Consecutive coefficients whose gap is at most
    ``block_tol * max(1, lambda_max)`` land in the same block.  Example:
    (0.5, 0.5, 0.3, 0.2) gives blocks (0, 1), (2,), (3,).
    """
    lam = np.asarray(coefficients, dtype=np.float64).reshape(-1)
    if lam.size == 0:
        raise InputError("empty coefficient list")
    if np.any(np.diff(lam) > 0.0):
        raise InputError("coefficients must be sorted in descending order")
    threshold = block_tol * max(1.0, float(lam[0]))
    blocks: list[tuple[int, ...]] = []
    current = [0]
    for a in range(1, lam.size):
        if lam[a - 1] - lam[a] <= threshold:
            current.append(a)
        else:
            blocks.append(tuple(current))
            current = [a]
    blocks.append(tuple(current))
    return tuple(blocks)


def rotate_block(
    dec: SchmidtDecomposition, block, u, block_tol: float = BLOCK_TOL
) -> SchmidtDecomposition:
    """Apply the unitary freedom of one degenerate block.

    ``block`` must be exactly one of ``degenerate_blocks(dec.coefficients)``
    and ``u`` a unitary of matching size.  Left vectors transform as
    ``l_a -> sum_b u[b, a] l_b`` and right vectors with the conjugate
    matrix, which leaves the reconstructed state unchanged.
    """
    idx = tuple(int(a) for a in block)
    if idx not in degenerate_blocks(dec.coefficients, block_tol):
        raise InputError(
            f"{idx} is not a degenerate block of the coefficients "
            f"(blocks: {degenerate_blocks(dec.coefficients, block_tol)})"
        )
    mat = np.asarray(u, dtype=np.complex128)
    k = len(idx)
    if mat.shape != (k, k):
        raise InputError(f"rotation must be {k}x{k} for block {idx}, got {mat.shape}")
    unit_dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(k))))
    if unit_dev > _ORTHO_ATOL:
        raise InputError(f"rotation deviates from unitary by {unit_dev:.3e}")
    lmat = dec.left_matrix()
    rmat = dec.right_matrix()
    cols = list(idx)
    new_l = lmat.copy()
    new_r = rmat.copy()
    new_l[:, cols] = lmat[:, cols] @ mat
    new_r[:, cols] = rmat[:, cols] @ np.conj(mat)
    left_shape = dec.left_vectors[0].shape
    right_shape = dec.right_vectors[0].shape
    lefts = tuple(PureState(left_shape, new_l[:, a]) for a in range(dec.rank))
    rights = tuple(PureState(right_shape, new_r[:, a]) for a in range(dec.rank))
    return SchmidtDecomposition(dec.split, dec.coefficients, lefts, rights)


def decomposition_from_basis(
    psi: PureState, split: BipartiteSplit, basis
) -> SchmidtDecomposition:
    """Schmidt form with a chosen orthonormal basis as the left vectors.

    Only applies when the left marginal of ``psi`` is maximally mixed
    (entrywise within 1e-8 of I/D): then every orthonormal basis of the
    left space serves as a family of Schmidt vectors, all coefficients are
    1/D, and each right vector is the contraction of ``psi`` against the
    corresponding basis vector, rescaled by sqrt(D).

    Parameters
    ----------
    psi : PureState
    split : BipartiteSplit
    basis : sequence of PureState
        Complete orthonormal basis of the left subspace (D vectors).
    """
    _check_split(psi.shape, split)
    left_dims = _side_dims(psi.shape, split.left)
    d_left = 1
    for d in left_dims:
        d_left *= d
    vectors = tuple(basis)
    if len(vectors) != d_left:
        raise InputError(f"basis has {len(vectors)} vectors, expected {d_left}")
    if any(v.shape.dims != left_dims for v in vectors):
        raise InputError("basis vectors do not live on the left factors of the split")
    bmat = np.column_stack([v.amplitudes for v in vectors])
    ortho_dev = float(np.max(np.abs(bmat.conj().T @ bmat - np.eye(d_left))))
    if ortho_dev > _ORTHO_ATOL:
        raise InputError(f"basis deviates from orthonormal by {ortho_dev:.3e}")
    rho = partial_trace(psi, split.left)
    mixed_dev = float(np.max(np.abs(rho.entries - np.eye(d_left) / d_left)))
    if mixed_dev > MAXIMALLY_MIXED_ATOL:
        raise InputError(
            f"left marginal deviates from maximally mixed by {mixed_dev:.3e}; "
            "an arbitrary basis is not a Schmidt family for this state"
        )
    m = _arranged_matrix(psi, split)
    right_shape = FactorShape(_side_dims(psi.shape, split.right))
    contractions = np.sqrt(d_left) * (bmat.conj().T @ m)
    rights = tuple(
        PureState.normalized(right_shape, contractions[a]) for a in range(d_left)
    )
    lam = np.full(d_left, 1.0 / d_left)
    return SchmidtDecomposition(split, lam, vectors, rights)

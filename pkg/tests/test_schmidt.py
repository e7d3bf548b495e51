import numpy as np
import pytest

from bnineq import (
    ADDITIVITY_SPLIT,
    BipartiteSplit,
    FactorShape,
    InputError,
    PureState,
    SchmidtDecomposition,
    basis_state,
    bell_basis,
    canonical_counterexample,
    decomposition_from_basis,
    deformed_counterexample,
    degenerate_blocks,
    haar_state,
    haar_unitary,
    hermitian_eigen,
    kron_state,
    partial_trace,
    product_basis,
    rotate_block,
    schmidt_decompose,
    verify_decomposition,
)


def random_state(dims, seed):
    return haar_state(FactorShape(dims), seed)


# ------------------------------------------------------------------- splits


def test_split_validation():
    BipartiteSplit((1, 2), (3, 4))
    BipartiteSplit((2,), (1,))
    with pytest.raises(InputError):
        BipartiteSplit((1, 2), (2, 3))  # overlap
    with pytest.raises(InputError):
        BipartiteSplit((1,), (3,))  # hole at 2
    with pytest.raises(InputError):
        BipartiteSplit((), (1,))


# --------------------------------------------------------------- decompose


def test_schmidt_of_product_state_is_rank_one():
    psi = kron_state(basis_state(FactorShape((2,)), (1,)), basis_state(FactorShape((3,)), (0,)))
    dec = schmidt_decompose(psi, BipartiteSplit((1,), (2,)))
    assert dec.rank == 1
    assert abs(dec.coefficients[0] - 1.0) < 1e-12


def test_schmidt_of_bell_state():
    phi = PureState(FactorShape((2, 2)), np.array([1, 0, 0, 1]) / np.sqrt(2))
    dec = schmidt_decompose(phi, BipartiteSplit((1,), (2,)))
    assert np.allclose(dec.coefficients, [0.5, 0.5], atol=1e-12)


def test_schmidt_of_canonical_state_is_flat():
    psi = canonical_counterexample(2).state
    dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
    assert np.allclose(dec.coefficients, [0.25] * 4, atol=1e-12)


@pytest.mark.parametrize(
    "dims,split",
    [
        ((2, 2, 2, 2), BipartiteSplit((1, 2), (3, 4))),
        ((2, 2, 2, 2), BipartiteSplit((1, 3), (2, 4))),
        ((3, 2, 3, 2), BipartiteSplit((1, 2), (3, 4))),
        ((2, 3, 4), BipartiteSplit((2,), (1, 3))),
    ],
)
def test_schmidt_coefficients_match_marginal_spectrum(dims, split):
    for seed in range(5):
        psi = random_state(dims, 1000 + seed)
        dec = schmidt_decompose(psi, split)
        rho = partial_trace(psi, split.left)
        spectrum, _ = hermitian_eigen(rho.entries)
        padded = np.zeros(spectrum.values.size)
        padded[: dec.rank] = dec.coefficients
        assert np.max(np.abs(padded - spectrum.values)) < 1e-10
        assert verify_decomposition(psi, dec) < 1e-9


def test_schmidt_rank_tol_drops_null_directions():
    # A product state embedded in a 4-factor space has Schmidt rank 1
    # across any split even though the ambient space is 4-dimensional.
    a = basis_state(FactorShape((2, 2)), (0, 1))
    psi = kron_state(a, a)
    dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
    assert dec.rank == 1


# ------------------------------------------------------------------- verify


def test_verify_scores_sound_decompositions_near_zero():
    psi = random_state((3, 2, 3, 2), 77)
    dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
    assert verify_decomposition(psi, dec) < 1e-12


def test_verify_reports_scaled_vector_defect():
    psi = canonical_counterexample(2).state
    dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
    broken_first = PureState.unchecked(
        dec.left_vectors[0].shape, 2.0 * dec.left_vectors[0].amplitudes
    )
    broken = SchmidtDecomposition(
        dec.split,
        dec.coefficients,
        (broken_first,) + dec.left_vectors[1:],
        dec.right_vectors,
    )
    score = verify_decomposition(psi, broken)
    assert 0.9 < score < 1.5


def test_verify_rejects_shape_mismatch():
    psi = random_state((2, 2, 2, 2), 5)
    other = schmidt_decompose(random_state((3, 2, 3, 2), 5), ADDITIVITY_SPLIT)
    with pytest.raises(InputError):
        verify_decomposition(psi, other)


# ------------------------------------------------------------------- blocks


def test_degenerate_blocks_examples():
    assert degenerate_blocks(np.array([0.25, 0.25, 0.25, 0.25])) == ((0, 1, 2, 3),)
    assert degenerate_blocks(np.array([0.5, 0.3, 0.2])) == ((0,), (1,), (2,))
    assert degenerate_blocks(np.array([0.5, 0.5, 0.3, 0.2])) == ((0, 1), (2,), (3,))


def test_degenerate_blocks_chains_near_ties():
    lam = np.array([0.5, 0.5 - 5e-9, 0.5 - 1e-8 + 1e-12])
    # renormalize is irrelevant here; the function only looks at gaps
    assert degenerate_blocks(lam) == ((0, 1, 2),)


def test_degenerate_blocks_rejects_unsorted():
    with pytest.raises(InputError):
        degenerate_blocks(np.array([0.2, 0.8]))


# ------------------------------------------------------------------- rotate


def test_rotate_block_identity_is_noop():
    dec = schmidt_decompose(canonical_counterexample(2).state, ADDITIVITY_SPLIT)
    same = rotate_block(dec, (0, 1, 2, 3), np.eye(4))
    assert np.allclose(same.left_matrix(), dec.left_matrix())
    assert np.allclose(same.right_matrix(), dec.right_matrix())


def test_rotate_block_preserves_the_state():
    psi = canonical_counterexample(3).state
    dec = schmidt_decompose(psi, ADDITIVITY_SPLIT)
    block = degenerate_blocks(dec.coefficients)[0]
    u = haar_unitary(len(block), 99)
    rotated = rotate_block(dec, block, u)
    assert verify_decomposition(psi, rotated) < 1e-12
    # rotations compose: applying u then its inverse restores the vectors
    back = rotate_block(rotated, block, u.conj().T)
    assert np.max(np.abs(back.left_matrix() - dec.left_matrix())) < 1e-12


def test_rotate_block_phase_freedom_on_singletons():
    state, dec = deformed_counterexample(2, 0.1)
    for index in range(dec.rank):
        phase = np.exp(1j * (0.3 + index))
        rotated = rotate_block(dec, (index,), np.array([[phase]]))
        assert verify_decomposition(state.state, rotated) < 1e-12


def test_rotate_block_input_errors():
    dec = schmidt_decompose(canonical_counterexample(2).state, ADDITIVITY_SPLIT)
    with pytest.raises(InputError):
        rotate_block(dec, (0, 1), np.eye(2))  # not a block: true block is 0..3
    with pytest.raises(InputError):
        rotate_block(dec, (0, 1, 2, 3), np.ones((4, 4)))  # not unitary
    with pytest.raises(InputError):
        rotate_block(dec, (0, 1, 2, 3), np.eye(3))  # wrong size


# -------------------------------------------------------------- from basis


def test_from_basis_product_vectors():
    dec = decomposition_from_basis(
        canonical_counterexample(2).state, ADDITIVITY_SPLIT, product_basis(2)
    )
    assert np.allclose(dec.coefficients, [0.25] * 4, atol=1e-15)
    # right vectors mirror the product basis exactly for this state
    for a, vec in enumerate(dec.right_vectors):
        expected = np.zeros(4)
        expected[a] = 1.0
        assert np.max(np.abs(vec.amplitudes - expected)) < 1e-12
    assert verify_decomposition(canonical_counterexample(2).state, dec) < 1e-12


@pytest.mark.parametrize("d", [2, 3])
def test_from_basis_bell_vectors_conjugate(d):
    basis = bell_basis(d)
    dec = decomposition_from_basis(
        canonical_counterexample(d).state, ADDITIVITY_SPLIT, basis
    )
    for vec, b in zip(dec.right_vectors, basis):
        assert np.max(np.abs(vec.amplitudes - np.conj(b.amplitudes))) < 1e-10
    assert verify_decomposition(canonical_counterexample(d).state, dec) < 1e-10


@pytest.mark.parametrize("d", [2, 3])
def test_from_basis_accepts_any_rotated_basis(d):
    # The canonical state's left marginal is maximally mixed, so every
    # orthonormal basis gives a valid Schmidt family.
    psi = canonical_counterexample(d).state
    shape = FactorShape((d, d))
    for seed in range(10):
        u = haar_unitary(d * d, 2000 + seed)
        basis = tuple(PureState(shape, u[:, a]) for a in range(d * d))
        dec = decomposition_from_basis(psi, ADDITIVITY_SPLIT, basis)
        assert verify_decomposition(psi, dec) < 1e-9


def test_from_basis_rejects_generic_states():
    psi = random_state((2, 2, 2, 2), 31)  # left marginal not maximally mixed
    with pytest.raises(InputError):
        decomposition_from_basis(psi, ADDITIVITY_SPLIT, product_basis(2))


def test_from_basis_rejects_bad_bases():
    psi = canonical_counterexample(2).state
    with pytest.raises(InputError):
        decomposition_from_basis(psi, ADDITIVITY_SPLIT, product_basis(2)[:3])
    skewed = list(product_basis(2))
    skewed[1] = skewed[0]  # duplicate vector: not orthonormal
    with pytest.raises(InputError):
        decomposition_from_basis(psi, ADDITIVITY_SPLIT, tuple(skewed))


# ---------------------------------------------------------------- structure


def test_decomposition_structural_validation():
    dec = schmidt_decompose(canonical_counterexample(2).state, ADDITIVITY_SPLIT)
    with pytest.raises(InputError):
        SchmidtDecomposition(
            dec.split, np.array([0.5, 0.5]), dec.left_vectors, dec.right_vectors
        )  # count mismatch
    with pytest.raises(InputError):
        SchmidtDecomposition(
            dec.split, np.array([0.1, 0.3, 0.3, 0.3]), dec.left_vectors, dec.right_vectors
        )  # ascending order
    with pytest.raises(InputError):
        SchmidtDecomposition(
            dec.split, np.array([0.3, 0.3, 0.3, 0.3]), dec.left_vectors, dec.right_vectors
        )  # sum 1.2

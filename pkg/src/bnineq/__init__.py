"""Numerical study of the Benatti-Narnhofer entanglement entropy
inequality on four-factor pure states.

The library builds the family of states for which the inequality fails,
evaluates both sides for any Schmidt decomposition across the
{1,2} | {3,4} split, and searches the decomposition freedom of degenerate
Schmidt spectra for the largest right-hand side.
"""

from .exceptions import InputError, NumericalError
from .inequality import (
    ADDITIVITY_SPLIT,
    ALICE_FACTORS,
    BOB_FACTORS,
    FourFactorState,
    GapReport,
    bell_basis,
    bn_gap,
    bn_lhs,
    bn_rhs,
    canonical_counterexample,
    deformed_counterexample,
    entangled_decomposition,
    maximize_rhs,
    product_basis,
    product_decomposition,
)
from .sampling import (
    SampleRecord,
    ScanReport,
    derive_seed,
    haar_state,
    haar_unitary,
    scan,
)
from .schmidt import (
    BipartiteSplit,
    SchmidtDecomposition,
    decomposition_from_basis,
    degenerate_blocks,
    rotate_block,
    schmidt_decompose,
    verify_decomposition,
)
from .spectra import (
    Spectrum,
    entropy_from_eigenvalues,
    hermitian_eigen,
    svd,
    von_neumann_entropy,
)
from .tensor import (
    DensityMatrix,
    FactorShape,
    PureState,
    basis_state,
    conjugate_state,
    flatten_index,
    kron_state,
    load_state,
    partial_trace,
    partial_trace_naive,
    permute_factors,
    save_state,
    state_to_document,
    unflatten_index,
)

__all__ = [
    "ADDITIVITY_SPLIT",
    "ALICE_FACTORS",
    "BOB_FACTORS",
    "BipartiteSplit",
    "DensityMatrix",
    "FactorShape",
    "FourFactorState",
    "GapReport",
    "InputError",
    "NumericalError",
    "PureState",
    "SampleRecord",
    "ScanReport",
    "SchmidtDecomposition",
    "Spectrum",
    "basis_state",
    "bell_basis",
    "bn_gap",
    "bn_lhs",
    "bn_rhs",
    "canonical_counterexample",
    "conjugate_state",
    "decomposition_from_basis",
    "deformed_counterexample",
    "degenerate_blocks",
    "derive_seed",
    "entangled_decomposition",
    "entropy_from_eigenvalues",
    "flatten_index",
    "haar_state",
    "haar_unitary",
    "hermitian_eigen",
    "kron_state",
    "load_state",
    "maximize_rhs",
    "partial_trace",
    "partial_trace_naive",
    "permute_factors",
    "product_basis",
    "product_decomposition",
    "rotate_block",
    "save_state",
    "scan",
    "schmidt_decompose",
    "state_to_document",
    "svd",
    "unflatten_index",
    "verify_decomposition",
    "von_neumann_entropy",
]

__version__ = "0.1.0"

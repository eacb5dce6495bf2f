"""Exact rational linear algebra: matrices, subspaces, filtrations and
nilpotent-operator utilities."""
from .matrix import Echelon, Matrix, Q, Rational, block_diag, kron, qstr, shift_block
from .nilpotent import (
    NilpotentOp,
    NotNilpotentError,
    check_monodromy_filtration,
    jordan_partition,
    nilpotent_exp,
    nilpotent_log,
    partition_from_ranks,
    rank_sequence,
    semisimple_unipotent_parts,
    weight_filtration_of_N,
)
from .poly import (
    NotQuasiUnipotentError,
    charpoly,
    charpoly_hessenberg,
    companion,
    cyclotomic,
    cyclotomic_factorization,
    cyclotomic_index,
    peval_matrix,
    power_sums,
    totient,
)
from .subspace import (
    apply_to_rows,
    Filtration,
    Subspace,
    convolve_filtrations,
    direct_sum,
    direct_sum_filtration,
    preimage,
    solve,
    subspace_contains,
    subspace_intersect,
    subspace_sum,
)

__all__ = [
    "Echelon", "Matrix", "Q", "Rational", "block_diag", "kron", "qstr", "shift_block",
    "NilpotentOp", "NotNilpotentError", "check_monodromy_filtration", "jordan_partition",
    "nilpotent_exp", "nilpotent_log", "partition_from_ranks", "rank_sequence",
    "semisimple_unipotent_parts", "weight_filtration_of_N",
    "NotQuasiUnipotentError", "charpoly", "charpoly_hessenberg", "companion", "cyclotomic",
    "cyclotomic_factorization", "cyclotomic_index", "peval_matrix", "power_sums", "totient",
    "Filtration", "Subspace", "convolve_filtrations", "direct_sum", "direct_sum_filtration",
    "apply_to_rows", "preimage", "solve", "subspace_contains", "subspace_intersect", "subspace_sum",
]

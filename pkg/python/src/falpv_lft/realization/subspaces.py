from collections.abc import Sequence

import numpy as np
from scipy.linalg import svd

from falpv_lft.logging import logger
from falpv_lft.models import DEFAULT_TOLERANCES, LftModel, Tolerances


def model_scale(M: LftModel) -> float:
    """Largest of the spectral norms of ``A``, ``B``, ``C`` (at least 1)."""
    norms = [np.linalg.norm(matrix, 2) for matrix in (M.A, M.B, M.C) if matrix.size]
    return max([1.0, *norms])


def rank_threshold(matrix: np.ndarray, singular_values: np.ndarray, *, scale: float, rank: float) -> float:
    """``max(dims) * max(sigma_max, scale) * rank``."""
    sigma_max = float(singular_values[0]) if singular_values.size else 0.0
    return max(matrix.shape) * max(sigma_max, scale) * rank


def range_basis(matrix: np.ndarray, *, scale: float = 1.0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of the numerical column space of ``matrix``."""
    rows = matrix.shape[0]
    if matrix.size == 0:
        return np.zeros((rows, 0))
    U, s, _ = svd(matrix, full_matrices=False)
    rank = int(np.sum(s > rank_threshold(matrix, s, scale=scale, rank=tolerances.rank)))
    return U[:, :rank]


def numerical_rank(matrix: np.ndarray, *, scale: float = 1.0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> int:
    return range_basis(matrix, scale=scale, tolerances=tolerances).shape[1]


def reachable_bases(M: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[np.ndarray]:
    """Per-block orthonormal bases of the reachability spaces ``span{[A#B]_{wi}}``.

    Iterates ``R_i <- span(B_i, A_{i,j} R_j)`` until no block grows; at most ``dim(M)`` sweeps.
    """
    scale = model_scale(M)
    blocks = range(1, M.d + 1)
    bases = [range_basis(M.B_cell(i), scale=scale, tolerances=tolerances) for i in blocks]

    for sweep in range(M.dim + 1):
        grown = [
            range_basis(
                np.hstack([M.B_cell(i), *(M.A_cell(i, j) @ bases[j - 1] for j in blocks)]),
                scale=scale,
                tolerances=tolerances,
            )
            for i in blocks
        ]
        if [basis.shape[1] for basis in grown] == [basis.shape[1] for basis in bases]:
            logger.debug(f"Reachability fixpoint after {sweep + 1} sweeps: {[b.shape[1] for b in bases]}")
            return bases
        bases = grown
    return bases


def observable_bases(M: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> list[np.ndarray]:
    """Per-block orthonormal bases of the orthogonal complements of the unobservable subspaces."""
    return reachable_bases(M.transpose(), tolerances=tolerances)


def krylov_closure(
    generators: Sequence[np.ndarray],
    operators: Sequence[np.ndarray],
    *,
    scale: float = 1.0,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Smallest subspace containing every generator column and invariant under every operator."""
    basis = range_basis(np.hstack(list(generators)), scale=scale, tolerances=tolerances)
    while True:
        grown = range_basis(
            np.hstack([basis, *(operator @ basis for operator in operators)]), scale=scale, tolerances=tolerances
        )
        if grown.shape[1] == basis.shape[1]:
            return basis
        basis = grown

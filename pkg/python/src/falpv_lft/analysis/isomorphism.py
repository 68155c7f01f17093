from collections import deque
from collections.abc import Sequence

import numpy as np
from scipy.linalg import block_diag

from falpv_lft.logging import logger
from falpv_lft.models import DEFAULT_TOLERANCES, ErrorCode, LftError, LftModel, Tolerances
from falpv_lft.realization.minimization import is_minimal
from falpv_lft.realization.subspaces import model_scale, range_basis


def _paired_reachability(
    M1: LftModel, M2: LftModel, tolerances: Tolerances
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Columns ``[A#B]_{w i}`` of both LFTs for the same words ``w``, grouped by last block ``i``.

    A word is extended only while the stacked columns enlarge the stacked span of its block.
    """
    d = M1.d
    scale = max(model_scale(M1), model_scale(M2))
    spans = [np.zeros((n1 + n2, 0)) for n1, n2 in zip(M1.blocks.dims, M2.blocks.dims, strict=True)]
    columns: list[tuple[list[np.ndarray], list[np.ndarray]]] = [([], []) for _ in range(d)]
    queue = deque((letter, M1.B_cell(letter), M2.B_cell(letter)) for letter in range(1, d + 1))
    while queue:
        last, first, second = queue.popleft()
        stacked = np.vstack([first, second])
        grown = range_basis(np.hstack([spans[last - 1], stacked]), scale=scale, tolerances=tolerances)
        if grown.shape[1] == spans[last - 1].shape[1]:
            continue
        spans[last - 1] = grown
        columns[last - 1][0].append(first)
        columns[last - 1][1].append(second)
        for letter in range(1, d + 1):
            queue.append((letter, M1.A_cell(letter, last) @ first, M2.A_cell(letter, last) @ second))

    pairs = []
    for i, (n1, n2) in enumerate(zip(M1.blocks.dims, M2.blocks.dims, strict=True)):
        first, second = columns[i]
        pairs.append(
            (np.hstack(first) if first else np.zeros((n1, 0)), np.hstack(second) if second else np.zeros((n2, 0)))
        )
    return pairs


def similarity_residual(M1: LftModel, M2: LftModel, T: Sequence[np.ndarray]) -> float:
    """Largest entry of ``T A1 - A2 T``, ``T B1 - B2``, ``C1 - C2 T`` and ``D1 - D2``."""
    nonempty = [block for block in T if block.size]
    full = block_diag(*nonempty) if nonempty else np.zeros((0, 0))
    residuals = (full @ M1.A - M2.A @ full, full @ M1.B - M2.B, M1.C - M2.C @ full, M1.D - M2.D)
    return max(float(np.max(np.abs(residual), initial=0.0)) for residual in residuals)


def find_structured_isomorphism(
    M1: LftModel, M2: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> list[np.ndarray] | None:
    """Block-diagonal ``T = diag(T_1..T_d)`` with ``T A1 = A2 T``, ``T B1 = B2`` and ``C1 = C2 T``.

    Both LFTs must be minimal. ``T_i`` is the least squares solution of ``T_i R1_i = R2_i`` for the
    paired reachability matrices of block ``i``; ``None`` when the identities fail.
    """
    if (M1.p_out, M1.m_in, M1.d) != (M2.p_out, M2.m_in, M2.d):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Incompatible LFTs: {M1.p_out}x{M1.m_in} over {M1.d} blocks vs {M2.p_out}x{M2.m_in} over {M2.d}",
        )
    for name, M in (("first", M1), ("second", M2)):
        verdict = is_minimal(M, tolerances=tolerances)
        if not verdict.minimal:
            raise LftError.of(
                ErrorCode.PRECONDITION,
                f"The {name} LFT is not minimal: reachable {verdict.reachable}, observable {verdict.observable}",
            )
    if M1.blocks != M2.blocks:
        logger.debug(f"Block structures {M1.blocks.dims} and {M2.blocks.dims} differ")
        return None

    T = [
        R2 @ np.linalg.pinv(R1) if R1.size else np.zeros((R2.shape[0], R1.shape[0]))
        for R1, R2 in _paired_reachability(M1, M2, tolerances)
    ]
    residual = similarity_residual(M1, M2, T)
    scale = max(model_scale(M1), model_scale(M2)) * max([1.0, *(float(np.linalg.norm(t, 2)) for t in T if t.size)])
    if residual > tolerances.isomorphism * scale:
        logger.debug(f"No structured isomorphism: residual {residual:.3e}")
        return None
    return T

from collections.abc import Sequence
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from falpv_lft.core.words import iter_words, validate_word
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    BlockStructure,
    ErrorCode,
    FalpvModel,
    LftCells,
    LftError,
    LftModel,
    Tolerances,
    TruncatedSeries,
    Word,
)


class WordProducts(NamedTuple):
    A: np.ndarray
    AB: np.ndarray
    CA: np.ndarray
    CAB: np.ndarray


class FalpvMatrices(NamedTuple):
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


def canonical_partition(M: LftModel) -> LftCells:
    d = M.d
    return LftCells(
        A=tuple(tuple(M.A_cell(i, j) for j in range(1, d + 1)) for i in range(1, d + 1)),
        B=tuple(M.B_cell(j) for j in range(1, d + 1)),
        C=tuple(M.C_cell(i) for i in range(1, d + 1)),
    )


def lft_from_cells(blocks: BlockStructure, cells: LftCells, D: np.ndarray) -> LftModel:
    """Reassemble ``(A, B, C)`` from the cells of a canonical partition."""
    D = np.asarray(D, dtype=float)
    p, m = D.shape
    n = blocks.total
    A = np.zeros((n, n))
    B = np.zeros((n, m))
    C = np.zeros((p, n))
    for i in range(1, blocks.d + 1):
        rows = blocks.slice(i)
        B[rows] = cells.B[i - 1]
        C[:, rows] = cells.C[i - 1]
        for j in range(1, blocks.d + 1):
            A[rows, blocks.slice(j)] = cells.A[i - 1][j - 1]
    return LftModel(blocks=blocks, A=A, B=B, C=C, D=D)


def word_products(M: LftModel, word: Sequence[int]) -> WordProducts:
    """``[A]_w``, ``[A#B]_w``, ``[C#A]_w`` and ``[C#A#B]_w`` for a non-empty word ``w``."""
    word = validate_word(word, M.d)
    if len(word) == 0:
        raise LftError.of(ErrorCode.DOMAIN, "Word products are defined for non-empty words only")

    first = word[0]
    product = np.eye(M.blocks.dims[first - 1])
    for previous, letter in zip(word, word[1:]):
        product = M.A_cell(letter, previous) @ product
    last = word[-1]
    AB = product @ M.B_cell(first)
    return WordProducts(A=product, AB=AB, CA=M.C_cell(last) @ product, CAB=M.C_cell(last) @ AB)


def formal_io_map(M: LftModel, word: Sequence[int]) -> np.ndarray:
    """``Y_M(w)``: ``D`` for the empty word, ``C_{i_k} A_{i_k,i_{k-1}} ... A_{i_2,i_1} B_{i_1}`` otherwise."""
    word = validate_word(word, M.d)
    if len(word) == 0:
        return np.array(M.D)
    return word_products(M, word).CAB


def io_series(M: LftModel, depth: int) -> TruncatedSeries:
    """The formal input-output map of ``M`` on every word up to ``depth``, zeros omitted."""
    coeffs: dict[Word, np.ndarray] = {}
    for word in iter_words(M.d, depth):
        value = formal_io_map(M, word)
        if np.any(value != 0):
            coeffs[word] = value
    return TruncatedSeries(alphabet=M.d, depth=depth, shape=(M.p_out, M.m_in), coeffs=coeffs)


def eval_falpv_matrices(system: FalpvModel, psi_values: Sequence[float] | np.ndarray) -> FalpvMatrices:
    psi_values = np.asarray(psi_values, dtype=float).reshape(-1)
    if psi_values.shape[0] != system.n_psi:
        raise LftError.of(ErrorCode.SHAPE, f"Expected {system.n_psi} values of psi, got {psi_values.shape[0]}")

    def combine(coefficients: tuple[np.ndarray, ...]) -> np.ndarray:
        return coefficients[0] + np.tensordot(psi_values, np.stack(coefficients[1:]), axes=1)

    return FalpvMatrices(A=combine(system.A), B=combine(system.B), C=combine(system.C), D=combine(system.D))


def delta_of_point(p: Sequence[float] | np.ndarray, blocks: BlockStructure) -> np.ndarray:
    """The block-diagonal ``Diag[p_1 I_{n_1}, ..., p_d I_{n_d}]``."""
    p = np.asarray(p, dtype=float).reshape(-1)
    if p.shape[0] != blocks.d:
        raise LftError.of(ErrorCode.SHAPE, f"Expected a point with {blocks.d} entries, got {p.shape[0]}")
    return np.diag(np.repeat(p, blocks.dims))


def loop_condition(A: np.ndarray, delta: np.ndarray) -> float:
    """Condition number of ``I - A Delta``; infinite when singular."""
    if A.shape[0] == 0:
        return 1.0
    return float(np.linalg.cond(np.eye(A.shape[0]) - A @ delta))


def star_product(M: LftModel, delta: np.ndarray, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """``M * Delta = D + C Delta (I - A Delta)^-1 B``."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (M.dim, M.dim):
        raise LftError.of(ErrorCode.SHAPE, f"Delta has shape {delta.shape}, expected {(M.dim, M.dim)}")
    if M.dim == 0:
        return np.array(M.D)

    condition = loop_condition(M.A, delta)
    if not np.isfinite(condition) or 1.0 / condition <= tolerances.rcond:
        raise LftError.of(
            ErrorCode.WELL_POSEDNESS,
            f"I - A*Delta is singular to working precision (condition {condition:.3e})",
            condition=condition,
        )
    loop = np.linalg.solve(np.eye(M.dim) - M.A @ delta, M.B)
    return M.D + M.C @ delta @ loop


def similarity_transform(M: LftModel, T: Sequence[np.ndarray]) -> LftModel:
    """Apply the block-diagonal change of coordinates ``T = Diag[T_1, ..., T_d]``."""
    if len(T) != M.d:
        raise LftError.of(ErrorCode.CONTRACT, f"Expected {M.d} similarity blocks, got {len(T)}")
    full = block_diag(*[block for block in T if block.size]) if M.dim else np.zeros((0, 0))
    inverse = np.linalg.inv(full) if M.dim else full
    return LftModel(blocks=M.blocks, A=full @ M.A @ inverse, B=full @ M.B, C=M.C @ inverse, D=M.D)

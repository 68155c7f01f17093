from collections import deque
from typing import NamedTuple

import numpy as np
from scipy.linalg import block_diag

from falpv_lft.core.lft import canonical_partition, formal_io_map, lft_from_cells, word_products
from falpv_lft.core.words import iter_words, shift_word
from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    AssembledLft,
    BlockStructure,
    ErrorCode,
    FalpvModel,
    LftCells,
    LftError,
    LftModel,
    MinimalityVerdict,
    Tolerances,
    TruncatedSeries,
    Word,
)
from falpv_lft.realization.subspaces import krylov_closure, model_scale, range_basis


class Equivalence(NamedTuple):
    equivalent: bool
    word: Word | None
    checked: int


def difference_lft(M1: LftModel, M2: LftModel) -> LftModel:
    """Direct sum of ``M1`` and ``M2`` whose formal input-output map is ``Y_M1 - Y_M2``."""
    if (M1.p_out, M1.m_in, M1.d) != (M2.p_out, M2.m_in, M2.d):
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Incompatible LFTs: {M1.p_out}x{M1.m_in} over {M1.d} blocks vs {M2.p_out}x{M2.m_in} over {M2.d}",
        )
    first, second = canonical_partition(M1), canonical_partition(M2)
    d = M1.d
    cells = LftCells(
        A=tuple(tuple(block_diag(first.A[i][j], second.A[i][j]) for j in range(d)) for i in range(d)),
        B=tuple(np.vstack([first.B[i], second.B[i]]) for i in range(d)),
        C=tuple(np.hstack([first.C[i], -second.C[i]]) for i in range(d)),
    )
    blocks = BlockStructure(dims=tuple(a + b for a, b in zip(M1.blocks.dims, M2.blocks.dims, strict=True)))
    return lft_from_cells(blocks, cells, M1.D - M2.D)


def formal_equivalence(
    M1: LftModel, M2: LftModel, depth: int | None = None, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> Equivalence:
    """Compare ``Y_M1`` and ``Y_M2`` on every word up to ``depth`` (default ``dim(M1) + dim(M2)``).

    Words are explored breadth first and only extended while their ``[A#B]`` columns of the
    difference system enlarge the span reached so far in their last block; every other word is
    a linear combination of explored ones. The first failing word is therefore a shortest one.
    """
    difference = difference_lft(M1, M2)
    depth = M1.dim + M2.dim if depth is None else depth

    if np.max(np.abs(difference.D), initial=0.0) > tolerances.equivalence:
        return Equivalence(equivalent=False, word=(), checked=1)

    scale = model_scale(difference)
    spans = [np.zeros((n, 0)) for n in difference.blocks.dims]
    queue = deque(((letter,), difference.B_cell(letter)) for letter in range(1, difference.d + 1))
    checked = 1
    while queue:
        word, reached = queue.popleft()
        if len(word) > depth:
            break
        checked += 1
        last = word[-1]
        if np.max(np.abs(difference.C_cell(last) @ reached), initial=0.0) > tolerances.equivalence:
            logger.debug(f"LFTs differ on word {word} after {checked} words")
            return Equivalence(equivalent=False, word=word, checked=checked)

        grown = range_basis(np.hstack([spans[last - 1], reached]), scale=scale, tolerances=tolerances)
        if grown.shape[1] == spans[last - 1].shape[1]:
            continue
        spans[last - 1] = grown
        for letter in range(1, difference.d + 1):
            queue.append((word + (letter,), difference.A_cell(letter, last) @ reached))

    return Equivalence(equivalent=True, word=None, checked=checked)


Coefficients = list[np.ndarray]


def _combined_alpv(first: FalpvModel, second: FalpvModel) -> tuple[Coefficients, Coefficients, Coefficients]:
    if (first.n_u, first.n_y, first.n_p, first.n_psi) != (second.n_u, second.n_y, second.n_p, second.n_psi):
        raise LftError.of(ErrorCode.CONTRACT, f"Incompatible FALPVs: {first.dims} vs {second.dims}")
    A = [block_diag(a, b) for a, b in zip(first.A, second.A, strict=True)]
    B = [np.vstack([a, b]) for a, b in zip(first.B, second.B, strict=True)]
    C = [np.hstack([a, -b]) for a, b in zip(first.C, second.C, strict=True)]
    return A, B, C


def falpv_equivalence(
    first: FalpvModel, second: FalpvModel, depth: int | None = None, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Compare the Markov parameters ``C_i A_v B_j`` over words ``v`` on ``0..n_psi`` and the ``D_i``.

    ``A_0`` acts as letter 0. Words longer than ``depth`` (default ``n_x1 + n_x2``) are not examined.
    """
    A, B, C = _combined_alpv(first, second)
    if any(np.max(np.abs(a - b)) > tolerances.equivalence for a, b in zip(first.D, second.D, strict=True)):
        return False

    depth = first.n_x + second.n_x if depth is None else depth
    scale = max(_scale(first), _scale(second))
    basis = range_basis(np.hstack(B), scale=scale, tolerances=tolerances)
    for _ in range(depth):
        grown = range_basis(np.hstack([basis, *(a @ basis for a in A)]), scale=scale, tolerances=tolerances)
        if grown.shape[1] == basis.shape[1]:
            break
        basis = grown

    residual = max(float(np.max(np.abs(c @ basis), initial=0.0)) for c in C)
    return residual <= tolerances.equivalence * scale


def falpv_is_minimal(system: FalpvModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MinimalityVerdict:
    """Extended reachability and observability rank conditions over the letters ``0..n_psi``."""
    reachable = _reachable(system, tolerances).shape[1]
    observable = _observable(system, tolerances).shape[1]
    return MinimalityVerdict(
        minimal=reachable == system.n_x and observable == system.n_x,
        reachable=(reachable,),
        observable=(observable,),
    )


def _scale(system: FalpvModel) -> float:
    return max([1.0, *(float(np.linalg.norm(m, 2)) for m in (*system.A, *system.B, *system.C) if m.size)])


def _reachable(system: FalpvModel, tolerances: Tolerances) -> np.ndarray:
    return krylov_closure(system.B, system.A, scale=_scale(system), tolerances=tolerances)


def _observable(system: FalpvModel, tolerances: Tolerances) -> np.ndarray:
    return krylov_closure(
        [C.T for C in system.C], [A.T for A in system.A], scale=_scale(system), tolerances=tolerances
    )


def _restrict_falpv(system: FalpvModel, basis: np.ndarray) -> FalpvModel:
    return FalpvModel(
        n_p=system.n_p,
        A=tuple(basis.T @ A @ basis for A in system.A),
        B=tuple(basis.T @ B for B in system.B),
        C=tuple(C @ basis for C in system.C),
        D=system.D,
        description=system.description,
    )


def falpv_minimize(system: FalpvModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> FalpvModel:
    """An input-output equivalent FALPV satisfying both extended rank conditions."""
    reduced = _restrict_falpv(system, _reachable(system, tolerances))
    return _restrict_falpv(reduced, _observable(reduced, tolerances))


def transform_falpv(system: FalpvModel, T: np.ndarray) -> FalpvModel:
    """The FALPV ``(T A_i T^-1, T B_i, C_i T^-1, D_i)``."""
    T = np.asarray(T, dtype=float)
    if T.shape != (system.n_x, system.n_x):
        raise LftError.of(ErrorCode.SHAPE, f"Expected a {system.n_x}x{system.n_x} change of coordinates")
    inverse = np.linalg.inv(T)
    return FalpvModel(
        n_p=system.n_p,
        A=tuple(T @ A @ inverse for A in system.A),
        B=tuple(T @ B for B in system.B),
        C=tuple(C @ inverse for C in system.C),
        D=system.D,
        description=system.description,
    )


def structured_markov_check(
    system: FalpvModel,
    assembled: AssembledLft,
    psi_series: TruncatedSeries,
    depth: int,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Equivalence:
    """Check the word products of the assembled LFT against the FALPV coefficients.

    For words ``v`` over the scheduling letters and ``phi`` the shift onto blocks ``2..n_p+1``:
    ``[A]_{1 phi(v) 1}``, ``[A#B]_{phi(v) 1}``, ``[C#A]_{1 phi(v)}`` and ``[C#A#B]_{phi(v)}`` equal
    ``sum_l X_l S^l(v)`` for ``X = A, B, C, D`` respectively, with ``S^0`` the indicator of the empty
    word. With a scaled scheduling argument ``S`` is replaced by ``lam^|v| S``.
    """
    M = assembled.lft
    if assembled.provenance != system.dims:
        raise LftError.of(ErrorCode.CONTRACT, f"LFT was assembled from {assembled.provenance}, not {system.dims}")
    if depth > psi_series.depth:
        raise LftError.of(ErrorCode.TRUNCATION, f"Series known up to depth {psi_series.depth}, asked for {depth}")
    lam = assembled.scheduling_scale
    checked = 0
    for word in iter_words(system.n_p, depth):
        weights = np.concatenate(([1.0 if len(word) == 0 else 0.0], psi_series.coefficient(word)[:, 0]))
        weights[1:] *= lam ** len(word)
        shifted = shift_word(word)
        actual = {
            "A": word_products(M, (1, *shifted, 1)).A,
            "B": word_products(M, (*shifted, 1)).AB,
            "C": word_products(M, (1, *shifted)).CA,
            "D": formal_io_map(M, shifted),
        }
        checked += 1
        for name, coefficients in (("A", system.A), ("B", system.B), ("C", system.C), ("D", system.D)):
            expected = np.tensordot(weights, np.stack(coefficients), axes=1)
            if np.max(np.abs(actual[name] - expected), initial=0.0) > tolerances.equivalence:
                logger.debug(f"Word product {name} differs on word {word}")
                return Equivalence(equivalent=False, word=word, checked=checked)
    return Equivalence(equivalent=True, word=None, checked=checked)

from collections.abc import Iterator

import numpy as np
from scipy.linalg import svd

from falpv_lft.core.words import format_word, iter_words
from falpv_lft.instrumentation import get_tracer
from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    BlockStructure,
    ErrorCode,
    LftError,
    LftModel,
    LinearRepresentation,
    Tolerances,
    TruncatedSeries,
    Word,
)
from falpv_lft.realization.subspaces import rank_threshold


def hankel_matrix(series: TruncatedSeries, size: int, shift: Word = ()) -> np.ndarray:
    """Block Hankel matrix with entry ``S(v + shift + u)``.

    Block rows run over suffixes ``u`` with ``|u| <= size``, block columns over prefixes ``v``
    with ``1 <= |v| <= size``.
    """
    rows = list(iter_words(series.alphabet, size))
    columns = list(iter_words(series.alphabet, size, min_length=1))
    r, c = series.shape
    matrix = np.zeros((len(rows) * r, len(columns) * c))
    for row, u in enumerate(rows):
        for column, v in enumerate(columns):
            matrix[row * r : (row + 1) * r, column * c : (column + 1) * c] = series.coefficient(v + shift + u)
    return matrix


def _rank(matrix: np.ndarray, tolerances: Tolerances) -> tuple[int, np.ndarray, float]:
    if matrix.size == 0:
        return 0, np.zeros(0), 0.0
    s = svd(matrix, compute_uv=False)
    threshold = rank_threshold(matrix, s, scale=0.0, rank=tolerances.rank)
    return int(np.sum(s > threshold)), s, threshold


def hankel_realize(
    series: TruncatedSeries, order_bound: int, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> LinearRepresentation:
    """Ho-Kalman realization of the word series ``series`` on words of length 1 and more.

    The empty-word coefficient is not part of the Hankel data; callers treat it as a feedthrough.
    """
    if order_bound < 1:
        raise LftError.of(ErrorCode.ORDER_BOUND, "The order bound must be positive", order_bound=order_bound)
    if series.depth < 2 * order_bound + 1:
        raise LftError.of(
            ErrorCode.TRUNCATION,
            f"Order bound {order_bound} needs series data up to depth {2 * order_bound + 1}, got {series.depth}",
            order_bound=order_bound,
            depth=series.depth,
        )

    with get_tracer().start_as_current_span("hankel_realize") as span:
        span.set_attributes({"series.alphabet": series.alphabet, "series.depth": series.depth})
        d = series.alphabet
        r, c = series.shape

        hankel = hankel_matrix(series, order_bound)
        rank, singular_values, threshold = _rank(hankel, tolerances)
        smaller_rank, _, _ = _rank(hankel_matrix(series, order_bound - 1), tolerances)
        if rank != smaller_rank:
            raise LftError.of(
                ErrorCode.ORDER_BOUND,
                f"Hankel rank did not stabilize: {smaller_rank} at size {order_bound - 1}, {rank} at {order_bound}",
                rank=rank,
                previous_rank=smaller_rank,
            )
        ambiguous = singular_values[(singular_values > threshold / 10) & (singular_values < threshold * 10)]
        if ambiguous.size:
            raise LftError.of(
                ErrorCode.ILL_CONDITIONED,
                f"Singular value {ambiguous[0]:.3e} is too close to the rank threshold {threshold:.3e}",
                singular_value=float(ambiguous[0]),
                threshold=threshold,
            )

        if rank == 0:
            logger.warning("Series is zero on every non-empty word; the realization is empty")
            return LinearRepresentation(
                C=np.zeros((r, 0)),
                A=tuple(np.zeros((0, 0)) for _ in range(d)),
                B=tuple(np.zeros((0, c)) for _ in range(d)),
            )

        U, s, Vt = svd(hankel, full_matrices=False)
        root = np.sqrt(s[:rank])
        observability = U[:, :rank] * root
        reachability = root[:, None] * Vt[:rank]
        left = U[:, :rank].T / root[:, None]
        right = Vt[:rank].T / root

        representation = LinearRepresentation(
            C=observability[:r],
            A=tuple(left @ hankel_matrix(series, order_bound, shift=(letter,)) @ right for letter in range(1, d + 1)),
            B=tuple(reachability[:, (letter - 1) * c : letter * c] for letter in range(1, d + 1)),
        )
        span.set_attribute("realization.state_dim", rank)
        _check_reproduces(representation, series, tolerances)
        logger.debug(f"Hankel rank {rank} with order bound {order_bound}")
        return representation


def representation_series(representation: LinearRepresentation, depth: int) -> Iterator[tuple[Word, np.ndarray]]:
    """Coefficients of every word of length ``1..depth``, one length at a time."""
    letters = range(1, representation.alphabet + 1)
    words: list[Word] = [(letter,) for letter in letters]
    states = np.stack(representation.B)
    A = np.stack(representation.A)
    for length in range(1, depth + 1):
        values = representation.C @ states
        yield from zip(words, values)
        if length == depth:
            return
        states = np.einsum("sij,wjk->swik", A, states).reshape(-1, *states.shape[1:])
        words = [word + (letter,) for letter in letters for word in words]


def _check_reproduces(representation: LinearRepresentation, series: TruncatedSeries, tolerances: Tolerances) -> None:
    scale = max([1.0, *(float(np.max(np.abs(value))) for value in series.coeffs.values() if value.size)])
    for word, value in representation_series(representation, series.depth):
        error = float(np.max(np.abs(value - series.coefficient(word)), initial=0.0))
        if error > tolerances.isomorphism * scale:
            raise LftError.of(
                ErrorCode.ORDER_BOUND,
                f"Realization misses the coefficient of word {format_word(word)} by {error:.3e}",
                word=list(word),
                error=error,
            )


def representation_to_lft(
    representation: LinearRepresentation, alphabet: int, feedthrough: np.ndarray | None = None
) -> LftModel:
    """Embed a shared-state representation into an LFT with one copy of the state per letter.

    Cells are ``C_i = C``, ``A_{i,j} = A_i`` and ``B_j = B_j``.
    """
    if alphabet != representation.alphabet:
        raise LftError.of(
            ErrorCode.CONTRACT,
            f"Representation has {representation.alphabet} letters, expected {alphabet}",
        )
    n = representation.state_dim
    rows, columns = representation.shape
    D = np.zeros((rows, columns)) if feedthrough is None else np.asarray(feedthrough, dtype=float)
    return LftModel(
        blocks=BlockStructure(dims=(n,) * alphabet),
        A=np.vstack([np.hstack([A_i] * alphabet) for A_i in representation.A]),
        B=np.vstack(representation.B),
        C=np.hstack([representation.C] * alphabet),
        D=D,
    )

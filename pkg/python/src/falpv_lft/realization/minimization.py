from collections.abc import Sequence

import numpy as np

from falpv_lft.core.lft import canonical_partition, lft_from_cells
from falpv_lft.instrumentation import get_tracer
from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    BlockStructure,
    LftCells,
    LftModel,
    LftReduction,
    MinimalityVerdict,
    Tolerances,
)
from falpv_lft.realization.subspaces import observable_bases, reachable_bases


def restrict(M: LftModel, bases: Sequence[np.ndarray]) -> LftModel:
    """Compress every block onto the orthonormal columns of ``bases[i]``.

    Exact whenever the bases span an invariant family: reachable spaces or orthogonal
    complements of unobservable ones.
    """
    cells = canonical_partition(M)
    d = M.d
    reduced = LftCells(
        A=tuple(tuple(bases[i].T @ cells.A[i][j] @ bases[j] for j in range(d)) for i in range(d)),
        B=tuple(bases[i].T @ cells.B[i] for i in range(d)),
        C=tuple(cells.C[i] @ bases[i] for i in range(d)),
    )
    blocks = BlockStructure(dims=tuple(basis.shape[1] for basis in bases))
    return lft_from_cells(blocks, reduced, M.D)


def minimize_lft(M: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> LftReduction:
    """Structured Kalman decomposition: alternate reachable restriction and observable quotient.

    The block count never changes; blocks may end up empty.
    """
    with get_tracer().start_as_current_span("minimize_lft") as span:
        span.set_attribute("lft.dims", list(M.blocks.dims))
        current = M
        embeddings = [np.eye(n) for n in M.blocks.dims]
        while True:
            before = current.blocks.dims
            for bases in (reachable_bases, observable_bases):
                chosen = bases(current, tolerances=tolerances)
                current = restrict(current, chosen)
                embeddings = [embedding @ basis for embedding, basis in zip(embeddings, chosen, strict=True)]
            if current.blocks.dims == before:
                break

        span.set_attribute("lft.minimal_dims", list(current.blocks.dims))
        logger.debug(f"Minimized LFT from {M.blocks.dims} to {current.blocks.dims}")
        return LftReduction(
            lft=current,
            projections=tuple(embedding.T for embedding in embeddings),
            embeddings=tuple(embeddings),
        )


def is_minimal(M: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MinimalityVerdict:
    reachable = tuple(basis.shape[1] for basis in reachable_bases(M, tolerances=tolerances))
    observable = tuple(basis.shape[1] for basis in observable_bases(M, tolerances=tolerances))
    return MinimalityVerdict(
        minimal=reachable == M.blocks.dims and observable == M.blocks.dims,
        reachable=reachable,
        observable=observable,
    )

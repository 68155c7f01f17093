from collections.abc import Sequence

import numpy as np
from scipy import linalg

from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    BlockStructure,
    LftModel,
    PsiRealization,
    StabilityCertificate,
    Tolerances,
)

_GRID = np.logspace(-2, 2, 41)
_REFINEMENTS = 3


def certificate_margin(A: np.ndarray, P: np.ndarray) -> float:
    """Smallest eigenvalue of ``P - A^T P A``."""
    if A.shape[0] == 0:
        return 1.0
    gap = P - A.T @ P @ A
    return float(np.min(linalg.eigvalsh((gap + gap.T) / 2)))


def _blocks_of(P: np.ndarray, blocks: BlockStructure) -> list[np.ndarray]:
    diagonal = [P[blocks.slice(i), blocks.slice(i)] for i in range(1, blocks.d + 1)]
    return [(block + block.T) / 2 for block in diagonal]


def _diagonal(P_blocks: Sequence[np.ndarray]) -> np.ndarray:
    nonempty = [P for P in P_blocks if P.size]
    return linalg.block_diag(*nonempty) if nonempty else np.zeros((0, 0))


def _certify(
    M: LftModel, P_blocks: Sequence[np.ndarray], method: str, tolerances: Tolerances
) -> StabilityCertificate | None:
    if any(P.size and np.min(linalg.eigvalsh(P)) <= 0 for P in P_blocks):
        return None
    margin = certificate_margin(M.A, _diagonal(P_blocks))
    if margin <= tolerances.certificate:
        return None
    return StabilityCertificate(blocks=M.blocks, P=tuple(P_blocks), margin=margin, method=method)


def _lyapunov_blocks(M: LftModel) -> list[np.ndarray] | None:
    try:
        X = linalg.solve_discrete_lyapunov(M.A.T, np.eye(M.dim))
    except (linalg.LinAlgError, ValueError):
        return None
    if not np.all(np.isfinite(X)):
        return None
    return _blocks_of(X, M.blocks)


def _scaled_margin(M: LftModel, base: Sequence[np.ndarray], scales: np.ndarray) -> float:
    P = _diagonal([scale * P for scale, P in zip(scales, base, strict=True)])
    return certificate_margin(M.A, P) / float(np.max(scales))


def _coordinate_descent(M: LftModel, base: Sequence[np.ndarray]) -> np.ndarray:
    scales = np.ones(M.d)
    grid = _GRID
    for _ in range(_REFINEMENTS):
        for block in range(M.d):
            candidates = scales[block] * grid
            margins = []
            for candidate in candidates:
                trial = scales.copy()
                trial[block] = candidate
                margins.append(_scaled_margin(M, base, trial))
            scales[block] = candidates[int(np.argmax(margins))]
        # Narrow the grid around the current point for the next pass.
        grid = np.sqrt(grid)
    return scales


def check_stability(M: LftModel, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> StabilityCertificate | None:
    """Search a block-diagonal ``P > 0`` with ``A^T P A - P < 0``; ``None`` means unknown, not unstable."""
    if M.dim == 0:
        return StabilityCertificate(blocks=M.blocks, P=tuple(np.zeros((0, 0)) for _ in M.blocks.dims), margin=1.0)

    identity = [np.eye(n) for n in M.blocks.dims]
    if certificate := _certify(M, identity, "identity", tolerances):
        return certificate

    lyapunov = _lyapunov_blocks(M)
    if lyapunov is not None and (certificate := _certify(M, lyapunov, "lyapunov", tolerances)):
        return certificate

    for base in (identity, lyapunov):
        if base is None or any(P.size and np.min(linalg.eigvalsh(P)) <= 0 for P in base):
            continue
        scales = _coordinate_descent(M, base)
        scaled = [scale * P for scale, P in zip(scales, base, strict=True)]
        if certificate := _certify(M, scaled, "block-scaling", tolerances):
            return certificate

    logger.debug(f"No block-diagonal certificate found for an LFT with blocks {M.blocks.dims}")
    return None


def verify_certificate(
    M: LftModel, certificate: StabilityCertificate, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> bool:
    """Recompute the margin of ``certificate`` for ``M`` from scratch."""
    if certificate.blocks != M.blocks:
        return False
    margin = certificate_margin(M.A, certificate.matrix)
    return margin > tolerances.certificate and abs(margin - certificate.margin) <= tolerances.symmetry * max(
        1.0, abs(margin)
    )


def lift_certificate(certificate: StabilityCertificate, factor: int) -> StabilityCertificate:
    """The certificate ``P_i (x) I_factor`` inherited by a Kronecker lifting ``F (x) I_factor``."""
    return StabilityCertificate(
        blocks=certificate.blocks.kron(factor),
        P=tuple(np.kron(P, np.eye(factor)) for P in certificate.P),
        margin=certificate.margin,
        method="lifted",
    )


def stabilize_scale(
    psi: PsiRealization, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple[PsiRealization, float]:
    """Scale the scheduling argument so that ``||lam F||_2 < 1``.

    Returns the realization of ``p -> psi(lam p)`` and ``lam``; ``lam = 1`` leaves ``psi`` unchanged.
    """
    norm = float(np.linalg.norm(psi.F, 2)) if psi.F.size else 0.0
    if norm == 0.0:
        return psi, 1.0
    scale = min(1.0, 1.0 / (norm * (1.0 + tolerances.margin)))
    if scale == 1.0:
        return psi, 1.0

    logger.warning(f"Scaling the scheduling argument by {scale:.6g} (||F||_2 = {norm:.6g})")
    lft = psi.lft
    scaled = LftModel(blocks=lft.blocks, A=scale * lft.A, B=lft.B, C=scale * lft.C, D=lft.D)
    return PsiRealization(lft=scaled, scheduling_scale=psi.scheduling_scale * scale), scale

import numpy as np

from falpv_lft.analysis.expression import PsiEvaluator
from falpv_lft.logging import logger
from falpv_lft.models import DEFAULT_TOLERANCES, AffineBasis, ErrorCode, LftError, Tolerances

CANDIDATES = 200


def _augmented(psi: PsiEvaluator, points: np.ndarray) -> np.ndarray:
    return np.vstack([np.ones(points.shape[0]), np.column_stack([psi(point) for point in points])])


def affine_basis_coefficients(
    psi: PsiEvaluator,
    n_psi: int,
    n_p: int,
    *,
    rng: np.random.Generator | None = None,
    points: np.ndarray | None = None,
    candidates: int = CANDIDATES,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> AffineBasis:
    """Points ``p_i`` and weights with ``sum_i lam_i^l = 1`` and ``sum_i lam_i^l psi_j(p_i) = delta_jl``.

    Without ``points`` the best conditioned of ``candidates`` random draws on ``[-1, 1]^n_p`` is used.
    Column ``l`` of the returned coefficients holds ``lam^l``.
    """
    if points is None:
        rng = rng or np.random.default_rng()
        best, best_condition = None, np.inf
        for _ in range(candidates):
            trial = rng.uniform(-1.0, 1.0, size=(n_psi + 1, n_p))
            condition = float(np.linalg.cond(_augmented(psi, trial)))
            if best is None or condition < best_condition:
                best, best_condition = trial, condition
        points = best
    else:
        points = np.asarray(points, dtype=float).reshape(n_psi + 1, n_p)
        if np.any(np.abs(points) > 1):
            raise LftError.of(ErrorCode.DOMAIN, "Sample points must lie in [-1, 1]")

    system = _augmented(psi, points)
    condition = float(np.linalg.cond(system))
    if not np.isfinite(condition) or condition > tolerances.conditioning:
        raise LftError.of(
            ErrorCode.DEPENDENCE,
            f"Augmented system has condition number {condition:.3e}; 1, psi_1..psi_{n_psi} look linearly dependent",
            condition=condition,
        )

    rhs = np.vstack([np.ones((1, n_psi)), np.eye(n_psi)])
    coefficients = np.linalg.solve(system, rhs)
    residual = float(np.max(np.abs(system @ coefficients - rhs)))
    if residual > tolerances.isomorphism:
        raise LftError.of(ErrorCode.DEPENDENCE, f"Affine weights miss by {residual:.3e}", residual=residual)
    logger.debug(f"Affine basis with condition number {condition:.3e}")
    return AffineBasis(points=points, coefficients=coefficients, condition=condition, residual=residual)

import numpy as np

from falpv_lft.analysis.expression import PsiEvaluator
from falpv_lft.core.lft import delta_of_point, eval_falpv_matrices, loop_condition, star_product
from falpv_lft.logging import logger
from falpv_lft.models import (
    DEFAULT_TOLERANCES,
    AssembledLft,
    ErrorCode,
    FalpvModel,
    LftError,
    PsiRealization,
    Tolerances,
    Trajectory,
    TruncatedSeries,
)


def realization_evaluator(psi: PsiRealization, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> PsiEvaluator:
    """``psi(p)`` through the star product of its LFT realization."""
    scale = psi.scheduling_scale

    def evaluate(p: np.ndarray) -> np.ndarray:
        delta = delta_of_point(np.asarray(p, dtype=float) / scale, psi.lft.blocks)
        return star_product(psi.lft, delta, tolerances=tolerances)[:, 0]

    return evaluate


def taylor_evaluator(series: TruncatedSeries) -> PsiEvaluator:
    """``psi(p)`` as the truncated sum of ``S(w) p_{w_1} ... p_{w_k}``."""

    def evaluate(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p, dtype=float).reshape(-1)
        total = np.zeros(series.shape)
        for word, value in series.coeffs.items():
            total += value * np.prod(p[np.asarray(word, dtype=int) - 1])
        return total[:, 0]

    return evaluate


def _signals(
    u: np.ndarray, p: np.ndarray, horizon: int | None, n_u: int, n_p: int
) -> tuple[np.ndarray, np.ndarray, int]:
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    for name, signal, width in (("u", u, n_u), ("p", p, n_p)):
        if signal.ndim != 2 or signal.shape[1] != width:
            raise LftError.of(
                ErrorCode.SHAPE, f"Expected {name} with one row per step and {width} columns, got shape {signal.shape}"
            )
    if horizon is None:
        if u.shape[0] != p.shape[0]:
            raise LftError.of(ErrorCode.SHAPE, f"u has {u.shape[0]} samples but p has {p.shape[0]}")
        horizon = u.shape[0]
    if u.shape[0] < horizon or p.shape[0] < horizon:
        raise LftError.of(
            ErrorCode.SHAPE, f"Signals of lengths {u.shape[0]} and {p.shape[0]} are shorter than the horizon {horizon}"
        )
    if np.any(np.abs(p[:horizon]) > 1):
        raise LftError.of(ErrorCode.DOMAIN, "Scheduling values must lie in [-1, 1]")
    if horizon == 0:
        logger.warning("Horizon 0: the trajectory is empty")
    return u[:horizon], p[:horizon], horizon


def simulate_falpv(
    system: FalpvModel, psi: PsiEvaluator, u: np.ndarray, p: np.ndarray, horizon: int | None = None
) -> Trajectory:
    """``x(t+1) = A(p(t)) x(t) + B(p(t)) u(t)``, ``y(t) = C(p(t)) x(t) + D(p(t)) u(t)`` from ``x(0) = 0``."""
    u, p, horizon = _signals(u, p, horizon, system.n_u, system.n_p)
    x = np.zeros((horizon + 1, system.n_x))
    y = np.zeros((horizon, system.n_y))
    for t in range(horizon):
        try:
            A, B, C, D = eval_falpv_matrices(system, psi(p[t]))
        except LftError as e:
            raise LftError.of(e.error.code, f"At t = {t}: {e.error.message}", t=t) from e
        x[t + 1] = A @ x[t] + B @ u[t]
        y[t] = C @ x[t] + D @ u[t]
    return Trajectory(u=u, p=p, x=x, y=y)


def simulate_lft_loop(
    assembled: AssembledLft,
    u: np.ndarray,
    p: np.ndarray,
    horizon: int | None = None,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[Trajectory, np.ndarray]:
    """Run the assembled LFT with the shift in block 1 and ``Delta_{p(t)}`` on the others.

    Each step solves ``z(t) = (I - F Delta) ^-1 (Gx x(t) + Gu u(t))`` and feeds ``w = Delta z(t)`` into
    the LTI part. Returns the trajectory and the sequence of ``z`` (one row per step).
    """
    dims = assembled.provenance
    u, p, horizon = _signals(u, p, horizon, dims.n_u, dims.n_p)
    sigma_psi = assembled.sigma_psi
    lft = assembled.lft
    n_x = dims.n_x
    A0, B0, C0, D0 = lft.A[:n_x, :n_x], lft.B[:n_x], lft.C[:, :n_x], lft.D
    F, Gx, Gu, Hx, Hy = sigma_psi.F, sigma_psi.Gx, sigma_psi.Gu, sigma_psi.Hx, sigma_psi.Hy
    n = F.shape[0]

    x = np.zeros((horizon + 1, n_x))
    y = np.zeros((horizon, dims.n_y))
    z = np.zeros((horizon, n))
    for t in range(horizon):
        delta = delta_of_point(p[t] / assembled.scheduling_scale, sigma_psi.lft.blocks)
        condition = loop_condition(F, delta)
        if not np.isfinite(condition) or 1.0 / condition <= tolerances.rcond:
            raise LftError.of(
                ErrorCode.WELL_POSEDNESS,
                f"At t = {t}: I - F*Delta is singular (condition {condition:.3e})",
                t=t,
                condition=condition,
            )
        if n:
            z[t] = np.linalg.solve(np.eye(n) - F @ delta, Gx @ x[t] + Gu @ u[t])
        w = delta @ z[t]
        x[t + 1] = A0 @ x[t] + Hx @ w + B0 @ u[t]
        y[t] = C0 @ x[t] + Hy @ w + D0 @ u[t]
    return Trajectory(u=u, p=p, x=x, y=y), z

from collections.abc import Sequence

import numpy as np
from scipy.linalg import block_diag

from falpv_lft.models import FalpvModel, PsiRealization, Signals


def random_falpv(
    rng: np.random.Generator,
    n_x: int,
    n_u: int,
    n_y: int,
    n_p: int,
    n_psi: int,
    *,
    scale: float = 0.5,
    psi_bound: float | None = None,
) -> FalpvModel:
    """Gaussian coefficient matrices scaled by ``scale``; generically minimal.

    With ``psi_bound`` the state matrices are normalized so that ``||A(p)||_2 <= 0.8`` whenever
    every ``|psi_l(p)| <= psi_bound``.
    """

    def draw(rows: int, columns: int) -> tuple[np.ndarray, ...]:
        return tuple(scale * rng.standard_normal((rows, columns)) for _ in range(n_psi + 1))

    A = draw(n_x, n_x)
    if psi_bound is not None:
        A = (
            0.5 * A[0] / np.linalg.norm(A[0], 2),
            *(0.3 * A_l / (n_psi * psi_bound * np.linalg.norm(A_l, 2)) for A_l in A[1:]),
        )
    return FalpvModel(n_p=n_p, A=A, B=draw(n_x, n_u), C=draw(n_y, n_x), D=draw(n_y, n_u))


def psi_bound(psi: PsiRealization) -> float:
    """``||H|| ||G|| / (1 - ||F||)``, a bound on ``|psi(p)|`` over ``[-1, 1]^n_p`` when ``||F||_2 < 1``."""
    norm = float(np.linalg.norm(psi.F, 2)) if psi.F.size else 0.0
    return float(np.linalg.norm(psi.H, 2) * np.linalg.norm(psi.G, 2)) / (1.0 - norm) if psi.F.size else 0.0


def random_psi_realization(
    rng: np.random.Generator, n_psi: int, dims: Sequence[int], *, norm: float = 0.5
) -> PsiRealization:
    """A realization with ``||F||_2 = norm`` so that ``P = I`` certifies it."""
    n = sum(dims)
    F = rng.standard_normal((n, n))
    F *= norm / np.linalg.norm(F, 2)
    G = rng.standard_normal((n, 1))
    H = rng.standard_normal((n_psi, n))
    return PsiRealization.from_matrices(F, G, H, tuple(dims))


def random_signals(
    rng: np.random.Generator, horizon: int, n_u: int, n_p: int, *, bound: float = 1.0, seed: int | None = None
) -> Signals:
    """Gaussian inputs and scheduling values uniform on ``[-bound, bound]^n_p``."""
    return Signals(
        u=rng.standard_normal((horizon, n_u)),
        p=rng.uniform(-bound, bound, size=(horizon, n_p)),
        seed=seed,
    )


def random_similarity(rng: np.random.Generator, n: int) -> np.ndarray:
    """Orthogonal times a diagonal in ``[0.5, 2]``; condition number at most 4."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q @ np.diag(rng.uniform(0.5, 2.0, size=n))


def pad_unreachable(system: FalpvModel, rng: np.random.Generator, extra: int = 1) -> FalpvModel:
    """Append ``extra`` states no input reaches; the input-output behaviour is unchanged."""
    n_x = system.n_x

    def pad_A(A: np.ndarray) -> np.ndarray:
        padded = block_diag(A, 0.5 * rng.standard_normal((extra, extra)))
        padded[:n_x, n_x:] = rng.standard_normal((n_x, extra))
        return padded

    return FalpvModel(
        n_p=system.n_p,
        A=tuple(pad_A(A) for A in system.A),
        B=tuple(np.vstack([B, np.zeros((extra, B.shape[1]))]) for B in system.B),
        C=tuple(np.hstack([C, rng.standard_normal((C.shape[0], extra))]) for C in system.C),
        D=system.D,
        description=system.description,
    )

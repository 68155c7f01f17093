import numpy as np
import pytest
from falpv_lft.analysis.equivalence import falpv_is_minimal, formal_equivalence, transform_falpv
from falpv_lft.analysis.isomorphism import find_structured_isomorphism, similarity_residual
from falpv_lft.analysis.sampling import (
    pad_unreachable,
    psi_bound,
    random_falpv,
    random_psi_realization,
    random_signals,
    random_similarity,
)
from falpv_lft.analysis.simulation import realization_evaluator, simulate_falpv, simulate_lft_loop
from falpv_lft.models import FalpvModel, PsiRealization
from falpv_lft.realization.minimization import is_minimal
from falpv_lft.transform.pipeline import transform

from e2e.config import Config


def random_instance(seed: int) -> tuple[np.random.Generator, FalpvModel, PsiRealization]:
    rng = np.random.default_rng(seed)
    n_p, n_psi = int(rng.integers(1, 3)), int(rng.integers(1, 3))
    # psi_1..psi_n_psi stay linearly independent only with at least n_psi states per block
    dims = tuple(int(rng.integers(n_psi, 3)) for _ in range(n_p))
    psi = random_psi_realization(rng, n_psi, dims)
    n_x, n_u, n_y = (int(n) for n in rng.integers(1, 4, size=3))
    system = random_falpv(rng, n_x, n_u, n_y, n_p, n_psi, psi_bound=psi_bound(psi))
    return rng, system, psi


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(Config.TRAJECTORY_INSTANCES))
def test_lft_reproduces_falpv_trajectories(seed: int) -> None:
    rng, system, psi = random_instance(seed)
    result = transform(system, psi, seed=seed)
    assert result.report.verification.passed

    signals = random_signals(rng, Config.HORIZON, system.n_u, system.n_p)
    expected = simulate_falpv(system, realization_evaluator(psi), signals.u, signals.p)
    actual, _ = simulate_lft_loop(result.assembled, signals.u, signals.p)
    scale = max(1.0, float(np.max(np.abs(expected.y))))
    assert np.max(np.abs(actual.y - expected.y)) / scale <= 1e-9
    np.testing.assert_allclose(actual.x, expected.x, atol=1e-9 * max(1.0, float(np.max(np.abs(expected.x)))))


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(Config.SIMILARITY_INSTANCES))
def test_similar_falpvs_give_isomorphic_lfts(seed: int) -> None:
    rng, system, psi = random_instance(1000 + seed)
    assert falpv_is_minimal(system).minimal
    similar = transform_falpv(system, random_similarity(rng, system.n_x))

    first = transform(system, psi, seed=seed).assembled.lft
    second = transform(similar, psi, seed=seed).assembled.lft
    assert formal_equivalence(first, second).equivalent
    assert is_minimal(first).minimal
    assert is_minimal(second).minimal

    T = find_structured_isomorphism(first, second)
    assert T is not None
    assert similarity_residual(first, second, T) <= 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(Config.PADDED_INSTANCES))
def test_padded_falpv_gives_non_minimal_lft(seed: int) -> None:
    rng, system, psi = random_instance(2000 + seed)
    padded = pad_unreachable(system, rng)
    assert not falpv_is_minimal(padded).minimal

    result = transform(padded, psi, seed=seed)
    assert result.report.verification.passed
    verdict = is_minimal(result.assembled.lft)
    assert not verdict.minimal
    assert verdict.reachable[0] < padded.n_x
    assert formal_equivalence(result.assembled.lft, transform(system, psi, seed=seed).assembled.lft).equivalent


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(Config.PADDED_INSTANCES))
def test_unrelated_falpvs_give_inequivalent_lfts(seed: int) -> None:
    rng, system, psi = random_instance(3000 + seed)
    other = random_falpv(
        rng, system.n_x, system.n_u, system.n_y, system.n_p, system.n_psi, psi_bound=psi_bound(psi)
    )
    first = transform(system, psi, seed=seed).assembled.lft
    second = transform(other, psi, seed=seed).assembled.lft
    equivalence = formal_equivalence(first, second)
    assert not equivalence.equivalent
    assert equivalence.word is not None

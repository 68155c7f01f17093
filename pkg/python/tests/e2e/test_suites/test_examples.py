from collections.abc import Callable

import numpy as np
import pytest
from falpv_lft.analysis.equivalence import formal_equivalence, transform_falpv
from falpv_lft.analysis.isomorphism import find_structured_isomorphism
from falpv_lft.analysis.sampling import random_signals
from falpv_lft.analysis.simulation import simulate_lft_loop
from falpv_lft.core.lft import formal_io_map
from falpv_lft.models import FalpvModel, PsiRealization, PsiTaylor, SigmaPsiLft
from falpv_lft.transform.pipeline import assemble, transform
from scipy.linalg import block_diag

from e2e.config import Config
from fixtures.systems import example1_sigma_psi, example2_sigma_psi, falpv, load_lft, load_taylor


@pytest.mark.parametrize(
    "system,psi,by_hand",
    [
        ("example1", "example1_taylor", example1_sigma_psi),
        ("example2", "example2_psi", example2_sigma_psi),
    ],
)
def test_scheduling_signal_matches_hand_built_lft(
    request: pytest.FixtureRequest,
    rng: np.random.Generator,
    system: str,
    psi: str,
    by_hand: Callable[[FalpvModel], SigmaPsiLft],
) -> None:
    model: FalpvModel = request.getfixturevalue(system)
    source: PsiRealization | PsiTaylor = request.getfixturevalue(psi)
    result = transform(model, source, seed=Config.SEED)
    reference = assemble(model, by_hand(model))

    T = find_structured_isomorphism(reference.sigma_psi.lft, result.assembled.sigma_psi.lft)
    assert T is not None

    signals = random_signals(rng, Config.HORIZON, model.n_u, model.n_p, bound=0.9)
    expected, z_reference = simulate_lft_loop(reference, signals.u, signals.p)
    actual, z = simulate_lft_loop(result.assembled, signals.u, signals.p)
    np.testing.assert_allclose(actual.y, expected.y, atol=1e-9)
    np.testing.assert_allclose(z, z_reference @ block_diag(*T).T, atol=1e-8)


def test_comparison_pair_transforms_are_equivalent(comparison_pair: tuple[FalpvModel, FalpvModel]) -> None:
    taylor = load_taylor("comparison_psi_taylor.json")
    first, second = (transform(system, taylor, seed=Config.SEED).assembled.lft for system in comparison_pair)
    assert formal_equivalence(first, second).equivalent


def test_transforms_of_a_similar_excited_pair_are_equivalent(comparison_pair: tuple[FalpvModel, FalpvModel]) -> None:
    taylor = load_taylor("comparison_psi_taylor.json")
    original, _ = comparison_pair
    # Feeding the input into both states makes the output see it.
    excited = falpv(original.n_p, original.A, ([[1.0], [1.0]], original.B[1]), original.C, original.D)
    similar = transform_falpv(excited, np.array([[1.0, 2.0], [3.0, 4.0]]))
    first, second = (transform(system, taylor, seed=Config.SEED).assembled.lft for system in (excited, similar))

    assert formal_io_map(first, (1,))[0, 0] == pytest.approx(1.0)
    assert formal_equivalence(first, second).equivalent
    assert not formal_equivalence(first, transform(original, taylor, seed=Config.SEED).assembled.lft).equivalent


def test_gss_lft_differs_from_the_transform(comparison_pair: tuple[FalpvModel, FalpvModel]) -> None:
    gss = load_lft("gss_first_lft.json")
    ours = transform(comparison_pair[0], load_taylor("comparison_psi_taylor.json"), seed=Config.SEED).assembled.lft
    assert (gss.d, gss.p_out, gss.m_in) == (ours.d, ours.p_out, ours.m_in)
    verdict = formal_equivalence(gss, ours)
    assert not verdict.equivalent
    assert verdict.word[0] == 1

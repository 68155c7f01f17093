import numpy as np
import pytest
from falpv_lft.analysis.equivalence import (
    difference_lft,
    falpv_equivalence,
    falpv_is_minimal,
    falpv_minimize,
    formal_equivalence,
    transform_falpv,
)
from falpv_lft.analysis.sampling import pad_unreachable, random_falpv
from falpv_lft.core.lft import formal_io_map
from falpv_lft.core.words import iter_words
from falpv_lft.models import BlockStructure, ErrorCode, FalpvModel, LftError, LftModel

from fixtures.systems import falpv


def test_lft_is_equivalent_to_itself(gss_pair: tuple[LftModel, LftModel]) -> None:
    first, _ = gss_pair
    result = formal_equivalence(first, first)
    assert result.equivalent
    assert result.word is None


def test_gss_pair_differs(gss_pair: tuple[LftModel, LftModel]) -> None:
    first, second = gss_pair
    result = formal_equivalence(first, second)
    assert not result.equivalent
    assert result.word is not None
    assert 1 <= len(result.word) <= 4
    assert result.word[0] == 1 and result.word[-1] == 1
    assert np.max(np.abs(formal_io_map(first, result.word) - formal_io_map(second, result.word))) > 1e-9


def test_feedthrough_difference_is_the_empty_word() -> None:
    first = LftModel(blocks=BlockStructure(dims=(1,)), A=[[0.5]], B=[[1.0]], C=[[1.0]], D=[[0.0]])
    second = LftModel(blocks=BlockStructure(dims=(1,)), A=[[0.5]], B=[[1.0]], C=[[1.0]], D=[[1.0]])
    assert formal_equivalence(first, second).word == ()


def test_incompatible_signatures(gss_pair: tuple[LftModel, LftModel]) -> None:
    first, _ = gss_pair
    other = LftModel(blocks=BlockStructure(dims=(1,)), A=[[0.5]], B=[[1.0]], C=[[1.0]], D=[[0.0]])
    with pytest.raises(LftError) as e:
        formal_equivalence(first, other)
    assert e.value.error.code == ErrorCode.CONTRACT


def test_difference_of_equal_lfts_vanishes(gss_pair: tuple[LftModel, LftModel]) -> None:
    first, _ = gss_pair
    difference = difference_lft(first, first)
    assert difference.blocks.dims == (4, 2, 2)
    for word in iter_words(3, 3):
        np.testing.assert_allclose(formal_io_map(difference, word), 0.0, atol=1e-12)


def test_comparison_pair_is_equivalent(comparison_pair: tuple[FalpvModel, FalpvModel]) -> None:
    first, second = comparison_pair
    assert falpv_equivalence(first, second)

    A1 = np.array(first.A[1])
    A1[0, 1] += 0.1
    perturbed = falpv(first.n_p, (first.A[0], A1), first.B, first.C, first.D)
    assert not falpv_equivalence(first, perturbed)


def test_comparison_falpv_has_a_zero_map(comparison_pair: tuple[FalpvModel, FalpvModel]) -> None:
    first, _ = comparison_pair
    verdict = falpv_is_minimal(first)
    assert not verdict.minimal
    assert (verdict.reachable, verdict.observable) == ((1,), (1,))

    # The reachable direction e2 is unobservable, so nothing survives.
    minimal = falpv_minimize(first)
    assert minimal.n_x == 0
    assert falpv_is_minimal(minimal).minimal
    assert falpv_equivalence(first, minimal)


def test_change_of_coordinates(rng: np.random.Generator) -> None:
    system = random_falpv(rng, 3, 1, 2, 1, 2)
    assert falpv_is_minimal(system).minimal
    assert falpv_equivalence(system, transform_falpv(system, [[1, 2, 0], [3, 4, 0], [0, 0, 1]]))
    with pytest.raises(LftError) as e:
        transform_falpv(system, np.eye(2))
    assert e.value.error.code == ErrorCode.SHAPE


def test_padding_breaks_minimality_only(rng: np.random.Generator) -> None:
    system = random_falpv(rng, 2, 1, 1, 1, 1)
    padded = pad_unreachable(system, rng)
    assert padded.n_x == 3
    assert not falpv_is_minimal(padded).minimal
    assert falpv_equivalence(system, padded)


def test_falpv_signature_mismatch(rng: np.random.Generator) -> None:
    with pytest.raises(LftError) as e:
        falpv_equivalence(random_falpv(rng, 2, 1, 1, 1, 1), random_falpv(rng, 2, 1, 1, 1, 2))
    assert e.value.error.code == ErrorCode.CONTRACT

import numpy as np
import pytest
from falpv_lft.analysis.isomorphism import find_structured_isomorphism, similarity_residual
from falpv_lft.core.lft import similarity_transform
from falpv_lft.models import BlockStructure, ErrorCode, LftError, LftModel
from falpv_lft.realization.minimization import is_minimal, minimize_lft


def minimal_lft(rng: np.random.Generator, dims: tuple[int, ...] = (2, 1)) -> LftModel:
    n = sum(dims)
    A = rng.standard_normal((n, n))
    M = LftModel(
        blocks=BlockStructure(dims=dims),
        A=0.7 * A / np.linalg.norm(A, 2),
        B=rng.standard_normal((n, 1)),
        C=rng.standard_normal((2, n)),
        D=np.zeros((2, 1)),
    )
    return minimize_lft(M).lft


def test_scaled_copy(rng: np.random.Generator) -> None:
    M = minimal_lft(rng)
    assert is_minimal(M).minimal
    scaled = similarity_transform(M, [2.0 * np.eye(n) for n in M.blocks.dims])
    T = find_structured_isomorphism(M, scaled)
    assert T is not None
    for block, n in zip(T, M.blocks.dims, strict=True):
        np.testing.assert_allclose(block, 2.0 * np.eye(n), atol=1e-8)
    assert similarity_residual(M, scaled, T) <= 1e-8


def test_general_block_similarity(rng: np.random.Generator) -> None:
    M = minimal_lft(rng, (2, 2))
    blocks = [rng.standard_normal((n, n)) + 3 * np.eye(n) for n in M.blocks.dims]
    T = find_structured_isomorphism(M, similarity_transform(M, blocks))
    assert T is not None
    for found, expected in zip(T, blocks, strict=True):
        np.testing.assert_allclose(found, expected, atol=1e-7)


def test_unrelated_lfts(rng: np.random.Generator) -> None:
    first, second = minimal_lft(rng), minimal_lft(rng)
    assert find_structured_isomorphism(first, second) is None


def test_non_minimal_input(rng: np.random.Generator) -> None:
    M = minimal_lft(rng)
    padded = LftModel(
        blocks=BlockStructure(dims=(M.blocks.dims[0] + 1, M.blocks.dims[1])),
        A=np.pad(M.A, ((1, 0), (1, 0))),
        B=np.pad(M.B, ((1, 0), (0, 0))),
        C=np.pad(M.C, ((0, 0), (1, 0))),
        D=M.D,
    )
    with pytest.raises(LftError) as e:
        find_structured_isomorphism(padded, M)
    assert e.value.error.code == ErrorCode.PRECONDITION

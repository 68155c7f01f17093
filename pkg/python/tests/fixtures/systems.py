from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pytest
from falpv_lft.cli.files import load_file
from falpv_lft.models import (
    BlockStructure,
    FalpvModel,
    LftModel,
    PsiRealization,
    PsiTaylor,
    SigmaPsiLft,
    TruncatedSeries,
)

MODEL_FILES = Path(__file__).resolve().parents[2] / "model_files"


def model_file(name: str) -> Path:
    return MODEL_FILES / name


def load_system(name: str) -> FalpvModel:
    return load_file(model_file(name)).system


def load_lft(name: str) -> LftModel:
    return load_file(model_file(name)).lft


def load_psi(name: str) -> PsiRealization:
    return load_file(model_file(name)).realization


def load_taylor(name: str) -> PsiTaylor:
    return load_file(model_file(name)).taylor


def falpv(n_p: int, A: Sequence, B: Sequence, C: Sequence, D: Sequence) -> FalpvModel:
    return FalpvModel(n_p=n_p, A=tuple(A), B=tuple(B), C=tuple(C), D=tuple(D))


def series(alphabet: int, depth: int, shape: tuple[int, int], coeffs: dict) -> TruncatedSeries:
    return TruncatedSeries(alphabet=alphabet, depth=depth, shape=shape, coeffs=coeffs)


def geometric_series(ratio: float, depth: int) -> TruncatedSeries:
    """``p / (1 - ratio p)`` on a single scheduling variable."""
    return series(1, depth, (1, 1), {(1,) * k: [[ratio ** (k - 1)]] for k in range(1, depth + 1)})


def example1_sigma_psi(system: FalpvModel) -> SigmaPsiLft:
    """``psi = (p, p^2)`` by hand: ``z = (x, p x)``."""
    n_x = system.n_x
    identity, zero = np.eye(n_x), np.zeros((n_x, n_x))
    return SigmaPsiLft(
        lft=LftModel(
            blocks=BlockStructure(dims=(2 * n_x,)),
            A=np.block([[zero, zero], [identity, zero]]),
            B=np.block([[identity, np.zeros((n_x, system.n_u))], [zero, np.zeros((n_x, system.n_u))]]),
            C=np.block([[system.A[1], system.A[2]], [np.zeros((system.n_y, 2 * n_x))]]),
            D=np.zeros((n_x + system.n_y, n_x + system.n_u)),
        ),
        n_x=n_x,
        n_u=system.n_u,
        n_y=system.n_y,
    )


def example2_sigma_psi(system: FalpvModel) -> SigmaPsiLft:
    """``psi = p / (1 - 0.5 p)`` by hand: ``z = x / (1 - 0.5 p)``."""
    n_x = system.n_x
    return SigmaPsiLft(
        lft=LftModel(
            blocks=BlockStructure(dims=(n_x,)),
            A=0.5 * np.eye(n_x),
            B=np.hstack([np.eye(n_x), np.zeros((n_x, system.n_u))]),
            C=np.vstack([system.A[1], np.zeros((system.n_y, n_x))]),
            D=np.zeros((n_x + system.n_y, n_x + system.n_u)),
        ),
        n_x=n_x,
        n_u=system.n_u,
        n_y=system.n_y,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def example1() -> FalpvModel:
    return load_system("example1_falpv.json")


@pytest.fixture
def example1_psi() -> PsiRealization:
    return load_psi("example1_psi_realization.json")


@pytest.fixture
def example1_taylor() -> PsiTaylor:
    return load_taylor("example1_psi_taylor.json")


@pytest.fixture
def example2() -> FalpvModel:
    return load_system("example2_falpv.json")


@pytest.fixture
def example2_psi() -> PsiRealization:
    return load_psi("example2_psi_realization.json")


@pytest.fixture
def example2_taylor() -> PsiTaylor:
    return load_taylor("example2_psi_taylor.json")


@pytest.fixture
def gss_pair() -> tuple[LftModel, LftModel]:
    return load_lft("gss_first_lft.json"), load_lft("gss_second_lft.json")


@pytest.fixture
def comparison_pair() -> tuple[FalpvModel, FalpvModel]:
    return load_system("comparison_first_falpv.json"), load_system("comparison_second_falpv.json")

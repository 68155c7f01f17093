import json
from pathlib import Path

import numpy as np
import pytest
from falpv_lft.cli.files import load_file
from falpv_lft.models import (
    BlockStructure,
    Error,
    ErrorCode,
    FalpvFile,
    LftError,
    LftModel,
    PsiRealization,
    StabilityCertificate,
    TruncatedSeries,
)

from fixtures.systems import MODEL_FILES


@pytest.mark.parametrize(
    "dims,total,offsets",
    [
        ((2,), 2, (0, 2)),
        ((2, 4), 6, (0, 2, 6)),
        ((1, 0, 3), 4, (0, 1, 1, 4)),
    ],
)
def test_block_structure(dims: tuple[int, ...], total: int, offsets: tuple[int, ...]) -> None:
    blocks = BlockStructure(dims=dims)
    assert blocks.d == len(dims)
    assert blocks.total == total
    assert blocks.offsets == offsets


def test_block_slices_are_one_based() -> None:
    blocks = BlockStructure(dims=(2, 0, 3))
    assert blocks.slice(1) == slice(0, 2)
    assert blocks.slice(2) == slice(2, 2)
    assert blocks.slice(3) == slice(2, 5)
    with pytest.raises(IndexError):
        blocks.slice(0)
    assert blocks.kron(3).dims == (6, 0, 9)


@pytest.mark.parametrize("dims", [(), (2, -1)])
def test_block_structure_rejects(dims: tuple[int, ...]) -> None:
    with pytest.raises(ValueError):
        BlockStructure(dims=dims)


def test_matrix_fields_are_read_only() -> None:
    lft = LftModel(blocks=BlockStructure(dims=(1,)), A=[[0.5]], B=[[1.0]], C=[[1.0]], D=[[0.0]])
    assert lft.A.dtype == np.float64
    with pytest.raises(ValueError):
        lft.A[0, 0] = 1.0


def test_lft_shape_mismatch() -> None:
    with pytest.raises(ValueError):
        LftModel(blocks=BlockStructure(dims=(2,)), A=[[0.5]], B=[[1.0]], C=[[1.0]], D=[[0.0]])


def test_lft_rejects_non_finite_entries() -> None:
    with pytest.raises(ValueError):
        LftModel(blocks=BlockStructure(dims=(1,)), A=[[np.nan]], B=[[1.0]], C=[[1.0]], D=[[0.0]])


def test_empty_matrices_round_trip_as_shapes() -> None:
    lft = LftModel(
        blocks=BlockStructure(dims=(0,)), A=np.zeros((0, 0)), B=np.zeros((0, 1)), C=np.zeros((2, 0)), D=np.ones((2, 1))
    )
    data = json.loads(lft.model_dump_json())
    assert data["B"] == {"rows": 0, "cols": 1}
    assert LftModel.model_validate(data).C.shape == (2, 0)


def test_psi_realization_contract() -> None:
    psi = PsiRealization.from_matrices([[0.5]], [1.0], [1.0], (1,))
    assert (psi.n_psi, psi.n_p) == (1, 1)
    with pytest.raises(ValueError):
        PsiRealization(lft=psi.lft, scheduling_scale=1.5)
    with pytest.raises(ValueError):
        PsiRealization(lft=LftModel(blocks=psi.lft.blocks, A=psi.F, B=psi.G, C=psi.H, D=[[1.0]]))


def test_truncated_series_entries() -> None:
    series = TruncatedSeries.model_validate(
        {"alphabet": 2, "depth": 2, "shape": [1, 1], "coeffs": [{"word": [1, 2], "value": [[3.0]]}]}
    )
    assert series.coefficient((1, 2))[0, 0] == 3.0
    assert series.coefficient((2, 1))[0, 0] == 0.0
    assert not series.is_zero()
    assert json.loads(series.model_dump_json())["coeffs"] == [{"word": [1, 2], "value": [[3.0]]}]


@pytest.mark.parametrize(
    "coeffs",
    [
        {(1, 1, 1): [[1.0]]},
        {(3,): [[1.0]]},
        {(1,): [[1.0, 2.0]]},
    ],
)
def test_truncated_series_rejects(coeffs: dict) -> None:
    with pytest.raises(ValueError):
        TruncatedSeries(alphabet=2, depth=2, shape=(1, 1), coeffs=coeffs)


def test_certificate_needs_positive_definite_blocks() -> None:
    blocks = BlockStructure(dims=(1, 1))
    with pytest.raises(ValueError):
        StabilityCertificate(blocks=blocks, P=([[1.0]], [[-1.0]]), margin=0.5)
    with pytest.raises(ValueError):
        StabilityCertificate(blocks=blocks, P=([[1.0]], [[1.0]]), margin=0.0)


@pytest.mark.parametrize("path", sorted(MODEL_FILES.glob("*.json")), ids=lambda path: path.name)
def test_shipped_files_round_trip(path: Path) -> None:
    model = load_file(path)
    again = type(model).model_validate_json(model.model_dump_json())
    assert again.model_dump_json() == model.model_dump_json()


def test_falpv_file_checks_declared_dims() -> None:
    data = json.loads((MODEL_FILES / "example2_falpv.json").read_text())
    data["dims"]["n_x"] = 3
    with pytest.raises(ValueError):
        FalpvFile.model_validate(data)


def test_error_of() -> None:
    error = LftError.of(ErrorCode.DOMAIN, "outside", t=3)
    assert error.error == Error(code=ErrorCode.DOMAIN, message="outside", data={"t": 3})
    assert str(error) == "outside"

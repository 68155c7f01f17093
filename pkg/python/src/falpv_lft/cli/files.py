from pathlib import Path
from typing import TypeVar

from pydantic import BaseModel, TypeAdapter, ValidationError

from falpv_lft.models import ErrorCode, LftError, ModelFile

_adapter: TypeAdapter[ModelFile] = TypeAdapter(ModelFile)

T = TypeVar("T", bound=BaseModel)


def load_file(path: Path) -> ModelFile:
    try:
        return _adapter.validate_json(path.read_bytes())
    except OSError as e:
        raise LftError.of(ErrorCode.INVALID_INPUT, f"Cannot read {path}: {e.strerror}") from e
    except ValidationError as e:
        raise LftError.of(ErrorCode.INVALID_INPUT, f"Invalid model file {path}: {e}") from e


def load_as(path: Path, *kinds: type[T]) -> T:
    """Load ``path`` and check it holds one of ``kinds``."""
    model = load_file(path)
    if not isinstance(model, kinds):
        expected = " or ".join(kind.model_fields["kind"].default for kind in kinds)
        raise LftError.of(ErrorCode.INVALID_INPUT, f"{path} holds a {model.kind} file, expected {expected}")
    return model


def save_file(path: Path, model: BaseModel) -> None:
    path.write_text(model.model_dump_json(indent=2) + "\n")

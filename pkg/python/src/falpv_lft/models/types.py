from typing import Annotated, Any

import numpy as np
from pydantic import PlainSerializer, PlainValidator

Word = tuple[int, ...]
"""A word over the alphabet 1..d; the empty tuple is the empty word."""

EMPTY_WORD: Word = ()


def _to_matrix(value: Any) -> np.ndarray:
    if isinstance(value, dict):
        # Empty matrices are serialized as a bare shape record.
        matrix = np.zeros((int(value["rows"]), int(value["cols"])))
    else:
        matrix = np.array(value, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix, got an array of shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix entries must be finite")
    matrix.setflags(write=False)
    return matrix


def _from_matrix(matrix: np.ndarray) -> list[list[float]] | dict[str, int]:
    if matrix.size == 0:
        return {"rows": matrix.shape[0], "cols": matrix.shape[1]}
    return matrix.tolist()


Matrix = Annotated[np.ndarray, PlainValidator(_to_matrix), PlainSerializer(_from_matrix)]
"""A dense, read-only, double precision 2-D array."""


__all__ = ["EMPTY_WORD", "Matrix", "Word"]

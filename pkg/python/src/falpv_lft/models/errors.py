from enum import Enum
from typing import Any

from pydantic import BaseModel


class ErrorCode(str, Enum):
    CONTRACT = "contract"
    SHAPE = "shape"
    ALPHABET = "alphabet"
    DOMAIN = "domain"
    TRUNCATION = "truncation"
    WELL_POSEDNESS = "well_posedness"
    ORDER_BOUND = "order_bound"
    ILL_CONDITIONED = "ill_conditioned"
    INVALID_FACTOR = "invalid_factor"
    RECOGNIZABILITY = "recognizability"
    DEPENDENCE = "dependence"
    PRECONDITION = "precondition"
    INVALID_INPUT = "invalid_input"


class Error(BaseModel):
    code: ErrorCode
    message: str
    data: dict[str, Any] | None = None


class LftError(Exception):
    def __init__(self, error: Error) -> None:
        super().__init__()
        self.error = error

    def __str__(self) -> str:
        return str(self.error.message)

    @classmethod
    def of(cls, code: ErrorCode, message: str, **data: Any) -> "LftError":
        return cls(Error(code=code, message=message, data=data or None))


__all__ = ["Error", "ErrorCode", "LftError"]

from falpv_lft.models import ErrorCode, LftError


def exit_code(outcome: bool | LftError) -> int:
    match outcome:
        case LftError():
            return 2
        case True:
            return 0
        case _:
            return 1


def error_category(code: ErrorCode) -> str:
    """Coarse category reported by ``transform``."""
    match code:
        case ErrorCode.RECOGNIZABILITY | ErrorCode.ORDER_BOUND | ErrorCode.ILL_CONDITIONED | ErrorCode.TRUNCATION:
            return "recognizability"
        case ErrorCode.WELL_POSEDNESS:
            return "well-posedness"
        case _:
            return "contract"


def format_error(error: LftError, *, grouped: bool = False) -> str:
    code = error_category(error.error.code) if grouped else error.error.code.value
    return f"error[{code}]: {error.error.message}"

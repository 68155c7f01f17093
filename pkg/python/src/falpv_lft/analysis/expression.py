import re
from collections.abc import Callable, Sequence

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr

from falpv_lft.models import ErrorCode, LftError

PsiEvaluator = Callable[[np.ndarray], np.ndarray]

_TOKENS = re.compile(r"^(\s|\d|\.|[eE][+-]?\d|p\d+|\*\*|[-+*/()])*$")
_NODES = (sp.Add, sp.Mul, sp.Pow, sp.Symbol, sp.Number)


def parse_psi_expressions(expressions: Sequence[str], n_p: int) -> list[sp.Expr]:
    """Parse closed forms of ``psi`` over ``p1..p{n_p}``.

    Only numbers, the scheduling symbols, ``+ - * /``, powers and parentheses are accepted.
    """
    symbols = sp.symbols(f"p1:{n_p + 1}")
    allowed = {str(symbol): symbol for symbol in symbols}
    global_dict = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational, "Symbol": sp.Symbol}
    parsed = []
    for text in expressions:
        if not _TOKENS.match(text):
            raise LftError.of(ErrorCode.INVALID_INPUT, f"Unsupported characters in psi expression {text!r}")
        try:
            expression = parse_expr(text, local_dict=allowed, global_dict=global_dict, evaluate=True)
        except (SyntaxError, TypeError, ValueError, ZeroDivisionError) as e:
            raise LftError.of(ErrorCode.INVALID_INPUT, f"Cannot parse psi expression {text!r}: {e}") from e
        unknown = expression.free_symbols - set(symbols)
        if unknown:
            raise LftError.of(ErrorCode.INVALID_INPUT, f"Unknown symbols {sorted(map(str, unknown))} in {text!r}")
        if any(not isinstance(node, _NODES) for node in sp.preorder_traversal(expression)):
            raise LftError.of(ErrorCode.INVALID_INPUT, f"Unsupported operation in psi expression {text!r}")
        parsed.append(expression)
    return parsed


def expression_evaluator(expressions: Sequence[str], n_p: int) -> PsiEvaluator:
    parsed = parse_psi_expressions(expressions, n_p)
    function = sp.lambdify(sp.symbols(f"p1:{n_p + 1}"), parsed, "numpy")

    def evaluate(p: np.ndarray) -> np.ndarray:
        values = np.asarray(function(*np.asarray(p, dtype=float).reshape(-1)), dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise LftError.of(ErrorCode.WELL_POSEDNESS, f"psi is not finite at p = {np.asarray(p).tolist()}")
        return values

    return evaluate

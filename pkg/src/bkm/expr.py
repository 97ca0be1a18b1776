"""Tiny arithmetic expressions for boundary data in problem files.

Grammar: numeric literals, the variables allowed by the caller (x, y and,
for Neumann data, nx, ny), + - * /, unary minus, and the functions sin, cos,
exp and pow(a, b). Parsing goes through :mod:`ast` with a whitelist, so
nothing outside the grammar is ever evaluated.
"""
from __future__ import annotations

import ast
from typing import Callable

import numpy as np

__all__ = ["ExpressionError", "compile_expression"]

_FUNCS = {"sin": (np.sin, 1), "cos": (np.cos, 1), "exp": (np.exp, 1), "pow": (np.power, 2)}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide}


class ExpressionError(ValueError):
    """Malformed expression; ``position`` is the 1-based column of the offending token."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


def _validate(node, text, variables):
    def fail(msg, n):
        # parsed as "(" + text + ")", so 0-based offsets are 1-based in text
        raise ExpressionError(msg, text, max(getattr(n, "col_offset", 1), 1))

    if isinstance(node, ast.Expression):
        return _validate(node.body, text, variables)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            fail("only numeric literals are allowed", node)
        return
    if isinstance(node, ast.Name):
        if node.id not in variables:
            fail(f"unknown variable {node.id!r} (allowed: {', '.join(variables)})", node)
        return
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            hint = "; use pow(a, b)" if isinstance(node.op, ast.Pow) else ""
            fail(f"operator {type(node.op).__name__} is not allowed{hint}", node)
        _validate(node.left, text, variables)
        _validate(node.right, text, variables)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            fail("only unary + and - are allowed", node)
        _validate(node.operand, text, variables)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            fail(f"unknown function (allowed: {', '.join(_FUNCS)})", node)
        arity = _FUNCS[node.func.id][1]
        if node.keywords or len(node.args) != arity:
            fail(f"{node.func.id} takes {arity} argument(s)", node)
        for arg in node.args:
            _validate(arg, text, variables)
        return
    fail(f"unsupported syntax {type(node).__name__}", node)


def _evaluate(node, env):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        val = _evaluate(node.operand, env)
        return -val if isinstance(node.op, ast.USub) else val
    fn = _FUNCS[node.func.id][0]
    return fn(*(_evaluate(a, env) for a in node.args))


def compile_expression(text, variables: tuple[str, ...] = ("x", "y")) -> Callable[..., np.ndarray]:
    """Return f(*arrays) evaluating ``text`` elementwise, arguments in ``variables`` order."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        text = repr(float(text))
    if not isinstance(text, str):
        raise ExpressionError("expression must be a string", str(text), 1)
    depth = 0
    for i, ch in enumerate(text, start=1):
        depth += {"(": 1, ")": -1}.get(ch, 0)
        if depth < 0:
            raise ExpressionError("unmatched ')'", text, i)
    try:
        tree = ast.parse(f"({text})", mode="eval")
    except SyntaxError as exc:
        pos = min(max((exc.offset or 2) - 1, 1), len(text) + 1)
        raise ExpressionError(f"syntax error: {exc.msg}", text, pos) from None
    _validate(tree, text, variables)
    body = tree.body

    def f(*args):
        if len(args) != len(variables):
            raise TypeError(f"expected {len(variables)} arguments, got {len(args)}")
        arrays = [np.asarray(a, dtype=float) for a in args]
        shape = np.broadcast_shapes(*(a.shape for a in arrays))
        env = dict(zip(variables, arrays))
        return np.broadcast_to(np.asarray(_evaluate(body, env), dtype=float), shape).copy()

    f.__doc__ = text
    return f

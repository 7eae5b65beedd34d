"""Restricted arithmetic expressions for coefficient functions in JSON configs.

Grammar: numbers, the named variables, ``pi``, ``+ - * / ^`` (``**`` also
accepted), parentheses, ``sin``, ``cos``, ``exp``, ``sqrt``, comparisons, and
``piecewise(cond1, value1, cond2, value2, ..., default)``. Anything else is
rejected at parse time.
"""

from __future__ import annotations

import ast
from typing import Callable

import numpy as np

_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt}
_CONSTS = {"pi": np.pi}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}
_CMPOPS = {
    ast.Lt: np.less,
    ast.LtE: np.less_equal,
    ast.Gt: np.greater,
    ast.GtE: np.greater_equal,
}


class ExpressionError(ValueError):
    pass


def _validate(node: ast.AST, variables: tuple[str, ...]) -> None:
    if isinstance(node, ast.Expression):
        return _validate(node.body, variables)
    if isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ExpressionError(f"unsupported constant {node.value!r}")
        return
    if isinstance(node, ast.Name):
        if node.id not in variables and node.id not in _CONSTS:
            raise ExpressionError(f"unknown name {node.id!r}")
        return
    if isinstance(node, ast.BinOp):
        if type(node.op) not in _BINOPS:
            raise ExpressionError(f"unsupported operator {type(node.op).__name__}")
        _validate(node.left, variables)
        _validate(node.right, variables)
        return
    if isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, (ast.USub, ast.UAdd)):
            raise ExpressionError("unsupported unary operator")
        return _validate(node.operand, variables)
    if isinstance(node, ast.Compare):
        if len(node.ops) != 1 or type(node.ops[0]) not in _CMPOPS:
            raise ExpressionError("only single <, <=, >, >= comparisons are allowed")
        _validate(node.left, variables)
        _validate(node.comparators[0], variables)
        return
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.keywords:
            raise ExpressionError("unsupported call")
        name = node.func.id
        if name == "piecewise":
            if len(node.args) < 3 or len(node.args) % 2 == 0:
                raise ExpressionError("piecewise needs (cond, value)* pairs and a default")
        elif name in _FUNCS:
            if len(node.args) != 1:
                raise ExpressionError(f"{name} takes one argument")
        else:
            raise ExpressionError(f"unknown function {name!r}")
        for arg in node.args:
            _validate(arg, variables)
        return
    raise ExpressionError(f"unsupported syntax {type(node).__name__}")


def _evaluate(node: ast.AST, env: dict):
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return env[node.id] if node.id in env else _CONSTS[node.id]
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_evaluate(node.left, env), _evaluate(node.right, env))
    if isinstance(node, ast.UnaryOp):
        value = _evaluate(node.operand, env)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Compare):
        return _CMPOPS[type(node.ops[0])](_evaluate(node.left, env), _evaluate(node.comparators[0], env))
    name = node.func.id
    args = [_evaluate(a, env) for a in node.args]
    if name == "piecewise":
        conds, values = args[:-1:2], args[1:-1:2]
        shape = np.broadcast(*[np.asarray(a) for a in args]).shape
        conds = [np.broadcast_to(c, shape) for c in conds]
        values = [np.broadcast_to(v, shape) for v in values]
        return np.select(conds, values, default=np.broadcast_to(args[-1], shape))
    return _FUNCS[name](args[0])


def compile_expression(text: str, variables: tuple[str, ...] = ("x",)) -> Callable:
    """Parse ``text`` and return a vectorised function of ``variables``."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
    _validate(tree, variables)
    body = tree.body

    def func(*args):
        if len(args) != len(variables):
            raise TypeError(f"expected {len(variables)} arguments")
        env = {name: np.asarray(value, dtype=float) for name, value in zip(variables, args)}
        out = _evaluate(body, env)
        shape = np.broadcast(*env.values()).shape
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy() if shape else float(out)

    func.__name__ = "expr"
    func.__doc__ = text
    return func

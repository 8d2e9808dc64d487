"""Symbolic differentiation, simultaneous substitution, numeric evaluation."""

from __future__ import annotations

import math
from fractions import Fraction

from .nodes import (
    Add, Call, Const, Expr, Mul, Neg, Pow, Var, ZERO, coerce, to_text,
)
from .simplify import simplify


class EvalError(ValueError):
    """Numeric evaluation failure; carries the offending subtree."""

    def __init__(self, message: str, expr: Expr):
        self.expr = expr
        super().__init__(f"{message} in {to_text(expr)}")


def diff(e: Expr, var: str) -> Expr:
    """Exact derivative with respect to `var`, canonically simplified."""
    return simplify(_d(e, var))


def _d(e: Expr, var: str) -> Expr:
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return Const(Fraction(1 if e.name == var else 0))
    if isinstance(e, Add):
        return Add(tuple(_d(t, var) for t in e.terms))
    if isinstance(e, Neg):
        return Neg(_d(e.child, var))
    if isinstance(e, Mul):
        terms = []
        for i, f in enumerate(e.factors):
            terms.append(Mul(e.factors[:i] + (_d(f, var),) + e.factors[i + 1:]))
        return Add(tuple(terms))
    if isinstance(e, Pow):
        b, x = e.base, e.exponent
        if isinstance(x, Const):
            return Mul((x, Pow(b, Const(x.value - 1)), _d(b, var)))
        if isinstance(b, Const):
            return Mul((e, Call("log", b), _d(x, var)))
        # general exponent: b^x * (x' log b + x b'/b)
        return Mul((e, Add((Mul((_d(x, var), Call("log", b))),
                            Mul((x, _d(b, var), Pow(b, Const(Fraction(-1)))))))))
    if isinstance(e, Call):
        u, du = e.arg, _d(e.arg, var)
        if e.fn == "exp":
            return Mul((e, du))
        if e.fn == "log":
            return Mul((du, Pow(u, Const(Fraction(-1)))))
        if e.fn == "sin":
            return Mul((Call("cos", u), du))
        if e.fn == "cos":
            return Neg(Mul((Call("sin", u), du)))
        if e.fn == "sqrt":
            return Mul((du, Pow(Mul((Const(Fraction(2)), e)), Const(Fraction(-1)))))
    raise TypeError(f"not an Expr: {e!r}")


def substitute(e: Expr, bindings) -> Expr:
    """Simultaneous substitution; unbound variables pass through unchanged.

    Binding values may be Expr or plain numbers.  The result is not
    simplified.
    """
    table = {name: coerce(value) for name, value in bindings.items()}
    return _sub(e, table) if table else e


def _sub(e: Expr, table) -> Expr:
    if isinstance(e, Var):
        return table.get(e.name, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(tuple(_sub(t, table) for t in e.terms))
    if isinstance(e, Mul):
        return Mul(tuple(_sub(f, table) for f in e.factors))
    if isinstance(e, Pow):
        return Pow(_sub(e.base, table), _sub(e.exponent, table))
    if isinstance(e, Neg):
        return Neg(_sub(e.child, table))
    if isinstance(e, Call):
        return Call(e.fn, _sub(e.arg, table))
    raise TypeError(f"not an Expr: {e!r}")


def eval_numeric(e: Expr, bindings) -> float:
    """IEEE-double evaluation under name -> float bindings.

    Raises EvalError for unbound variables, math-domain violations
    (log of a nonpositive, 0^negative, negative^noninteger, sqrt of a
    negative) and non-finite intermediate results.
    """
    v = _ev(e, bindings)
    if not math.isfinite(v):
        raise EvalError("non-finite result", e)
    return v


def _ev(e: Expr, b) -> float:
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Var):
        try:
            return float(b[e.name])
        except KeyError:
            raise EvalError(f"unbound variable {e.name!r}", e) from None
    if isinstance(e, Add):
        out = 0.0
        for t in e.terms:
            out += _ev(t, b)
        return out
    if isinstance(e, Mul):
        out = 1.0
        for f in e.factors:
            out *= _ev(f, b)
        return out
    if isinstance(e, Neg):
        return -_ev(e.child, b)
    if isinstance(e, Pow):
        base = _ev(e.base, b)
        expo = _ev(e.exponent, b)
        if base == 0.0 and expo < 0:
            raise EvalError("zero raised to a negative power", e)
        try:
            return math.pow(base, expo)
        except (ValueError, OverflowError) as err:
            raise EvalError(str(err), e) from None
    if isinstance(e, Call):
        arg = _ev(e.arg, b)
        if e.fn == "log" and arg <= 0.0:
            raise EvalError("log of a nonpositive value", e)
        if e.fn == "sqrt" and arg < 0.0:
            raise EvalError("sqrt of a negative value", e)
        fn = getattr(math, e.fn)
        try:
            return fn(arg)
        except (ValueError, OverflowError) as err:
            raise EvalError(str(err), e) from None
    raise TypeError(f"not an Expr: {e!r}")

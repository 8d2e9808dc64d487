"""Expression trees: the symbolic currency of the whole package.

Nodes are immutable and hashable; structural equality is field equality.
Division is spelled Mul(a, Pow(b, -1)) and subtraction Add(a, Neg(b)), so
there are only seven node kinds.  Exact rationals (fractions.Fraction) are
kept until numeric evaluation; floats are contagious once introduced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

NumberLike = Union[int, float, Fraction]

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


class Expr:
    """Base class; arithmetic operators build raw (uncanonicalized) trees."""

    __slots__ = ()

    def __add__(self, other):
        return Add((self, coerce(other)))

    def __radd__(self, other):
        return Add((coerce(other), self))

    def __sub__(self, other):
        return Add((self, neg(coerce(other))))

    def __rsub__(self, other):
        return Add((coerce(other), neg(self)))

    def __mul__(self, other):
        return Mul((self, coerce(other)))

    def __rmul__(self, other):
        return Mul((coerce(other), self))

    def __truediv__(self, other):
        return Mul((self, Pow(coerce(other), Const(Fraction(-1)))))

    def __rtruediv__(self, other):
        return Mul((coerce(other), Pow(self, Const(Fraction(-1)))))

    def __pow__(self, other):
        return Pow(self, coerce(other))

    def __neg__(self):
        return neg(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: Union[Fraction, float]

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, Fraction, float)):
            raise TypeError(f"Const value must be a number, got {type(v).__name__}")
        if isinstance(v, int):
            object.__setattr__(self, "value", Fraction(v))
        elif isinstance(v, float) and not math.isfinite(v):
            raise ValueError("Const value must be finite")

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str

    def __post_init__(self):
        if not self.name or not self.name[0].isalpha():
            raise ValueError(f"invalid variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True, slots=True)
class Call(Expr):
    fn: str
    arg: Expr

    def __post_init__(self):
        if self.fn not in FUNCTIONS:
            raise ValueError(f"unknown function {self.fn!r}")


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, Fraction)):
        return Const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Expr")


def num(x: NumberLike) -> Const:
    """Exact constant from a number; floats go through their shortest decimal.

    Keeps coefficient arithmetic exact even when parameters arrive as floats
    (Fraction(str(0.1)) is 1/10, not the 2**-55 neighbour).
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("parameter must be finite")
        return Const(Fraction(str(x)))
    raise TypeError(f"expected a number, got {type(x).__name__}")


def neg(e: Expr) -> Expr:
    """Negate, folding constants so that -5 is a Const, not Neg(Const)."""
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.child
    return Neg(e)


def Exp(arg) -> Call:
    return Call("exp", coerce(arg))


def Log(arg) -> Call:
    return Call("log", coerce(arg))


def Sin(arg) -> Call:
    return Call("sin", coerce(arg))


def Cos(arg) -> Call:
    return Call("cos", coerce(arg))


def Sqrt(arg) -> Call:
    return Call("sqrt", coerce(arg))


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Add):
        out = frozenset()
        for t in e.terms:
            out |= free_vars(t)
        return out
    if isinstance(e, Mul):
        out = frozenset()
        for f in e.factors:
            out |= free_vars(f)
        return out
    if isinstance(e, Pow):
        return free_vars(e.base) | free_vars(e.exponent)
    if isinstance(e, Neg):
        return free_vars(e.child)
    if isinstance(e, Call):
        return free_vars(e.arg)
    raise TypeError(f"not an Expr: {e!r}")


def node_count(e: Expr) -> int:
    if isinstance(e, (Const, Var)):
        return 1
    if isinstance(e, Add):
        return 1 + sum(node_count(t) for t in e.terms)
    if isinstance(e, Mul):
        return 1 + sum(node_count(f) for f in e.factors)
    if isinstance(e, Pow):
        return 1 + node_count(e.base) + node_count(e.exponent)
    if isinstance(e, (Neg, Call)):
        child = e.child if isinstance(e, Neg) else e.arg
        return 1 + node_count(child)
    raise TypeError(f"not an Expr: {e!r}")


def sort_key(e: Expr):
    """Total order over trees; used to canonicalize Add/Mul child order."""
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction):
            return (0, "", (float(v), 0.0, float(v.numerator), float(v.denominator)), ())
        return (0, "", (v, 1.0, 0.0, 0.0), ())
    if isinstance(e, Var):
        return (1, e.name, (), ())
    if isinstance(e, Call):
        return (2, e.fn, (), (sort_key(e.arg),))
    if isinstance(e, Pow):
        return (3, "", (), (sort_key(e.base), sort_key(e.exponent)))
    if isinstance(e, Neg):
        return (4, "", (), (sort_key(e.child),))
    if isinstance(e, Mul):
        return (5, "", (), tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Add):
        return (6, "", (), tuple(sort_key(t) for t in e.terms))
    raise TypeError(f"not an Expr: {e!r}")


def _const_text(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if v.denominator == 1:
        return str(v.numerator)
    # exact decimal when the denominator is 2^a * 5^b, else p/q (reparses
    # as Mul(p, Pow(q, -1)), numerically equal)
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{v.numerator}/{v.denominator}"
    k = max(twos, fives)
    scaled = v.numerator * 10**k // v.denominator
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(k + 1, "0")
    return f"{sign}{digits[:-k]}.{digits[-k:]}" if k else f"{sign}{digits}"


def _atom_text(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f"{e.fn}({to_text(e.arg)})"
    if isinstance(e, Const) and e.value >= 0:
        return _const_text(e.value)
    return f"({to_text(e)})"


def _pow_text(e: Pow) -> str:
    base = _atom_text(e.base)
    x = e.exponent
    if isinstance(x, Const):
        ex = _const_text(x.value)
        if "/" in ex:  # p/q would parse as (b^p)/q
            ex = f"({ex})"
    elif isinstance(x, (Var, Call, Pow)):
        ex = _factor_text(x)
    elif isinstance(x, Neg):
        ex = "-" + _atom_text(x.child)
    else:
        ex = f"({to_text(x)})"
    return f"{base}^{ex}"


def _factor_text(e: Expr) -> str:
    if isinstance(e, Pow):
        return _pow_text(e)
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Neg):
        return "-" + _atom_text(e.child)
    return _atom_text(e)


def _term_text(e: Expr) -> str:
    if not isinstance(e, Mul):
        return _factor_text(e)
    parts = [_factor_text(e.factors[0])]
    for f in e.factors[1:]:
        if isinstance(f, Pow) and f.exponent == Const(Fraction(-1)):
            parts.append("/" + _factor_text(f.base))
        else:
            parts.append("*" + _factor_text(f))
    return "".join(parts)


def to_text(e: Expr) -> str:
    """Render to the surface grammar; parsing the result rebuilds the tree.

    The one normalization: Neg(Const c) renders as the literal -c, which the
    parser folds back to Const(-c).
    """
    if isinstance(e, Add):
        out = [_term_text(e.terms[0])]
        for t in e.terms[1:]:
            if isinstance(t, Neg):
                out.append(" - " + _term_text(t.child))
            elif isinstance(t, Const) and t.value < 0:
                out.append(" - " + _const_text(-t.value))
            else:
                out.append(" + " + _term_text(t))
        return "".join(out)
    return _term_text(e)

"""Terminating rewrite of trees into a canonical form.

Rules: constant folding (exact on rationals, float contagious), x+0 -> x,
x*1 -> x, x*0 -> 0, x^1 -> x, x^0 -> 1, 1^x -> 1, exp(log(x)) -> x (also
inside a sum argument), flatten and sort Add/Mul under a fixed total order,
merge like terms with rational coefficients, hoist signs so a canonical Mul
has at most one leading positive constant.

This is a single bottom-up pass over the tree, so it terminates trivially;
idempotence (simplify . simplify == simplify) is covered by property tests.
It is NOT a canonical form for transcendental identities — numeric sampling
is the project's zero test.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .nodes import (
    Add, Call, Const, Expr, Mul, Neg, ONE, Pow, Var, ZERO, sort_key,
)

_MATH_FN = {"exp": math.exp, "log": math.log, "sin": math.sin,
            "cos": math.cos, "sqrt": math.sqrt}


def simplify(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        return _add(tuple(simplify(t) for t in e.terms))
    if isinstance(e, Mul):
        return _mul(tuple(simplify(f) for f in e.factors))
    if isinstance(e, Pow):
        return _pow(simplify(e.base), simplify(e.exponent))
    if isinstance(e, Neg):
        return _negate(simplify(e.child))
    if isinstance(e, Call):
        return _call(e.fn, simplify(e.arg))
    raise TypeError(f"not an Expr: {e!r}")


def _negate(e: Expr) -> Expr:
    """Negation of an already-canonical expression."""
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.child
    if isinstance(e, Add):
        return _add(tuple(_negate(t) for t in e.terms))
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        return _mul((Const(-e.factors[0].value),) + e.factors[1:])
    return Neg(e)


def _split_term(e: Expr):
    """Decompose a canonical Add child into (coefficient, factor tuple).

    The factor tuple is () for pure constants; the coefficient is exact
    unless floats are involved.
    """
    if isinstance(e, Neg):
        c, rest = _split_term(e.child)
        return -c, rest
    if isinstance(e, Const):
        return e.value, ()
    if isinstance(e, Mul):
        if isinstance(e.factors[0], Const):
            return e.factors[0].value, e.factors[1:]
        return Fraction(1), e.factors
    return Fraction(1), (e,)


def _join_term(coeff, rest: tuple) -> Expr:
    if not rest:
        return Const(coeff)
    if coeff == 1:
        return rest[0] if len(rest) == 1 else Mul(rest)
    if coeff == -1:
        return Neg(rest[0] if len(rest) == 1 else Mul(rest))
    body = Mul((Const(abs(coeff)),) + rest)
    return Neg(body) if coeff < 0 else body


def _add(terms: tuple) -> Expr:
    flat = []
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    groups = {}   # factor tuple -> coefficient
    order = {}    # factor tuple -> first-seen sort key
    for t in flat:
        coeff, rest = _split_term(t)
        if rest in groups:
            groups[rest] = groups[rest] + coeff
        else:
            groups[rest] = coeff
            order[rest] = tuple(sort_key(f) for f in rest)
    merged = [(order[rest], rest, c) for rest, c in groups.items() if c != 0]
    merged.sort(key=lambda item: (len(item[1]) > 0, item[0]))
    out = tuple(_join_term(c, rest) for _, rest, c in merged)
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Add(out)


def _split_factor(f: Expr):
    """Base and integer exponent of a canonical Mul child; None when the
    exponent is not an exact integer (those factors never merge)."""
    if isinstance(f, Pow) and isinstance(f.exponent, Const):
        v = f.exponent.value
        if isinstance(v, Fraction) and v.denominator == 1:
            return f.base, v.numerator
        return None
    return f, 1


def _mul(factors: tuple) -> Expr:
    coeff = Fraction(1)
    negative = False
    raw = []
    stack = list(reversed(factors))
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
        elif isinstance(f, Neg):
            negative = not negative
            stack.append(f.child)
        elif isinstance(f, Const):
            coeff = coeff * f.value
        else:
            raw.append(f)
    if coeff == 0:
        return ZERO
    if coeff < 0:
        negative = not negative
        coeff = -coeff
    # merge repeated bases with integer exponents: x * x^2 -> x^3
    powers = {}
    order = {}
    rest = []
    for f in raw:
        split = _split_factor(f)
        if split is None:
            rest.append(f)
            continue
        base, expo = split
        if base in powers:
            powers[base] += expo
        else:
            powers[base] = expo
            order[base] = len(order)
    for base in sorted(powers, key=lambda b: order[b]):
        merged = _pow(base, Const(Fraction(powers[base])))
        if isinstance(merged, Const):
            coeff = coeff * abs(merged.value)
            if merged.value < 0:
                negative = not negative
            continue
        if isinstance(merged, Neg):
            negative = not negative
            merged = merged.child
        rest.append(merged)
    if coeff == 0:
        return ZERO
    if any(isinstance(r, Mul) for r in rest):
        # an exponent sum collapsed to 1 and uncovered a product: reflatten
        out = _mul(tuple([Const(coeff)] + rest))
        return _negate(out) if negative else out
    rest.sort(key=sort_key)
    if not rest:
        body = Const(coeff)
        return Const(-coeff) if negative else body
    if coeff != 1:
        rest.insert(0, Const(coeff))
    body = rest[0] if len(rest) == 1 else Mul(tuple(rest))
    return Neg(body) if negative else body


def _pow(base: Expr, exponent: Expr) -> Expr:
    if isinstance(exponent, Const):
        if exponent.value == 0:
            return ONE
        if exponent.value == 1:
            return base
        if isinstance(base, Const):
            folded = _fold_pow(base.value, exponent.value)
            if folded is not None:
                return folded
    if base == ONE:
        return ONE
    return Pow(base, exponent)


def _fold_pow(bv, ev):
    if isinstance(bv, Fraction) and isinstance(ev, Fraction):
        if ev.denominator == 1 and abs(ev.numerator) <= 128:
            n = ev.numerator
            if bv == 0 and n < 0:
                return None  # 0^negative: defer to evaluation error
            return Const(bv**n)
        return None
    # float contagion
    b, x = float(bv), float(ev)
    try:
        v = math.pow(b, x)
    except (ValueError, OverflowError):
        return None
    return Const(v) if math.isfinite(v) else None


def expand(e: Expr) -> Expr:
    """Distribute products over sums, then canonicalize.

    Not part of simplify's rule set (expansion can grow trees); used where
    collecting coefficients of jet monomials needs a sum of monomials.
    Negative or symbolic powers are left alone.
    """
    return simplify(_expand(simplify(e)))


def _expand(e: Expr) -> Expr:
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        return _add(tuple(_expand(t) for t in e.terms))
    if isinstance(e, Neg):
        return _negate(_expand(e.child))
    if isinstance(e, Call):
        return _call(e.fn, _expand(e.arg))
    if isinstance(e, Pow):
        base = _expand(e.base)
        expo = _expand(e.exponent)
        if (isinstance(base, Add) and isinstance(expo, Const)
                and isinstance(expo.value, Fraction)
                and expo.value.denominator == 1 and 2 <= expo.value <= 8):
            out = base
            for _ in range(int(expo.value) - 1):
                out = _distribute((out, base))
            return out
        return _pow(base, expo)
    if isinstance(e, Mul):
        return _distribute(tuple(_expand(f) for f in e.factors))
    raise TypeError(f"not an Expr: {e!r}")


def _distribute(factors: tuple) -> Expr:
    if not any(isinstance(f, Add) for f in factors):
        return _mul(factors)
    combos = [()]
    for f in factors:
        terms = f.terms if isinstance(f, Add) else (f,)
        combos = [c + (t,) for c in combos for t in terms]
    return _add(tuple(_mul(c) for c in combos))


_EXACT_CALL = {
    ("exp", Fraction(0)): ONE,
    ("log", Fraction(1)): ZERO,
    ("sin", Fraction(0)): ZERO,
    ("cos", Fraction(0)): ONE,
    ("sqrt", Fraction(0)): ZERO,
    ("sqrt", Fraction(1)): ONE,
}


def _call(fn: str, arg: Expr) -> Expr:
    if fn == "exp":
        if isinstance(arg, Call) and arg.fn == "log":
            return arg.arg
        if isinstance(arg, Add):
            # split plain log summands: exp(log(y) + rest) -> y * exp(rest)
            logs = [t for t in arg.terms if isinstance(t, Call) and t.fn == "log"]
            if logs:
                others = tuple(t for t in arg.terms if t not in logs)
                pulled = tuple(t.arg for t in logs)
                if others:
                    return _mul(pulled + (Call("exp", _add(others)),))
                return _mul(pulled)
    if isinstance(arg, Const):
        if arg.is_exact:
            hit = _EXACT_CALL.get((fn, arg.value))
            if hit is not None:
                return hit
        else:
            try:
                v = _MATH_FN[fn](arg.value)
            except (ValueError, OverflowError):
                return Call(fn, arg)
            if math.isfinite(v):
                return Const(v)
    return Call(fn, arg)

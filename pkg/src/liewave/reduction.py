"""Similarity reduction for separable generators.

With the separable choices collapsed to constants q and v, the group
invariants are z = exp(P(x) - q t) and u * exp(-v R(x)).  Substituting
u = exp(v R) * Phi(z) turns the evolution equation into
c2 * Phi'' + c1 * Phi' + c0 * Phi = 0; the target shapes are classified by
sampling.  Phi, Phi', Phi'' are the ordinary variables Phi0, Phi1, Phi2
with the chain rule applied by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .expr import (
    Exp, Expr, Var, diff, eval_numeric, expand, free_vars, is_zero_sampled,
    num, sample_box, simplify, to_text,
)
from .expr.calculus import EvalError
from .symmetry import Domain, Generator, PdeSpec, _as_expr, _load_json

PHI0 = Var("Phi0")
PHI1 = Var("Phi1")
PHI2 = Var("Phi2")

WAVE = "WAVE"
OSCILLATOR = "OSCILLATOR"
IDENTITY = "IDENTITY"
OTHER = "OTHER"


@dataclass(frozen=True)
class SeparableAnsatz:
    """Separable symmetry data (phi(t), P(x), R(x), q, v).

    The separable factors are recovered as xi = q*phi/P' and
    M = q*v*phi*R'/P' and are not stored.
    """

    phi: Expr
    P: Expr
    R: Expr
    q: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "phi", _as_expr(self.phi))
        object.__setattr__(self, "P", _as_expr(self.P))
        object.__setattr__(self, "R", _as_expr(self.R))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "v", float(self.v))
        if self.q == 0.0:
            raise ValueError("q must be nonzero")
        bad = free_vars(self.phi) - {"t"}
        if bad:
            raise ValueError(f"phi must depend on t only, found {sorted(bad)}")
        for name in ("P", "R"):
            bad = free_vars(getattr(self, name)) - {"x"}
            if bad:
                raise ValueError(f"{name} must depend on x only, found {sorted(bad)}")

    def xi(self) -> Expr:
        return simplify(num(self.q) * self.phi / diff(self.P, "x"))

    def M(self) -> Expr:
        return simplify(num(self.q) * num(self.v) * self.phi
                        * diff(self.R, "x") / diff(self.P, "x"))

    def generator(self) -> Generator:
        return Generator(self.phi, self.xi(), self.M())

    def validate_on(self, domain: Domain, *, n: int = 100, seed: int = 0):
        """Reject the ansatz if P' vanishes on the x-interval or phi on the
        t-interval (both checked by sampling)."""
        Pp = diff(self.P, "x")
        for p in sample_box({"x": domain.x}, n, seed):
            v = eval_numeric(Pp, p)
            if abs(v) < 1e-12:
                raise ValueError(f"dP/dx vanishes near x = {p['x']:.6g}")
        for p in sample_box({"t": domain.t}, n, seed):
            v = eval_numeric(self.phi, p)
            if abs(v) < 1e-12:
                raise ValueError(f"phi vanishes near t = {p['t']:.6g}")

    def to_dict(self):
        return {"phi": to_text(self.phi), "P": to_text(self.P),
                "R": to_text(self.R), "q": self.q, "v": self.v}


def load_ansatz(source) -> SeparableAnsatz:
    """Schema: {"phi": "<expr in t>", "P": "<expr in x>", "R": "<expr in x>",
    "q": num, "v": num}."""
    d = _load_json(source)
    return SeparableAnsatz(d["phi"], d["P"], d["R"], d["q"], d["v"])


def invariants(a: SeparableAnsatz):
    """The two first integrals of the characteristic system:
    I1 = exp(P - q*t), I2 = u * exp(-v*R)."""
    i1 = simplify(Exp(a.P - num(a.q) * Var("t")))
    i2 = simplify(Var("u") * Exp(-(num(a.v) * a.R)))
    return i1, i2


def generator_annihilation_check(a: SeparableAnsatz, domain: Domain, *,
                                 u_range=(0.5, 2.0), n: int = 100,
                                 tol: float = 1e-10, seed: int = 0) -> bool:
    """True iff phi*d_t I + xi*d_x I + M*u*d_u I vanishes (sampled) for
    both invariants; they are first integrals, so this is a theorem."""
    xi = a.xi()
    M = a.M()
    box = domain.box(u=u_range)
    for inv in invariants(a):
        applied = simplify(a.phi * diff(inv, "t") + xi * diff(inv, "x")
                           + M * Var("u") * diff(inv, "u"))
        if not is_zero_sampled(applied, box, n=n, tol=tol, seed=seed).passed:
            return False
    return True


@dataclass(frozen=True)
class ReductionResult:
    """Raw reduction output: similarity variable, second invariant, and the
    (x,t)-coefficients of Phi'', Phi', Phi in
    A u_2x + B u_x + C u - u_t after the substitution."""

    z_expr: Expr
    i2_expr: Expr
    c2: Expr
    c1: Expr
    c0: Expr

    def to_dict(self):
        return {"z": to_text(self.z_expr), "c2": to_text(self.c2),
                "c1": to_text(self.c1), "c0": to_text(self.c0)}


def similarity_reduce(p: PdeSpec, a: SeparableAnsatz) -> ReductionResult:
    """Substitute u = exp(v R) Phi(z), z = exp(P - q t) and collect the
    Phi'', Phi', Phi coefficients."""
    a.validate_on(p.domain)
    z = simplify(Exp(a.P - num(a.q) * Var("t")))
    z_x = diff(z, "x")
    z_t = diff(z, "t")

    def d_total(e, var, z_d):
        return simplify(diff(e, var)
                        + diff(e, "Phi0") * PHI1 * z_d
                        + diff(e, "Phi1") * PHI2 * z_d)

    u = simplify(Exp(num(a.v) * a.R) * PHI0)
    u_t = d_total(u, "t", z_t)
    u_x = d_total(u, "x", z_x)
    u_2x = d_total(u_x, "x", z_x)
    omega = expand(p.A * u_2x + p.B * u_x + p.C * u - u_t)
    c2 = diff(omega, "Phi2")
    c1 = diff(omega, "Phi1")
    c0 = diff(omega, "Phi0")
    check = expand(omega - (c2 * PHI2 + c1 * PHI1 + c0 * PHI0))
    if free_vars(check) & {"Phi0", "Phi1", "Phi2"}:
        raise RuntimeError("reduction output is not linear in Phi jets")
    return ReductionResult(z, simplify(Var("u") * Exp(-(num(a.v) * a.R))),
                           c2, c1, c0)


@dataclass(frozen=True)
class Classification:
    kind: str                 # WAVE | OSCILLATOR | IDENTITY | OTHER
    k: Optional[float] = None  # oscillator frequency, when kind == OSCILLATOR

    def __str__(self):
        return f"{self.kind}(k={self.k:.12g})" if self.k is not None else self.kind


def classify_target(r: ReductionResult, domain: Domain, *, n: int = 100,
                    tol: float = 1e-9, seed: int = 0) -> Classification:
    """WAVE if only c2 survives, OSCILLATOR(k) if c0/c2 is a positive
    constant k^2 and c1 dies, IDENTITY if everything dies, OTHER else."""
    box = domain.box()
    z2 = is_zero_sampled(r.c2, box, n=n, tol=tol, seed=seed).passed
    z1 = is_zero_sampled(r.c1, box, n=n, tol=tol, seed=seed).passed
    z0 = is_zero_sampled(r.c0, box, n=n, tol=tol, seed=seed).passed
    if z2 and z1 and z0:
        return Classification(IDENTITY)
    if not z2 and z1:
        if z0:
            return Classification(WAVE)
        ratio = _constant_ratio(r.c0, r.c2, box, n=n, tol=tol, seed=seed)
        if ratio is not None and ratio > 0:
            return Classification(OSCILLATOR, math.sqrt(ratio))
    return Classification(OTHER)


def _constant_ratio(numer: Expr, denom: Expr, box, *, n: int, tol: float,
                    seed: int):
    """Sampled value of numer/denom if constant over the box, else None."""
    values = []
    for pt in sample_box(box, n, seed):
        try:
            den = eval_numeric(denom, pt)
            if abs(den) < 1e-12:
                continue
            values.append(eval_numeric(numer, pt) / den)
        except EvalError:
            continue
    if len(values) < max(10, n // 4):
        return None
    lo, hi = min(values), max(values)
    mid = values[len(values) // 2]
    if hi - lo > tol * max(1.0, abs(mid)):
        return None
    return sum(values) / len(values)


def check_z_closure(r: ReductionResult, domain: Domain, *, n: int = 20,
                    tol: float = 1e-8, seed: int = 0) -> bool:
    """Equal-z consistency: at point pairs sharing the same z, the
    normalized coefficients c1/c2 and c0/c2 must agree (where c2 != 0).

    z is exactly exponential in t, so the matching t2 for a chosen x2 is
    computed in closed form from sampled values of z.
    """
    x0, x1 = domain.x
    t0, t1 = domain.t
    # z(x, t) = z(x, t0) * exp(-q (t - t0)): recover q from two t-samples
    xm = 0.5 * (x0 + x1)
    q = math.log(eval_numeric(r.z_expr, {"x": xm, "t": t0})
                 / eval_numeric(r.z_expr, {"x": xm, "t": t0 + 1.0}))
    pairs = []
    candidates = sample_box({"x1": (x0, x1), "t1": (t0, t1), "x2": (x0, x1)},
                            50 * n, seed)
    for c in candidates:
        z1v = eval_numeric(r.z_expr, {"x": c["x1"], "t": c["t1"]})
        z2v = eval_numeric(r.z_expr, {"x": c["x2"], "t": c["t1"]})
        t2 = c["t1"] + math.log(z2v / z1v) / q
        if t0 <= t2 <= t1:
            pairs.append(((c["x1"], c["t1"]), (c["x2"], t2)))
        if len(pairs) == n:
            break
    if len(pairs) < n:
        raise ValueError(f"could only construct {len(pairs)} equal-z pairs")
    for (xa, ta), (xb, tb) in pairs:
        pa = {"x": xa, "t": ta}
        pb = {"x": xb, "t": tb}
        za = eval_numeric(r.z_expr, pa)
        zb = eval_numeric(r.z_expr, pb)
        if abs(za - zb) > 1e-12 * max(1.0, abs(za)):
            continue
        c2a, c2b = eval_numeric(r.c2, pa), eval_numeric(r.c2, pb)
        if min(abs(c2a), abs(c2b)) < 1e-12:
            continue
        for coeff in (r.c1, r.c0):
            va = eval_numeric(coeff, pa) / c2a
            vb = eval_numeric(coeff, pb) / c2b
            if abs(va - vb) > tol * max(1.0, abs(va), abs(vb)):
                return False
    return True

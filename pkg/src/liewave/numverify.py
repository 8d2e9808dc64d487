"""Numerical ground truth: grid residuals, explicit finite-difference
integration against closed forms, convergence-order measurement, and the
vertical-mode eigenproblem phi'' + (N(z)/C)^2 phi = 0 with phi(-H) = 0 and
phi(0) = 0.

Schemes are deliberately plain (forward Euler in time, centered second
difference, sign-aware upwind first difference when A vanishes) so their
orders are provable and the stability preconditions enforceable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import Expr, diff, free_vars, simplify, substitute, to_text
from .symmetry import PdeSpec, _as_expr, _load_json

_UPWIND_A_THRESHOLD = 1e-14
_STABILITY_SAFETY = 1.0  # preconditions are exact bounds, not padded


class StabilityError(ValueError):
    """Explicit-scheme stability precondition violated."""

    def __init__(self, dt: float, dt_required: float):
        self.dt = dt
        self.dt_required = dt_required
        super().__init__(
            f"time step {dt:.6g} violates the explicit stability bound; "
            f"need dt <= {dt_required:.6g}")


class BlowupError(RuntimeError):
    """Non-finite field values during time stepping."""

    def __init__(self, step: int, time: float):
        self.step = step
        self.time = time
        super().__init__(f"solution became non-finite at step {step} (t = {time:.6g})")


class ModeSearchError(RuntimeError):
    """Eigenvalue sweep found too few sign changes."""

    def __init__(self, found: int, wanted: int, sweep):
        self.found = found
        self.wanted = wanted
        self.sweep = sweep
        super().__init__(
            f"found {found} of {wanted} eigenvalues; no further sign change "
            f"of the endpoint shot in the sweep range [{sweep[0]:.3g}, {sweep[1]:.3g}]")


@dataclass(frozen=True)
class Grid1D:
    x0: float
    x1: float
    nx: int
    t0: float
    t1: float
    nt: int

    def __post_init__(self):
        if not self.x1 > self.x0:
            raise ValueError("need x1 > x0")
        if not self.t1 > self.t0:
            raise ValueError("need t1 > t0")
        if self.nx < 3:
            raise ValueError("need nx >= 3")
        if self.nt < 1:
            raise ValueError("need nt >= 1")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.nt

    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    def ts(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt + 1)


@dataclass
class Field:
    """values[i, n] is the solution at (x_i, t_n); shape (nx, nt+1)."""

    values: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        expected = (self.grid.nx, self.grid.nt + 1)
        if self.values.shape != expected:
            raise ValueError(f"field shape {self.values.shape} != {expected}")
        if not np.isfinite(self.values).all():
            raise ValueError("field contains non-finite values")


def eval_on_grid(e: Expr, bindings) -> np.ndarray:
    """Vectorized twin of eval_numeric: bindings map names to arrays or
    scalars (numpy broadcasting applies).  Domain violations surface as
    non-finite entries, which callers must check."""
    from .expr.nodes import Add, Call, Const, Mul, Neg, Pow, Var

    def ev(node):
        if isinstance(node, Const):
            return float(node.value)
        if isinstance(node, Var):
            if node.name not in bindings:
                raise KeyError(f"unbound variable {node.name!r}")
            return bindings[node.name]
        if isinstance(node, Add):
            out = ev(node.terms[0])
            for t in node.terms[1:]:
                out = out + ev(t)
            return out
        if isinstance(node, Mul):
            out = ev(node.factors[0])
            for f in node.factors[1:]:
                out = out * ev(f)
            return out
        if isinstance(node, Neg):
            return -ev(node.child)
        if isinstance(node, Pow):
            return _np_pow(ev(node.base), ev(node.exponent))
        if isinstance(node, Call):
            return getattr(np, node.fn)(ev(node.arg))
        raise TypeError(f"not an Expr: {node!r}")

    with np.errstate(all="ignore"):
        return np.asarray(ev(e), dtype=float)


def _np_pow(base, expo):
    if np.isscalar(expo) and float(expo) == round(float(expo)):
        return np.power(base, int(round(float(expo))), dtype=float) \
            if isinstance(base, np.ndarray) else float(base) ** int(round(float(expo)))
    return np.power(base, expo)


@dataclass(frozen=True)
class GridResidual:
    max_abs: float
    x: float
    t: float


def residual_on_grid(p: PdeSpec, u: Expr, g: Grid1D) -> GridResidual:
    """Max |u_t - A u_2x - B u_x - C u| over interior x nodes and all time
    levels, with the derivatives taken symbolically."""
    extra = free_vars(u) - {"x", "t"}
    if extra:
        raise ValueError(f"u may only use x and t, found {sorted(extra)}")
    u_t = diff(u, "t")
    u_x = diff(u, "x")
    u_2x = diff(u_x, "x")
    res = simplify(u_t - p.A * u_2x - p.B * u_x - p.C * u)
    xs = g.xs()[1:-1]
    best = GridResidual(-1.0, math.nan, math.nan)
    for t in g.ts():
        vals = np.broadcast_to(eval_on_grid(res, {"x": xs, "t": t}), xs.shape)
        if not np.isfinite(vals).all():
            i = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValueError(f"residual evaluation failed at x = {xs[i]:.6g}, "
                             f"t = {t:.6g}")
        i = int(np.argmax(np.abs(vals)))
        if abs(vals[i]) > best.max_abs:
            best = GridResidual(float(abs(vals[i])), float(xs[i]), float(t))
    return best


def fd_solve(p: PdeSpec, ic: Expr, bc: Expr, g: Grid1D) -> Field:
    """Forward Euler with centered u_2x; u_x is upwinded (by the sign of B)
    when A vanishes uniformly, centered otherwise.  Dirichlet boundary
    values come from the closed form bc(x, t).

    Preconditions (enforced): dt <= dx^2 / (2 max|A|) in the diffusive
    case, dt <= dx / max|B| in the pure-advection case.
    """
    xs = g.xs()
    ts = g.ts()
    dx, dt = g.dx, g.dt

    t_probe = ts if len(ts) <= 64 else np.linspace(g.t0, g.t1, 64)
    max_a = _grid_max_abs(p.A, xs, t_probe)
    max_b = _grid_max_abs(p.B, xs, t_probe)
    advective = max_a < _UPWIND_A_THRESHOLD
    if not advective:
        dt_req = _STABILITY_SAFETY * dx * dx / (2.0 * max_a)
        if dt > dt_req:
            raise StabilityError(dt, dt_req)
    elif max_b > 0:
        dt_req = _STABILITY_SAFETY * dx / max_b
        if dt > dt_req:
            raise StabilityError(dt, dt_req)

    a_static = "t" not in free_vars(p.A)
    b_static = "t" not in free_vars(p.B)
    c_static = "t" not in free_vars(p.C)
    xi = xs[1:-1]
    a_vals = eval_on_grid(p.A, {"x": xi, "t": ts[0]}) if a_static else None
    b_vals = eval_on_grid(p.B, {"x": xi, "t": ts[0]}) if b_static else None
    c_vals = eval_on_grid(p.C, {"x": xi, "t": ts[0]}) if c_static else None

    values = np.empty((g.nx, g.nt + 1))
    values[:, 0] = eval_on_grid(ic, {"x": xs})
    if not np.isfinite(values[:, 0]).all():
        raise ValueError("initial condition evaluated to non-finite values")
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(g.nt):
            t = ts[n]
            u = values[:, n]
            A = a_vals if a_static else eval_on_grid(p.A, {"x": xi, "t": t})
            B = b_vals if b_static else eval_on_grid(p.B, {"x": xi, "t": t})
            C = c_vals if c_static else eval_on_grid(p.C, {"x": xi, "t": t})
            u_2x = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (dx * dx)
            if advective:
                forward = (u[2:] - u[1:-1]) / dx
                backward = (u[1:-1] - u[:-2]) / dx
                u_x = np.where(B >= 0, forward, backward)
            else:
                u_x = (u[2:] - u[:-2]) / (2.0 * dx)
            values[1:-1, n + 1] = u[1:-1] + dt * (A * u_2x + B * u_x
                                                  + C * u[1:-1])
            values[0, n + 1] = float(eval_on_grid(bc, {"x": xs[0], "t": ts[n + 1]}))
            values[-1, n + 1] = float(eval_on_grid(bc, {"x": xs[-1], "t": ts[n + 1]}))
            if not np.isfinite(values[:, n + 1]).all():
                raise BlowupError(n + 1, float(ts[n + 1]))
    return Field(values, g)


def _grid_max_abs(e: Expr, xs, ts) -> float:
    vals = eval_on_grid(e, {"x": xs[:, None], "t": np.asarray(ts)[None, :]})
    if not np.isfinite(vals).all():
        raise ValueError(f"coefficient {to_text(e)} is not finite on the grid")
    return float(np.max(np.abs(vals)))


@dataclass(frozen=True)
class ConvergenceLevel:
    dx: float
    error: float
    order: Optional[float]  # None on the coarsest level or at rounding floor


def convergence_order(p: PdeSpec, exact: Expr, g0: Grid1D, levels: int):
    """Refinement study: halve dx per level with dt scaled by 1/4 (diffusive)
    or 1/2 (pure advection); errors are L-infinity against `exact` at the
    final time."""
    if levels < 3:
        raise ValueError("need at least 3 levels")
    t_probe = np.linspace(g0.t0, g0.t1, 16)
    advective = _grid_max_abs(p.A, g0.xs(), t_probe) < _UPWIND_A_THRESHOLD
    out = []
    prev_error = None
    for lvl in range(levels):
        factor = 2**lvl
        g = Grid1D(g0.x0, g0.x1, (g0.nx - 1) * factor + 1,
                   g0.t0, g0.t1, g0.nt * (factor if advective else factor * factor))
        field = fd_solve(p, substitute(exact, {"t": g.t0}), exact, g)
        ref = eval_on_grid(exact, {"x": g.xs(), "t": g.t1})
        error = float(np.max(np.abs(field.values[:, -1] - ref)))
        order = None
        if prev_error is not None and error > 1e-13 and prev_error > 1e-13:
            order = math.log2(prev_error / error)
        out.append(ConvergenceLevel(g.dx, error, order))
        prev_error = error
    return out


@dataclass(frozen=True)
class ModeProblem:
    """Vertical-mode eigenproblem on z in [-H, 0].

    pieces: tuple of (z_lo, z_hi, N-expression in z) covering [-H, 0];
    a single expression means one piece.  Boundary conditions are
    phi(-H) = 0 (floor) and phi(0) = 0 (surface), built in.
    """

    H: float
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "H", float(self.H))
        if not self.H > 0:
            raise ValueError("H must be positive")
        norm = []
        for z_lo, z_hi, n_expr in self.pieces:
            e = _as_expr(n_expr)
            bad = free_vars(e) - {"z"}
            if bad:
                raise ValueError(f"N may only use z, found {sorted(bad)}")
            probe = eval_on_grid(e, {"z": np.linspace(float(z_lo),
                                                      float(z_hi), 33)})
            if not np.isfinite(probe).all() or np.min(probe) < -1e-12:
                raise ValueError(
                    f"N must be finite and nonnegative on [{z_lo}, {z_hi}]")
            norm.append((float(z_lo), float(z_hi), simplify(e)))
        norm.sort(key=lambda p: p[0])
        if abs(norm[0][0] + self.H) > 1e-12 or abs(norm[-1][1]) > 1e-12:
            raise ValueError("pieces must cover [-H, 0]")
        for (_, hi, _), (lo, _, _) in zip(norm, norm[1:]):
            if abs(hi - lo) > 1e-12:
                raise ValueError("pieces must be contiguous")
        object.__setattr__(self, "pieces", tuple(norm))

    @classmethod
    def constant(cls, n_bar: float, H: float) -> "ModeProblem":
        return cls(H, ((-H, 0.0, _as_expr(repr(float(n_bar)))),))


def load_profile(source) -> ModeProblem:
    """Schema: {"H": num, "N": "<expr in z>"} or
    {"H": num, "N": [{"z": [lo, hi], "expr": "..."}]}."""
    d = _load_json(source)
    H = float(d["H"])
    n = d["N"]
    if isinstance(n, str):
        return ModeProblem(H, ((-H, 0.0, n),))
    return ModeProblem(H, tuple((piece["z"][0], piece["z"][1], piece["expr"])
                                for piece in n))


@dataclass(frozen=True)
class Mode:
    index: int          # 1-based mode number (largest eigenvalue first)
    C: float            # eigenvalue
    k: float            # max-profile wavenumber N_max / C
    zs: np.ndarray      # sample grid
    shape: np.ndarray   # phi samples on zs

    def interior_zeros(self) -> int:
        vals = self.shape[1:-1]
        signs = np.sign(vals[np.abs(vals) > 1e-12 * np.max(np.abs(self.shape))])
        return int(np.sum(signs[1:] != signs[:-1]))


class _Shooter:
    """RK4 shooting for phi'' = -(N(z)/C)^2 phi from z = -H with phi = 0,
    phi' = 1.  N^2 is cached on the integration grid once; every shot for a
    new C is then pure arithmetic."""

    def __init__(self, problem: ModeProblem, nsteps: int):
        self.problem = problem
        self.segments = []
        total = problem.H
        for z_lo, z_hi, n_expr in problem.pieces:
            count = max(16, int(round(nsteps * (z_hi - z_lo) / total)))
            zs = np.linspace(z_lo, z_hi, count + 1)
            mids = 0.5 * (zs[:-1] + zs[1:])
            n_nodes = np.broadcast_to(eval_on_grid(n_expr, {"z": zs}), zs.shape)
            n_mids = np.broadcast_to(eval_on_grid(n_expr, {"z": mids}), mids.shape)
            if not (np.isfinite(n_nodes).all() and np.isfinite(n_mids).all()):
                raise ValueError("N(z) is not finite on the integration grid")
            h = (z_hi - z_lo) / count
            self.segments.append((h, n_nodes**2, n_mids**2))

    def shoot(self, C: float, record: bool = False):
        inv_c2 = 1.0 / (C * C)
        phi, psi = 0.0, 1.0
        zs_out = []
        phis_out = []
        for (h, n2_nodes, n2_mids), (z_lo, z_hi, _) in zip(self.segments,
                                                           self.problem.pieces):
            count = len(n2_mids)
            if record:
                zs_out.append(np.linspace(z_lo, z_hi, count + 1))
            rec = [phi] if record else None
            for i in range(count):
                k_lo = -n2_nodes[i] * inv_c2
                k_mid = -n2_mids[i] * inv_c2
                k_hi = -n2_nodes[i + 1] * inv_c2
                dphi1 = psi
                dpsi1 = k_lo * phi
                dphi2 = psi + 0.5 * h * dpsi1
                dpsi2 = k_mid * (phi + 0.5 * h * dphi1)
                dphi3 = psi + 0.5 * h * dpsi2
                dpsi3 = k_mid * (phi + 0.5 * h * dphi2)
                dphi4 = psi + h * dpsi3
                dpsi4 = k_hi * (phi + h * dphi3)
                phi += h / 6.0 * (dphi1 + 2 * dphi2 + 2 * dphi3 + dphi4)
                psi += h / 6.0 * (dpsi1 + 2 * dpsi2 + 2 * dpsi3 + dpsi4)
                if rec is not None:
                    rec.append(phi)
            if record:
                phis_out.append(np.array(rec))
        if record:
            zs = np.concatenate([z if i == 0 else z[1:]
                                 for i, z in enumerate(zs_out)])
            shape = np.concatenate([p if i == 0 else p[1:]
                                    for i, p in enumerate(phis_out)])
            return phi, zs, shape
        return phi

    def n_max(self) -> float:
        return math.sqrt(max(float(np.max(n2)) for _, n2, _ in self.segments))


def mode_solve(problem: ModeProblem, modes: int, *, sweep=(1e-6, 1e2),
               brackets: int = 400, nsteps: int = 2000,
               bisect_rel: float = 1e-12):
    """Largest `modes` eigenvalues C (descending) with sampled mode shapes.

    The endpoint value phi(0; C) is swept over a logarithmic C grid from the
    top of the range down; each sign change is bisected.  Raises
    ModeSearchError when the sweep is exhausted early.
    """
    if modes < 1:
        raise ValueError("modes must be >= 1")
    shooter = _Shooter(problem, nsteps)
    n_max = shooter.n_max()
    grid = np.logspace(math.log10(sweep[1]), math.log10(sweep[0]), brackets + 1)
    found = []
    c_prev = grid[0]
    f_prev = shooter.shoot(c_prev)
    for c_next in grid[1:]:
        f_next = shooter.shoot(c_next)
        if np.isfinite(f_prev) and np.isfinite(f_next) and f_prev * f_next < 0:
            c_star = _bisect(shooter.shoot, c_next, c_prev, f_next, f_prev,
                             bisect_rel)
            _, zs, shape = shooter.shoot(c_star, record=True)
            found.append(Mode(len(found) + 1, c_star,
                              n_max / c_star if c_star > 0 else math.inf,
                              zs, shape))
            if len(found) == modes:
                return found
        c_prev, f_prev = c_next, f_next
    raise ModeSearchError(len(found), modes, sweep)


def _bisect(f, lo, hi, f_lo, f_hi, rel_tol):
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if f_lo * f_mid < 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)

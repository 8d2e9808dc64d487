"""Batch command-line front end.

Subcommands: synth, check, reduce, solve, modes.  Every command writes its
outputs under --out and emits a machine-readable report; reports are
byte-identical across runs with the same inputs and --seed (wall time goes
to stderr only).  Exit codes: 0 all checks pass, 1 a check failed, 2
malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import numverify, reduction, symmetry, synth
from .expr import (
    EvalError, ParseError, ZeroSample, is_zero_sampled, parse, simplify,
    substitute, to_text,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2


@dataclass
class Check:
    name: str
    passed: bool
    max_residual: float
    witness: dict = field(default_factory=dict)
    note: str = ""

    @classmethod
    def from_sample(cls, name: str, zs: ZeroSample) -> "Check":
        return cls(name, zs.passed, zs.max_residual, zs.witness, zs.failure)

    def to_payload(self):
        out = {"name": self.name,
               "status": "PASS" if self.passed else "FAIL",
               "max_residual": self.max_residual}
        if self.witness:
            out["witness"] = {k: self.witness[k] for k in sorted(self.witness)}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class RunReport:
    command: list
    inputs: dict          # path -> sha256
    checks: list
    extra: dict = field(default_factory=dict)
    wall_time_s: float = 0.0  # console only; kept out of the serialized report

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_payload(self):
        payload = {"command": self.command,
                   "inputs": self.inputs,
                   "checks": [c.to_payload() for c in self.checks]}
        payload.update(self.extra)
        return payload


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_json(payload, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_report(report: RunReport, args):
    from pathlib import Path
    out = Path(args.out)
    if args.format == "csv":
        lines = ["name,status,max_residual"]
        for c in report.checks:
            lines.append(f"{c.name},{'PASS' if c.passed else 'FAIL'},"
                         f"{c.max_residual:.17g}")
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.csv").write_text("\n".join(lines) + "\n")
    else:
        _write_json(report.to_payload(), out / "report.json")
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] {c.name}: max residual {c.max_residual:.3e}")
    print(f"wall time: {report.wall_time_s:.2f}s", file=sys.stderr)


def _float_fmt(v: float) -> str:
    return f"{v:.17g}"


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="liewave",
        description="Symmetry workbench for u_t = A(x,t) u_2x + B(x,t) u_x "
                    "+ C(x,t) u: family synthesis, residual checks, "
                    "similarity reduction, and numerical verification.")
    ap.add_argument("--seed", type=int, default=0, help="sampling offset")
    ap.add_argument("--samples", type=int, default=100,
                    help="points per zero test")
    ap.add_argument("--tol-sym", type=float, default=1e-9,
                    help="tolerance for symmetry/system residuals")
    ap.add_argument("--tol-sol", type=float, default=1e-10,
                    help="tolerance for closed-form solution residuals")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("synth", help="synthesize a coefficient family")
    sp.add_argument("family_json")

    cp = sub.add_parser("check", help="residual-check a PDE against a "
                                      "generator and/or a closed form")
    cp.add_argument("pde_json")
    cp.add_argument("--gen", help="generator JSON file")
    cp.add_argument("--solution", help="closed form u(x,t) as expression text")

    rp = sub.add_parser("reduce", help="similarity-reduce a PDE")
    rp.add_argument("pde_json")
    rp.add_argument("ansatz_json")

    vp = sub.add_parser("solve", help="finite-difference run against a "
                                      "closed form")
    vp.add_argument("pde_json")
    vp.add_argument("--ic", required=True,
                    help="closed form u(x,t); supplies initial and boundary "
                         "values and the error reference")
    vp.add_argument("--nx", type=int, default=41)
    vp.add_argument("--nt", type=int, default=0,
                    help="0 = choose from the stability bound")
    vp.add_argument("--levels", type=int, default=0,
                    help=">= 3 runs a refinement study")

    mp = sub.add_parser("modes", help="vertical-mode eigenvalues")
    mp.add_argument("profile_json")
    mp.add_argument("--modes", type=int, default=5)
    return ap


def cmd_synth(args) -> int:
    from pathlib import Path
    t0 = time.monotonic()
    inp = synth.load_family(args.family_json)
    out = Path(args.out)
    checks = []
    extra = {}
    opts = dict(n=args.samples, seed=args.seed)

    if isinstance(inp, synth.RossbyFamilyInput):
        rep = synth.rossby_residual_report(inp, tol=args.tol_sym, **opts)
        pde = synth.synth_rossby(inp)
        gen = inp.generator()
        for mode_rep in (rep.derived, rep.as_printed):
            expected = "" if mode_rep.mode == synth.DERIVED else \
                "falsification exhibit; expected to fail for c != 0"
            for i, zs in enumerate(mode_rep.residuals, start=1):
                checks.append(Check.from_sample(
                    f"rossby_{mode_rep.mode.lower()}_determining_{i}", zs))
                if expected:
                    checks[-1].note = expected
        extra["mode"] = inp.mode
    else:
        if isinstance(inp, synth.WaveFamilyInput):
            pde = synth.synth_wave(inp)
            solution = synth.wave_solution(inp)
            ansatz = inp.ansatz()
            system = synth.wave_consistency_residuals(pde, ansatz)
            names = ("solution_system_1", "solution_system_2",
                     "determining_A", "determining_B", "determining_C")
        else:
            pde = synth.synth_oscillator(inp)
            solution = synth.oscillator_solution(inp)
            ansatz = inp.ansatz()
            system = (synth.oscillator_defining_relations(pde, ansatz)
                      + synth.oscillator_consistency_residuals(pde, ansatz))
            names = ("defining_A", "defining_B", "defining_C",
                     "determining_B", "determining_C")
        gen = ansatz.generator()
        box = pde.domain.box()
        from .expr import diff
        resid = simplify(diff(solution, "t") - pde.A * diff(diff(solution, "x"), "x")
                         - pde.B * diff(solution, "x") - pde.C * solution)
        checks.append(Check.from_sample(
            "solution_residual",
            is_zero_sampled(resid, box, tol=args.tol_sol, **opts)))
        for name, r in zip(names, system):
            checks.append(Check.from_sample(
                name, is_zero_sampled(r, box, tol=args.tol_sym, **opts)))
        for name, zs in zip(("symmetry_A", "symmetry_B", "symmetry_C"),
                            symmetry.symmetry_check(pde, gen, tol=args.tol_sym,
                                                    **opts)):
            checks.append(Check.from_sample(name, zs))
        (out / "solution.txt").parent.mkdir(parents=True, exist_ok=True)
        (out / "solution.txt").write_text(to_text(solution) + "\n")

    _write_json(pde.to_dict(), out / "pde.json")
    _write_json(gen.to_dict(), out / "gen.json")
    report = RunReport([args.cmd, args.family_json],
                       {args.family_json: _digest(args.family_json)},
                       checks, extra, time.monotonic() - t0)
    _write_report(report, args)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_check(args) -> int:
    t0 = time.monotonic()
    pde = symmetry.load_pde(args.pde_json)
    inputs = {args.pde_json: _digest(args.pde_json)}
    checks = []
    opts = dict(n=args.samples, seed=args.seed)
    if not args.gen and not args.solution:
        raise ValueError("nothing to check: pass --gen and/or --solution")
    if args.gen:
        gen = symmetry.load_generator(args.gen)
        inputs[args.gen] = _digest(args.gen)
        for name, zs in zip(("determining_A", "determining_B", "determining_C"),
                            symmetry.symmetry_check(pde, gen, tol=args.tol_sym,
                                                    **opts)):
            checks.append(Check.from_sample(name, zs))
    if args.solution:
        from .expr import diff
        u = parse(args.solution)
        resid = simplify(diff(u, "t") - pde.A * diff(diff(u, "x"), "x")
                         - pde.B * diff(u, "x") - pde.C * u)
        checks.append(Check.from_sample(
            "solution_residual",
            is_zero_sampled(resid, pde.domain.box(), tol=args.tol_sol, **opts)))
    report = RunReport([args.cmd, args.pde_json], inputs, checks, {},
                       time.monotonic() - t0)
    _write_report(report, args)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


def cmd_reduce(args) -> int:
    from pathlib import Path
    t0 = time.monotonic()
    pde = symmetry.load_pde(args.pde_json)
    ansatz = reduction.load_ansatz(args.ansatz_json)
    result = reduction.similarity_reduce(pde, ansatz)
    cls = reduction.classify_target(result, pde.domain, n=args.samples,
                                    tol=args.tol_sym, seed=args.seed)
    payload = result.to_dict()
    payload["classification"] = cls.kind
    if cls.k is not None:
        payload["k"] = cls.k
    _write_json(payload, Path(args.out) / "reduction.json")
    report = RunReport([args.cmd, args.pde_json, args.ansatz_json],
                       {args.pde_json: _digest(args.pde_json),
                        args.ansatz_json: _digest(args.ansatz_json)},
                       [], {"classification": str(cls)},
                       time.monotonic() - t0)
    _write_report(report, args)
    print(f"classification: {cls}")
    return EXIT_OK


def cmd_solve(args) -> int:
    from pathlib import Path
    t0 = time.monotonic()
    pde = symmetry.load_pde(args.pde_json)
    closed = parse(args.ic)
    dom = pde.domain
    nt = args.nt
    if nt <= 0:
        nt = _auto_nt(pde, dom, args.nx)
    grid = numverify.Grid1D(dom.x[0], dom.x[1], args.nx, dom.t[0], dom.t[1], nt)
    ic = simplify(substitute(closed, {"t": dom.t[0]}))
    fld = numverify.fd_solve(pde, ic, closed, grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_solution_csv(out / "solution.csv", fld, closed)
    ref = numverify.eval_on_grid(closed, {"x": grid.xs(), "t": grid.t1})
    err = float(np.max(np.abs(fld.values[:, -1] - ref)))
    extra = {"grid": {"nx": grid.nx, "nt": grid.nt},
             "final_time_error": err}
    if args.levels >= 3:
        levels = numverify.convergence_order(pde, closed, grid, args.levels)
        extra["convergence"] = [
            {"dx": lv.dx, "error": lv.error,
             "order": lv.order if lv.order is not None else "undefined"}
            for lv in levels]
    report = RunReport([args.cmd, args.pde_json],
                       {args.pde_json: _digest(args.pde_json)},
                       [], extra, time.monotonic() - t0)
    _write_report(report, args)
    print(f"final-time L_inf error: {err:.3e}")
    return EXIT_OK


def _auto_nt(pde, dom, nx: int) -> int:
    dx = (dom.x[1] - dom.x[0]) / (nx - 1)
    span = dom.t[1] - dom.t[0]
    xs = np.linspace(dom.x[0], dom.x[1], nx)
    ts = np.linspace(dom.t[0], dom.t[1], 16)
    max_a = numverify._grid_max_abs(pde.A, xs, ts)
    max_b = numverify._grid_max_abs(pde.B, xs, ts)
    if max_a >= 1e-14:
        dt = dx * dx / (2.0 * max_a)
    elif max_b > 0:
        dt = 0.5 * dx / max_b
    else:
        dt = span / 16
    return max(1, int(math.ceil(span / dt)))


def _write_solution_csv(path, fld, closed):
    xs = fld.grid.xs()
    rows = ["x,t,u_numeric,u_closed,abs_err"]
    for j, t in enumerate(fld.grid.ts()):
        ref = np.broadcast_to(
            numverify.eval_on_grid(closed, {"x": xs, "t": float(t)}), xs.shape)
        for i, x in enumerate(xs):
            u = fld.values[i, j]
            rows.append(",".join(_float_fmt(v)
                                 for v in (x, t, u, ref[i], abs(u - ref[i]))))
    path.write_text("\n".join(rows) + "\n")


def cmd_modes(args) -> int:
    from pathlib import Path
    t0 = time.monotonic()
    problem = numverify.load_profile(args.profile_json)
    try:
        modes = numverify.mode_solve(problem, args.modes)
    except numverify.ModeSearchError as err:
        report = RunReport([args.cmd, args.profile_json],
                           {args.profile_json: _digest(args.profile_json)},
                           [Check("mode_search", False, float("inf"),
                                  note=str(err))], {},
                           time.monotonic() - t0)
        _write_report(report, args)
        return EXIT_CHECK_FAILED
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["m,C_m,k_m"]
    for m in modes:
        rows.append(f"{m.index},{_float_fmt(m.C)},{_float_fmt(m.k)}")
    (out / "modes.csv").write_text("\n".join(rows) + "\n")
    checks = [Check(f"mode_{m.index}_node_count",
                    m.interior_zeros() == m.index - 1,
                    float(abs(m.interior_zeros() - (m.index - 1))))
              for m in modes]
    report = RunReport([args.cmd, args.profile_json],
                       {args.profile_json: _digest(args.profile_json)},
                       checks, {"eigenvalues": [m.C for m in modes]},
                       time.monotonic() - t0)
    _write_report(report, args)
    return EXIT_OK if report.all_passed else EXIT_CHECK_FAILED


_COMMANDS = {"synth": cmd_synth, "check": cmd_check, "reduce": cmd_reduce,
             "solve": cmd_solve, "modes": cmd_modes}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except (ParseError, EvalError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""``cliquegossip`` command-line front end.

Exit codes: 0 success, 1 domain error, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import graph, scheduler, sim, spectrum
from .graph import CoverageError, GraphError, ParseError
from .protocol import TransitionError
from .scheduler import InfeasibleError, Schedule, ScheduleError
from .sim import SimulationError
from .spectrum import RateUndefined, SpectrumError

DEFAULT_SEED = 42
DOMAIN_ERRORS = (GraphError, ScheduleError, SpectrumError, SimulationError, TransitionError)


class _Out:
    """Collects report lines; writes them to ``--output`` or stdout."""

    def __init__(self, path: str | None):
        self.path = path
        self.lines: list[str] = []

    def __call__(self, line: str = "") -> None:
        self.lines.append(line)

    def flush(self) -> None:
        text = "\n".join(self.lines) + "\n"
        if self.path:
            Path(self.path).write_text(text)
        else:
            sys.stdout.write(text)


def _load(args):
    """Coverage, index schedule and line graph for ``--input``.

    Files produced by the ``schedule`` subcommand (they carry ``steps``) are
    read as a synthesized schedule; otherwise the schedule comes from
    ``--schedule``, the file's ``schedule`` field, or coverage order.
    """
    if not args.input:
        raise ParseError("--input is required")
    try:
        g, cliques, doc = graph.load_instance(args.input)
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc.strerror}") from None
    if "steps" in doc and getattr(args, "schedule", None) is None:
        _, cov, sched = Schedule.of(cliques).to_coverage(g.n)
    else:
        cov = graph.validate_coverage(g, cliques)
        raw = getattr(args, "schedule", None)
        if raw is not None:
            try:
                entries = [int(s) for s in raw.split(",") if s.strip()]
            except ValueError:
                raise ParseError(f"--schedule must be comma-separated integers, got {raw!r}") from None
        else:
            entries = doc.get("schedule") or list(range(1, cov.d + 1))
        bad = [e for e in entries if not 1 <= e <= cov.d]
        if bad:
            raise ScheduleError(f"schedule entries {bad} outside 1..{cov.d}")
        sched = Schedule.of(entries)
    return cov, sched, graph.line_graph(cov)


def _fmt(v: float) -> str:
    return "%.10g" % v


# --- subcommands -------------------------------------------------------------

def cmd_validate(args, out: _Out) -> int:
    try:
        g, cliques, _ = graph.load_instance(args.input)
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc.strerror}") from None
    try:
        cov = graph.validate_coverage(g, cliques)
    except CoverageError as exc:
        out("valid: false")
        out(f"reason: {exc.reason}")
        out(f"detail: {exc}")
        out.flush()
        return 1
    lg = graph.line_graph(cov)
    out("valid: true")
    out(f"n: {g.n}")
    out(f"d: {cov.d}")
    out("line_graph_edges: " + " ".join(f"{a}-{b}" for a, b in lg.edges))
    out(f"line_graph_connected: {str(lg.is_connected()).lower()}")
    out("cyclic_cliques: " + " ".join(str(v) for v in sorted(graph.cyclic_vertices(lg))))
    out.flush()
    return 0


def cmd_spectrum(args, out: _Out) -> int:
    cov, sched, lg = _load(args)
    trans = spectrum.averaging_transitions(cov)
    f = spectrum.period_matrix(sched, trans)
    rep = spectrum.spectrum_report(f.matrix, args.tol)
    out("re,im,modulus")
    for ev in rep.eigenvalues:
        out(f"{_fmt(ev.real + 0.0)},{_fmt(ev.imag + 0.0)},{_fmt(abs(ev))}")
    out(f"# schedule: {','.join(str(e) for e in sched)}")
    out(f"# rho: {_fmt(rep.rho)}")
    out(f"# lambda2: {'none' if rep.lambda2 is None else _fmt(rep.lambda2)}")
    try:
        out(f"# rate: {_fmt(spectrum.convergence_rate(f, args.tol))}")
    except RateUndefined as exc:
        out(f"# rate: undefined ({exc})")
    verdict = spectrum.check_convergence(f, tol=args.tol)
    out(f"# convergent: {str(verdict.convergent).lower()}")
    for name, ok in verdict.conditions.items():
        out(f"# {name}: {str(ok).lower()}")
    if args.swap is not None:
        cond = spectrum.swap_condition(cov, lg, sched, args.swap)
        swapped = spectrum.period_matrix(scheduler.apply_swap(sched, args.swap), trans)
        equal = spectrum.spectra_equal(rep.eigenvalues, spectrum.eigenvalues(swapped.matrix))
        out(f"# swap {args.swap}: {cond.value}")
        out(f"# spectra_equal: {str(equal).lower()}")
    out.flush()
    return 0


def _synthesize(args) -> tuple[Schedule, dict]:
    if args.factors:
        try:
            factors = [int(v) for v in args.factors.split(",")]
        except ValueError:
            raise ParseError(f"--factors must be comma-separated integers, got {args.factors!r}") from None
        if len(factors) == 2:
            return scheduler.lattice_schedule(args.n, *factors), {"factors": factors}
        return scheduler.multi_factor_schedule(args.n, factors), {"factors": factors}
    if args.m is None:
        raise ScheduleError("give --m or --factors")
    return scheduler.clique_select(range(1, args.n + 1), args.m), {"m": args.m}


def cmd_schedule(args) -> int:
    """Schedule JSON goes to ``--output`` (or stdout); the step count and
    verification verdict go to stdout (stderr when JSON is on stdout)."""
    if args.n is None:
        raise ScheduleError("--n is required")
    sched, params = _synthesize(args)
    doc = {"n": args.n, **params, "steps": sched.period, "cliques": sched.cliques()}
    text = json.dumps(doc) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        info = sys.stdout
    else:
        sys.stdout.write(text)
        info = sys.stderr
    print(f"steps: {sched.period}", file=info)
    if args.verify:
        _, cov, idx = sched.to_coverage(args.n)
        rng = np.random.default_rng(args.seed)
        x0 = [Fraction(int(v), 1000) for v in rng.integers(0, 1000, args.n)]
        traj = sim.run(idx, spectrum.averaging_transitions(cov), x0, sched.period, "rational")
        mean = sum(x0, Fraction(0)) / args.n
        ok = all(v == mean for v in traj.states[-1])
        print(f"verify: {'pass' if ok else 'fail'} (mean {mean})", file=info)
        if not ok:
            return 1
    return 0


def _initial(spec: str, n: int, mode: str, seed: int) -> list:
    rng = np.random.default_rng(seed)
    if spec == "e1":
        x = [1] + [0] * (n - 1)
    elif spec == "const":
        x = [1] * n
    elif spec == "random":
        if mode == "rational":
            return [Fraction(int(v), 1000) for v in rng.integers(0, 1000, n)]
        return list(rng.random(n))
    else:
        try:
            x = [Fraction(s.strip()) for s in spec.split(",")]
        except ValueError:
            raise ParseError(f"cannot parse --x0 {spec!r}") from None
        if len(x) != n:
            raise SimulationError(f"--x0 has {len(x)} values, expected {n}")
    return [Fraction(v) for v in x] if mode == "rational" else [float(v) for v in x]


def _fitted_rate(err: list, T: int) -> float | None:
    e = np.asarray([float(v) for v in err])
    t0 = max(1, T // 20)
    good = np.nonzero(e[t0:] > 1e-26)[0]
    if good.size < 2:
        return None
    t1 = t0 + int(good[-1])
    if t1 - t0 < 1 or np.any(e[t0:t1 + 1] <= 0):
        return None
    return float(np.exp(sim.fit_decay_rate(e, t0, t1) / 2))


def cmd_simulate(args, out_path: str | None) -> int:
    cov, sched, lg = _load(args)
    if args.multi:
        mc = sim.greedy_classes(cov, lg)
        trans, sched = mc.transitions(cov), mc.schedule()
    else:
        trans = spectrum.averaging_transitions(cov)
    x0 = _initial(args.x0, cov.graph.n, args.mode, args.seed)
    traj = sim.run(sched, trans, x0, args.steps, args.mode)
    if out_path:
        sim.write_csv(traj, out_path)
    ct = sim.consensus_time(traj)
    print(f"consensus_time: {ct if ct is not None else f'none within {args.steps}'}")
    rate = None if ct is not None else _fitted_rate(sim.error_trajectory(traj), args.steps)
    print(f"fitted_rate: {'undefined' if rate is None else _fmt(rate)}")
    if args.audit:
        if args.mode != "rational":
            raise SimulationError("--audit needs --mode rational")
        primes = sorted(set().union(*sim.rational_audit(traj)))
        print("denominator_primes: {" + ",".join(map(str, primes)) + "}")
    return 0


def cmd_classes(args, out: _Out) -> int:
    cov, _, lg = _load(args)
    mc = sim.greedy_classes(cov, lg)
    b = sim.class_bounds(cov, lg)
    out(f"greedy_classes: {len(mc)}")
    for k, cls in enumerate(mc.classes, start=1):
        out(f"class {k}: {' '.join(map(str, cls))}")
    out(f"max_degree: {b.max_degree}")
    if b.chi is None:
        out(f"notice: d={b.d} exceeds brute-force limit {sim.BRUTE_FORCE_LIMIT}; exact chi and alpha skipped")
        out(f"bounds: chi <= {min(b.max_degree, b.greedy) if not b.special else b.greedy}")
    else:
        out(f"chi: {b.chi}")
        out(f"alpha: {b.alpha}")
        out(f"bounds: {b.lower} <= {b.chi} <= {b.max_degree}")
        holds = b.sandwich_holds()
        out(f"sandwich: {'n/a (' + b.special + ' line graph)' if holds is None else str(holds).lower()}")
    out.flush()
    return 0


# --- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="instance JSON")
    common.add_argument("--output", help="output file (default stdout)")
    common.add_argument("--mode", choices=["float", "rational"], default="float")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=spectrum.DEFAULT_TOL)

    p = argparse.ArgumentParser(prog="cliquegossip", description="Clique-gossip protocol toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a clique coverage")
    sp = sub.add_parser("spectrum", parents=[common], help="period-matrix spectrum")
    sp.add_argument("--schedule", help="1-based clique indices, comma separated")
    sp.add_argument("--swap", type=int, help="also test swapping entries s and s+1")
    sc = sub.add_parser("schedule", parents=[common], help="synthesize a finite-time schedule")
    sc.add_argument("--n", type=int)
    sc.add_argument("--m", type=int)
    sc.add_argument("--factors", help="comma-separated factors of n")
    sc.add_argument("--verify", action="store_true")
    sm = sub.add_parser("simulate", parents=[common], help="simulate a trajectory")
    sm.add_argument("--schedule", help="1-based clique indices, comma separated")
    sm.add_argument("--x0", default="random", help="e1 | random | const | comma list")
    sm.add_argument("--steps", type=int, default=100)
    sm.add_argument("--audit", action="store_true", help="report denominator primes")
    sm.add_argument("--multi", action="store_true", help="use greedy multi-clique classes")
    sub.add_parser("classes", parents=[common], help="multi-clique class report")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args, args.output)
        if args.command == "schedule":
            return cmd_schedule(args)
        handler = {"validate": cmd_validate, "spectrum": cmd_spectrum, "classes": cmd_classes}
        if not args.input:
            raise ParseError("--input is required")
        return handler[args.command](args, _Out(args.output))
    except ParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"error: infeasible: {exc.reason}: {exc}", file=sys.stderr)
        return 1
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Trajectory simulation, error metrics and multi-clique classes."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .graph import CliqueCoverage, LineGraph
from .protocol import TransitionMatrix, apply, multi_transition
from .scheduler import Schedule, ScheduleError, factorize

FLOAT_CONSENSUS_TOL = 1e-12
BRUTE_FORCE_LIMIT = 15


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    states: list            # x(0..T): float ndarrays or lists of Fraction
    mode: str               # "float" | "rational"
    schedule: Schedule

    @property
    def T(self) -> int:
        return len(self.states) - 1

    def array(self) -> np.ndarray:
        return np.array([[float(v) for v in s] for s in self.states])


def _fast_path(sched: Schedule, transitions: Mapping):
    """CSR description of a pure b=1 averaging schedule, or ``None``."""
    step_ptr, part_ptr, members = [0], [0], []
    for e in sched:
        t = transitions[e]
        if t.b != 1 or not t.exact:
            return None
        for p in t.parts:
            members.extend(v - 1 for v in p.members)
            part_ptr.append(len(members))
        step_ptr.append(len(part_ptr) - 1)
    as_arr = lambda a: np.asarray(a, dtype=np.intp)  # noqa: E731
    return as_arr(step_ptr), as_arr(part_ptr), as_arr(members)


def run(sched: Schedule, transitions: Mapping, x0, T: int, mode: str = "float") -> Trajectory:
    """Simulate ``x(t+1) = M_{sigma(t)} x(t)`` for ``T`` steps.

    ``transitions`` maps each schedule entry to its :class:`TransitionMatrix`.
    Rational mode converts ``x0`` to fractions and requires averaging
    transitions; float averaging schedules go through the compiled kernel.
    """
    if T < 0:
        raise SimulationError("horizon T must be >= 0")
    for e in set(sched):
        if e not in transitions:
            raise ScheduleError(f"schedule entry {e!r} has no transition")
    first = transitions[sched.entries[0]]
    size = first.n * first.b
    if len(x0) != size:
        raise SimulationError(f"x0 has length {len(x0)}, expected {size}")

    if mode == "rational":
        x = [Fraction(v) for v in x0]
        states = [x]
        for t in range(T):
            x = apply(transitions[sched.at(t)], x)
            states.append(x)
        return Trajectory(states, mode, sched)
    if mode != "float":
        raise SimulationError(f"unknown mode {mode!r}")

    x = np.asarray(x0, dtype=float)
    fast = _fast_path(sched, transitions)
    if fast is not None:
        arr = kernels.averaging_run(x, *fast, T)
        return Trajectory(list(arr), mode, sched)
    states = [x]
    for t in range(T):
        x = apply(transitions[sched.at(t)], x)
        states.append(x)
    return Trajectory(states, mode, sched)


def error_trajectory(traj: Trajectory) -> list:
    """``e(t) = sum_i (x_i(t) - xbar)^2`` with ``xbar`` the mean of ``x(0)``
    over all nodes. Exact (fractions) in rational mode."""
    if traj.mode == "rational":
        x0 = traj.states[0]
        mean = sum(x0, Fraction(0)) / len(x0)
        return [sum(((v - mean) ** 2 for v in s), Fraction(0)) for s in traj.states]
    X = np.asarray(traj.states, dtype=float)
    mean = X[0].mean()
    return list(((X - mean) ** 2).sum(axis=1))


def consensus_time(traj: Trajectory, tol: float = FLOAT_CONSENSUS_TOL) -> int | None:
    """First recorded step with all components equal (exactly, in rational
    mode; within ``tol`` on max - min in float mode)."""
    for t, s in enumerate(traj.states):
        if traj.mode == "rational":
            if all(v == s[0] for v in s):
                return t
        elif float(np.max(s) - np.min(s)) <= tol:
            return t
    return None


def fit_decay_rate(values: Sequence[float], t0: int, t1: int) -> float:
    """Least-squares slope of ``log values[t]`` over ``t0 <= t <= t1``."""
    t = np.arange(t0, t1 + 1)
    y = np.log(np.asarray(values, dtype=float)[t0:t1 + 1])
    return float(np.polyfit(t, y, 1)[0])


def log_deviation(sched: Schedule, transitions: Mapping, x0, T: int) -> np.ndarray:
    """``log ||x(t) - xbar 1||`` for ``t = 0..T`` without float underflow.

    The deviation is propagated on its own, re-centered (averaging keeps
    the sum) and renormalized every step, with the log norms accumulated.
    Entries after exact consensus are ``-inf``.
    """
    if any(not transitions[e].exact for e in set(sched)):
        raise SimulationError("log_deviation needs sum-preserving averaging transitions")
    y = np.asarray(x0, dtype=float)
    y = y - y.mean()
    out = np.full(T + 1, -np.inf)
    nrm = np.linalg.norm(y)
    if nrm == 0:
        return out
    acc = np.log(nrm)
    y /= nrm
    out[0] = acc
    for t in range(T):
        y = apply(transitions[sched.at(t)], y)
        y -= y.mean()
        nrm = np.linalg.norm(y)
        if nrm == 0:
            break
        acc += np.log(nrm)
        y /= nrm
        out[t + 1] = acc
    return out


def rational_audit(traj: Trajectory) -> list[frozenset[int]]:
    """Per step, the primes dividing any reduced state denominator."""
    if traj.mode != "rational":
        raise SimulationError("rational_audit needs a rational-mode trajectory")
    out = []
    cache: dict[int, frozenset[int]] = {1: frozenset()}
    for s in traj.states:
        primes: set[int] = set()
        for v in s:
            q = v.denominator
            if q not in cache:
                cache[q] = frozenset(p for p, _ in factorize(q))
            primes |= cache[q]
        out.append(frozenset(primes))
    return out


# --- multi-clique coverages ----------------------------------------------

@dataclass(frozen=True)
class MultiCliqueCoverage:
    classes: tuple[tuple[int, ...], ...]     # 1-based clique indices per class

    def __len__(self) -> int:
        return len(self.classes)

    def is_valid(self, cov: CliqueCoverage, lg: LineGraph) -> bool:
        flat = [k for cls in self.classes for k in cls]
        if sorted(set(flat)) != list(range(1, cov.d + 1)):
            return False
        return all(not lg.adjacent(a, b) for cls in self.classes
                   for i, a in enumerate(cls) for b in cls[i + 1:])

    def transitions(self, cov: CliqueCoverage) -> dict[int, TransitionMatrix]:
        """Simultaneous averaging transition per class, keyed by 1-based class index."""
        return {k: multi_transition([cov.clique(c) for c in cls], cov.graph.n)
                for k, cls in enumerate(self.classes, start=1)}

    def schedule(self) -> Schedule:
        return Schedule(tuple(range(1, len(self.classes) + 1)))


def greedy_classes(cov: CliqueCoverage, lg: LineGraph) -> MultiCliqueCoverage:
    """First-fit coloring of the line graph in clique-index order."""
    color: dict[int, int] = {}
    for v in range(1, lg.d + 1):
        taken = {color[w] for w in lg.neighbors(v) if w in color}
        c = 0
        while c in taken:
            c += 1
        color[v] = c
    k = max(color.values()) + 1
    classes = tuple(tuple(v for v in range(1, lg.d + 1) if color[v] == c) for c in range(k))
    return MultiCliqueCoverage(classes)


def _check_limit(lg: LineGraph) -> None:
    if lg.d > BRUTE_FORCE_LIMIT:
        raise SimulationError(f"brute force limited to d <= {BRUTE_FORCE_LIMIT}, got d={lg.d}")


def chromatic_number(lg: LineGraph) -> int:
    _check_limit(lg)
    return kernels.chromatic_number(lg.adjacency_masks())


def independence_number(lg: LineGraph) -> int:
    _check_limit(lg)
    return kernels.independence_number(lg.adjacency_masks())


@dataclass(frozen=True)
class ClassBounds:
    d: int
    alpha: int | None
    chi: int | None
    max_degree: int
    greedy: int
    special: str | None         # "complete" | "odd-cycle" | None

    @property
    def lower(self) -> Fraction | None:
        return None if self.alpha is None else Fraction(self.d, self.alpha)

    def sandwich_holds(self) -> bool | None:
        if self.special or self.chi is None:
            return None
        return self.lower <= self.chi <= self.max_degree


def class_bounds(cov: CliqueCoverage, lg: LineGraph) -> ClassBounds:
    """Exact class index (when d is small enough) with its degree bounds.

    Complete and odd-cycle line graphs are flagged: their class index is
    ``d`` and 3 respectively, outside the degree upper bound.
    """
    special = "complete" if lg.is_complete() else (
        "odd-cycle" if lg.is_odd_cycle() else None)
    small = lg.d <= BRUTE_FORCE_LIMIT
    return ClassBounds(
        d=lg.d,
        alpha=independence_number(lg) if small else None,
        chi=chromatic_number(lg) if small else None,
        max_degree=lg.max_degree,
        greedy=len(greedy_classes(cov, lg)),
        special=special,
    )


def write_csv(traj: Trajectory, path: str | Path) -> None:
    """``t,x_1,...,x_n,e`` rows; exact ``p/q`` in rational mode."""
    err = error_trajectory(traj)
    n = len(traj.states[0])
    fmt = (lambda v: f"{v.numerator}/{v.denominator}") if traj.mode == "rational" else (lambda v: "%.17g" % v)  # noqa: E731
    lines = [",".join(["t"] + [f"x_{i}" for i in range(1, n + 1)] + ["e"])]
    for t, (s, e) in enumerate(zip(traj.states, err)):
        lines.append(",".join([str(t)] + [fmt(v) for v in s] + [fmt(e)]))
    Path(path).write_text("\n".join(lines) + "\n")

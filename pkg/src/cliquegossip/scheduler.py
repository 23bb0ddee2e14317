"""Periodic clique schedules and finite-time averaging constructions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil, gcd, prod
from numbers import Integral
from typing import Iterable, Sequence, Union

from .graph import CliqueCoverage, Graph, union_of_cliques, validate_coverage

Entry = Union[int, tuple[int, ...]]


class ScheduleError(ValueError):
    pass


class InfeasibleError(ScheduleError):
    """``reason`` is ``"non-divisible"`` or ``"extra-prime"``."""

    def __init__(self, n: int, m: int, reason: str):
        if reason == "non-divisible":
            msg = f"n={n} is not divisible by m={m}"
        else:
            extra = sorted(set(p for p, _ in factorize(n)) - set(p for p, _ in factorize(m)))
            msg = f"n={n} has prime factor(s) {extra} not dividing m={m}"
        super().__init__(msg)
        self.n, self.m, self.reason = n, m, reason


@dataclass(frozen=True)
class Schedule:
    """Finite clique sequence, read periodically: ``sigma(t) = entries[t % d]``.

    Entries are 1-based coverage indices, or sorted node tuples for
    synthesized schedules.
    """
    entries: tuple[Entry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ScheduleError("schedule must have at least one entry")

    @classmethod
    def of(cls, entries: Iterable) -> "Schedule":
        out = []
        for e in entries:
            out.append(int(e) if isinstance(e, Integral) else tuple(sorted(int(v) for v in e)))
        return cls(tuple(out))

    @property
    def period(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def at(self, t: int) -> Entry:
        return self.entries[t % len(self.entries)]

    @property
    def synthesized(self) -> bool:
        return isinstance(self.entries[0], tuple)

    def cliques(self) -> list[list[int]]:
        if not self.synthesized:
            raise ScheduleError("coverage-bound schedule has no inline node sets")
        return [list(e) for e in self.entries]

    def to_coverage(self, n: int | None = None) -> tuple[Graph, CliqueCoverage, "Schedule"]:
        """Coverage over the union of the schedule's clique subgraphs, plus the
        equivalent index-based schedule (cliques numbered by first use)."""
        if not self.synthesized:
            raise ScheduleError("schedule is already bound to a coverage")
        order: dict[tuple[int, ...], int] = {}
        for e in self.entries:
            order.setdefault(e, len(order) + 1)
        cliques = list(order)
        if n is None:
            n = max(v for c in cliques for v in c)
        g = union_of_cliques(n, cliques)
        cov = validate_coverage(g, cliques)
        return g, cov, Schedule(tuple(order[e] for e in self.entries))


def apply_swap(sched: Schedule, s: int) -> Schedule:
    """Exchange entries ``s`` and ``s + 1`` (1-based)."""
    d = sched.period
    if not 1 <= s <= d - 1:
        raise ScheduleError(f"swap position {s} outside 1..{d - 1}")
    e = list(sched.entries)
    e[s - 1], e[s] = e[s], e[s - 1]
    return Schedule(tuple(e))


# --- number theory -------------------------------------------------------

def factorize(n: int) -> list[tuple[int, int]]:
    if n < 2:
        raise ValueError(f"factorize needs n >= 2, got {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def infeasibility_reason(n: int, m: int) -> str | None:
    if n % m:
        return "non-divisible"
    if set(p for p, _ in factorize(n)) != set(p for p, _ in factorize(m)):
        return "extra-prime"
    return None


def regular_feasible(n: int, m: int) -> bool:
    """Whether some m-regular averaging schedule reaches consensus on n nodes
    in finite time: ``m | n`` and both share the same prime factors."""
    return infeasibility_reason(n, m) is None


def _require_feasible(n: int, m: int) -> None:
    if m < 2 or n < m:
        raise ScheduleError(f"need n >= m >= 2, got n={n}, m={m}")
    reason = infeasibility_reason(n, m)
    if reason:
        raise InfeasibleError(n, m, reason)


def delta(n: int, m: int) -> int:
    _require_feasible(n, m)
    s = dict(factorize(n))
    return max(ceil(s[p] / r) for p, r in factorize(m))


def min_steps(n: int, m: int) -> int:
    return delta(n, m) * n // m


# --- constructions -------------------------------------------------------

def _clique_select(nodes: Sequence[int], m: int) -> list[tuple[int, ...]]:
    n = len(nodes)
    n1 = n // m
    if n1 == 1:
        return [tuple(sorted(nodes))]
    blocks = [tuple(sorted(nodes[m * i:m * (i + 1)])) for i in range(n1)]
    m1 = next(b for b in range(1, m + 1) if (n1 * b) % m == 0)
    n2 = m // m1
    out = list(blocks)
    for j in range(n2):
        transversal = [v for i in range(n1) for v in nodes[m * i + m1 * j:m * i + m1 * (j + 1)]]
        out.extend(_clique_select(transversal, m))
    return out


def clique_select(nodes: Sequence[int], m: int) -> Schedule:
    """Fastest m-regular finite-time averaging schedule on ``nodes``.

    Consecutive blocks of ``m`` nodes are averaged first; then each transversal
    set, made of the ``j``-th run of ``m1`` nodes from every block, is handled
    recursively. The result has ``delta(n, m) * n / m`` cliques of size ``m``.
    """
    nodes = [int(v) for v in nodes]
    if len(set(nodes)) != len(nodes):
        raise ScheduleError("node list has duplicates")
    _require_feasible(len(nodes), m)
    return Schedule(tuple(_clique_select(nodes, m)))


def lattice_schedule(n: int, r1: int, r2: int) -> Schedule:
    """``r2`` consecutive blocks of size ``r1``, then ``r1`` strided sets of size ``r2``."""
    if r1 < 2 or r2 < 2:
        raise ScheduleError("lattice factors must be >= 2")
    if n != r1 * r2:
        raise ScheduleError(f"n={n} != r1*r2={r1 * r2}")
    rows = [tuple(range(r1 * (p - 1) + 1, r1 * p + 1)) for p in range(1, r2 + 1)]
    cols = [tuple(range(q, r1 * (r2 - 1) + q + 1, r1)) for q in range(1, r1 + 1)]
    return Schedule(tuple(rows + cols))


def multi_factor_schedule(n: int, factors: Sequence[int]) -> Schedule:
    """Lattice schedule for ``n = r_1 ... r_k``.

    Node ``v`` sits at mixed-radix coordinates of ``v - 1`` (radix ``r_1``
    least significant). Phase ``i`` averages along coordinate ``i``; cliques
    within a phase are ordered by smallest member.
    """
    factors = [int(r) for r in factors]
    if not factors or any(r < 2 for r in factors):
        raise ScheduleError("factors must all be >= 2")
    if prod(factors) != n:
        raise ScheduleError(f"product of factors {factors} is {prod(factors)}, not n={n}")
    strides = [prod(factors[:i]) for i in range(len(factors))]
    out = []
    for r, stride in zip(factors, strides):
        phase = []
        for v in range(n):
            if (v // stride) % r == 0:
                phase.append(tuple(v + stride * k + 1 for k in range(r)))
        out.extend(sorted(phase))
    return Schedule(tuple(out))


def multi_factor_length(factors: Sequence[int]) -> int:
    total = prod(factors)
    return sum(total // r for r in factors)


# --- exhaustive lower-bound search ---------------------------------------
#
# States are kept as exact integers scaled by ``scale = den * m**max_len``:
# every value after t <= max_len averaging steps is a multiple of 1/scale, so
# the division by m inside an average is always exact.

def _canonical_rows(rows: Sequence[tuple[int, ...]]) -> tuple:
    # Relabel nodes (rows and columns together) by a permutation-invariant
    # signature. Ties fall back to index order, so equivalent states may get
    # distinct keys (extra work, never a wrong answer): every key is a
    # relabeled copy of its state, and relabeling is a symmetry of the
    # complete graph.
    n = len(rows)
    if len(rows[0]) == 1:
        return tuple(sorted(rows))
    sig = sorted((sorted(rows[i]), sorted(r[i] for r in rows), i) for i in range(n))
    perm = [s[2] for s in sig]
    return tuple(tuple(rows[i][j] for j in perm) for i in perm)


def consensus_reachable(n: int, m: int, max_len: int, x0: Sequence | None = None) -> int | None:
    """Shortest m-regular averaging schedule on the complete graph reaching
    consensus, searched breadth-first up to ``max_len`` steps.

    With ``x0`` given, consensus means the state started at ``x0`` becomes
    constant. With ``x0=None`` the transition product itself must become
    ``11^T / n``, i.e. consensus from every initial vector. States are
    deduplicated up to node relabeling, and a state is dropped when more rows
    still differ from the target than the remaining steps can touch.
    Returns the length found or ``None``.
    """
    if not 2 <= m <= n:
        raise ScheduleError(f"need 2 <= m <= n, got n={n}, m={m}")
    if max_len < 0:
        raise ScheduleError("max_len must be >= 0")
    if x0 is None:
        scale = m ** max_len
        rows = [tuple(scale if i == j else 0 for j in range(n)) for i in range(n)]
    else:
        vec = [Fraction(v) for v in x0]
        if len(vec) != n:
            raise ScheduleError(f"x0 has length {len(vec)}, expected {n}")
        den = 1
        for v in vec:
            den = den * v.denominator // gcd(den, v.denominator)
        scale = den * m ** max_len
        rows = [(int(v * scale),) for v in vec]
    total = [sum(r[j] for r in rows) for j in range(len(rows[0]))]
    if any(t % n for t in total):
        # the mean is not representable at this scale, so it is never reached
        # (for x0=None this is the n-has-a-foreign-prime case)
        target = None
    else:
        target = tuple(t // n for t in total)
    if all(r == target for r in rows):
        return 0

    subsets = list(combinations(range(n), m))
    start = _canonical_rows(rows)
    frontier = {start}
    seen = {start}
    for depth in range(1, max_len + 1):
        remaining = max_len - depth
        nxt = set()
        for state in frontier:
            tried = set()
            for sub in subsets:
                picked = tuple(sorted(state[i] for i in sub))
                if picked in tried:
                    continue
                tried.add(picked)
                avg = tuple(sum(col) // m for col in zip(*picked))
                new = [avg if i in sub else state[i] for i in range(n)]
                off = sum(r != target for r in new)
                if off == 0:
                    return depth
                if -(-off // m) > remaining:
                    continue
                key = _canonical_rows(new)
                if key not in seen:
                    seen.add(key)
                    nxt.add(key)
        frontier = nxt
        if not frontier:
            break
    return None

"""Per-clique state-transition operators.

A transition acts as the identity outside a set of pairwise-disjoint cliques
("parts"); inside part ``C`` it applies a ``|C|b x |C|b`` local matrix to the
stacked states of the clique's members. Averaging and multi-clique transitions
also carry exact rational local weights so they can run on ``Fraction``
states.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


class TransitionError(ValueError):
    pass


@dataclass(frozen=True)
class Part:
    members: tuple[int, ...]          # 1-based, sorted
    local: np.ndarray                 # (|C|*b, |C|*b)
    averaging: bool = False           # local == J/|C| (b == 1)


@dataclass(frozen=True)
class TransitionMatrix:
    n: int
    b: int
    parts: tuple[Part, ...]

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(sorted(v for p in self.parts for v in p.members))

    @property
    def exact(self) -> bool:
        """True when every coefficient is rational by construction."""
        return all(p.averaging for p in self.parts)

    def dense(self) -> np.ndarray:
        return materialize(self)


def _clique(members: Iterable[int], n: int) -> tuple[int, ...]:
    c = tuple(sorted(set(int(v) for v in members)))
    if not c:
        raise TransitionError("empty clique")
    if c[0] < 1 or c[-1] > n:
        raise TransitionError(f"clique {c} has nodes outside 1..{n}")
    return c


def _block_index(members: Sequence[int], b: int) -> np.ndarray:
    return np.array([(v - 1) * b + k for v in members for k in range(b)], dtype=np.intp)


def averaging_transition(members: Iterable[int], n: int) -> TransitionMatrix:
    c = _clique(members, n)
    k = len(c)
    return TransitionMatrix(n, 1, (Part(c, np.full((k, k), 1.0 / k), averaging=True),))


def block_transition(members: Iterable[int], blocks: Mapping[tuple[int, int], np.ndarray],
                     n: int, b: int) -> TransitionMatrix:
    """Transition from ordered blocks ``A_ij`` for every ``(i, j)`` in the clique."""
    c = _clique(members, n)
    k = len(c)
    local = np.zeros((k * b, k * b))
    for p, i in enumerate(c):
        for q, j in enumerate(c):
            if (i, j) not in blocks:
                raise TransitionError(f"missing block A_{i}{j}")
            blk = np.atleast_2d(np.asarray(blocks[(i, j)], dtype=float))
            if blk.shape != (b, b):
                raise TransitionError(f"block A_{i}{j} has shape {blk.shape}, expected ({b}, {b})")
            local[p * b:(p + 1) * b, q * b:(q + 1) * b] = blk
    return TransitionMatrix(n, b, (Part(c, local),))


def symmetric_block_transition(members: Iterable[int],
                               blocks: Mapping[tuple[int, int], np.ndarray],
                               n: int, b: int) -> TransitionMatrix:
    """Like :func:`block_transition` but each unordered pair gives one block,
    placed at both ``(i, j)`` and ``(j, i)``. Keys may be given in either
    orientation; diagonal keys ``(i, i)`` are required."""
    c = _clique(members, n)
    full = {}
    for (i, j), blk in blocks.items():
        full[(i, j)] = blk
        full.setdefault((j, i), blk)
    for i, j in combinations(c, 2):
        if (i, j) not in full:
            raise TransitionError(f"missing block for pair ({i},{j})")
    return block_transition(c, full, n, b)


def projection_matrix(h: Sequence[float]) -> np.ndarray:
    """Orthogonal projector onto the kernel of ``h^T``."""
    h = np.asarray(h, dtype=float).reshape(-1)
    hh = float(h @ h)
    if hh == 0.0:
        raise TransitionError("projection of a zero vector is undefined")
    return np.eye(h.size) - np.outer(h, h) / hh


def solver_blocks(members: Iterable[int], rows: Mapping[int, Sequence[float]]
                  ) -> dict[tuple[int, int], np.ndarray]:
    """Blocks of the distributed linear-equation solver for one clique.

    Node ``i`` holds equation row ``h_i``; inside the clique it moves toward the
    clique average along the kernel of ``h_i^T``.
    """
    c = tuple(sorted(set(members)))
    size = len(c)
    out = {}
    for i in c:
        P = projection_matrix(rows[i])
        m = P.shape[0]
        for j in c:
            out[(i, j)] = np.eye(m) - (size - 1) / size * P if i == j else P / size
    return out


def solver_transition(members: Iterable[int], rows: Mapping[int, Sequence[float]],
                      n: int) -> TransitionMatrix:
    blocks = solver_blocks(members, rows)
    b = len(next(iter(rows.values())))
    return block_transition(members, blocks, n, b)


def multi_transition(cliques: Iterable[Iterable[int]], n: int) -> TransitionMatrix:
    """Simultaneous averaging over pairwise-disjoint cliques."""
    parts = []
    used: set[int] = set()
    for members in cliques:
        t = averaging_transition(members, n)
        c = t.parts[0].members
        overlap = used.intersection(c)
        if overlap:
            raise TransitionError(f"cliques overlap at node(s) {sorted(overlap)}")
        used.update(c)
        parts.extend(t.parts)
    if not parts:
        raise TransitionError("empty clique class")
    parts.sort(key=lambda p: p.members)
    return TransitionMatrix(n, 1, tuple(parts))


def materialize(t: TransitionMatrix) -> np.ndarray:
    N = t.n * t.b
    M = np.eye(N)
    for p in t.parts:
        idx = _block_index(p.members, t.b)
        M[np.ix_(idx, idx)] = p.local
    return M


def _apply_float(t: TransitionMatrix, x: np.ndarray) -> np.ndarray:
    y = x.copy()
    if t.b == 1:
        for p in t.parts:
            idx = np.asarray(p.members, dtype=np.intp) - 1
            if p.averaging:
                y[idx] = x[idx].sum() / len(idx)
            else:
                y[idx] = p.local @ x[idx]
        return y
    for p in t.parts:
        idx = _block_index(p.members, t.b)
        y[idx] = p.local @ x[idx]
    return y


def _apply_exact(t: TransitionMatrix, x: Sequence[Fraction]) -> list[Fraction]:
    if not t.exact:
        raise TransitionError("rational mode requires rational coefficients "
                              "(averaging or multi-clique transitions only)")
    y = list(x)
    for p in t.parts:
        avg = sum((x[v - 1] for v in p.members), Fraction(0)) / len(p.members)
        for v in p.members:
            y[v - 1] = avg
    return y


def is_rational_state(x) -> bool:
    return not isinstance(x, np.ndarray) and len(x) > 0 and isinstance(x[0], Fraction)


def apply(t: TransitionMatrix, x):
    """Return ``M x`` without materializing ``M``.

    A sequence of :class:`~fractions.Fraction` is updated exactly and returned
    as a list; anything else is treated as a float vector of length ``n*b``.
    """
    if len(x) != t.n * t.b:
        raise TransitionError(f"state has length {len(x)}, expected {t.n * t.b}")
    if is_rational_state(x):
        return _apply_exact(t, x)
    return _apply_float(t, np.asarray(x, dtype=float))


def write_csv(matrix: np.ndarray, path: str | Path) -> None:
    np.savetxt(path, np.asarray(matrix), fmt="%.17g", delimiter=",")

"""Undirected graphs, clique coverages and generalized line graphs.

Node and clique indices are 1-based at every public entry point. Internally
neighbor sets are kept 0-based.
"""
from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence


class GraphError(ValueError):
    pass


class CoverageError(GraphError):
    """Raised when a list of node sets is not a clique coverage.

    ``reason`` is one of ``"not_clique"``, ``"uncovered"``, ``"disconnected"``
    or ``"invalid"``; ``clique`` / ``node`` identify the offender (1-based).
    """

    def __init__(self, reason: str, message: str, clique: int | None = None,
                 node: int | None = None):
        super().__init__(message)
        self.reason = reason
        self.clique = clique
        self.node = node


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]
    _adj: tuple[frozenset[int], ...] = field(repr=False, compare=False)

    def has_edge(self, i: int, j: int) -> bool:
        return (j - 1) in self._adj[i - 1]

    def neighbors(self, i: int) -> list[int]:
        return sorted(k + 1 for k in self._adj[i - 1])

    def degree(self, i: int) -> int:
        return len(self._adj[i - 1])


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a simple undirected graph on nodes ``1..n``.

    Duplicate edges (in either orientation) are merged; self-loops and
    out-of-range endpoints raise :class:`GraphError`.
    """
    if n < 1:
        raise GraphError(f"node count must be >= 1, got {n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    norm = set()
    for e in edges:
        i, j = (int(v) for v in e)
        if i == j:
            raise GraphError(f"self-loop at node {i}")
        for v in (i, j):
            if not 1 <= v <= n:
                raise GraphError(f"node {v} outside 1..{n}")
        i, j = min(i, j), max(i, j)
        norm.add((i, j))
        adj[i - 1].add(j - 1)
        adj[j - 1].add(i - 1)
    return Graph(n, tuple(sorted(norm)), tuple(frozenset(a) for a in adj))


def complete_graph(n: int) -> Graph:
    return build_graph(n, combinations(range(1, n + 1), 2))


def union_of_cliques(n: int, cliques: Iterable[Iterable[int]]) -> Graph:
    """Graph whose edges are exactly the pairs inside some given clique."""
    edges = set()
    for c in cliques:
        edges.update(combinations(sorted(set(c)), 2))
    return build_graph(n, edges)


def _check_members(g: Graph, members: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(int(v) for v in members)))
    for v in out:
        if not 1 <= v <= g.n:
            raise GraphError(f"node {v} outside 1..{g.n}")
    return out


def is_clique(g: Graph, members: Iterable[int]) -> bool:
    nodes = _check_members(g, members)
    return all(g.has_edge(i, j) for i, j in combinations(nodes, 2))


@dataclass(frozen=True)
class CliqueCoverage:
    graph: Graph
    cliques: tuple[tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return len(self.cliques)

    def clique(self, index: int) -> tuple[int, ...]:
        return self.cliques[index - 1]


def _components(n: int, adj: Sequence[Iterable[int]]) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def validate_coverage(g: Graph, cliques: Sequence[Iterable[int]]) -> CliqueCoverage:
    """Check the three coverage conditions, in order, and return the coverage.

    The user's clique order is preserved since schedules index into it.
    """
    normed = []
    for k, c in enumerate(cliques, start=1):
        members = tuple(sorted(set(int(v) for v in c)))
        if not members:
            raise CoverageError("invalid", f"clique C_{k} is empty", clique=k)
        bad = [v for v in members if not 1 <= v <= g.n]
        if bad:
            raise CoverageError("invalid", f"clique C_{k} has node {bad[0]} outside 1..{g.n}",
                                clique=k, node=bad[0])
        for i, j in combinations(members, 2):
            if not g.has_edge(i, j):
                raise CoverageError("not_clique",
                                    f"C_{k} is not a clique: edge ({i},{j}) missing",
                                    clique=k)
        normed.append(members)
    if not normed:
        raise CoverageError("invalid", "coverage has no cliques")

    covered = set().union(*normed)
    for v in range(1, g.n + 1):
        if v not in covered:
            raise CoverageError("uncovered", f"node {v} is not covered by any clique", node=v)

    adj: list[set[int]] = [set() for _ in range(g.n)]
    for members in normed:
        for i, j in combinations(members, 2):
            adj[i - 1].add(j - 1)
            adj[j - 1].add(i - 1)
    comps = _components(g.n, adj)
    if len(comps) > 1:
        stray = min(min(c) for c in comps if 0 not in c) + 1
        raise CoverageError("disconnected",
                            f"union of clique subgraphs is disconnected "
                            f"({len(comps)} components; node {stray} unreachable from node 1)",
                            node=stray)
    return CliqueCoverage(g, tuple(normed))


@dataclass(frozen=True)
class LineGraph:
    d: int
    edges: tuple[tuple[int, int], ...]
    _adj: tuple[frozenset[int], ...] = field(repr=False, compare=False)

    def adjacent(self, i: int, j: int) -> bool:
        return (j - 1) in self._adj[i - 1]

    def neighbors(self, i: int) -> list[int]:
        return sorted(k + 1 for k in self._adj[i - 1])

    def degree(self, i: int) -> int:
        return len(self._adj[i - 1])

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    def is_connected(self) -> bool:
        return len(_components(self.d, self._adj)) == 1

    def is_complete(self) -> bool:
        return len(self.edges) == self.d * (self.d - 1) // 2

    def is_odd_cycle(self) -> bool:
        return (self.d >= 3 and self.d % 2 == 1 and len(self.edges) == self.d
                and all(len(a) == 2 for a in self._adj) and self.is_connected())

    def adjacency_masks(self) -> list[int]:
        """Bitmask of neighbors per vertex (bit k is vertex k+1)."""
        return [sum(1 << k for k in a) for a in self._adj]


def line_graph_from_edges(d: int, edges: Iterable[Sequence[int]]) -> LineGraph:
    adj: list[set[int]] = [set() for _ in range(d)]
    norm = set()
    for i, j in edges:
        if i == j:
            raise GraphError(f"self-loop at line-graph vertex {i}")
        i, j = min(i, j), max(i, j)
        norm.add((i, j))
        adj[i - 1].add(j - 1)
        adj[j - 1].add(i - 1)
    return LineGraph(d, tuple(sorted(norm)), tuple(frozenset(a) for a in adj))


def line_graph(cov: CliqueCoverage) -> LineGraph:
    sets = [set(c) for c in cov.cliques]
    edges = [(i + 1, j + 1) for i, j in combinations(range(len(sets)), 2)
             if sets[i] & sets[j]]
    return line_graph_from_edges(len(sets), edges)


def cyclic_vertices(lg: LineGraph) -> frozenset[int]:
    """Vertices lying on a simple cycle of length >= 3 (1-based).

    A vertex is on such a cycle iff it belongs to a biconnected component with
    at least three vertices. Components are found with the iterative
    Hopcroft-Tarjan edge-stack algorithm.
    """
    n = lg.d
    adj = [sorted(a) for a in lg._adj]
    disc = [-1] * n
    low = [0] * n
    timer = 0
    on_cycle: set[int] = set()
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(adj[root]))]
        estack: list[tuple[int, int]] = []
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] == -1:
                    estack.append((u, w))
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, u, iter(adj[w])))
                    advanced = True
                    break
                if w != parent and disc[w] < disc[u]:
                    estack.append((u, w))
                    low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent == -1:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                block = set()
                while True:
                    a, b = estack.pop()
                    block.update((a, b))
                    if (a, b) == (parent, u):
                        break
                if len(block) >= 3:
                    on_cycle.update(block)
    return frozenset(v + 1 for v in on_cycle)


def in_cycle(lg: LineGraph, i: int) -> bool:
    if not 1 <= i <= lg.d:
        raise GraphError(f"clique index {i} outside 1..{lg.d}")
    return i in cyclic_vertices(lg)


# --- JSON instance files -------------------------------------------------

_PAIR_RE = r"\[\s*{a}\s*,\s*{b}\s*\]"


def _line_of(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


def _duplicate_edge_line(text: str, i: int, j: int) -> int | None:
    pat = re.compile("|".join([_PAIR_RE.format(a=i, b=j), _PAIR_RE.format(a=j, b=i)]))
    hits = [m.start() for m in pat.finditer(text)]
    return _line_of(text, hits[1]) if len(hits) > 1 else None


def parse_instance(text: str) -> tuple[Graph, list[list[int]], dict]:
    """Parse ``{"n", "edges", "cliques"}`` JSON.

    ``edges`` may be omitted, in which case the graph is the union of the
    clique subgraphs (the form written by the ``schedule`` subcommand). ``n``
    defaults to the largest node mentioned. Returns the graph, the raw clique
    list and the decoded document.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object", 1)
    cliques = doc.get("cliques")
    if not isinstance(cliques, list) or not all(isinstance(c, list) for c in cliques):
        raise ParseError("'cliques' must be a list of node lists")
    try:
        cliques = [[int(v) for v in c] for c in cliques]
    except (TypeError, ValueError):
        raise ParseError("clique members must be integers") from None
    n = doc.get("n")
    if n is None:
        n = max((v for c in cliques for v in c), default=0)
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")

    if "edges" not in doc:
        return union_of_cliques(n, cliques), cliques, doc

    seen = set()
    pairs = []
    for e in doc["edges"]:
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"edge {e!r} is not a pair")
        i, j = int(e[0]), int(e[1])
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"duplicate edge ({i},{j})", _duplicate_edge_line(text, i, j))
        seen.add(key)
        pairs.append((i, j))
    try:
        g = build_graph(n, pairs)
    except GraphError as exc:
        raise ParseError(str(exc)) from None
    return g, cliques, doc


def load_instance(path: str | Path) -> tuple[Graph, list[list[int]], dict]:
    return parse_instance(Path(path).read_text())

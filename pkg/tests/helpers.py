"""Shared test utilities: fixture loading and random coverage generators."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from cliquegossip.graph import build_graph, line_graph, validate_coverage

FIXTURES = Path(str(resources.files("cliquegossip") / "fixtures"))
ORACLE = json.loads((Path(__file__).parent / "oracle" / "frozen.json").read_text())


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str):
    """(coverage, schedule entries, line graph) for a fixture file."""
    doc = json.loads(fixture_path(name).read_text())
    g = build_graph(doc["n"], doc["edges"])
    cov = validate_coverage(g, doc["cliques"])
    sched = doc.get("schedule") or list(range(1, cov.d + 1))
    return cov, sched, line_graph(cov)


def random_coverage(rng: np.random.Generator, n_max: int = 12, d_max: int = 12,
                    extra_edges: bool = True):
    """Random valid coverage: each new clique touches the already covered set.

    Extra cliques may be added once all nodes are covered, and random extra
    graph edges never break clique membership.
    """
    n = int(rng.integers(3, n_max + 1))
    nodes = list(range(1, n + 1))
    rng.shuffle(nodes)
    size = int(rng.integers(2, min(4, n) + 1))
    cliques = [sorted(nodes[:size])]
    covered = set(nodes[:size])
    rest = nodes[size:]
    while rest and len(cliques) < d_max - 1:
        anchor = int(rng.choice(sorted(covered)))
        k = int(rng.integers(1, min(3, len(rest)) + 1))
        new = rest[:k]
        rest = rest[k:]
        old = [v for v in sorted(covered) if v != anchor]
        extra = [int(v) for v in rng.choice(old, size=min(len(old), int(rng.integers(0, 2))),
                                            replace=False)] if old else []
        cliques.append(sorted({anchor, *new, *extra}))
        covered |= set(new)
    if rest:                       # d_max reached; sweep remaining nodes into one clique
        cliques.append(sorted({int(rng.choice(sorted(covered))), *rest}))
    while len(cliques) < d_max and rng.random() < 0.3:
        k = int(rng.integers(1, min(3, n) + 1))
        cliques.append(sorted(int(v) for v in rng.choice(n, size=k, replace=False) + 1))
    edges = {(a, b) for c in cliques for i, a in enumerate(c) for b in c[i + 1:]}
    if extra_edges:
        for _ in range(int(rng.integers(0, n))):
            a, b = sorted(int(v) for v in rng.choice(n, size=2, replace=False) + 1)
            edges.add((a, b))
    g = build_graph(n, sorted(edges))
    return validate_coverage(g, cliques)


def random_tree_coverage(rng: np.random.Generator, d_max: int = 6):
    """Random coverage whose line graph is a tree.

    Each new clique attaches through a node owned by exactly one existing
    clique, so it meets only that clique.
    """
    d = int(rng.integers(1, d_max + 1))
    nxt = 1
    size = int(rng.integers(2, 4))
    cliques = [list(range(nxt, nxt + size))]
    nxt += size
    private = {v: 0 for v in cliques[0]}     # node -> owning clique (single owner)
    for k in range(1, d):
        anchor = int(rng.choice(sorted(private)))
        del private[anchor]
        size = int(rng.integers(1, 3))
        fresh = list(range(nxt, nxt + size))
        nxt += size
        cliques.append([anchor, *fresh])
        private.update({v: k for v in fresh})
    n = nxt - 1
    edges = sorted({(a, b) for c in cliques for i, a in enumerate(sorted(c)) for b in sorted(c)[i + 1:]})
    return validate_coverage(build_graph(n, edges), cliques)

"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from cliquegossip import _kernels_py
from cliquegossip.graph import line_graph_from_edges

try:
    from cliquegossip import _kernels
except ImportError:
    _kernels = None


def averaging_case(n=200, d=60, size=5, steps=2000, seed=0):
    rng = np.random.default_rng(seed)
    parts = [np.sort(rng.choice(n, size=size, replace=False)) for _ in range(d)]
    members = np.concatenate(parts).astype(np.intp)
    part_ptr = np.arange(0, size * d + 1, size, dtype=np.intp)
    step_ptr = np.arange(d + 1, dtype=np.intp)
    return (rng.random(n), step_ptr, part_ptr, members, steps)


def graph_case(d=14, p=0.45, seed=1):
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1) if rng.random() < p]
    return line_graph_from_edges(d, edges).adjacency_masks()


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    avg, masks = averaging_case(), graph_case()
    cases = [
        ("averaging_run", lambda k: k.averaging_run(*avg)),
        ("chromatic_number", lambda k: k.chromatic_number(masks)),
        ("independence_number", lambda k: k.independence_number(masks)),
    ]
    if _kernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':<22}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, call in cases:
        py = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:<22}{py:>14.2f}{'-':>14}{'-':>10}")
            continue
        a, b = call(_kernels_py), call(_kernels)
        assert np.allclose(a, b), f"{name}: backends disagree"
        cy = min(timeit.repeat(lambda: call(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{py:>14.2f}{cy:>14.3f}{py / cy:>9.0f}x")


if __name__ == "__main__":
    main()

"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the extension; tests run both.
"""
from __future__ import annotations

import numpy as np


def averaging_run(x0, step_ptr, part_ptr, members, steps):
    """Float averaging trajectory.

    Schedule entry ``k`` (period ``len(step_ptr) - 1``) averages the parts
    ``step_ptr[k]:step_ptr[k+1]``; part ``p`` covers the 0-based nodes
    ``members[part_ptr[p]:part_ptr[p+1]]``. Returns a ``(steps+1, n)`` array.
    """
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    period = len(step_ptr) - 1
    out = np.empty((steps + 1, x0.size))
    out[0] = x0
    parts = [members[part_ptr[p]:part_ptr[p + 1]] for p in range(len(part_ptr) - 1)]
    for t in range(steps):
        row = out[t].copy()
        k = t % period
        for p in range(step_ptr[k], step_ptr[k + 1]):
            idx = parts[p]
            s = 0.0
            for i in idx:
                s += row[i]
            row[idx] = s / len(idx)
        out[t + 1] = row
    return out


def _colorable(adj, order, k):
    d = len(order)
    color = [-1] * len(adj)

    def place(pos, used):
        if pos == d:
            return True
        v = order[pos]
        for c in range(min(used + 1, k)):
            if all(color[w] != c for w in adj[v]):
                color[v] = c
                if place(pos + 1, max(used, c + 1)):
                    return True
                color[v] = -1
        return False

    return place(0, 0)


def chromatic_number(masks):
    d = len(masks)
    if d == 0:
        return 0
    adj = [[w for w in range(d) if (masks[v] >> w) & 1] for v in range(d)]
    order = sorted(range(d), key=lambda v: -len(adj[v]))
    k = 1
    while not _colorable(adj, order, k):
        k += 1
    return k


def independence_number(masks):
    d = len(masks)
    closed = [masks[v] | (1 << v) for v in range(d)]

    def best(avail):
        if avail == 0:
            return 0
        v = (avail & -avail).bit_length() - 1
        # branch: take v, or skip v (only useful if v has an available neighbor)
        take = 1 + best(avail & ~closed[v])
        if masks[v] & avail == 0:
            return take
        return max(take, best(avail & ~(1 << v)))

    return best((1 << d) - 1)

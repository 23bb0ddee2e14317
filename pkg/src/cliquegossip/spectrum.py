"""Period matrices, eigenvalue analysis and convergence checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import CliqueCoverage, LineGraph, cyclic_vertices
from .protocol import TransitionMatrix, averaging_transition
from .scheduler import Schedule, ScheduleError

DEFAULT_TOL = 1e-9
DEFLATE_RTOL = 1e-12
CLUSTER_RADIUS = 1e-4


class SpectrumError(ValueError):
    pass


class RateUndefined(SpectrumError):
    pass


@dataclass(frozen=True)
class PeriodMatrix:
    """``F_d = M_{sigma(d-1)} ... M_{sigma(0)}`` plus the per-step factors."""
    d: int
    matrix: np.ndarray
    schedule: Schedule
    steps: tuple[np.ndarray, ...] = field(repr=False)


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    rho: float
    lambda2: float | None


def averaging_transitions(cov: CliqueCoverage) -> dict[int, TransitionMatrix]:
    """Averaging transition per coverage clique, keyed by 1-based index."""
    n = cov.graph.n
    return {k: averaging_transition(c, n) for k, c in enumerate(cov.cliques, start=1)}


def period_matrix(sched: Schedule, transitions: Mapping) -> PeriodMatrix:
    steps = []
    for e in sched:
        if e not in transitions:
            raise ScheduleError(f"schedule entry {e!r} has no transition")
        steps.append(transitions[e].dense())
    size = steps[0].shape[0]
    F = np.eye(size)
    for M in steps:
        if M.shape != (size, size):
            raise SpectrumError(f"transition of shape {M.shape} mixed with size {size}")
        F = M @ F
    return PeriodMatrix(len(steps), F, sched, tuple(steps))


def _deflate(m: np.ndarray, mu: complex, floor: float) -> tuple[int, np.ndarray]:
    """Split off the eigenspace of ``mu`` by repeated SVD compression.

    While ``m - mu I`` has singular values below ``floor``, its null space is
    an invariant subspace for eigenvalue ``mu``; compressing onto the
    orthogonal complement leaves the rest of the spectrum intact. Returns the
    multiplicity found and the remaining block.
    """
    count = 0
    while m.shape[0]:
        _, sv, vt = np.linalg.svd(m - mu * np.eye(m.shape[0]))
        k = int((sv <= floor).sum())
        if k == 0:
            break
        count += k
        W = vt[:m.shape[0] - k].conj().T
        m = W.conj().T @ m @ W
    return count, m


def _clusters(ev: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage groups of eigenvalues closer than ``radius``."""
    n = ev.size
    label = list(range(n))

    def root(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    close = np.abs(ev[:, None] - ev[None, :]) <= radius
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        label[root(i)] = root(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    return [np.array(g) for g in groups.values() if len(g) > 1]


def _refined_eigvals(m: np.ndarray, rtol: float) -> np.ndarray:
    """Eigenvalues with multiple eigenvalues recovered exactly.

    A defective eigenvalue of index ``k`` comes back from the QR algorithm as
    a ring of radius about ``eps ** (1/k)``. Zero is deflated directly; other
    tight clusters are deflated around their mean, which stays accurate even
    when the members split. Clusters that fail to deflate completely are
    left as the raw solver output.
    """
    scale = max(float(np.linalg.norm(m, 2)), 1.0)
    floor = rtol * scale
    out = []
    zeros, rest = _deflate(m.astype(complex), 0.0, floor)
    out.extend([0.0] * zeros)
    raw = np.linalg.eigvals(rest) if rest.shape[0] else np.zeros(0, dtype=complex)
    for group in _clusters(raw, CLUSTER_RADIUS * scale):
        mu = raw[group].mean()
        if abs(mu.imag) <= floor:
            mu = mu.real
        k, smaller = _deflate(rest, mu, floor)
        if k == group.size:
            rest = smaller
            out.extend([mu] * k)
    if rest.shape[0]:
        out.extend(np.linalg.eigvals(rest))
    return np.asarray(out, dtype=complex)


def eigenvalues(m: np.ndarray, deflate_rtol: float = DEFLATE_RTOL) -> np.ndarray:
    """All eigenvalues, sorted by descending modulus then argument.

    Multiple eigenvalues are recovered by deflation (singular values below
    ``deflate_rtol * max(1, ||m||_2)`` count as zero); pass
    ``deflate_rtol=0`` for the raw eigensolver output.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SpectrumError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise SpectrumError("matrix has non-finite entries")
    ev = _refined_eigvals(m, deflate_rtol) if deflate_rtol > 0 else np.linalg.eigvals(m).astype(complex)
    # real eigenvalues pick up ~eps imaginary parts after complex deflation
    scale = max(float(np.linalg.norm(m, 2)), 1.0)
    ev = np.where(np.abs(ev.imag) <= 1e-13 * scale, ev.real + 0j, ev)
    mod = np.round(np.abs(ev), 12)
    order = np.lexsort((np.angle(ev), -mod))
    return ev[order]


def lambda2(rep_or_eigs, tol: float = DEFAULT_TOL) -> float | None:
    """Largest modulus strictly below the spectral radius (``None`` if none).

    Moduli within ``tol * max(1, rho)`` of rho count as equal to it.
    """
    ev = rep_or_eigs.eigenvalues if isinstance(rep_or_eigs, SpectrumReport) else rep_or_eigs
    mods = np.abs(np.asarray(ev))
    rho = float(mods.max())
    below = mods[mods < rho - tol * max(1.0, rho)]
    return float(below.max()) if below.size else None


def spectrum_report(m: np.ndarray, tol: float = DEFAULT_TOL) -> SpectrumReport:
    ev = eigenvalues(m)
    return SpectrumReport(ev, float(np.abs(ev).max()), lambda2(ev, tol))


def spectra_equal(a: Sequence[complex], b: Sequence[complex], tol: float | None = None) -> bool:
    """Whether the two multisets pair up one-to-one within ``tol``.

    Uses a minimum-cost perfect matching and checks its worst pair, so an
    unlucky greedy choice inside a cluster cannot cause a false negative.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise SpectrumError(f"multisets differ in size: {a.size} vs {b.size}")
    if tol is None:
        rho = max(np.abs(a).max(initial=0.0), np.abs(b).max(initial=0.0))
        tol = DEFAULT_TOL * max(1.0, rho)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return bool(cost[rows, cols].max(initial=0.0) <= tol)


class SwapCondition(Enum):
    NON_ADJACENT = "NON_ADJACENT"
    ADJACENT_ACYCLIC = "ADJACENT_ACYCLIC"
    NOT_GUARANTEED = "NOT_GUARANTEED"


def check_one_pass(cov: CliqueCoverage, sched: Schedule) -> None:
    """Raise unless the schedule lists every coverage clique exactly once."""
    entries = list(sched)
    if sorted(entries) != list(range(1, cov.d + 1)):
        missing = sorted(set(range(1, cov.d + 1)) - set(entries))
        dup = sorted({e for e in entries if entries.count(e) > 1})
        raise ScheduleError(f"schedule is not a one-pass enumeration of the coverage "
                            f"(missing {missing}, repeated {dup})")


def swap_condition(cov: CliqueCoverage, lg: LineGraph, sched: Schedule, s: int) -> SwapCondition:
    """Which sufficient condition (if any) guarantees that swapping entries
    ``s`` and ``s+1`` leaves the period spectrum unchanged."""
    check_one_pass(cov, sched)
    if not 1 <= s <= sched.period - 1:
        raise ScheduleError(f"swap position {s} outside 1..{sched.period - 1}")
    a, b = sched.entries[s - 1], sched.entries[s]
    if not lg.adjacent(a, b):
        return SwapCondition.NON_ADJACENT
    cyc = cyclic_vertices(lg)
    if a not in cyc and b not in cyc:
        return SwapCondition.ADJACENT_ACYCLIC
    return SwapCondition.NOT_GUARANTEED


def convergence_rate(f: PeriodMatrix, tol: float = DEFAULT_TOL) -> float:
    """Per-step asymptotic rate ``|lambda2(F_d)| ** (1/d)``."""
    l2 = lambda2(eigenvalues(f.matrix), tol)
    if l2 is None:
        raise RateUndefined("all eigenvalues share the spectral radius; rate undefined")
    if l2 <= tol:
        raise RateUndefined("lambda2 is zero: the period product is finite-time convergent")
    return l2 ** (1.0 / f.d)


@dataclass
class ConvergenceVerdict:
    convergent: bool
    conditions: dict[str, bool]
    fixed_space: np.ndarray
    notes: list[str]


def fixed_space(F: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ``ker(F - I)`` by SVD thresholding."""
    A = F - np.eye(F.shape[0])
    _, sv, vt = np.linalg.svd(A)
    thresh = tol * max(1.0, np.linalg.norm(F, 2))
    return vt[sv <= thresh].conj().T


def check_convergence(f: PeriodMatrix, transitions: Mapping | None = None,
                      tol: float = DEFAULT_TOL) -> ConvergenceVerdict:
    """Evaluate the four conditions for convergence of a periodic protocol.

    (i) spectral radius at most one; (ii) eigenvalue one is semisimple;
    (iii) no other eigenvalue on the unit circle; (iv) each partial product
    within the period fixes the fixed-point space of ``F_d``.
    """
    F = f.matrix
    N = F.shape[0]
    steps = f.steps
    if transitions is not None:
        steps = tuple(transitions[e].dense() for e in f.schedule)
    ev = eigenvalues(F)
    mods = np.abs(ev)
    loose = max(tol, 1e-7)   # eigenvalue clusters split by rounding
    notes = []

    rho_ok = bool(mods.max() <= 1 + loose)
    near_one = np.abs(ev - 1) <= loose
    mult = int(near_one.sum())
    basis = fixed_space(F, tol)
    semisimple = basis.shape[1] == mult
    if not semisimple:
        notes.append(f"eigenvalue 1: algebraic {mult}, geometric {basis.shape[1]}")
    unit_others = (np.abs(mods - 1) <= loose) & ~near_one
    no_other_unit = not bool(unit_others.any())
    if not no_other_unit:
        notes.append(f"unit-modulus eigenvalues other than 1: {ev[unit_others]}")

    partial_ok = True
    P = np.eye(N)
    for k, M in enumerate(steps[:-1]):
        P = M @ P
        if basis.size and np.abs(P @ basis - basis).max() > max(tol, 1e-9) * N:
            partial_ok = False
            notes.append(f"partial product through step {k} moves the fixed space")
            break

    conditions = {
        "spectral_radius": rho_ok,
        "semisimple_one": semisimple,
        "no_other_unit_modulus": no_other_unit,
        "partial_products_fix": partial_ok,
    }
    return ConvergenceVerdict(all(conditions.values()), conditions, basis, notes)

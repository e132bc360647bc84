"""Dynamic-programming distance engines for automaton queries.

All engines run backward over the database sequence, keeping per automaton
state the best achievable value for the remaining suffix:

* ``distance1_inf``: one number per state, combined with ``max``.
* ``distance1_k``: for finite ``k`` a profile mapping effective length (the
  count of non-wildcard symbols) to the least sum of k-th powers.  Without
  wildcard transitions every profile has a single entry and a scalar pass
  suffices.
* ``distance2``: ``distance1`` against the maximal-closure automaton.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import PHI, DistanceResult, Norm, SimTable, check_norm, cost_of, state_range
from .nfa import DEFAULT_MAX_STATES, Nfa, maximal_automaton
from .errors import UsageError


def _prepare(table: SimTable, d, A: Nfa):
    d = state_range(table, d)
    table.check_symbols(A.alphabet)
    return d


def _costs(table: SimTable, d: Sequence[int], symbols) -> list[dict]:
    """``costs[i][a] = 1 - simval(d_i, a)``; zero for the wildcard."""
    out = []
    for i in d:
        row = {a: cost_of(table.simval(i, a)) for a in symbols if a != PHI}
        row[PHI] = 0.0
        out.append(row)
    return out


def _empty_sequence(A: Nfa) -> DistanceResult:
    return DistanceResult(0.0 if A.initial & A.final else math.inf)


def distance1_inf(table: SimTable, d: Sequence[int] | None, A: Nfa) -> DistanceResult:
    """Least max-norm distance from ``d`` to an accepted string of equal length."""
    d = _prepare(table, d, A)
    n = len(d)
    if n == 0:
        return _empty_sequence(A)
    costs = _costs(table, d, A.alphabet)
    succ = A.successors
    final = A.final
    last = costs[-1]
    best = {}
    for q, edges in succ.items():
        best[q] = min((last[a] for a, r in edges if r in final), default=math.inf)
    for i in range(n - 2, -1, -1):
        row = costs[i]
        best = {
            q: min((max(row[a], best[r]) for a, r in edges), default=math.inf)
            for q, edges in succ.items()
        }
    return DistanceResult(min((best[q] for q in A.initial), default=math.inf))


def _power_costs(costs: list[dict], k: int) -> list[dict]:
    return [{a: c ** k for a, c in row.items()} for row in costs]


def _distance1_k_scalar(A: Nfa, pcosts: list[dict], k: int) -> float:
    """Wildcard-free case: every suffix string has the same effective length."""
    n = len(pcosts)
    succ = A.successors
    final = A.final
    last = pcosts[-1]
    best = {}
    for q, edges in succ.items():
        best[q] = min((last[a] for a, r in edges if r in final), default=math.inf)
    for i in range(n - 2, -1, -1):
        row = pcosts[i]
        best = {
            q: min((best[r] + row[a] for a, r in edges), default=math.inf)
            for q, edges in succ.items()
        }
    x = min((best[q] for q in A.initial), default=math.inf)
    if x == math.inf:
        return math.inf
    return (x / n) ** (1.0 / k)


def _profiles(A: Nfa, pcosts: list[dict]):
    """Yield ``(i, {state: array})`` from ``i = n-1`` down to 0.

    ``array[l]`` is the least sum of k-th powers over suffix strings from
    that state with effective length ``l`` (``inf`` when there is none).
    """
    n = len(pcosts)
    succ = A.successors
    final = A.final
    last = pcosts[-1]
    prof = {}
    for q, edges in succ.items():
        arr = np.full(2, math.inf)
        for a, r in edges:
            if r in final:
                if a == PHI:
                    arr[0] = 0.0
                else:
                    arr[1] = min(arr[1], last[a])
        prof[q] = arr
    yield n - 1, prof
    for i in range(n - 2, -1, -1):
        row = pcosts[i]
        width = n - i + 1
        nxt = {}
        for q, edges in succ.items():
            arr = np.full(width, math.inf)
            for a, r in edges:
                src = prof[r]
                if a == PHI:
                    np.minimum(arr[:-1], src, out=arr[:-1])
                else:
                    c = row[a]
                    if c != math.inf:
                        np.minimum(arr[1:], src + c, out=arr[1:])
            nxt[q] = arr
        prof = nxt
        yield i, prof


def _combine_profiles(arrays, k: int) -> float:
    best = math.inf
    for arr in arrays:
        if arr[0] == 0.0:
            return 0.0
        for l in np.flatnonzero(np.isfinite(arr)):
            if l == 0:
                continue
            best = min(best, (float(arr[l]) / int(l)) ** (1.0 / k))
    return best


def udist_profiles(table: SimTable, d: Sequence[int] | None, A: Nfa, k: int) -> list[dict]:
    """Sparse profiles ``profiles[i][q] = {l: x}`` for every suffix position."""
    d = _prepare(table, d, A)
    k = check_norm(k)
    if k == math.inf:
        raise UsageError("profiles are defined for finite k only")
    if not d:
        return []
    pcosts = _power_costs(_costs(table, d, A.alphabet), k)
    out = [None] * len(d)
    for i, prof in _profiles(A, pcosts):
        out[i] = {
            q: {int(l): float(arr[l]) for l in np.flatnonzero(np.isfinite(arr))}
            for q, arr in prof.items()
        }
    return out


def distance1_k(table: SimTable, d: Sequence[int] | None, A: Nfa, k: Norm,
                fast_path: bool | None = None) -> DistanceResult:
    """Least F_k distance from ``d`` to an accepted string of equal length.

    ``fast_path`` forces (True) or forbids (False) the single-entry scalar
    recurrence; by default it is used exactly when ``A`` has no wildcard
    transitions.
    """
    k = check_norm(k)
    if k == math.inf:
        return distance1_inf(table, d, A)
    d = _prepare(table, d, A)
    n = len(d)
    if n == 0:
        return _empty_sequence(A)
    if fast_path is None:
        fast_path = not A.has_wildcard_transitions
    if fast_path and A.has_wildcard_transitions:
        raise UsageError("the scalar recurrence needs a wildcard-free automaton")
    pcosts = _power_costs(_costs(table, d, A.alphabet), k)
    if fast_path:
        return DistanceResult(_distance1_k_scalar(A, pcosts, k))
    prof = None
    for _, prof in _profiles(A, pcosts):
        pass
    return DistanceResult(_combine_profiles([prof[q] for q in A.initial], k))


def distance1(table: SimTable, d: Sequence[int] | None, A: Nfa, k: Norm) -> DistanceResult:
    k = check_norm(k)
    if k == math.inf:
        return distance1_inf(table, d, A)
    return distance1_k(table, d, A, k)


def distance2(table: SimTable, d: Sequence[int] | None, A: Nfa, k: Norm,
              max_states: int = DEFAULT_MAX_STATES) -> DistanceResult:
    """``distance1`` against the maximal strings of the wildcard closure of ``L(A)``."""
    k = check_norm(k)
    if PHI in A.alphabet:
        raise UsageError("distance2 is defined for automata without wildcard symbols")
    d = _prepare(table, d, A)
    H = maximal_automaton(A, max_states)
    return distance1(table, d, H, k)

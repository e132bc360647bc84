"""Brute-force reference implementations of every distance.

Everything here works by explicit enumeration of strings, traces or
partitions and is meant for small instances only.  The production engines
in ``distance``, ``tl`` and ``regex`` are checked against these.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import PHI, Norm, SimTable, check_norm, cost_of, dist, norm_distance, state_range
from .errors import ResourceError, UsageError
from .nfa import LanguageSample, Nfa, enumerate_length_n


@dataclass(frozen=True)
class OracleBudget:
    max_strings: int = 10**6
    max_traces: int = 10**5

    def __post_init__(self):
        if self.max_strings <= 0 or self.max_traces <= 0:
            raise UsageError("oracle budgets must be positive")


DEFAULT_BUDGET = OracleBudget()


def oracle_distance1(table: SimTable, d: Sequence[int] | None,
                     strings: Iterable[Sequence[str]], k: Norm) -> float:
    d = state_range(table, d)
    return min((dist(table, d, a, k) for a in strings), default=math.inf)


def _position_alphabets(n, delta, per_position):
    if (delta is None) == (per_position is None):
        raise UsageError("give exactly one of delta or per_position")
    if per_position is not None:
        if len(per_position) != n:
            raise UsageError("per_position must give one alphabet per position")
        return [sorted(p) for p in per_position]
    return [sorted(delta)] * n


def oracle_closure(strings: LanguageSample, delta: Iterable[str] | None = None,
                   per_position: Sequence[Iterable[str]] | None = None,
                   budget: OracleBudget = DEFAULT_BUDGET) -> LanguageSample:
    """Least fixpoint of the wildcard closure rule on a fixed-length slice.

    A string with symbol ``x`` at position ``p`` gains a wildcard variant
    there once every symbol of that position's alphabet appears at ``p``
    with the rest of the string unchanged.
    """
    n = strings.length
    alphabets = _position_alphabets(n, delta, per_position)
    bound = math.prod(len(a) + 1 for a in alphabets)
    if bound > budget.max_strings:
        raise ResourceError(f"closure slice may hold {bound} strings, over budget")
    current = set(strings.strings)
    frontier = set(current)
    while frontier:
        added = set()
        for s in frontier:
            for p, x in enumerate(s):
                if x == PHI:
                    continue
                cand = s[:p] + (PHI,) + s[p + 1:]
                if cand in current or cand in added:
                    continue
                if all(s[:p] + (a,) + s[p + 1:] in current for a in alphabets[p]):
                    added.add(cand)
        current |= added
        frontier = added
    return LanguageSample(n, frozenset(current))


def refines(alpha: Sequence[str], beta: Sequence[str]) -> bool:
    """``alpha < beta``: ``beta`` is ``alpha`` with at least one symbol wildcarded."""
    if len(alpha) != len(beta):
        return False
    strict = False
    for a, b in zip(alpha, beta):
        if a == b:
            continue
        if b != PHI:
            return False
        strict = True
    return strict


def oracle_maximal(strings: LanguageSample) -> LanguageSample:
    members = list(strings.strings)
    keep = [a for a in members if not any(refines(a, b) for b in members)]
    return LanguageSample(strings.length, frozenset(keep))


def oracle_distance2(table: SimTable, d: Sequence[int] | None, strings: LanguageSample,
                     k: Norm, delta=None, per_position=None,
                     budget: OracleBudget = DEFAULT_BUDGET) -> float:
    closed = oracle_closure(strings, delta=delta, per_position=per_position, budget=budget)
    return oracle_distance1(table, d, oracle_maximal(closed), k)


# -- automaton queries -------------------------------------------------------

def oracle_nfa_distance1(table, d, A: Nfa, k, budget: OracleBudget = DEFAULT_BUDGET):
    d = state_range(table, d)
    sample = enumerate_length_n(A, len(d), budget.max_strings)
    return oracle_distance1(table, d, sample, k)


def oracle_nfa_distance2(table, d, A: Nfa, k, budget: OracleBudget = DEFAULT_BUDGET):
    d = state_range(table, d)
    sample = enumerate_length_n(A, len(d), budget.max_strings)
    return oracle_distance2(table, d, sample, k, delta=A.alphabet, budget=budget)


# -- temporal logic ----------------------------------------------------------

def oracle_tl_models(f, props: Sequence[str], n: int,
                     budget: OracleBudget = DEFAULT_BUDGET) -> set[tuple[frozenset, ...]]:
    """Every length-``n`` trace over ``2^props`` satisfying ``f``."""
    from .tl import all_worlds, satisfies

    worlds = all_worlds(props)
    if len(worlds) ** n > budget.max_traces:
        raise ResourceError(f"{len(worlds)}^{n} traces exceed the trace budget")
    return {s for s in itertools.product(worlds, repeat=n) if satisfies(s, f)}


def _tl_strings(f, props, n, budget):
    from .tl import expn_world_string

    return LanguageSample(n * len(props), frozenset(
        tuple(expn_world_string(s, props)) for s in oracle_tl_models(f, props, n, budget)))


def oracle_semdist1_tl(table, d, f, k, props=None,
                       budget: OracleBudget = DEFAULT_BUDGET) -> float:
    from .tl import expansion_props, expn_states

    d = state_range(table, d)
    props = expansion_props(f, props)
    strings = _tl_strings(f, props, len(d), budget)
    expanded = expn_states(d, len(props)) if props else []
    return oracle_distance1(table, expanded, strings, k)


def oracle_semdist2_tl(table, d, f, k, props=None,
                       budget: OracleBudget = DEFAULT_BUDGET) -> float:
    from .tl import expansion_props, expn_states, literal_pairs

    d = state_range(table, d)
    props = expansion_props(f, props)
    strings = _tl_strings(f, props, len(d), budget)
    expanded = expn_states(d, len(props)) if props else []
    return oracle_distance2(table, expanded, strings, k,
                            per_position=literal_pairs(props, len(d)), budget=budget)


def oracle_syndist_tl(table: SimTable, d: Sequence[int] | None, f, k: Norm) -> float:
    """Straight recursion on the inductive definition; exponential, tiny inputs only."""
    from . import tl

    k = check_norm(k)
    d = state_range(table, d)

    def rec(i, g):
        if isinstance(g, tl.Atom):
            return cost_of(table.simval(d[i], g.name))
        if isinstance(g, tl.Not):
            if isinstance(g.sub, tl.Atom):
                return cost_of(table.simval(d[i], "!" + g.sub.name))
            v = rec(i, g.sub)
            return 0.0 if v == math.inf else 1.0 - v
        if isinstance(g, tl.TrueConst):
            return 0.0
        if isinstance(g, tl.FalseConst):
            return 1.0
        if isinstance(g, tl.And):
            return max(rec(i, g.left), rec(i, g.right))
        if isinstance(g, tl.Or):
            return min(rec(i, g.left), rec(i, g.right))
        if isinstance(g, tl.Next):
            return rec(i + 1, g.sub) if i + 1 < len(d) else math.inf
        if isinstance(g, tl.Until):
            best = math.inf
            for j in range(i, len(d)):
                vec = [1.0 - rec(r, g.left) for r in range(i, j)]
                vec.append(1.0 - rec(j, g.right))
                if any(v == -math.inf for v in vec):
                    continue
                best = min(best, norm_distance(vec, [1.0] * len(vec), k))
            return best
        raise TypeError(f"not a formula: {g!r}")

    if not d:
        raise UsageError("temporal formulas are evaluated on nonempty sequences")
    return rec(0, f)


# -- regular expressions -----------------------------------------------------

def regex_strings(f, n: int, budget: OracleBudget = DEFAULT_BUDGET) -> LanguageSample:
    """Length-``n`` strings of ``L(f)`` by recursion on the expression."""
    from . import regex as rx

    @lru_cache(maxsize=None)
    def lang(g, m):
        if isinstance(g, rx.Sym):
            return frozenset([(g.name,)]) if m == 1 else frozenset()
        if isinstance(g, rx.Alt):
            return lang(g.left, m) | lang(g.right, m)
        if isinstance(g, rx.Concat):
            out = set()
            for cut in range(m + 1):
                left = lang(g.left, cut)
                if left:
                    right = lang(g.right, m - cut)
                    out.update(a + b for a in left for b in right)
            return _guard(frozenset(out))
        if isinstance(g, rx.Star):
            if m == 0:
                return frozenset([()])
            out = set()
            for cut in range(1, m + 1):
                head = lang(g.sub, cut)
                if head:
                    tail = lang(g, m - cut)
                    out.update(a + b for a in head for b in tail)
            return _guard(frozenset(out))
        raise TypeError(f"not a regex: {g!r}")

    def _guard(s):
        if len(s) > budget.max_strings:
            raise ResourceError("regex language slice exceeds the string budget")
        return s

    return LanguageSample(n, lang(f, n))


def oracle_syndist_regex(table: SimTable, d: Sequence[int] | None, f, k: Norm) -> float:
    """Inductive syntactic distance, minimizing over every split and partition.

    Memoized on (subexpression, substring).  Star partitions are minimized
    with a first-piece recursion over the un-normalized sums, which ranges
    over the same partitions as the definition.
    """
    from . import regex as rx

    k = check_norm(k)
    d = state_range(table, d)
    finite = k != math.inf

    @lru_cache(maxsize=None)
    def syn(g, i, j):
        n = j - i
        if isinstance(g, rx.Sym):
            return cost_of(table.simval(d[i], g.name)) if n == 1 else math.inf
        if isinstance(g, rx.Alt):
            return min(syn(g.left, i, j), syn(g.right, i, j))
        if isinstance(g, rx.Concat):
            best = math.inf
            for m in range(i, j + 1):
                u, v = syn(g.left, i, m), syn(g.right, m, j)
                if u == math.inf or v == math.inf:
                    continue
                if not finite:
                    best = min(best, max(u, v))
                elif n == 0:
                    best = 0.0
                else:
                    total = (m - i) * u ** k + (j - m) * v ** k
                    best = min(best, (total / n) ** (1.0 / k))
            return best
        if isinstance(g, rx.Star):
            if n == 0:
                return 0.0
            w = pieces(g.sub, i, j)
            if w == math.inf or not finite:
                return w
            return (w / n) ** (1.0 / k)
        raise TypeError(f"not a regex: {g!r}")

    @lru_cache(maxsize=None)
    def pieces(g, i, j):
        # best combination over partitions of d[i:j] into non-empty pieces:
        # sum of length * u^k for finite k, max of u for k = inf
        if i == j:
            return 0.0
        best = math.inf
        for m in range(i + 1, j + 1):
            u = syn(g, i, m)
            if u == math.inf:
                continue
            rest = pieces(g, m, j)
            if rest == math.inf:
                continue
            value = (m - i) * u ** k + rest if finite else max(u, rest)
            best = min(best, value)
        return best

    return syn(f, 0, len(d))


def oracle_regex_distance1(table, d, f, k, budget: OracleBudget = DEFAULT_BUDGET):
    d = state_range(table, d)
    return oracle_distance1(table, d, regex_strings(f, len(d), budget), k)


def oracle_regex_distance2(table, d, f, k, delta=None,
                           budget: OracleBudget = DEFAULT_BUDGET):
    d = state_range(table, d)
    if delta is None:
        delta = table.atoms
    return oracle_distance2(table, d, regex_strings(f, len(d), budget), k,
                            delta=delta, budget=budget)

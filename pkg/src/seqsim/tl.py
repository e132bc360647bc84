"""Finite-trace temporal logic queries.

Formulas are built from propositions, ``true``/``false``, ``!``, ``&``,
``|``, ``X`` (strong next) and ``U`` (until).  A database sequence is scored
against a formula either syntactically (``syndist_tl``, recursion on the
formula) or semantically (``semdist1_tl``/``semdist2_tl``, distance to the
set of satisfying traces after expanding each state into one literal per
proposition).
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import (NEG, DistanceResult, Norm, SimTable, check_norm, cost_of,
                   negated, state_range)
from .distance import distance1, distance2
from .errors import QueryParseError, ResourceError, UsageError
from .nfa import DEFAULT_MAX_STATES, Nfa

#: Alphabet of world letters is 2^m; beyond this the automata get unwieldy.
MAX_PROPS = 4
#: Default limits for the second semantic distance.
SEM2_MAX_PROPS = 2
SEM2_MAX_LENGTH = 4


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class TrueConst(Formula):
    def __str__(self):
        return "true"


@dataclass(frozen=True)
class FalseConst(Formula):
    def __str__(self):
        return "false"


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def __str__(self):
        return f"!{self.sub}"


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula

    def __str__(self):
        return f"X {self.sub}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"({self.left} U {self.right})"


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Not, Next)):
        return (f.sub,)
    if isinstance(f, (And, Or, Until)):
        return (f.left, f.right)
    return ()


def length(f: Formula) -> int:
    """Node count."""
    return 1 + sum(length(c) for c in children(f))


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas, children before parents."""
    seen: dict = {}

    def visit(g):
        if g in seen:
            return
        for c in children(g):
            visit(c)
        seen[g] = None

    visit(f)
    return list(seen)


def propositions(f: Formula) -> tuple[str, ...]:
    return tuple(sorted({g.name for g in subformulas(f) if isinstance(g, Atom)}))


def is_nnf(f: Formula) -> bool:
    """True when every negation is applied directly to a proposition."""
    return all(isinstance(g.sub, Atom) for g in subformulas(f) if isinstance(g, Not))


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[!&|()]))")
_KEYWORDS = {"X", "U", "true", "false"}


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise QueryParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, props):
        self.tokens = _tokenize(text)
        self.i = 0
        self.props = props

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok, pos = self.tokens[self.i]
        self.i += 1
        return tok, pos

    def expect(self, tok):
        got, pos = self.take()
        if got != tok:
            found = "end of input" if got is None else repr(got)
            raise QueryParseError(f"expected {tok!r}, found {found}", pos)

    def parse(self):
        f = self.disjunction()
        tok, pos = self.take()
        if tok is not None:
            raise QueryParseError(f"unexpected token {tok!r}", pos)
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        f = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self):
        tok, pos = self.take()
        if tok == "!":
            return Not(self.unary())
        if tok == "X":
            return Next(self.unary())
        if tok == "(":
            f = self.disjunction()
            self.expect(")")
            return f
        if tok == "true":
            return TrueConst()
        if tok == "false":
            return FalseConst()
        if tok is None:
            raise QueryParseError("unexpected end of input", pos)
        if tok in _KEYWORDS or not tok[0].isalpha() and tok[0] != "_":
            raise QueryParseError(f"unexpected token {tok!r}", pos)
        if self.props is not None and tok not in self.props:
            raise QueryParseError(f"undeclared proposition {tok!r}", pos)
        return Atom(tok)


def parse_tl(text: str, props: Iterable[str] | None = None) -> Formula:
    """Parse a formula.  Precedence from tightest: ``! X``, ``U`` (right
    associative), ``&``, ``|``."""
    return _Parser(text, None if props is None else set(props)).parse()


# -- exact semantics ---------------------------------------------------------

def world_symbol(world: Iterable[str]) -> str:
    return "{" + ",".join(sorted(world)) + "}"


def all_worlds(props: Sequence[str]) -> list[frozenset]:
    return [frozenset(c) for r in range(len(props) + 1)
            for c in itertools.combinations(sorted(props), r)]


def _truth_table(s: Sequence[frozenset], f: Formula) -> dict:
    n = len(s)
    val: dict = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            v = [g.name in w for w in s]
        elif isinstance(g, TrueConst):
            v = [True] * n
        elif isinstance(g, FalseConst):
            v = [False] * n
        elif isinstance(g, Not):
            v = [not x for x in val[g.sub]]
        elif isinstance(g, And):
            v = [a and b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Or):
            v = [a or b for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Next):
            v = val[g.sub][1:] + [False]
        elif isinstance(g, Until):
            left, right = val[g.left], val[g.right]
            v = [False] * n
            nxt = False
            for i in range(n - 1, -1, -1):
                nxt = v[i] = right[i] or (left[i] and nxt)
        else:
            raise TypeError(f"not a formula: {g!r}")
        val[g] = v
    return val


def satisfies(s: Sequence[Iterable[str]], f: Formula) -> bool:
    """Finite-trace satisfaction at position 0; ``X`` needs a next state."""
    if not s:
        raise UsageError("satisfaction is defined for nonempty traces")
    s = [frozenset(w) for w in s]
    return _truth_table(s, f)[f][0]


# -- syntactic distance ------------------------------------------------------

def _syndist_table(table: SimTable, d: Sequence[int], f: Formula, k: Norm) -> dict:
    n = len(d)
    val: dict = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            v = [cost_of(table.simval(i, g.name)) for i in d]
        elif isinstance(g, Not) and isinstance(g.sub, Atom):
            v = [cost_of(table.simval(i, negated(g.sub.name))) for i in d]
        elif isinstance(g, Not):
            v = [0.0 if x == math.inf else 1.0 - x for x in val[g.sub]]
        elif isinstance(g, TrueConst):
            v = [0.0] * n
        elif isinstance(g, FalseConst):
            v = [1.0] * n
        elif isinstance(g, And):
            v = [max(a, b) for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Or):
            v = [min(a, b) for a, b in zip(val[g.left], val[g.right])]
        elif isinstance(g, Next):
            v = val[g.sub][1:] + [math.inf]
        elif isinstance(g, Until):
            v = _until(val[g.left], val[g.right], k)
        else:
            raise TypeError(f"not a formula: {g!r}")
        val[g] = v
    return val


def _until(left: list[float], right: list[float], k: Norm) -> list[float]:
    n = len(left)
    out = [math.inf] * n
    if k == math.inf:
        nxt = math.inf
        for i in range(n - 1, -1, -1):
            nxt = out[i] = min(right[i], max(left[i], nxt))
        return out
    left_k = [x ** k for x in left]
    right_k = [x ** k for x in right]
    inv = 1.0 / k
    for i in range(n):
        best = math.inf
        acc = 0.0
        for j in range(i, n):
            y = acc + right_k[j]
            if y != math.inf:
                best = min(best, (y / (j - i + 1)) ** inv)
            acc += left_k[j]
            if acc == math.inf:
                break
        out[i] = best
    return out


def syndist_tl(table: SimTable, d: Sequence[int] | None, f: Formula, k: Norm) -> DistanceResult:
    k = check_norm(k)
    d = state_range(table, d)
    if not d:
        raise UsageError("temporal formulas are evaluated on nonempty sequences")
    table.check_symbols(propositions(f))
    return DistanceResult(_syndist_table(table, d, f, k)[f][0])


# -- expansions --------------------------------------------------------------

def expn_states(d: Sequence[int], m: int) -> list[int]:
    """Repeat every state index ``m`` times."""
    if m < 1:
        raise UsageError("expansion factor must be at least 1")
    return [i for i in d for _ in range(m)]


def literal(prop: str, present: bool) -> str:
    return prop if present else negated(prop)


def expn_world_string(s: Sequence[Iterable[str]], props: Sequence[str]) -> list[str]:
    """One literal per proposition per world, in ``props`` order."""
    out = []
    for w in s:
        w = set(w)
        out.extend(literal(p, p in w) for p in props)
    return out


def literal_pairs(props: Sequence[str], n: int) -> list[frozenset]:
    """Per-position closure alphabets of an expanded string of ``n`` worlds."""
    return [frozenset((p, negated(p))) for _ in range(n) for p in props]


# -- automata ----------------------------------------------------------------

def tl_to_nfa(f: Formula, props: Sequence[str] | None = None) -> Nfa:
    """Automaton over world letters accepting the nonempty traces satisfying ``f``.

    A state is the truth valuation of all subformulas at the position about
    to be read.  The valuation at a position is a function of the world read
    there and the valuation at the next position (or the trace end), so the
    states are generated backward from the end marker and every transition
    is consistent by construction.
    """
    if props is None:
        props = propositions(f)
    props = tuple(props)
    if not set(propositions(f)) <= set(props):
        raise UsageError("formula uses propositions outside props")
    if len(props) > MAX_PROPS:
        raise ResourceError(f"{len(props)} propositions exceed the cap of {MAX_PROPS}")
    return _tl_to_nfa(f, props)


@lru_cache(maxsize=128)
def _tl_to_nfa(f: Formula, props: tuple[str, ...]) -> Nfa:
    subs = subformulas(f)
    pos = {g: i for i, g in enumerate(subs)}
    worlds = all_worlds(props)

    def valuation(world, nxt):
        v = [False] * len(subs)
        for i, g in enumerate(subs):
            if isinstance(g, Atom):
                v[i] = g.name in world
            elif isinstance(g, TrueConst):
                v[i] = True
            elif isinstance(g, Not):
                v[i] = not v[pos[g.sub]]
            elif isinstance(g, And):
                v[i] = v[pos[g.left]] and v[pos[g.right]]
            elif isinstance(g, Or):
                v[i] = v[pos[g.left]] or v[pos[g.right]]
            elif isinstance(g, Next):
                v[i] = nxt is not None and nxt[pos[g.sub]]
            elif isinstance(g, Until):
                v[i] = v[pos[g.right]] or (
                    v[pos[g.left]] and nxt is not None and nxt[i])
        return tuple(v)

    end = "end"
    transitions = set()
    seen = set()
    frontier = [None]
    while frontier:
        nxt = frontier.pop()
        target = end if nxt is None else nxt
        for w in worlds:
            v = valuation(w, nxt)
            transitions.add((v, world_symbol(w), target))
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    root = pos[f]
    initial = {v for v in seen if v[root]}
    # keep only what is reachable from an initial state
    succ: dict = {}
    for q, a, r in transitions:
        succ.setdefault(q, []).append(r)
    reach = set(initial)
    stack = list(initial)
    while stack:
        q = stack.pop()
        for r in succ.get(q, ()):
            if r not in reach:
                reach.add(r)
                stack.append(r)
    reach.add(end)
    order = sorted(reach, key=lambda q: (q == end, q if q != end else ()))
    index = {q: i for i, q in enumerate(order)}
    return Nfa(
        frozenset(index.values()),
        frozenset(world_symbol(w) for w in worlds),
        frozenset((index[q], a, index[r]) for q, a, r in transitions if q in reach),
        frozenset(index[q] for q in initial),
        frozenset([index[end]]),
    )


def _parse_world(symbol: str) -> frozenset:
    body = symbol[1:-1]
    return frozenset(body.split(",")) if body else frozenset()


def literal_expand_nfa(A: Nfa, props: Sequence[str], positive: str | None = None,
                       negative: str | None = None) -> Nfa:
    """Replace every world letter by its chain of ``len(props)`` literals.

    By default proposition ``P`` is spelled ``P`` or ``!P``; passing
    ``positive``/``negative`` spells every proposition with those two
    symbols instead (the position inside a block identifies it).
    Chains leaving the same state share their common prefixes.
    """
    props = tuple(props)
    if not props:
        raise UsageError("literal expansion needs at least one proposition")

    def spell(p, present):
        if positive is None:
            return literal(p, present)
        return positive if present else negative

    transitions = set()
    mids: dict = {}
    for q, w, r in A.transitions:
        world = _parse_world(w)
        word = [spell(p, p in world) for p in props]
        src = ("q", q)
        for j, sym in enumerate(word[:-1]):
            key = (q, tuple(word[: j + 1]))
            mid = mids.setdefault(key, ("m", len(mids)))
            transitions.add((src, sym, mid))
            src = mid
        transitions.add((src, word[-1], ("q", r)))
    if positive is None:
        alphabet = {s for p in props for s in (p, negated(p))}
    else:
        alphabet = {positive, negative}
    states = [("q", q) for q in sorted(A.states, key=repr)] + sorted(mids.values())
    index = {s: i for i, s in enumerate(states)}
    return Nfa(
        frozenset(index.values()),
        frozenset(alphabet),
        frozenset((index[a], sym, index[b]) for a, sym, b in transitions),
        frozenset(index[("q", q)] for q in A.initial),
        frozenset(index[("q", q)] for q in A.final),
    )


@lru_cache(maxsize=128)
def _literal_automaton(f: Formula, props: tuple[str, ...]) -> Nfa:
    return literal_expand_nfa(tl_to_nfa(f, props), props)


_POS, _NEG = "pos", "neg"


@lru_cache(maxsize=128)
def _sign_automaton(f: Formula, props: tuple[str, ...]) -> Nfa:
    return literal_expand_nfa(tl_to_nfa(f, props), props, positive=_POS, negative=_NEG)


def expansion_props(f: Formula, props: Iterable[str] | None = None) -> tuple[str, ...]:
    """Propositions spelled out by the expansion: those of ``f`` unless a
    superset is given."""
    own = propositions(f)
    if props is None:
        return own
    props = tuple(sorted(set(props)))
    if not set(own) <= set(props):
        raise UsageError("props must include every proposition of the formula")
    return props


def _constant_distance(d: Sequence[int], f: Formula) -> DistanceResult:
    # no propositions: the expansion is empty and only satisfiability matters
    return DistanceResult(0.0 if satisfies([frozenset()] * len(d), f) else math.inf)


def semdist1_tl(table: SimTable, d: Sequence[int] | None, f: Formula, k: Norm,
                props: Iterable[str] | None = None) -> DistanceResult:
    """First semantic distance: nearest satisfying trace of the same length.

    ``props`` widens the expansion to a superset of the formula's own
    propositions; equivalent formulas agree once expanded over the same set.
    """
    k = check_norm(k)
    d = state_range(table, d)
    if not d:
        raise UsageError("temporal formulas are evaluated on nonempty sequences")
    props = expansion_props(f, props)
    table.check_symbols(props)
    if not props:
        return _constant_distance(d, f)
    if len(props) > MAX_PROPS:
        raise ResourceError(f"{len(props)} propositions exceed the cap of {MAX_PROPS}")
    return distance1(table, expn_states(d, len(props)), _literal_automaton(f, props), k)


def _sign_table(table: SimTable, d: Sequence[int], props: Sequence[str]) -> SimTable:
    rows = []
    for i in d:
        for p in props:
            rows.append({_POS: table.simval(i, p), _NEG: table.simval(i, negated(p))})
    return SimTable((_POS, _NEG), tuple(rows))


def semdist2_tl(table: SimTable, d: Sequence[int] | None, f: Formula, k: Norm,
                props: Iterable[str] | None = None,
                max_props: int = SEM2_MAX_PROPS, max_length: int = SEM2_MAX_LENGTH,
                max_states: int = DEFAULT_MAX_STATES) -> DistanceResult:
    """Second semantic distance, wildcarding literals position by position.

    At an expanded position only the two literals of that position's
    proposition compete, so each proposition is spelled with the shared
    symbols ``pos``/``neg`` and the plain wildcard-closure construction over
    that two-letter alphabet applies.
    """
    k = check_norm(k)
    d = state_range(table, d)
    if not d:
        raise UsageError("temporal formulas are evaluated on nonempty sequences")
    props = expansion_props(f, props)
    table.check_symbols(props)
    if len(props) > max_props:
        raise ResourceError(f"{len(props)} propositions exceed the cap of {max_props}")
    if len(d) > max_length:
        raise ResourceError(f"sequence length {len(d)} exceeds the cap of {max_length}")
    if not props:
        return _constant_distance(d, f)
    signs = _sign_table(table, d, props)
    return distance2(signs, None, _sign_automaton(f, props), k, max_states=max_states)

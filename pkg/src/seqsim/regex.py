"""Regular-expression queries.

Expressions are built from atom symbols with juxtaposition (concatenation),
``|`` and postfix ``*``.  The syntactic distance coincides with the first
semantic distance, so both are computed by running the automaton engines
over a Thompson automaton with its epsilon moves removed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import DistanceResult, Norm, SimTable, check_norm, state_range
from .distance import distance1, distance2
from .errors import QueryParseError
from .nfa import DEFAULT_MAX_STATES, Nfa


class Regex:
    __slots__ = ()


@dataclass(frozen=True)
class Sym(Regex):
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Alt(Regex):
    left: Regex
    right: Regex

    def __str__(self):
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex

    def __str__(self):
        return f"({self.left} {self.right})"


@dataclass(frozen=True)
class Star(Regex):
    sub: Regex

    def __str__(self):
        return f"{self.sub}*"


def length(f: Regex) -> int:
    if isinstance(f, Sym):
        return 1
    if isinstance(f, Star):
        return 1 + length(f.sub)
    return 1 + length(f.left) + length(f.right)


def symbols(f: Regex) -> frozenset:
    if isinstance(f, Sym):
        return frozenset([f.name])
    if isinstance(f, Star):
        return symbols(f.sub)
    return symbols(f.left) | symbols(f.right)


_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[|*()]")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise QueryParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(), pos))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, atoms):
        self.tokens = _tokenize(text)
        self.i = 0
        self.atoms = atoms

    def peek(self):
        return self.tokens[self.i][0]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        f = self.alternation()
        tok, pos = self.take()
        if tok is not None:
            raise QueryParseError(f"unexpected token {tok!r}", pos)
        return f

    def alternation(self):
        f = self.concatenation()
        while self.peek() == "|":
            self.take()
            f = Alt(f, self.concatenation())
        return f

    def concatenation(self):
        f = self.postfix()
        while self.peek() not in (None, "|", ")", "*"):
            f = Concat(f, self.postfix())
        return f

    def postfix(self):
        f = self.primary()
        while self.peek() == "*":
            self.take()
            f = Star(f)
        return f

    def primary(self):
        tok, pos = self.take()
        if tok == "(":
            f = self.alternation()
            got, where = self.take()
            if got != ")":
                raise QueryParseError("expected ')'", where)
            return f
        if tok is None:
            raise QueryParseError("unexpected end of input", pos)
        if tok in ("|", ")", "*"):
            raise QueryParseError(f"unexpected token {tok!r}", pos)
        if self.atoms is not None and tok not in self.atoms:
            raise QueryParseError(f"undeclared symbol {tok!r}", pos)
        return Sym(tok)


def parse_regex(text: str, atoms: Iterable[str] | None = None) -> Regex:
    """Parse an expression.  ``*`` binds tightest, then juxtaposition, then ``|``."""
    return _Parser(text, None if atoms is None else set(atoms)).parse()


# -- automaton ----------------------------------------------------------------

def _thompson(f: Regex):
    """Thompson fragments: returns (symbol moves, epsilon moves, start, accept)."""
    moves: list = []
    eps: list = []
    counter = iter(range(1 << 62))

    def build(g):
        if isinstance(g, Sym):
            s, t = next(counter), next(counter)
            moves.append((s, g.name, t))
            return s, t
        if isinstance(g, Concat):
            s1, t1 = build(g.left)
            s2, t2 = build(g.right)
            eps.append((t1, s2))
            return s1, t2
        if isinstance(g, Alt):
            s, t = next(counter), next(counter)
            for part in (g.left, g.right):
                ps, pt = build(part)
                eps.extend([(s, ps), (pt, t)])
            return s, t
        if isinstance(g, Star):
            s, t = next(counter), next(counter)
            ps, pt = build(g.sub)
            eps.extend([(s, ps), (pt, t), (s, t), (pt, ps)])
            return s, t
        raise TypeError(f"not a regex: {g!r}")

    start, accept = build(f)
    return moves, eps, start, accept


def regex_to_nfa(f: Regex, alphabet: Iterable[str] | None = None) -> Nfa:
    """Epsilon-free automaton for ``L(f)``.

    Built by Thompson's construction; each state then absorbs the moves and
    acceptance of its epsilon closure, and only the start state and targets
    of symbol moves are kept.  ``alphabet`` defaults to the symbols of ``f``.
    """
    alphabet = symbols(f) if alphabet is None else frozenset(alphabet) | symbols(f)
    return _regex_to_nfa(f, alphabet)


@lru_cache(maxsize=256)
def _regex_to_nfa(f: Regex, alphabet: frozenset) -> Nfa:
    moves, eps, start, accept = _thompson(f)
    eps_out: dict = {}
    for p, q in eps:
        eps_out.setdefault(p, []).append(q)
    moves_out: dict = {}
    for p, a, q in moves:
        moves_out.setdefault(p, []).append((a, q))

    def closure(p):
        seen = {p}
        stack = [p]
        while stack:
            for q in eps_out.get(stack.pop(), ()):
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
        return seen

    keep = [start] + sorted({q for _, _, q in moves} - {start})
    index = {p: i for i, p in enumerate(keep)}
    transitions = set()
    final = set()
    for p in keep:
        reach = closure(p)
        if accept in reach:
            final.add(index[p])
        for r in reach:
            for a, q in moves_out.get(r, ()):
                transitions.add((index[p], a, index[q]))
    return Nfa(frozenset(index.values()), alphabet, frozenset(transitions),
               frozenset([0]), frozenset(final))


# -- distances ----------------------------------------------------------------

def syndist_regex(table: SimTable, d: Sequence[int] | None, f: Regex, k: Norm) -> DistanceResult:
    """Syntactic distance, equal to the nearest-string distance over ``L(f)``."""
    k = check_norm(k)
    d = state_range(table, d)
    return distance1(table, d, regex_to_nfa(f), k)


def semdist1_regex(table: SimTable, d: Sequence[int] | None, f: Regex, k: Norm) -> DistanceResult:
    return syndist_regex(table, d, f, k)


def semdist2_regex(table: SimTable, d: Sequence[int] | None, f: Regex, k: Norm,
                   max_states: int = DEFAULT_MAX_STATES) -> DistanceResult:
    """Second semantic distance; wildcard closure ranges over the table's atoms."""
    k = check_norm(k)
    d = state_range(table, d)
    A = regex_to_nfa(f, alphabet=table.atoms)
    return distance2(table, d, A, k, max_states=max_states)

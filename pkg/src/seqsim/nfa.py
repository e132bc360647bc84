"""Finite automata over named symbols and the language algebra on them.

Besides acceptance and complementation this module builds, for an automaton
``A`` over ``delta``, an automaton accepting ``maximal(closure(L(A)))``: the
wildcard-closed language of ``A`` reduced to its wildcard-maximal strings.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping

from .core import PHI
from .errors import DataError, ResourceError, UsageError

State = Hashable
Symbol = str
Transition = tuple[State, Symbol, State]

#: Cap on the number of subsets a single determinization may create.
DEFAULT_MAX_STATES = 200_000
#: Cap on the number of candidate strings enumerate_length_n may test.
DEFAULT_ENUM_BUDGET = 10**6


@dataclass(frozen=True)
class Nfa:
    states: frozenset
    alphabet: frozenset
    transitions: frozenset = field(repr=False)
    initial: frozenset
    final: frozenset

    def __post_init__(self):
        for name in ("states", "alphabet", "transitions", "initial", "final"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        if not self.initial <= self.states:
            raise DataError("initial states must be declared states")
        if not self.final <= self.states:
            raise DataError("final states must be declared states")
        for q, a, r in self.transitions:
            if q not in self.states or r not in self.states:
                raise DataError(f"transition {(q, a, r)!r} uses an undeclared state")
            if a not in self.alphabet:
                raise DataError(f"transition {(q, a, r)!r} uses an undeclared symbol")

    @classmethod
    def build(cls, alphabet: Iterable[Symbol], transitions: Iterable[Transition],
              initial: Iterable[State], final: Iterable[State],
              states: Iterable[State] = ()) -> "Nfa":
        """Construct an automaton; states are inferred from the other arguments."""
        transitions = frozenset(tuple(t) for t in transitions)
        initial, final = frozenset(initial), frozenset(final)
        all_states = set(states) | initial | final
        for q, _, r in transitions:
            all_states.update((q, r))
        return cls(frozenset(all_states), frozenset(alphabet), transitions, initial, final)

    @property
    def size(self) -> int:
        return len(self.states) + len(self.transitions)

    @cached_property
    def successors(self) -> Mapping[State, tuple[tuple[Symbol, State], ...]]:
        out: dict = {q: [] for q in self.states}
        for q, a, r in sorted(self.transitions, key=_transition_key):
            out[q].append((a, r))
        return {q: tuple(v) for q, v in out.items()}

    @cached_property
    def _delta(self) -> Mapping[tuple[State, Symbol], frozenset]:
        out: dict = {}
        for q, a, r in self.transitions:
            out.setdefault((q, a), set()).add(r)
        return {key: frozenset(v) for key, v in out.items()}

    @property
    def has_wildcard_transitions(self) -> bool:
        return any(a == PHI for _, a, _ in self.transitions)

    def step(self, current: Iterable[State], symbol: Symbol) -> frozenset:
        delta = self._delta
        return frozenset(r for q in current for r in delta.get((q, symbol), ()))

    def symbols(self) -> list[Symbol]:
        return sorted(self.alphabet)

    # -- JSON exchange format ------------------------------------------------

    def to_json_obj(self) -> dict:
        order = {q: i for i, q in enumerate(sorted(self.states, key=_state_key))}
        name = {q: q if isinstance(q, str) else f"s{order[q]}" for q in self.states}
        return {
            "alphabet": sorted(a for a in self.alphabet if a != PHI),
            "states": [name[q] for q in sorted(self.states, key=_state_key)],
            "initial": sorted(name[q] for q in self.initial),
            "final": sorted(name[q] for q in self.final),
            "transitions": sorted([name[q], a, name[r]] for q, a, r in self.transitions),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    @classmethod
    def from_json_obj(cls, obj) -> "Nfa":
        if not isinstance(obj, dict):
            raise DataError("automaton JSON must be an object")
        missing = {"alphabet", "states", "initial", "final", "transitions"} - obj.keys()
        if missing:
            raise DataError(f"automaton JSON lacks keys: {sorted(missing)}")
        alphabet = obj["alphabet"]
        if not all(isinstance(a, str) for a in alphabet):
            raise DataError("alphabet entries must be strings")
        if PHI in alphabet:
            raise DataError(f"the wildcard {PHI!r} must not be declared in the alphabet")
        transitions = []
        for t in obj["transitions"]:
            if not isinstance(t, (list, tuple)) or len(t) != 3:
                raise DataError(f"malformed transition {t!r}")
            transitions.append(tuple(t))
        symbols = set(alphabet)
        if any(a == PHI for _, a, _ in transitions):
            symbols.add(PHI)
        return cls(frozenset(obj["states"]), frozenset(symbols), frozenset(transitions),
                   frozenset(obj["initial"]), frozenset(obj["final"]))

    @classmethod
    def from_json(cls, text: str) -> "Nfa":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"automaton is not valid JSON: {exc}") from exc
        return cls.from_json_obj(obj)


def _state_key(q):
    return (type(q).__name__, repr(q))


def _transition_key(t):
    q, a, r = t
    return (_state_key(q), a, _state_key(r))


@dataclass(frozen=True)
class LanguageSample:
    length: int
    strings: frozenset

    def __post_init__(self):
        object.__setattr__(self, "strings", frozenset(tuple(s) for s in self.strings))
        for s in self.strings:
            if len(s) != self.length:
                raise UsageError(f"string {s!r} does not have length {self.length}")

    def __iter__(self):
        return iter(sorted(self.strings))

    def __len__(self) -> int:
        return len(self.strings)

    def __contains__(self, s) -> bool:
        return tuple(s) in self.strings


def accepts(A: Nfa, a: Iterable[Symbol]) -> bool:
    current = A.initial
    for s in a:
        if s not in A.alphabet:
            raise DataError(f"symbol {s!r} is not in the automaton's alphabet")
        current = A.step(current, s)
        if not current:
            return False
    return bool(current & A.final)


def _relabel(alphabet, transitions, initial, final, states) -> Nfa:
    """Rename arbitrary state keys to consecutive ints."""
    index = {q: i for i, q in enumerate(states)}
    return Nfa(
        frozenset(index.values()),
        frozenset(alphabet),
        frozenset((index[q], a, index[r]) for q, a, r in transitions),
        frozenset(index[q] for q in initial),
        frozenset(index[q] for q in final),
    )


def determinize(A: Nfa, max_states: int = DEFAULT_MAX_STATES) -> Nfa:
    """Complete DFA for ``L(A)`` by the reachable-subset construction.

    The empty subset plays the role of the sink and appears only when some
    transition is missing.  States of the result are ints, 0 the initial one.
    """
    symbols = A.symbols()
    delta = A._delta
    start = frozenset(A.initial)
    index = {start: 0}
    queue = [start]
    transitions = []
    while queue:
        subset = queue.pop()
        src = index[subset]
        for a in symbols:
            target = frozenset(r for q in subset for r in delta.get((q, a), ()))
            dst = index.get(target)
            if dst is None:
                if len(index) >= max_states:
                    raise ResourceError(
                        f"determinization exceeded {max_states} states")
                dst = index[target] = len(index)
                queue.append(target)
            transitions.append((src, a, dst))
    final = [i for subset, i in index.items() if subset & A.final]
    return Nfa(frozenset(index.values()), A.alphabet, frozenset(transitions),
               frozenset([0]), frozenset(final))


def complement(A: Nfa, max_states: int = DEFAULT_MAX_STATES) -> Nfa:
    """Automaton for ``alphabet* - L(A)`` over A's declared alphabet."""
    D = determinize(A, max_states)
    return Nfa(D.states, D.alphabet, D.transitions, D.initial, D.states - D.final)


def minimize(A: Nfa) -> Nfa:
    """Minimal complete DFA for ``L(A)`` (Moore partition refinement)."""
    D = determinize(A)
    symbols = D.symbols()
    delta = {(q, a): r for q, a, r in D.transitions}
    block = {q: int(q in D.final) for q in D.states}
    count = len(set(block.values()))
    while True:
        signatures: dict = {}
        refined = {}
        for q in sorted(D.states):
            sig = (block[q],) + tuple(block[delta[q, a]] for a in symbols)
            refined[q] = signatures.setdefault(sig, len(signatures))
        block = refined
        if len(signatures) == count:
            break
        count = len(signatures)
    start = block[0]
    # renumber so that the initial block is 0
    order = {start: 0}
    for q in sorted(D.states):
        order.setdefault(block[q], len(order))
    transitions = {(order[block[q]], a, order[block[r]]) for (q, a), r in delta.items()}
    return Nfa(frozenset(order.values()), D.alphabet, frozenset(transitions),
               frozenset([0]), frozenset(order[block[q]] for q in D.final))


def closure_complement(Abar: Nfa, delta: Iterable[Symbol]) -> Nfa:
    """Accept ``alpha`` over ``delta + PHI`` iff some wildcard filling is in ``L(Abar)``.

    With ``Abar`` accepting the complement of ``L`` this is the complement of
    ``closure(L)``: a string lies in the closure exactly when every filling of
    its wildcards lies in ``L``.  Same states as ``Abar``.
    """
    delta = frozenset(delta)
    if not delta:
        raise UsageError("closure needs a non-empty alphabet")
    if PHI in delta:
        raise UsageError("the wildcard cannot be part of the closure alphabet")
    if not Abar.alphabet <= delta:
        raise UsageError("automaton alphabet must be contained in delta")
    transitions = set(Abar.transitions)
    transitions.update((q, PHI, r) for q, a, r in Abar.transitions)
    return Nfa(Abar.states, delta | {PHI}, frozenset(transitions), Abar.initial, Abar.final)


def _refinement_union(C: Nfa, Cbar: Nfa, delta: frozenset) -> Nfa:
    """Accept ``alpha`` iff ``C`` accepts it or some ``beta > alpha`` is in ``L(Cbar)``.

    The second branch walks ``Cbar`` while rewriting input symbols from
    ``delta`` to the wildcard at will; a flag records that at least one
    rewrite happened and acceptance there requires it.
    """
    transitions = [(("c", q), a, ("c", r)) for q, a, r in C.transitions]
    for s, x, t in Cbar.transitions:
        for flag in (0, 1):
            transitions.append((("b", s, flag), x, ("b", t, flag)))
            if x == PHI:
                for a in delta:
                    transitions.append((("b", s, flag), a, ("b", t, 1)))
    states = [("c", q) for q in C.states]
    states += [("b", s, f) for s in Cbar.states for f in (0, 1)]
    initial = [("c", q) for q in C.initial] + [("b", s, 0) for s in Cbar.initial]
    final = [("c", q) for q in C.final] + [("b", s, 1) for s in Cbar.final]
    return _relabel(C.alphabet, transitions, initial, final, states)


def maximal_automaton(A: Nfa, max_states: int = DEFAULT_MAX_STATES) -> Nfa:
    """Automaton over ``alphabet + PHI`` accepting ``maximal(closure(L(A)))``.

    Four complementations deep, so the worst case is triple exponential in
    the size of ``A``; meant for small query automata.
    """
    if PHI in A.alphabet:
        raise UsageError("maximal_automaton expects an automaton without wildcards")
    delta = A.alphabet
    if not delta:
        raise UsageError("maximal_automaton needs a non-empty alphabet")
    return _maximal_automaton_cached(A, max_states)


@lru_cache(maxsize=256)
def _maximal_automaton_cached(A: Nfa, max_states: int) -> Nfa:
    delta = A.alphabet
    Abar = minimize(complement(A, max_states))
    C = closure_complement(Abar, delta)
    Cbar = minimize(complement(C, max_states))
    D = _refinement_union(C, Cbar, delta)
    return minimize(complement(D, max_states))


def enumerate_length_n(A: Nfa, n: int, budget: int = DEFAULT_ENUM_BUDGET) -> LanguageSample:
    """All accepted strings of length ``n``."""
    if n < 0:
        raise UsageError("length must be nonnegative")
    symbols = A.symbols()
    if len(symbols) ** n > budget:
        raise ResourceError(
            f"enumerating {len(symbols)}^{n} strings exceeds the budget of {budget}")
    found = []

    def walk(prefix, current):
        if len(prefix) == n:
            if current & A.final:
                found.append(tuple(prefix))
            return
        for a in symbols:
            nxt = A.step(current, a)
            if nxt:
                prefix.append(a)
                walk(prefix, nxt)
                prefix.pop()

    if A.initial:
        walk([], A.initial)
    return LanguageSample(n, frozenset(found))


def all_strings(alphabet: Iterable[Symbol], n: int):
    return itertools.product(sorted(alphabet), repeat=n)


def universal(alphabet: Iterable[Symbol]) -> Nfa:
    """One-state automaton accepting every string over ``alphabet``."""
    alphabet = frozenset(alphabet)
    return Nfa(frozenset([0]), alphabet, frozenset((0, a, 0) for a in alphabet),
               frozenset([0]), frozenset([0]))


def from_strings(alphabet: Iterable[Symbol], strings: Iterable[Iterable[Symbol]]) -> Nfa:
    """Trie automaton accepting exactly the given finite set of strings."""
    transitions = []
    nodes = {(): 0}
    final = set()
    for s in strings:
        s = tuple(s)
        for i in range(len(s)):
            prefix = s[: i + 1]
            if prefix not in nodes:
                nodes[prefix] = len(nodes)
                transitions.append((nodes[s[:i]], s[i], nodes[prefix]))
        final.add(nodes[s])
    return Nfa(frozenset(nodes.values()), frozenset(alphabet), frozenset(transitions),
               frozenset([0]), frozenset(final))

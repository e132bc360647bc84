import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from seqsim.core import SimTable
from seqsim.errors import QueryParseError, ResourceError, UsageError
from seqsim.nfa import Nfa, accepts, enumerate_length_n
from seqsim.oracle import (
    oracle_semdist1_tl, oracle_semdist2_tl, oracle_syndist_tl, oracle_tl_models,
)
from seqsim.tl import (
    And, Atom, FalseConst, Next, Not, Or, TrueConst, Until, all_worlds, expn_states,
    expn_world_string, is_nnf, literal_expand_nfa, parse_tl, propositions, satisfies,
    semdist1_tl, semdist2_tl, syndist_tl, tl_to_nfa, world_symbol,
)

from generators import rand_table, rand_tl, same

P, Q, R = Atom("P"), Atom("Q"), Atom("R")
NORMS = (1, 2, math.inf)
seeds = st.integers(0, 10**6)


def table(*rows):
    atoms = sorted({a for r in rows for a in r if not a.startswith("!")})
    return SimTable.from_rows(atoms, rows)


def test_parse_examples():
    assert parse_tl("P U (Q & X R)") == Until(P, And(Q, Next(R)))
    assert parse_tl("!P & Q") == And(Not(P), Q)
    assert parse_tl("P U Q U R") == Until(P, Until(Q, R))
    assert parse_tl("P | Q & R") == Or(P, And(Q, R))
    assert parse_tl("X !true | false") == Or(Next(Not(TrueConst())), FalseConst())
    assert P & Q == And(P, Q) and ~P == Not(P)
    assert str(parse_tl("P U Q U R")) == "(P U (Q U R))"


@pytest.mark.parametrize("text,pos", [("P &", 3), ("P Q", 2), ("(P", 2), ("P $ Q", 2), ("", 0)])
def test_parse_errors(text, pos):
    with pytest.raises(QueryParseError) as exc:
        parse_tl(text)
    assert exc.value.position == pos


def test_parse_undeclared_proposition():
    with pytest.raises(QueryParseError, match="position 4"):
        parse_tl("P & Z", ["P", "Q"])


def test_satisfies_examples():
    assert satisfies([{"P"}], P)
    assert not satisfies([{"P"}], Q)
    assert satisfies([{"P"}, {"P"}, {"Q"}], Until(P, Q))
    assert not satisfies([{"P"}, set(), {"Q"}], Until(P, Q))
    assert not satisfies([{"P"}], Next(P))
    with pytest.raises(UsageError):
        satisfies([], P)


def test_syndist_examples():
    assert syndist_tl(table({"P": 0.3}), None, P, 1).distance == pytest.approx(0.7)
    t = table({"P": 0.3, "Q": 0.8})
    assert syndist_tl(t, None, P & Q, 2).distance == pytest.approx(0.7)
    t = table({"P": 0.9, "Q": 0.1}, {"P": 0.0, "Q": 0.8})
    assert syndist_tl(t, None, Until(P, Q), 1).distance == pytest.approx(0.15)
    assert syndist_tl(table({"P": 1.0}), None, Next(P), 1).distance == math.inf


def test_syndist_negation():
    t = table({"P": 0.3, "!P": 0.1})
    assert syndist_tl(t, None, Not(P), 1).distance == pytest.approx(0.9)
    assert syndist_tl(table({"P": 0.3}), None, Not(P), 1).distance == pytest.approx(0.3)
    # negating an impossible subformula costs nothing
    assert syndist_tl(table({"P": 1.0}), None, Not(Next(P)), 1).distance == 0.0


def test_expansions():
    assert expn_states([0, 1], 2) == [0, 0, 1, 1]
    assert expn_states([0, 1, 2], 1) == [0, 1, 2]
    assert expn_states([0, 1, 2], 3) == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert expn_world_string([{"P"}], ["P", "Q"]) == ["P", "!Q"]
    assert expn_world_string([set(), {"P", "Q"}], ["P", "Q"]) == ["!P", "!Q", "P", "Q"]
    assert expn_world_string([{"P"}, set()], ["P"]) == ["P", "!P"]


@pytest.mark.parametrize("f", [P, TrueConst(), Until(P, Q), Next(Not(P)), Or(P, Next(Q))])
def test_tl_to_nfa_matches_satisfies(f):
    props = propositions(f) or ("P",)
    A = tl_to_nfa(f, props)
    for n in range(1, 4):
        for s in itertools.product(all_worlds(props), repeat=n):
            assert accepts(A, [world_symbol(w) for w in s]) == satisfies(s, f)
    assert not accepts(A, [])


def test_tl_to_nfa_caps():
    f = parse_tl("A & B & C & D & E")
    with pytest.raises(ResourceError):
        tl_to_nfa(f)


def test_literal_expand_examples():
    A = Nfa.build(["{P}", "{}"], [(0, "{P}", 1)], [0], [1])
    E = literal_expand_nfa(A, ["P"])
    assert {a for _, a, _ in E.transitions} == {"P"} and len(E.transitions) == 1
    E2 = literal_expand_nfa(A, ["P", "Q"])
    assert enumerate_length_n(E2, 2).strings == {("P", "!Q")}


@pytest.mark.parametrize("f", [Until(P, Q), Or(Next(P), And(Q, Not(P))), Not(Until(Q, Next(P)))])
def test_literal_expansion_language(f):
    props = propositions(f)
    E = literal_expand_nfa(tl_to_nfa(f), props)
    for n in range(1, 4):
        models = oracle_tl_models(f, props, n)
        expected = {tuple(expn_world_string(s, props)) for s in models}
        assert enumerate_length_n(E, n * len(props)).strings == expected


def test_oracle_models_examples():
    assert oracle_tl_models(TrueConst(), ["P"], 1) == {(frozenset(),), (frozenset("P"),)}
    assert oracle_tl_models(P, ["P"], 1) == {(frozenset("P"),)}
    assert oracle_tl_models(Next(P), ["P"], 2) == {
        (frozenset(), frozenset("P")), (frozenset("P"), frozenset("P"))}


def test_semdist_examples():
    t = table({"P": 0.3})
    assert semdist1_tl(t, None, P, 2).distance == pytest.approx(0.7)
    assert semdist1_tl(t, None, FalseConst(), 2).distance == math.inf
    assert semdist1_tl(t, None, TrueConst(), 2).distance == 0.0
    assert semdist2_tl(t, None, P, 1).distance == semdist1_tl(t, None, P, 1).distance
    t2 = table({"P": 0.2}, {"P": 0.35})
    for k in NORMS:
        assert semdist2_tl(t2, None, Next(P), k).distance == pytest.approx(0.65)


def test_semdist2_caps():
    t = table({"P": 1, "Q": 1, "R": 1})
    with pytest.raises(ResourceError):
        semdist2_tl(t, None, P & Q & R, 1)
    t5 = table(*[{"P": 1}] * 5)
    with pytest.raises(ResourceError):
        semdist2_tl(t5, None, P, 1)


EQUIVALENT = [
    ("!(P & Q)", "!P | !Q"),
    ("P U Q", "Q | (P & X (P U Q))"),
    ("X P & X Q", "X (P & Q)"),
    ("(P & Q) | (P & !Q)", "P & (Q | !Q)"),
    ("(P & Q) | (P & !Q)", "P"),
]


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_semantic_distances_respect_equivalence(seed):
    rng = random.Random(seed)
    t = rand_table(rng, "PQ", rng.randint(1, 3))
    for left, right in EQUIVALENT:
        f, g = parse_tl(left), parse_tl(right)
        for k in NORMS:
            for fn in (semdist1_tl, semdist2_tl):
                assert same(fn(t, None, f, k, props="PQ").distance,
                            fn(t, None, g, k, props="PQ").distance)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_second_distance_ignores_extra_propositions(seed):
    rng = random.Random(seed)
    t = rand_table(rng, "PQ", rng.randint(1, 3))
    f = rand_tl(rng, rng.randint(1, 6), ["P"])
    for k in NORMS:
        narrow = semdist2_tl(t, None, f, k).distance
        assert same(narrow, semdist2_tl(t, None, f, k, props="PQ").distance)
        assert same(narrow, oracle_semdist2_tl(t, None, f, k, props="PQ"))


def test_first_distance_depends_on_extra_propositions():
    # an unconstrained Q still has to pick a literal, costing min(sQ, 1 - sQ)
    t = table({"P": 1.0, "Q": 0.5})
    assert semdist1_tl(t, None, P, math.inf).distance == 0.0
    assert semdist1_tl(t, None, P, math.inf, props="PQ").distance == 0.5
    assert oracle_semdist1_tl(t, None, P, math.inf, props="PQ") == 0.5
    with pytest.raises(UsageError):
        semdist1_tl(t, None, P & Q, 1, props="P")


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_random_formulas_against_oracles(seed):
    rng = random.Random(seed)
    props = ["P", "Q"][: rng.randint(1, 2)]
    f = rand_tl(rng, rng.randint(1, 8), props, nnf=rng.random() < 0.5)
    t = rand_table(rng, props, rng.randint(1, 4))
    for k in NORMS:
        syn = syndist_tl(t, None, f, k).distance
        sem1 = semdist1_tl(t, None, f, k).distance
        sem2 = semdist2_tl(t, None, f, k).distance
        assert same(syn, oracle_syndist_tl(t, None, f, k))
        assert same(sem1, oracle_semdist1_tl(t, None, f, k))
        assert same(sem2, oracle_semdist2_tl(t, None, f, k))
        if k == math.inf:
            assert sem2 <= sem1 + 1e-12
            if is_nnf(f):
                assert syn <= sem1 + 1e-12


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_distances_nondecreasing_in_k(seed):
    rng = random.Random(seed)
    props = ["P", "Q"][: rng.randint(1, 2)]
    f = rand_tl(rng, rng.randint(1, 7), props)
    t = rand_table(rng, props, rng.randint(1, 4))
    for fn in (syndist_tl, semdist1_tl, semdist2_tl):
        values = [fn(t, None, f, k).distance for k in (1, 2, 3, 8, math.inf)]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:])), (fn.__name__, values)

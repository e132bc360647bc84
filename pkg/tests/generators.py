"""Seeded random instance generators shared by the test modules."""
from __future__ import annotations

import itertools
import random

from seqsim.core import PHI, SimTable
from seqsim.nfa import Nfa
from seqsim import regex as rx
from seqsim import tl

GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def rand_table(rng: random.Random, atoms, n: int, grid=GRID, neg_inf: float = 0.0) -> SimTable:
    rows = []
    for _ in range(n):
        row = {}
        for a in atoms:
            row[a] = "-inf" if rng.random() < neg_inf else rng.choice(grid)
        rows.append(row)
    return SimTable.from_rows(list(atoms), rows)


def rand_nfa(rng: random.Random, max_states: int, alphabet, density: float = 0.35,
             wildcard: bool = False) -> Nfa:
    nstates = rng.randint(1, max_states)
    states = list(range(nstates))
    symbols = list(alphabet) + ([PHI] if wildcard else [])
    transitions = [(p, a, q) for p in states for a in symbols for q in states
                   if rng.random() < density]
    initial = [q for q in states if rng.random() < 0.4] or [0]
    final = [q for q in states if rng.random() < 0.5]
    return Nfa.build(symbols, transitions, initial, final, states=states)


def rand_tl(rng: random.Random, size: int, props, nnf: bool = False) -> tl.Formula:
    if size <= 1:
        r = rng.random()
        if r < 0.1:
            return tl.TrueConst()
        if r < 0.15:
            return tl.FalseConst()
        a = tl.Atom(rng.choice(props))
        return tl.Not(a) if nnf and rng.random() < 0.3 else a
    ops = ["X", "&", "|", "U"] + ([] if nnf else ["!"])
    op = rng.choice(ops)
    if op in ("X", "!"):
        sub = rand_tl(rng, size - 1, props, nnf)
        return tl.Next(sub) if op == "X" else tl.Not(sub)
    left = rng.randint(1, size - 2) if size > 2 else 1
    a = rand_tl(rng, left, props, nnf)
    b = rand_tl(rng, max(1, size - 1 - left), props, nnf)
    return {"&": tl.And, "|": tl.Or, "U": tl.Until}[op](a, b)


def all_tl(size: int, prop: str = "P"):
    """Every formula with exactly ``size`` nodes over a single proposition."""
    if size == 1:
        return [tl.Atom(prop), tl.TrueConst(), tl.FalseConst()]
    out = []
    for sub in all_tl(size - 1, prop):
        out += [tl.Not(sub), tl.Next(sub)]
    for left in range(1, size - 1):
        for a, b in itertools.product(all_tl(left, prop), all_tl(size - 1 - left, prop)):
            out += [tl.And(a, b), tl.Or(a, b), tl.Until(a, b)]
    return out


def rand_regex(rng: random.Random, size: int, syms) -> rx.Regex:
    if size <= 1:
        return rx.Sym(rng.choice(syms))
    op = rng.choice("|.*")
    if op == "*":
        return rx.Star(rand_regex(rng, size - 1, syms))
    left = rng.randint(1, size - 2) if size > 2 else 1
    a = rand_regex(rng, left, syms)
    b = rand_regex(rng, max(1, size - 1 - left), syms)
    return rx.Alt(a, b) if op == "|" else rx.Concat(a, b)


def same(x: float, y: float, tol: float = 1e-9) -> bool:
    """Equal within ``tol``; infinities must match exactly."""
    return x == y or abs(x - y) <= tol

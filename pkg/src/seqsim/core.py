"""Extended-value arithmetic, the F_k norm family and pointwise distances.

Distances are plain floats in ``[0, 1]`` or ``math.inf``; similarities are
floats in ``[0, 1]`` or ``-math.inf``.  A norm index ``k`` is an ``int`` in
``1..MAX_K`` or ``math.inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

from .errors import DataError, UsageError

PLUS_INFINITY = math.inf
MINUS_INFINITY = -math.inf
INF = math.inf

#: Reserved wildcard symbol. Always satisfied, never read from a table.
PHI = "PHI"
#: Prefix marking the negated literal of a proposition, e.g. ``"!P"``.
NEG = "!"

MAX_K = 64

Norm = Union[int, float]


def check_norm(k) -> Norm:
    """Validate a norm index and return it normalized (int or ``inf``)."""
    if isinstance(k, bool):
        raise UsageError(f"invalid norm index {k!r}")
    if isinstance(k, float):
        if k == math.inf:
            return math.inf
        if not k.is_integer():
            raise UsageError(f"norm index must be an integer or inf, got {k!r}")
        k = int(k)
    if not isinstance(k, int):
        raise UsageError(f"invalid norm index {k!r}")
    if k < 1:
        raise UsageError(f"norm index must be >= 1, got {k}")
    if k > MAX_K:
        raise UsageError(f"norm index capped at {MAX_K}; use inf for the limit")
    return k


def parse_norm(text: str) -> Norm:
    text = text.strip().lower()
    if text in ("inf", "infinity"):
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"norm must be an integer in 1..{MAX_K} or 'inf', got {text!r}")
    return check_norm(value)


def similarity_of(distance: float) -> float:
    """``1 - distance`` with the infinite distance mapped to ``-inf``."""
    if distance == math.inf:
        return -math.inf
    return 1.0 - distance


def cost_of(simval: float) -> float:
    """Per-position distance ``1 - simval``; a ``-inf`` simval costs ``inf``."""
    return 1.0 - simval


@dataclass(frozen=True)
class DistanceResult:
    distance: float

    @property
    def similarity(self) -> float:
        return similarity_of(self.distance)

    @property
    def is_finite(self) -> bool:
        return self.distance != math.inf


def norm_distance(x: Sequence[float], y: Sequence[float], k: Norm) -> float:
    """Normalized k-norm distance between equal-length vectors.

    For finite ``k`` this is ``(sum |x_i - y_i|^k / n)^(1/k)``; for ``k = inf``
    it is the max component distance.  The finite case is evaluated with the
    largest component factored out so that large ``k`` does not underflow.
    """
    k = check_norm(k)
    if len(x) != len(y):
        raise UsageError(f"vector length mismatch: {len(x)} != {len(y)}")
    n = len(x)
    if n == 0:
        raise UsageError("norm_distance of empty vectors is undefined")
    diffs = [abs(a - b) for a, b in zip(x, y)]
    top = max(diffs)
    if k == math.inf or top == 0.0:
        return top
    if k == 1:
        return sum(diffs) / n
    scaled = sum((v / top) ** k for v in diffs) / n
    return top * scaled ** (1.0 / k)


def negated(atom: str) -> str:
    return NEG + atom


def is_negated(symbol: str) -> bool:
    return symbol.startswith(NEG)


def base_atom(symbol: str) -> str:
    return symbol[len(NEG):] if is_negated(symbol) else symbol


def _check_value(value, where: str) -> float:
    if isinstance(value, str):
        if value.strip().lower() == "-inf":
            return -math.inf
        raise DataError(f"{where}: invalid similarity value {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DataError(f"{where}: invalid similarity value {value!r}")
    value = float(value)
    if value == -math.inf:
        return value
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise DataError(f"{where}: similarity value {value!r} outside [0, 1]")
    return value


@dataclass(frozen=True)
class SimTable:
    """Similarity values of each database state against each atomic query.

    ``rows[i]`` maps every declared atom to its similarity in ``[0, 1]`` or
    ``-inf``.  A row may also carry ``"!P"`` keys overriding the default
    ``simval(u, !P) = 1 - simval(u, P)``.
    """

    atoms: tuple[str, ...]
    rows: tuple[Mapping[str, float], ...] = field(repr=False)

    @classmethod
    def from_rows(cls, atoms: Iterable[str], rows: Iterable[Mapping[str, object]],
                  label: str = "sequence") -> "SimTable":
        atoms = tuple(atoms)
        if len(set(atoms)) != len(atoms):
            raise DataError("duplicate atom names")
        for a in atoms:
            if not a or a == PHI or is_negated(a):
                raise DataError(f"invalid atom name {a!r}")
        declared = set(atoms)
        clean = []
        for i, row in enumerate(rows):
            where = f"{label} state {i}"
            out = {}
            for a in atoms:
                if a not in row:
                    raise DataError(f"{where}: missing atom {a!r}")
                out[a] = _check_value(row[a], f"{where}, atom {a!r}")
            for key, value in row.items():
                if key in declared:
                    continue
                if is_negated(key) and base_atom(key) in declared:
                    out[key] = _check_value(value, f"{where}, literal {key!r}")
                else:
                    raise DataError(f"{where}: undeclared atom {key!r}")
            clean.append(out)
        return cls(atoms, tuple(clean))

    def __len__(self) -> int:
        return len(self.rows)

    def knows(self, symbol: str) -> bool:
        if symbol == PHI:
            return True
        return base_atom(symbol) in self.atoms

    def simval(self, state: int, symbol: str) -> float:
        """Similarity of state ``state`` with atom or negated literal ``symbol``."""
        if symbol == PHI:
            return 1.0
        row = self.rows[state]
        value = row.get(symbol)
        if value is not None:
            return value
        if is_negated(symbol):
            base = row.get(base_atom(symbol))
            if base is not None:
                return base if base == -math.inf else 1.0 - base
        raise DataError(f"undeclared symbol {symbol!r}")

    def check_symbols(self, symbols: Iterable[str]) -> None:
        for s in symbols:
            if not self.knows(s):
                raise DataError(f"query symbol {s!r} is not a declared atom")


def state_range(table: SimTable, d: Sequence[int] | None) -> tuple[int, ...]:
    if d is None:
        return tuple(range(len(table)))
    return tuple(d)


def simvec(table: SimTable, d: Sequence[int], a: Sequence[str]) -> list[float]:
    """Similarities at the non-wildcard positions of ``a``, in order."""
    if len(d) != len(a):
        raise UsageError(f"length mismatch: {len(d)} states vs {len(a)} symbols")
    return [table.simval(i, s) for i, s in zip(d, a) if s != PHI]


def dist(table: SimTable, d: Sequence[int], a: Sequence[str], k: Norm) -> float:
    """Distance of the state sequence ``d`` from the symbol string ``a``."""
    k = check_norm(k)
    if len(d) != len(a):
        return math.inf
    vec = simvec(table, d, a)
    if not vec:
        return 0.0
    if any(v == -math.inf for v in vec):
        return math.inf
    return norm_distance(vec, [1.0] * len(vec), k)

"""Command-line retrieval over a dataset of similarity tables.

    seqsim eval   --data FILE --query-kind nfa|tl|regex --query Q
                  --measure syn|sem1|sem2 --norm 1..64|inf
                  [--threshold T] [--output json|tsv] [--drop-infinite]
    seqsim oracle <same flags>

``eval`` prints ranked results; ``oracle`` recomputes every distance by
brute force and reports the deviation from the engines.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import oracle, regex, tl
from .core import PHI, Norm, SimTable, check_norm, parse_norm, similarity_of
from .distance import distance1, distance2
from .errors import DataError, QueryParseError, SeqsimError, UsageError
from .nfa import Nfa

KINDS = ("nfa", "tl", "regex")
MEASURES = ("syn", "sem1", "sem2")
TOLERANCE = 1e-9
#: Exit status of ``seqsim oracle`` when some sequence deviates.
EXIT_CROSS_CHECK_FAILED = 5


@dataclass(frozen=True)
class Dataset:
    atoms: tuple[str, ...]
    sequences: tuple[tuple[str, SimTable], ...]


@dataclass(frozen=True)
class RankedResult:
    id: str
    distance: float
    rank: int

    @property
    def similarity(self) -> float:
        return similarity_of(self.distance)


def parse_dataset(obj) -> Dataset:
    if not isinstance(obj, dict) or "atoms" not in obj or "sequences" not in obj:
        raise DataError('dataset must be an object with "atoms" and "sequences"')
    atoms = obj["atoms"]
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise DataError('"atoms" must be a list of strings')
    seen = set()
    sequences = []
    for pos, seq in enumerate(obj["sequences"]):
        if not isinstance(seq, dict) or "id" not in seq or "states" not in seq:
            raise DataError(f'sequence #{pos} needs "id" and "states"')
        sid = str(seq["id"])
        if sid in seen:
            raise DataError(f"duplicate sequence id {sid!r}")
        seen.add(sid)
        states = seq["states"]
        if not isinstance(states, list) or not all(isinstance(s, dict) for s in states):
            raise DataError(f"sequence {sid!r}: states must be a list of objects")
        sequences.append((sid, SimTable.from_rows(atoms, states, label=f"sequence {sid!r}")))
    return Dataset(tuple(atoms), tuple(sequences))


def ingest(path: str) -> Dataset:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read dataset {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"dataset {path!r} is not valid JSON: {exc}") from exc
    return parse_dataset(obj)


def _read_query_text(query: str) -> str:
    if os.path.isfile(query):
        with open(query, encoding="utf-8") as fh:
            return fh.read()
    return query


def parse_query(kind: str, text: str, atoms: Sequence[str]):
    """Parse query text of the given kind against the dataset's atoms."""
    if kind == "nfa":
        try:
            A = Nfa.from_json(text)
        except DataError as exc:
            raise QueryParseError(str(exc)) from exc
        undeclared = sorted(set(A.alphabet) - set(atoms) - {PHI})
        if undeclared:
            raise QueryParseError(f"automaton symbols {undeclared} are not dataset atoms")
        return A
    if kind == "tl":
        return tl.parse_tl(text, atoms)
    if kind == "regex":
        return regex.parse_regex(text, atoms)
    raise UsageError(f"unknown query kind {kind!r}")


Engine = Callable[[SimTable, object, Norm], float]

ENGINES: dict[tuple[str, str], Engine] = {
    ("nfa", "sem1"): lambda t, q, k: distance1(t, None, q, k).distance,
    ("nfa", "sem2"): lambda t, q, k: distance2(t, None, q, k).distance,
    ("tl", "syn"): lambda t, q, k: tl.syndist_tl(t, None, q, k).distance,
    ("tl", "sem1"): lambda t, q, k: tl.semdist1_tl(t, None, q, k).distance,
    ("tl", "sem2"): lambda t, q, k: tl.semdist2_tl(t, None, q, k).distance,
    ("regex", "syn"): lambda t, q, k: regex.syndist_regex(t, None, q, k).distance,
    ("regex", "sem1"): lambda t, q, k: regex.semdist1_regex(t, None, q, k).distance,
    ("regex", "sem2"): lambda t, q, k: regex.semdist2_regex(t, None, q, k).distance,
}

ORACLES: dict[tuple[str, str], Engine] = {
    ("nfa", "sem1"): lambda t, q, k: oracle.oracle_nfa_distance1(t, None, q, k),
    ("nfa", "sem2"): lambda t, q, k: oracle.oracle_nfa_distance2(t, None, q, k),
    ("tl", "syn"): lambda t, q, k: oracle.oracle_syndist_tl(t, None, q, k),
    ("tl", "sem1"): lambda t, q, k: oracle.oracle_semdist1_tl(t, None, q, k),
    ("tl", "sem2"): lambda t, q, k: oracle.oracle_semdist2_tl(t, None, q, k),
    ("regex", "syn"): lambda t, q, k: oracle.oracle_syndist_regex(t, None, q, k),
    ("regex", "sem1"): lambda t, q, k: oracle.oracle_regex_distance1(t, None, q, k),
    ("regex", "sem2"): lambda t, q, k: oracle.oracle_regex_distance2(t, None, q, k),
}


def _lookup(table: dict, kind: str, measure: str) -> Engine:
    if kind not in KINDS:
        raise UsageError(f"unknown query kind {kind!r}")
    if measure not in MEASURES:
        raise UsageError(f"unknown measure {measure!r}")
    try:
        return table[kind, measure]
    except KeyError:
        raise UsageError(f"measure {measure!r} is not defined for {kind} queries") from None


def rank(distances: Sequence[tuple[str, float]], threshold: float | None = None,
         drop_infinite: bool = False) -> list[RankedResult]:
    """Filter and order by similarity descending, ties by id."""
    kept = []
    for sid, dval in distances:
        if drop_infinite and dval == math.inf:
            continue
        if threshold is not None and not similarity_of(dval) >= threshold:
            continue
        kept.append((sid, dval))
    kept.sort(key=lambda item: (-similarity_of(item[1]), item[0]))
    return [RankedResult(sid, dval, i) for i, (sid, dval) in enumerate(kept, start=1)]


def evaluate(dataset: Dataset, query, kind: str, measure: str, k: Norm,
             threshold: float | None = None, drop_infinite: bool = False,
             engine: Engine | None = None) -> list[RankedResult]:
    k = check_norm(k)
    run = engine or _lookup(ENGINES, kind, measure)
    distances = [(sid, run(table, query, k)) for sid, table in dataset.sequences]
    return rank(distances, threshold, drop_infinite)


@dataclass(frozen=True)
class CheckRecord:
    id: str
    engine: float
    oracle: float
    deviation: float

    @property
    def passed(self) -> bool:
        return self.deviation <= TOLERANCE


@dataclass(frozen=True)
class CrossCheckReport:
    records: tuple[CheckRecord, ...]
    tolerance: float = TOLERANCE

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.records), default=0.0)

    def to_json_obj(self) -> dict:
        return {
            "verdict": "pass" if self.passed else "fail",
            "tolerance": self.tolerance,
            "max_deviation": _fmt(self.max_deviation),
            "sequences": [
                {"id": r.id, "engine": _fmt(r.engine), "oracle": _fmt(r.oracle),
                 "deviation": _fmt(r.deviation), "pass": r.passed}
                for r in self.records
            ],
        }


def _deviation(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b)


def cross_check(dataset: Dataset, query, kind: str, measure: str, k: Norm,
                engine: Engine | None = None) -> CrossCheckReport:
    k = check_norm(k)
    run = engine or _lookup(ENGINES, kind, measure)
    reference = _lookup(ORACLES, kind, measure)
    records = []
    for sid, table in dataset.sequences:
        got, want = run(table, query, k), reference(table, query, k)
        records.append(CheckRecord(sid, got, want, _deviation(got, want)))
    return CrossCheckReport(tuple(records))


# -- output ------------------------------------------------------------------

def _fmt(x: float):
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return float(f"{x:.12g}")


def _fmt_text(x: float) -> str:
    value = _fmt(x)
    return value if isinstance(value, str) else repr(value)


def format_json(results: Sequence[RankedResult]) -> str:
    records = [
        {"id": r.id, "distance": _fmt(r.distance), "similarity": _fmt(r.similarity),
         "rank": r.rank}
        for r in results
    ]
    return json.dumps(records, indent=2) + "\n"


def format_tsv(results: Sequence[RankedResult]) -> str:
    lines = ["rank\tid\tdistance\tsimilarity"]
    lines += [f"{r.rank}\t{r.id}\t{_fmt_text(r.distance)}\t{_fmt_text(r.similarity)}"
              for r in results]
    return "\n".join(lines) + "\n"


# -- argument parsing ----------------------------------------------------------

class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _norm_arg(text):
    try:
        return parse_norm(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--data", required=True, help="dataset JSON file")
    common.add_argument("--query-kind", required=True, choices=KINDS)
    common.add_argument("--query", required=True, help="query file or inline query text")
    common.add_argument("--measure", required=True, choices=MEASURES)
    common.add_argument("--norm", required=True, type=_norm_arg, help="1..64 or inf")
    common.add_argument("--threshold", type=float, default=None,
                        help="keep results with similarity >= THRESHOLD")
    common.add_argument("--output", choices=("json", "tsv"), default="json")
    common.add_argument("--drop-infinite", action="store_true",
                        help="omit sequences at infinite distance")

    parser = _ArgumentParser(prog="seqsim", description="Similarity-based sequence retrieval.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("eval", parents=[common], help="rank sequences against a query")
    sub.add_parser("oracle", parents=[common], help="cross-check engines by brute force")
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        _lookup(ENGINES, args.query_kind, args.measure)
        dataset = ingest(args.data)
        query = parse_query(args.query_kind, _read_query_text(args.query), dataset.atoms)
        if args.command == "eval":
            results = evaluate(dataset, query, args.query_kind, args.measure, args.norm,
                               args.threshold, args.drop_infinite)
            text = format_json(results) if args.output == "json" else format_tsv(results)
            out.write(text)
            return 0
        report = cross_check(dataset, query, args.query_kind, args.measure, args.norm)
        if args.output == "json":
            out.write(json.dumps(report.to_json_obj(), indent=2) + "\n")
        else:
            out.write("id\tengine\toracle\tdeviation\tpass\n")
            for r in report.records:
                out.write(f"{r.id}\t{_fmt_text(r.engine)}\t{_fmt_text(r.oracle)}\t"
                          f"{_fmt_text(r.deviation)}\t{'pass' if r.passed else 'fail'}\n")
            out.write(f"verdict\t{'pass' if report.passed else 'fail'}\n")
        return 0 if report.passed else EXIT_CROSS_CHECK_FAILED
    except SeqsimError as exc:
        print(f"seqsim: error: {exc}", file=sys.stderr)
        return exc.exit_code


def main() -> None:
    sys.exit(run())

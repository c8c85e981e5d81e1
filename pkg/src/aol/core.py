"""Instances, labels, hypothesis classes, traces and mistake accounting.

Labels and instances are dense integer indices.  A label set is stored as an
``int`` bitmask over the label alphabet (bit ``y`` set iff ``y`` is a member),
which keeps set algebra cheap and gives every label set a canonical encoding.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .exceptions import (
    AllEmptyHypothesis,
    AlphabetTooLarge,
    DuplicateHypothesis,
    EmptyClass,
    IndexOutOfRange,
    LengthMismatch,
    ParseError,
)

MAX_LABELS = 16

LabelSet = int
Trace = tuple  # tuple of (instance, label) pairs


# -- label sets ---------------------------------------------------------------

def labelset(labels: Iterable[int]) -> LabelSet:
    mask = 0
    for y in labels:
        if y < 0:
            raise IndexOutOfRange(f"negative label {y}")
        mask |= 1 << y
    return mask


def members(mask: LabelSet) -> tuple[int, ...]:
    out = []
    y = 0
    while mask:
        if mask & 1:
            out.append(y)
        mask >>= 1
        y += 1
    return tuple(out)


def full_set(num_labels: int) -> LabelSet:
    return (1 << num_labels) - 1


def is_subset(a: LabelSet, b: LabelSet) -> bool:
    return a & ~b == 0


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def format_labelset(mask: LabelSet) -> str:
    return "{" + ",".join(str(y) for y in members(mask)) + "}"


def all_labelsets(num_labels: int) -> range:
    """Every subset of the alphabet, in increasing numeric encoding."""
    return range(1 << num_labels)


# -- hypothesis classes -------------------------------------------------------

@dataclass(frozen=True)
class HypothesisClass:
    """A finite table ``table[h][x]`` of label sets.

    Use :func:`make_class` (or :meth:`from_masks`) rather than the raw
    constructor; they enforce the well-formedness rules.
    """

    num_instances: int
    num_labels: int
    table: tuple[tuple[LabelSet, ...], ...]
    names: tuple[str | None, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        _validate(self)

    @classmethod
    def from_masks(cls, num_instances, num_labels, tables, names=None):
        table = tuple(tuple(int(v) for v in row) for row in tables)
        if names is not None:
            names = tuple(names)
        return cls(num_instances, num_labels, table, names)

    def __len__(self) -> int:
        return len(self.table)

    @property
    def full(self) -> LabelSet:
        return full_set(self.num_labels)

    @property
    def all_mask(self) -> int:
        """Bitmask over hypothesis indices selecting the whole class."""
        return (1 << len(self.table)) - 1

    def value(self, h: int, x: int) -> LabelSet:
        return self.table[h][x]

    def values(self) -> set[LabelSet]:
        return {v for row in self.table for v in row}

    def name(self, h: int) -> str:
        if self.names is not None and self.names[h] is not None:
            return self.names[h]
        return f"h{h}"

    def split(self, alive: int, x: int) -> dict[int, int]:
        """Map each label ``y`` to the alive hypotheses (bitmask) allowing it at ``x``."""
        out = {}
        for y in range(self.num_labels):
            bit = 1 << y
            sub = 0
            for h in iter_bits(alive):
                if self.table[h][x] & bit:
                    sub |= 1 << h
            if sub:
                out[y] = sub
        return out

    def alive_after(self, trace, alive: int | None = None) -> int:
        if alive is None:
            alive = self.all_mask
        for x, y in trace:
            bit = 1 << y
            for h in iter_bits(alive):
                if not self.table[h][x] & bit:
                    alive &= ~(1 << h)
        return alive


def iter_bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _validate(H: HypothesisClass) -> None:
    if H.num_instances < 1:
        raise IndexOutOfRange("num_instances must be >= 1")
    if H.num_labels < 1:
        raise IndexOutOfRange("num_labels must be >= 1")
    if H.num_labels > MAX_LABELS:
        raise AlphabetTooLarge(f"|Y|={H.num_labels} exceeds the cap of {MAX_LABELS}")
    if not H.table:
        raise EmptyClass("a hypothesis class needs at least one hypothesis")
    full = full_set(H.num_labels)
    seen = {}
    for i, row in enumerate(H.table):
        if len(row) != H.num_instances:
            raise IndexOutOfRange(
                f"hypothesis {i}: table has {len(row)} entries, expected {H.num_instances}")
        for x, v in enumerate(row):
            if v < 0 or v & ~full:
                raise IndexOutOfRange(f"hypothesis {i}, instance {x}: label out of range")
        if not any(row):
            raise AllEmptyHypothesis(f"hypothesis {i} is empty at every instance")
        if row in seen:
            raise DuplicateHypothesis(f"hypotheses {seen[row]} and {i} have identical tables")
        seen[row] = i
    if H.names is not None and len(H.names) != len(H.table):
        raise LengthMismatch("names must have one entry per hypothesis")


def make_class(num_instances: int, num_labels: int, tables: Sequence[Sequence[Iterable[int]]],
               names: Sequence[str | None] | None = None) -> HypothesisClass:
    """Build a validated class from per-hypothesis lists of label collections."""
    if num_labels > MAX_LABELS:
        raise AlphabetTooLarge(f"|Y|={num_labels} exceeds the cap of {MAX_LABELS}")
    rows = []
    for i, row in enumerate(tables):
        masks = []
        for labels in row:
            labels = list(labels)
            for y in labels:
                if not 0 <= y < num_labels:
                    raise IndexOutOfRange(f"hypothesis {i}: label {y} not in [0, {num_labels})")
            masks.append(labelset(labels))
        rows.append(tuple(masks))
    return HypothesisClass.from_masks(num_instances, num_labels, rows, names)


def check_index(H: HypothesisClass, h: int | None = None, x: int | None = None,
                y: int | None = None) -> None:
    if h is not None and not 0 <= h < len(H):
        raise IndexOutOfRange(f"hypothesis index {h} out of range")
    if x is not None and not 0 <= x < H.num_instances:
        raise IndexOutOfRange(f"instance index {x} out of range")
    if y is not None and not 0 <= y < H.num_labels:
        raise IndexOutOfRange(f"label index {y} out of range")


def check_trace(H: HypothesisClass, trace) -> Trace:
    """Normalize ``trace`` into a tuple of int pairs, checking every index."""
    out = []
    for step in trace:
        x, y = step
        x, y = int(x), int(y)
        check_index(H, x=x, y=y)
        out.append((x, y))
    return tuple(out)


# -- compatibility and mistakes -----------------------------------------------

def is_compatible(H: HypothesisClass, h: int, trace) -> bool:
    check_index(H, h=h)
    trace = check_trace(H, trace)
    row = H.table[h]
    return all(row[x] >> y & 1 for x, y in trace)


@dataclass(frozen=True)
class MistakeRecord:
    overconfidence: frozenset = frozenset()
    underconfidence: frozenset = frozenset()

    @property
    def rounds(self) -> frozenset:
        return self.overconfidence | self.underconfidence

    def __len__(self) -> int:
        return len(self.rounds)

    def restrict(self, n: int) -> "MistakeRecord":
        return MistakeRecord(frozenset(k for k in self.overconfidence if k < n),
                             frozenset(k for k in self.underconfidence if k < n))


def round_mistake(prediction: LabelSet, hx: LabelSet, y: int) -> tuple[bool, bool]:
    """(overconfident, underconfident) for one round."""
    return (not prediction >> y & 1, bool(prediction & ~hx))


def mistakes(H: HypothesisClass, h: int, trace, predictions: Sequence[LabelSet]) -> MistakeRecord:
    check_index(H, h=h)
    trace = check_trace(H, trace)
    if len(predictions) != len(trace):
        raise LengthMismatch(f"{len(predictions)} predictions for a trace of length {len(trace)}")
    over, under = set(), set()
    row = H.table[h]
    for k, ((x, y), alpha) in enumerate(zip(trace, predictions)):
        o, u = round_mistake(alpha, row[x], y)
        if o:
            over.add(k)
        if u:
            under.add(k)
    return MistakeRecord(frozenset(over), frozenset(under))


def enumerate_compatible_traces(H: HypothesisClass, N: int) -> Iterator[Trace]:
    """Yield every length-``N`` trace compatible with some hypothesis, lexicographically."""
    if N < 0:
        raise IndexOutOfRange("horizon must be >= 0")
    steps = [(x, y) for x in range(H.num_instances) for y in range(H.num_labels)]

    def rec(prefix, alive):
        if len(prefix) == N:
            yield tuple(prefix)
            return
        for x, y in steps:
            nxt = H.alive_after(((x, y),), alive)
            if nxt:
                prefix.append((x, y))
                yield from rec(prefix, nxt)
                prefix.pop()

    yield from rec([], H.all_mask)


# -- families of small classes ------------------------------------------------

def canonical_form(H: HypothesisClass) -> tuple:
    """Isomorphism-invariant key under instance and label relabelings."""
    best = None
    for xperm in itertools.permutations(range(H.num_instances)):
        for yperm in itertools.permutations(range(H.num_labels)):
            rows = sorted(
                tuple(_permute_mask(row[xperm[x]], yperm) for x in range(H.num_instances))
                for row in H.table)
            key = tuple(rows)
            if best is None or key < best:
                best = key
    return (H.num_instances, H.num_labels, best)


def _permute_mask(mask: int, perm) -> int:
    out = 0
    for y in members(mask):
        out |= 1 << perm[y]
    return out


def enumerate_classes(max_instances: int, num_labels: int, max_size: int,
                      up_to_isomorphism: bool = True) -> Iterator[HypothesisClass]:
    """Every valid class with ``|X| <= max_instances`` and ``1 <= |H| <= max_size``."""
    seen = set()
    for nx in range(1, max_instances + 1):
        rows = [row for row in itertools.product(range(1 << num_labels), repeat=nx) if any(row)]
        for size in range(1, max_size + 1):
            for combo in itertools.combinations(rows, size):
                H = HypothesisClass.from_masks(nx, num_labels, combo)
                if up_to_isomorphism:
                    key = canonical_form(H)
                    if key in seen:
                        continue
                    seen.add(key)
                yield H


def random_class(rng, max_instances: int = 4, max_labels: int = 3,
                 max_size: int = 4) -> HypothesisClass:
    """Draw a valid class uniformly over table entries (rejecting invalid rows)."""
    nx = rng.randint(1, max_instances)
    ny = rng.randint(1, max_labels)
    size = rng.randint(1, max_size)
    rows = set()
    attempts = 0
    while len(rows) < size and attempts < 1000:
        attempts += 1
        row = tuple(rng.randrange(1 << ny) for _ in range(nx))
        if any(row):
            rows.add(row)
    return HypothesisClass.from_masks(nx, ny, sorted(rows))


# -- JSON ---------------------------------------------------------------------

_CLASS_KEYS = {"num_instances", "num_labels", "hypotheses"}
_HYP_KEYS = {"name", "table"}


def class_to_dict(H: HypothesisClass) -> dict:
    hyps = []
    for i, row in enumerate(H.table):
        entry = {}
        if H.names is not None and H.names[i] is not None:
            entry["name"] = H.names[i]
        entry["table"] = [list(members(v)) for v in row]
        hyps.append(entry)
    return {"num_instances": H.num_instances, "num_labels": H.num_labels, "hypotheses": hyps}


def class_from_dict(doc) -> HypothesisClass:
    if not isinstance(doc, dict):
        raise ParseError("class document must be a JSON object")
    unknown = set(doc) - _CLASS_KEYS
    if unknown:
        raise ParseError(f"unknown field(s) {sorted(unknown)}")
    for key in sorted(_CLASS_KEYS):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    nx, ny, hyps = doc["num_instances"], doc["num_labels"], doc["hypotheses"]
    if not isinstance(nx, int) or not isinstance(ny, int):
        raise ParseError("num_instances and num_labels must be integers")
    if not isinstance(hyps, list):
        raise ParseError("'hypotheses' must be a list")
    tables, names = [], []
    for i, entry in enumerate(hyps):
        if not isinstance(entry, dict):
            raise ParseError(f"hypotheses[{i}] must be an object")
        unknown = set(entry) - _HYP_KEYS
        if unknown:
            raise ParseError(f"hypotheses[{i}]: unknown field(s) {sorted(unknown)}")
        table = entry.get("table")
        if not isinstance(table, list) or len(table) != nx:
            raise ParseError(f"hypotheses[{i}].table must be a list of {nx} label lists")
        for x, labels in enumerate(table):
            if not isinstance(labels, list) or not all(isinstance(y, int) for y in labels):
                raise ParseError(f"hypotheses[{i}].table[{x}] must be a list of integers")
            if labels != sorted(set(labels)):
                raise ParseError(f"hypotheses[{i}].table[{x}] must be strictly ascending")
            if any(not 0 <= y < ny for y in labels):
                raise ParseError(f"hypotheses[{i}].table[{x}]: label out of range")
        tables.append(table)
        names.append(entry.get("name"))
    has_names = any(n is not None for n in names)
    try:
        return make_class(nx, ny, tables, names if has_names else None)
    except (IndexOutOfRange, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def dump_class(H: HypothesisClass, indent: int | None = 2) -> str:
    return json.dumps(class_to_dict(H), indent=indent)


def load_class(text: str) -> HypothesisClass:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from exc
    return class_from_dict(doc)


def trace_to_json(trace) -> list:
    return [[int(x), int(y)] for x, y in trace]


def trace_from_json(doc) -> Trace:
    if not isinstance(doc, list):
        raise ParseError("trace must be a list of [x, y] pairs")
    out = []
    for k, step in enumerate(doc):
        if (not isinstance(step, list) or len(step) != 2
                or not all(isinstance(v, int) for v in step)):
            raise ParseError(f"trace[{k}] must be a pair of integers")
        out.append((step[0], step[1]))
    return tuple(out)

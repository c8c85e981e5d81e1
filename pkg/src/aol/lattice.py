"""Intersection-closed families of label sets and their invariants."""
from __future__ import annotations

import itertools
import json
from dataclasses import InitVar, dataclass
from functools import cached_property

from .core import HypothesisClass, full_set, labelset, members, popcount
from .exceptions import AlphabetTooLarge, InternalInconsistency, OutOfRange, ParseError

# Above this alphabet size only the complexity route of vc_dimension runs.
VC_CROSSCHECK_MAX_LABELS = 12


@dataclass(frozen=True)
class Lattice:
    elements: frozenset
    num_labels: int
    check: InitVar[bool] = True

    def __post_init__(self, check):
        if not check:
            return
        full = full_set(self.num_labels)
        if full not in self.elements:
            raise ValueError("a Y-lattice must contain the full label set")
        for a in self.elements:
            if a & ~full:
                raise ValueError("lattice element outside the label alphabet")
        for a, b in itertools.combinations(self.elements, 2):
            if a & b not in self.elements:
                raise ValueError("family is not closed under intersection")

    @property
    def full(self) -> int:
        return full_set(self.num_labels)

    @cached_property
    def bottom(self) -> int:
        out = self.full
        for a in self.elements:
            out &= a
        return out

    def sorted_elements(self) -> list[int]:
        return sorted(self.elements, key=_element_key)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, mask: int) -> bool:
        return mask in self.elements


def _element_key(mask: int):
    return (popcount(mask), members(mask))


def close_family(values, num_labels: int) -> frozenset:
    """Smallest intersection-closed family containing ``values`` and the full set."""
    family = set(values) | {full_set(num_labels)}
    frontier = list(family)
    while frontier:
        new = set()
        for a in frontier:
            for b in family:
                c = a & b
                if c not in family:
                    new.add(c)
        family |= new
        frontier = list(new)
    return frozenset(family)


def lattice_closure(H: HypothesisClass) -> Lattice:
    return Lattice(close_family(H.values(), H.num_labels), H.num_labels, check=False)


def hull(lat: Lattice, A: int) -> int:
    out = lat.full
    for b in lat.elements:
        if A & ~b == 0:
            out &= b
    return out


def lambda_witness(lat: Lattice, A: int) -> tuple[int, int]:
    """Smallest ``B`` inside ``A`` whose hull covers ``A``, as ``(|B|, B)``.

    Subsets are scanned by increasing size and lexicographically within a
    size, so the witness is the lexicographically smallest minimum one.
    """
    labels = members(A)
    for k in range(len(labels) + 1):
        for combo in itertools.combinations(labels, k):
            B = labelset(combo)
            if A & ~hull(lat, B) == 0:
                return k, B
    raise InternalInconsistency("A itself always covers A")


def lambda_complexity(lat: Lattice, A: int) -> int:
    return lambda_witness(lat, A)[0]


def pivot_dimension(lat: Lattice) -> int:
    return max(lambda_complexity(lat, a) for a in lat.elements)


def is_shattered(lat: Lattice, A: int) -> bool:
    traces = {A & c for c in lat.elements}
    return len(traces) == 1 << popcount(A)


def vc_by_shattering(lat: Lattice) -> int:
    best = 0
    for A in range(1 << lat.num_labels):
        k = popcount(A)
        if k > best and is_shattered(lat, A):
            best = k
    return best


def vc_by_complexity(lat: Lattice) -> int:
    return max(lambda_complexity(lat, A) for A in range(1 << lat.num_labels))


def vc_dimension(lat: Lattice, crosscheck: bool | None = None) -> int:
    """VC dimension of the family, computed by complexity and by shattering.

    The two routes must agree; a disagreement raises
    :class:`InternalInconsistency`.  The shattering route is skipped when
    ``crosscheck`` is false, which is the default above
    ``VC_CROSSCHECK_MAX_LABELS`` labels.
    """
    if crosscheck is None:
        crosscheck = lat.num_labels <= VC_CROSSCHECK_MAX_LABELS
    by_complexity = vc_by_complexity(lat)
    if crosscheck:
        by_shattering = vc_by_shattering(lat)
        if by_shattering != by_complexity:
            raise InternalInconsistency(
                f"VC by shattering ({by_shattering}) != max complexity ({by_complexity})")
    return by_complexity


def lattice_length(lat: Lattice) -> int:
    """Longest strict chain under inclusion, minus one."""
    order = sorted(lat.elements, key=popcount)
    longest = {}
    for a in order:
        best = 0
        for b in order:
            if popcount(b) >= popcount(a):
                break
            if b & ~a == 0:
                best = max(best, longest[b] + 1)
        longest[a] = best
    return max(longest.values())


def gen_box(d: int, n: int) -> Lattice:
    """All axis-aligned boxes in the grid ``[n]^d``; labels are row-major cells.

    Empty boxes (some lower corner coordinate above the upper one) collapse to
    a single empty element, which closure under intersection requires anyway.
    """
    if d < 1 or n < 3:
        raise OutOfRange("gen_box needs d >= 1 and n >= 3")
    if n ** d > 16:
        raise AlphabetTooLarge(f"n^d = {n ** d} labels exceeds 16")
    cells = list(itertools.product(range(n), repeat=d))
    index = {c: i for i, c in enumerate(cells)}
    elements = set()
    for a in cells:
        for b in cells:
            box = 0
            for c in cells:
                if all(a[i] <= c[i] <= b[i] for i in range(d)):
                    box |= 1 << index[c]
            elements.add(box)
    return Lattice(frozenset(elements), n ** d)


def power_set_lattice(num_labels: int) -> Lattice:
    return Lattice(frozenset(range(1 << num_labels)), num_labels, check=False)


def lattice_to_dict(lat: Lattice) -> dict:
    return {"num_labels": lat.num_labels,
            "elements": [list(members(a)) for a in lat.sorted_elements()]}


def lattice_from_dict(doc) -> Lattice:
    if not isinstance(doc, dict) or set(doc) != {"num_labels", "elements"}:
        raise ParseError("lattice document needs exactly 'num_labels' and 'elements'")
    try:
        return Lattice(frozenset(labelset(e) for e in doc["elements"]), doc["num_labels"])
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def dump_lattice(lat: Lattice) -> str:
    return json.dumps(lattice_to_dict(lat), indent=2)

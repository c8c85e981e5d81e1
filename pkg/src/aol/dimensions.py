"""Exact dimension computations by memoized exhaustive recursion."""
from __future__ import annotations

import itertools
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Sequence

from .core import HypothesisClass, iter_bits, popcount
from .exceptions import IndexOutOfRange, OutOfRange
from .trees import AmbiguousTree, ClassicalTree

NEG_INF = float("-inf")


@dataclass(frozen=True)
class GameState:
    """Unfalsified hypotheses (bitmask), per-hypothesis mistake counts and
    the number of rounds left.  ``weights`` has one entry per hypothesis of
    the class; entries outside ``alive`` are ignored."""

    alive: int
    weights: tuple[int, ...]
    budget: int

    @classmethod
    def initial(cls, H: HypothesisClass, budget: int) -> "GameState":
        return cls(H.all_mask, (0,) * len(H), budget)


@contextmanager
def recursion_headroom(depth: int):
    """Raise the interpreter recursion limit enough for ``depth`` nested rounds."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 8 * depth + 1000))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _weights(H: HypothesisClass, weights) -> tuple[int, ...]:
    if weights is None:
        return (0,) * len(H)
    if isinstance(weights, dict):
        weights = [weights.get(h, 0) for h in range(len(H))]
    weights = tuple(int(w) for w in weights)
    if len(weights) != len(H):
        raise IndexOutOfRange(f"expected {len(H)} weights, got {len(weights)}")
    return weights


def _canonical(alive: int, w: Sequence[int]):
    """Translate weights so the heaviest alive hypothesis sits at 0."""
    top = max(w[h] for h in iter_bits(alive))
    return top, tuple(top - w[h] for h in iter_bits(alive))


class ALSolver:
    """Weighted ambiguous Littlestone dimension of sub-classes of ``H``.

    ``value(alive, w, n)`` is the largest weighted rank of a tree of depth at
    most ``n`` whose leaves are alive hypotheses.  Hypotheses that cannot beat
    the current maximum within ``n`` rounds are dropped before the recursion,
    which leaves the value unchanged.  The memo is kept across calls.
    """

    def __init__(self, H: HypothesisClass, prune: bool = True):
        self.H = H
        self.prune = prune
        self.memo: dict = {}
        self._splits = {}

    def split(self, alive: int, x: int) -> dict[int, int]:
        key = (alive, x)
        s = self._splits.get(key)
        if s is None:
            s = self._splits[key] = self.H.split(alive, x)
        return s

    def _prune(self, alive: int, w, n: int) -> int:
        if not self.prune:
            return alive
        top = max(w[h] for h in iter_bits(alive))
        out = 0
        for h in iter_bits(alive):
            if w[h] + n > top or w[h] == top:
                out |= 1 << h
        return out

    def value(self, alive: int, w: Sequence[int], n: int) -> int:
        if alive == 0:
            raise OutOfRange("no alive hypotheses")
        alive = self._prune(alive, w, n)
        top, offsets = _canonical(alive, w)
        if n == 0 or popcount(alive) == 1:
            return top
        key = (alive, offsets, n)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._solve(alive, offsets, n)
        return top + hit

    def _relative(self, alive: int, offsets) -> list[int]:
        w = [0] * len(self.H)
        for h, o in zip(iter_bits(alive), offsets):
            w[h] = -o
        return w

    def _solve(self, alive: int, offsets, n: int) -> int:
        # weights here are relative: the heaviest alive hypothesis has weight 0
        w = self._relative(alive, offsets)
        ceiling = min(n, popcount(alive) - 1)
        best = 0
        for x, B, y0, val in self._options(alive, w, n, best, ceiling):
            if val > best:
                best = val
                if best >= ceiling:
                    break
        return best

    def _bound(self, alive: int, w, n: int) -> int:
        return max(w[h] for h in iter_bits(alive)) + min(n, popcount(alive) - 1)

    def _options(self, alive: int, w, n: int, floor: int, ceiling: int):
        """Yield ``(x, B, y0, value)`` for branching moves whose value may
        exceed ``floor``; moves that provably cannot are skipped."""
        H = self.H
        for x in range(H.num_instances):
            parts = self.split(alive, x)
            labels = sorted(parts)
            plain = {}
            for y in labels:
                plain[y] = self.value(parts[y], w, n - 1) + 1
            for size in range(1, len(labels) + 1):
                for combo in itertools.combinations(labels, size):
                    B = 0
                    for y in combo:
                        B |= 1 << y
                    for y0 in combo:
                        if size == 1 and parts[y0] == alive:
                            # nothing learned and nobody charged: same state, one round less
                            continue
                        others = min((plain[y] for y in combo if y != y0), default=None)
                        if others is not None and others <= floor:
                            continue
                        sub = parts[y0]
                        w0 = list(w)
                        for h in iter_bits(sub):
                            if B & ~H.value(h, x):
                                w0[h] += 1
                        if self._bound(sub, w0, n - 1) <= floor:
                            continue
                        v = self.value(sub, w0, n - 1)
                        if others is not None:
                            v = min(v, others)
                        if v > floor:
                            floor = v
                            yield x, B, y0, v
                            if floor >= ceiling:
                                return

    def witness_tree(self, alive: int, w: Sequence[int], n: int) -> AmbiguousTree:
        """A tree of depth at most ``n`` whose weighted rank equals ``value``."""
        parent, instance, label, hyp, special = {}, {}, {}, {}, set()
        counter = [0]

        def build(v, alive, w, n):
            alive = self._prune(alive, w, n)
            target = self.value(alive, w, n)
            top = max(w[h] for h in iter_bits(alive))
            if target == top:
                hyp[v] = min(h for h in iter_bits(alive) if w[h] == top)
                return
            for x, B, y0, val in self._options(alive, list(w), n, target - 1, target):
                if val == target:
                    break
            else:  # pragma: no cover - value() guarantees a match
                raise AssertionError("no move attains the value")
            instance[v] = x
            parts = self.split(alive, x)
            for y in (y for y in range(self.H.num_labels) if B >> y & 1):
                c = counter[0] = counter[0] + 1
                parent[c] = v
                label[c] = y
                child_w = list(w)
                for h in iter_bits(parts[y]):
                    if y != y0:
                        child_w[h] += 1
                    elif B & ~self.H.value(h, x):
                        child_w[h] += 1
                if y == y0:
                    special.add(c)
                build(c, parts[y], child_w, n - 1)

        build(0, alive, list(w), n)
        return AmbiguousTree.build(parent, instance, label, hyp, special)


def al_dimension(H: HypothesisClass, n: int, weights=None, alive: int | None = None,
                 prune: bool = True) -> int:
    """Largest (weighted) rank of a shattered tree of depth at most ``n``."""
    if n < 0:
        raise OutOfRange("n must be non-negative")
    w = _weights(H, weights)
    with recursion_headroom(n):
        return ALSolver(H, prune).value(H.all_mask if alive is None else alive, w, n)


def al_witness_tree(H: HypothesisClass, n: int, weights=None) -> AmbiguousTree:
    if n < 0:
        raise OutOfRange("n must be non-negative")
    w = _weights(H, weights)
    with recursion_headroom(n):
        return ALSolver(H).witness_tree(H.all_mask, w, n)


class GameSolver:
    """Minimax value of the deterministic prediction game, no pruning."""

    def __init__(self, H: HypothesisClass):
        self.H = H
        self.memo: dict = {}

    def value(self, alive: int, w: Sequence[int], n: int) -> int:
        top, offsets = _canonical(alive, w)
        if n == 0:
            return top
        key = (alive, offsets, n)
        hit = self.memo.get(key)
        if hit is None:
            rel = [0] * len(self.H)
            for h, o in zip(iter_bits(alive), offsets):
                rel[h] = -o
            hit = self.memo[key] = self._solve(alive, rel, n)
        return top + hit

    def _solve(self, alive: int, w, n: int) -> int:
        H = self.H
        best = None
        for x in range(H.num_instances):
            parts = H.split(alive, x)
            if not parts:
                continue
            worst_alpha = None
            for alpha in range(1 << H.num_labels):
                worst = None
                for y, sub in parts.items():
                    child = list(w)
                    for h in iter_bits(sub):
                        if alpha & ~H.value(h, x) or not alpha >> y & 1:
                            child[h] += 1
                    v = self.value(sub, child, n - 1)
                    if worst is None or v > worst:
                        worst = v
                if worst_alpha is None or worst < worst_alpha:
                    worst_alpha = worst
            if best is None or worst_alpha > best:
                best = worst_alpha
        if best is None:
            return 0
        return best


def game_value(H: HypothesisClass, n: int | GameState, weights=None,
               alive: int | None = None) -> int:
    """Minimax number of mistakes over ``n`` rounds, starting from ``weights``."""
    if isinstance(n, GameState):
        state = n
        n, weights, alive = state.budget, state.weights, state.alive
    if n < 0:
        raise OutOfRange("n must be non-negative")
    w = _weights(H, weights)
    with recursion_headroom(n):
        return GameSolver(H).value(H.all_mask if alive is None else alive, w, n)


class LittlestoneSolver:
    """Littlestone dimension of ``H`` read as partial functions into the
    non-empty label sets; an empty value means undefined."""

    def __init__(self, H: HypothesisClass):
        self.H = H
        self.memo: dict[int, int] = {}

    def groups(self, alive: int, x: int) -> dict[int, int]:
        out: dict[int, int] = {}
        for h in iter_bits(alive):
            v = self.H.value(h, x)
            if v:
                out[v] = out.get(v, 0) | 1 << h
        return out

    def dim(self, alive: int) -> int | float:
        if alive == 0:
            return NEG_INF
        hit = self.memo.get(alive)
        if hit is not None:
            return hit
        best = 0
        if popcount(alive) > 1:
            for x in range(self.H.num_instances):
                g = self.groups(alive, x)
                if len(g) < 2:
                    continue
                ds = sorted((self.dim(s) for s in g.values()), reverse=True)
                best = max(best, ds[1] + 1)
        self.memo[alive] = best
        return best

    def tree(self, alive: int, d: int) -> ClassicalTree:
        """A perfect shattered tree of depth ``d <= dim(alive)``."""
        parent, instance, label, hyp = {}, {}, {}, {}
        counter = [0]

        def build(v, alive, d):
            if d == 0:
                hyp[v] = min(iter_bits(alive))
                return
            for x in range(self.H.num_instances):
                good = [(val, s) for val, s in sorted(self.groups(alive, x).items())
                        if self.dim(s) >= d - 1]
                if len(good) >= 2:
                    break
            else:  # pragma: no cover
                raise AssertionError("dimension too small for requested depth")
            instance[v] = x
            for val, s in good[:2]:
                c = counter[0] = counter[0] + 1
                parent[c] = v
                label[c] = val
                build(c, s, d - 1)

        build(0, alive, d)
        return ClassicalTree.build(parent, instance, label, hyp)


def partial_littlestone(H: HypothesisClass, alive: int | None = None) -> int:
    return LittlestoneSolver(H).dim(H.all_mask if alive is None else alive)


def littlestone_tree(H: HypothesisClass) -> ClassicalTree:
    solver = LittlestoneSolver(H)
    return solver.tree(H.all_mask, solver.dim(H.all_mask))

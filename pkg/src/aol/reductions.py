"""Apple tasting as a special case of ambiguous learning, and the reduction
of a class with finite partial Littlestone dimension to a finite class over
instance words."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from .core import HypothesisClass, check_trace, iter_bits
from .dimensions import LittlestoneSolver
from .exceptions import (BudgetExceeded, HorizonExceeded, InconsistentHistory, InvalidClass,
                         OutOfRange)
from .game import DEFAULT_BUDGET
from .lattice import lattice_closure
from .learners import Learner, WAALearner
from .trees import AmbiguousTree, check_tree, trim_frugal

ZERO, ONE = 0b01, 0b10          # singleton masks {0} and {1}
BOTH = ZERO | ONE


# -- apple tasting ---------------------------------------------------------------------------

def _apple_bits(H: HypothesisClass) -> list[tuple[int, ...]]:
    """Binary tables of an apple class given with singleton label sets."""
    if H.num_labels != 2:
        raise InvalidClass("apple classes have exactly two labels")
    rows = []
    for i, row in enumerate(H.table):
        if any(v not in (ZERO, ONE) for v in row):
            raise InvalidClass(f"hypothesis {i}: apple values must be {{0}} or {{1}}")
        rows.append(tuple(1 if v == ONE else 0 for v in row))
    return rows


def apple_class(tables, names=None) -> HypothesisClass:
    """Apple class from 0/1 rows, stored with singleton label sets."""
    rows = [tuple(ONE if b else ZERO for b in row) for row in tables]
    n = len(rows[0]) if rows else 0
    return HypothesisClass.from_masks(n, 2, rows, names)


def to_apple_ambiguous(H: HypothesisClass) -> HypothesisClass:
    """Each hypothesis keeps ``{1}`` where it says 1 and becomes ``{0,1}`` where it says 0."""
    rows = [tuple(ONE if b else BOTH for b in row) for row in _apple_bits(H)]
    return HypothesisClass.from_masks(H.num_instances, 2, rows, H.names)


class AppleLearner:
    """Apple-tasting learner predicting 1 exactly when the wrapped ambiguous
    learner leaves label 0 out.  Histories hold the feedback the learner saw,
    with 1 standing for rounds without feedback."""

    def __init__(self, learner):
        self.learner = learner

    def predict(self, history, x: int) -> int:
        return 0 if self.learner.predict(history, x) & ZERO else 1

    __call__ = predict


def apple_wrap(learner) -> AppleLearner:
    return AppleLearner(learner)


def apple_mistakes(H: HypothesisClass, h: int, trace, predictions) -> frozenset:
    """Rounds where the apple prediction differs from ``h``."""
    bits = _apple_bits(H)[h]
    return frozenset(k for k, ((x, _), z) in enumerate(zip(trace, predictions)) if z != bits[x])


def apple_worst_case(learner, H: HypothesisClass, N: int,
                     budget_nodes: int = DEFAULT_BUDGET) -> int:
    """Largest apple mistake count an adaptive adversary can force in ``N`` rounds.

    Predicting 0 returns feedback 1 whatever the truth; predicting 1 reveals
    the true bit, which splits the unfalsified hypotheses.
    """
    bits = _apple_bits(H)
    memo: dict = {}
    nodes = [0]

    def value(history, alive, w, n):
        # the apple state differs from any wrapped learner's own state, so
        # the memo is keyed on the feedback history itself
        top = max(w[h] for h in iter_bits(alive))
        key = (history, tuple(top - w[h] for h in iter_bits(alive)), n)
        hit = memo.get(key)
        if hit is not None:
            return top + hit
        nodes[0] += 1
        if nodes[0] > budget_nodes:
            raise BudgetExceeded(f"budget_nodes={budget_nodes} exceeded")
        best = 0
        if n > 0:
            for x in range(H.num_instances):
                z = learner.predict(history, x)
                if z == 0:
                    child = [w[h] + bits[h][x] for h in range(len(H))]
                    outcomes = [(1, alive, child)]
                else:
                    outcomes = []
                    for b in (0, 1):
                        sub = sum(1 << h for h in iter_bits(alive) if bits[h][x] == b)
                        if sub:
                            child = [w[h] + (b == 0) for h in range(len(H))]
                            outcomes.append((b, sub, child))
                for y, sub, child in outcomes:
                    best = max(best, value(history + ((x, y),), sub, child, n - 1) - top)
        memo[key] = best
        return top + best

    return value((), H.all_mask, [0] * len(H), N)


def apple_game_value(H: HypothesisClass, N: int) -> int:
    """Minimax apple mistake count: the learner minimises over its two
    predictions at every feedback history, the adversary maximises."""
    bits = _apple_bits(H)
    memo: dict = {}

    def value(alive, w, n):
        top = max(w[h] for h in iter_bits(alive))
        if n == 0:
            return top
        key = (alive, tuple(top - w[h] for h in iter_bits(alive)), n)
        hit = memo.get(key)
        if hit is not None:
            return top + hit
        best = None
        for x in range(H.num_instances):
            silent = value(alive, [w[h] + bits[h][x] for h in range(len(H))], n - 1)
            tasted = None
            for b in (0, 1):
                sub = sum(1 << h for h in iter_bits(alive) if bits[h][x] == b)
                if sub:
                    v = value(sub, [w[h] + (b == 0) for h in range(len(H))], n - 1)
                    tasted = v if tasted is None else max(tasted, v)
            v = min(silent, tasted)
            best = v if best is None else max(best, v)
        memo[key] = best - top
        return best

    return value(H.all_mask, [0] * len(H), N)


@dataclass(frozen=True)
class AppleRun:
    trace: tuple
    hypothesis: int
    predictions: tuple[int, ...]
    mistakes: frozenset


def apple_tree_adversary_run(T: AmbiguousTree, H: HypothesisClass, learner) -> AppleRun:
    """Drive ``learner`` down the frugal form of ``T``, a tree over the
    ambiguous image of ``H``: take the 0 edge after a 1 prediction and the
    1 edge after a 0 prediction."""
    Ham = to_apple_ambiguous(H)
    check_tree(T, Ham)
    T = trim_frugal(T, Ham)
    v, trace, preds = T.root, [], []
    while not T.is_leaf(v):
        x = T.instance[v]
        z = learner.predict(tuple(trace), x)
        y = 1 - z
        v = next(c for c in T.children[v] if T.label[c] == y)
        trace.append((x, y))
        preds.append(z)
    h = T.hypothesis[v]
    trace = tuple(trace)
    return AppleRun(trace, h, tuple(preds), apple_mistakes(H, h, trace, preds))


# -- partial-function SOA ----------------------------------------------------------------------

def partial_values(H: HypothesisClass) -> tuple[int, ...]:
    """Non-empty lattice elements, in increasing mask order."""
    return tuple(sorted(e for e in lattice_closure(H).elements if e))


class SOA:
    """Standard optimal algorithm for ``H`` read as partial functions into
    non-empty label sets.  ``predict`` is total: with no consistent
    hypothesis every candidate scores minus infinity and the lowest value wins."""

    def __init__(self, H: HypothesisClass):
        self.H = H
        self.solver = LittlestoneSolver(H)
        self.values = partial_values(H)

    def consistent(self, history, alive: int | None = None) -> int:
        alive = self.H.all_mask if alive is None else alive
        for x, v in history:
            alive = self.step(alive, x, v)
        return alive

    def step(self, alive: int, x: int, v: int) -> int:
        return sum(1 << h for h in iter_bits(alive) if self.H.value(h, x) == v)

    def choose(self, alive: int, x: int) -> int:
        groups = self.solver.groups(alive, x)
        best, best_dim = None, None
        for v in self.values:
            d = self.solver.dim(groups.get(v, 0))
            if best is None or d > best_dim:
                best, best_dim = v, d
        return best


def soa_predict(H: HypothesisClass, history, x: int) -> int:
    """SOA prediction after a history of ``(instance, label set)`` pairs."""
    soa = SOA(H)
    if not 0 <= x < H.num_instances:
        raise OutOfRange(f"instance {x} out of range")
    for xi, v in history:
        if not 0 <= xi < H.num_instances:
            raise OutOfRange(f"instance {xi} out of range")
    alive = soa.consistent(history)
    if not alive:
        raise InconsistentHistory("no hypothesis matches the history")
    return soa.choose(alive, x)


def soa_worst_case(H: HypothesisClass, N: int) -> int:
    """Most SOA mistakes over ``N`` rounds against an adaptive adversary that
    only shows instances where the true hypothesis is defined."""
    soa = SOA(H)
    memo: dict = {}

    def value(alive, n):
        if n == 0:
            return 0
        key = (alive, n)
        if key not in memo:
            best = 0
            for x in range(H.num_instances):
                groups = soa.solver.groups(alive, x)
                if not groups:
                    continue
                pred = soa.choose(alive, x)
                for v, sub in groups.items():
                    best = max(best, (v != pred) + value(sub, n - 1))
            memo[key] = best
        return memo[key]

    return value(H.all_mask, N)


# -- finite reduction over instance words -----------------------------------------------------

MAX_HORIZON = 5
MAX_PARTIAL_DIM = 2


@dataclass(frozen=True)
class LiftedClass:
    """Finite class over instance words.  ``words[i]`` is the word behind
    instance ``i``; ``provenance[h]`` lists every ``(S, f)`` yielding ``h``."""

    cls: HypothesisClass
    words: tuple[tuple[int, ...], ...]
    provenance: tuple[tuple[tuple[tuple[int, ...], tuple[int, ...]], ...], ...]
    horizon: int
    raw_count: int
    index: dict = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def instance(self, word) -> int:
        return self.index[tuple(word)]

    def value(self, h: int, word) -> int:
        return self.cls.value(h, self.instance(word))


def reachable_words(H: HypothesisClass, N: int) -> list[tuple[int, ...]]:
    """Words of length 1..N all of whose letters some one hypothesis defines."""
    out = []

    def grow(word, alive):
        for x in range(H.num_instances):
            sub = sum(1 << h for h in iter_bits(alive) if H.value(h, x))
            if sub:
                w = word + (x,)
                out.append(w)
                if len(w) < N:
                    grow(w, sub)

    if N > 0:
        grow((), H.all_mask)
    return sorted(out, key=lambda w: (len(w), w))


def hn_size_bound(num_values: int, partial_dim: int, N: int) -> int:
    """Number of ``(S, f)`` pairs before deduplication."""
    return sum(comb(N, s) * num_values ** s for s in range(min(partial_dim, N) + 1))


def build_HN(H: HypothesisClass, N: int, budget_nodes: int = DEFAULT_BUDGET) -> LiftedClass:
    """Enumerate the SOA rollouts with at most ``L_P(H)`` overridden rounds.

    For each round set ``S`` and override map ``f`` the hypothesis labels a
    word by the override when its last round lies in ``S``, and otherwise by
    the SOA prediction after feeding back its own earlier labels.
    """
    if not 0 <= N <= MAX_HORIZON:
        raise BudgetExceeded(f"horizon N={N} outside 0..{MAX_HORIZON}")
    soa = SOA(H)
    L = soa.solver.dim(H.all_mask)
    if L > MAX_PARTIAL_DIM:
        raise BudgetExceeded(f"partial Littlestone dimension {L} exceeds {MAX_PARTIAL_DIM}")
    if N == 0:
        raise OutOfRange("the word class needs N >= 1")
    words = reachable_words(H, N)
    raw = hn_size_bound(len(soa.values), L, N)
    if raw * len(words) > budget_nodes:
        raise BudgetExceeded(
            f"budget_nodes={budget_nodes} below {raw} rollouts x {len(words)} words")
    index = {w: i for i, w in enumerate(words)}
    tables: dict[tuple[int, ...], list] = {}
    for s in range(min(L, N) + 1):
        for S in itertools.combinations(range(N), s):
            for f in itertools.product(soa.values, repeat=s):
                override = dict(zip(S, f))
                row = [0] * len(words)
                # alive set after each prefix, fed with the rollout's own labels
                state = {(): H.all_mask}
                for w in words:
                    prefix, x = w[:-1], w[-1]
                    alive = state[prefix]
                    n = len(prefix)
                    v = override[n] if n in override else soa.choose(alive, x)
                    row[index[w]] = v
                    if len(w) < N:
                        state[w] = soa.step(alive, x, v)
                tables.setdefault(tuple(row), []).append((S, f))
    rows = list(tables)
    names = [f"S={list(p[0][0])} f={list(p[0][1])}" for p in tables.values()]
    cls = HypothesisClass.from_masks(len(words), H.num_labels, rows, names)
    prov = tuple(tuple(p) for p in tables.values())
    return LiftedClass(cls, tuple(words), prov, N, raw)


def cover_failures(H: HypothesisClass, lifted: LiftedClass) -> list[tuple[int, tuple[int, ...]]]:
    """Pairs ``(h, x)`` with ``x`` of full length, ``h`` defined along ``x``,
    and no lifted hypothesis reproducing ``h`` on the prefixes of ``x``."""
    N = lifted.horizon
    out = []
    for h in range(len(H)):
        letters = [x for x in range(H.num_instances) if H.value(h, x)]
        for xs in itertools.product(letters, repeat=N):
            targets = [(lifted.instance(xs[:n + 1]), H.value(h, xs[n])) for n in range(N)]
            if not any(all(lifted.cls.value(g, i) == v for i, v in targets)
                       for g in range(len(lifted.cls))):
                out.append((h, xs))
    return out


class LiftedWAALearner(Learner):
    """WAA over the word class, fed the whole instance prefix each round."""

    def __init__(self, horizon: int = 1, mu=2, budget_nodes: int = DEFAULT_BUDGET):
        self.horizon = horizon
        self.mu = mu
        self.budget_nodes = budget_nodes

    def _setup(self, H):
        self.lifted_ = build_HN(H, self.horizon, self.budget_nodes)
        self.inner_ = WAALearner(self.mu).fit(self.lifted_.cls)

    def lift(self, history) -> tuple:
        xs = tuple(x for x, _ in history)
        return tuple((self.lifted_.instance(xs[:k + 1]), y) for k, (_, y) in enumerate(history))

    def _predict(self, history, x):
        if len(history) >= self.horizon:
            raise HorizonExceeded(f"round {len(history)} beyond horizon {self.horizon}")
        word = tuple(h for h, _ in history) + (x,)
        return self.inner_.predict(self.lift(history), self.lifted_.instance(word))

    def mistake_bound(self, N: int | None = None) -> float:
        return self.inner_.mistake_bound(self.horizon if N is None else N)


def lifted_waa_predict(H: HypothesisClass, N: int, mu, history, x: int) -> int:
    history = check_trace(H, history)
    return LiftedWAALearner(N, mu).fit(H).predict(history, x)

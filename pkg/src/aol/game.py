"""The prediction game: running learners on traces, exhaustive worst-case
search, and adversaries driven by shattered trees."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .core import (HypothesisClass, MistakeRecord, Trace, check_trace, enumerate_compatible_traces,
                   is_compatible, iter_bits, mistakes, round_mistake)
from .dimensions import al_dimension, game_value
from .exceptions import BudgetExceeded, IncompatibleTrace
from .trees import AmbiguousTree, arity, check_tree, relevant_edges

DEFAULT_BUDGET = 2_000_000


def run_trace(learner, H: HypothesisClass, trace) -> dict[int, MistakeRecord]:
    """Mistake records of ``learner`` along ``trace`` for every compatible hypothesis."""
    trace = check_trace(H, trace)
    preds = [learner.predict(trace[:k], x) for k, (x, _) in enumerate(trace)]
    return {h: mistakes(H, h, trace, preds)
            for h in range(len(H)) if is_compatible(H, h, trace)}


@dataclass(frozen=True)
class WorstCase:
    mistakes: int
    trace: Trace
    hypothesis: int
    predictions: tuple[int, ...]
    nodes: int


class _Search:
    def __init__(self, learner, H: HypothesisClass, budget: int):
        self.learner = learner
        self.H = H
        self.budget = budget
        self.nodes = 0
        self.memo: dict = {}

    def key(self, history, alive, w, remaining):
        sk = self.learner.state_key(history)
        if sk is None:
            sk = ("history", history)
        top = max(w[h] for h in iter_bits(alive))
        return top, (sk, alive, tuple(top - w[h] for h in iter_bits(alive)), remaining)

    def value(self, history, alive, w, remaining) -> int:
        top, key = self.key(history, alive, w, remaining)
        hit = self.memo.get(key)
        if hit is not None:
            return top + hit[0]
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"budget_nodes={self.budget} exceeded")
        best, move = 0, None
        if remaining > 0:
            H = self.H
            for x in range(H.num_instances):
                parts = H.split(alive, x)
                if not parts:
                    continue
                alpha = self.learner.predict(history, x)
                for y, sub in parts.items():
                    child = list(w)
                    for h in iter_bits(sub):
                        if any(round_mistake(alpha, H.value(h, x), y)):
                            child[h] += 1
                    v = self.value(history + ((x, y),), sub, child, remaining - 1) - top
                    if move is None or v > best:
                        best, move = v, (x, y, alpha)
        self.memo[key] = (best, move)
        return top + best

    def walk(self, alive, w, remaining):
        history, preds = (), []
        while True:
            _, key = self.key(history, alive, w, remaining)
            _, move = self.memo[key]
            if move is None:
                break
            x, y, alpha = move
            H = self.H
            sub = H.split(alive, x)[y]
            child = list(w)
            for h in iter_bits(sub):
                if any(round_mistake(alpha, H.value(h, x), y)):
                    child[h] += 1
            history += ((x, y),)
            preds.append(alpha)
            alive, w, remaining = sub, child, remaining - 1
        top = max(w[h] for h in iter_bits(alive))
        h = min(h for h in iter_bits(alive) if w[h] == top)
        return history, h, tuple(preds)


def worst_case_search(learner, H: HypothesisClass, N: int,
                      budget_nodes: int = DEFAULT_BUDGET) -> WorstCase:
    """Exhaustive adaptive adversary against a deterministic learner.

    Returns the largest number of mistakes any hypothesis can record over
    ``N`` compatible rounds, along with a trace and hypothesis attaining it.
    """
    s = _Search(learner, H, budget_nodes)
    w0 = (0,) * len(H)
    val = s.value((), H.all_mask, w0, N)
    trace, h, preds = s.walk(H.all_mask, w0, N)
    return WorstCase(val, trace, h, preds, s.nodes)


def worst_case_mistakes(learner, H: HypothesisClass, N: int,
                        budget_nodes: int = DEFAULT_BUDGET) -> int:
    return worst_case_search(learner, H, N, budget_nodes).mistakes


def static_worst_case(learner, H: HypothesisClass, N: int) -> int:
    """Max over fixed compatible traces of length ``N`` and compatible hypotheses."""
    best = 0
    for trace in enumerate_compatible_traces(H, N):
        for rec in run_trace(learner, H, trace).values():
            best = max(best, len(rec))
    return best


# -- tree adversaries ---------------------------------------------------------------------

@dataclass(frozen=True)
class AdversaryRun:
    trace: Trace
    hypothesis: int
    leaf: int
    predictions: tuple[int, ...]
    record: MistakeRecord

    @property
    def mistakes(self) -> int:
        return len(self.record)


def tree_adversary_run(T: AmbiguousTree, H: HypothesisClass, learner) -> AdversaryRun:
    """Walk ``T`` against ``learner``: follow a child whose label the
    prediction excludes (lowest index first), otherwise the special child."""
    check_tree(T, H)
    v, trace, preds = T.root, [], []
    while not T.is_leaf(v):
        x = T.instance[v]
        alpha = learner.predict(tuple(trace), x)
        nxt = next((c for c in T.children[v] if not alpha >> T.label[c] & 1), None)
        if nxt is None:
            nxt = T.special_child(v)
        trace.append((x, T.label[nxt]))
        preds.append(alpha)
        v = nxt
    h = T.hypothesis[v]
    trace = tuple(trace)
    return AdversaryRun(trace, h, v, tuple(preds), mistakes(H, h, trace, preds))


def _forcing_set(T: AmbiguousTree, v: int, alpha: int) -> set[int]:
    labels = 0
    for c in T.children[v]:
        labels |= 1 << T.label[c]
    covered = labels & ~alpha == 0
    return {c for c in T.children[v]
            if not alpha >> T.label[c] & 1 or (c in T.special and covered)}


@dataclass(frozen=True)
class RandomizedRun:
    trace: Trace
    hypothesis: int
    leaf: int
    expected_mistakes: Fraction
    relevant_mass: Fraction
    arity: int


def randomized_tree_adversary_run(T: AmbiguousTree, H: HypothesisClass, rlearner) -> RandomizedRun:
    """Walk ``T`` choosing the child most likely to force a mistake.

    ``relevant_mass`` sums, over edges relevant to the final leaf, the
    probability that the chosen child forced a mistake; ``expected_mistakes``
    is the learner's full expected mistake count on the resulting trace.
    """
    check_tree(T, H)
    v, trace, steps = T.root, [], []
    while not T.is_leaf(v):
        x = T.instance[v]
        dist = rlearner.predict_dist(tuple(trace), x)
        probs = {c: Fraction(0) for c in T.children[v]}
        for alpha, p in dist.items():
            for c in _forcing_set(T, v, alpha):
                probs[c] += p
        nxt = max(T.children[v], key=lambda c: (probs[c], -c))
        steps.append((nxt, probs[nxt]))
        trace.append((x, T.label[nxt]))
        v = nxt
    h = T.hypothesis[v]
    trace = tuple(trace)
    rel = relevant_edges(T, H, v)
    relevant_mass = sum((p for c, p in steps if c in rel), Fraction(0))
    em = expected_mistakes(rlearner, H, h, trace)
    return RandomizedRun(trace, h, v, em, relevant_mass, arity(T))


def expected_mistakes(rlearner, H: HypothesisClass, h: int, trace) -> Fraction:
    trace = check_trace(H, trace)
    if not is_compatible(H, h, trace):
        raise IncompatibleTrace(f"trace is not compatible with hypothesis {h}")
    total = Fraction(0)
    for k, (x, y) in enumerate(trace):
        for alpha, p in rlearner.predict_dist(trace[:k], x).items():
            if any(round_mistake(alpha, H.value(h, x), y)):
                total += p
    return total


# -- curves ------------------------------------------------------------------------------------

CURVE_COLUMNS = ("N", "learner", "worst_case_mistakes", "game_value", "al_dimension")


def mistake_curve(H: HypothesisClass, learners: dict, horizons,
                  budget_nodes: int = DEFAULT_BUDGET) -> list[dict]:
    """One row per (horizon, learner).  ``learners`` maps a name to a factory
    ``N -> fitted learner``."""
    rows = []
    for N in horizons:
        gv = game_value(H, N)
        al = al_dimension(H, N)
        for name, factory in learners.items():
            wc = worst_case_mistakes(factory(N), H, N, budget_nodes)
            rows.append({"N": N, "learner": name, "worst_case_mistakes": wc,
                         "game_value": gv, "al_dimension": al})
    return rows


def curve_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CURVE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()

"""Brute-force reference implementations used as test oracles.

Everything here works on plain Python sets and recomputes from definitions,
sharing no code with the package beyond reading hypothesis tables.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache


def table_sets(H):
    """Hypothesis tables as tuples of frozensets."""
    return [tuple(frozenset(y for y in range(H.num_labels) if v >> y & 1) for v in row)
            for row in H.table]


def all_subsets(labels):
    labels = sorted(labels)
    return [frozenset(c) for k in range(len(labels) + 1)
            for c in itertools.combinations(labels, k)]


def closure(values, num_labels):
    """Intersections of every non-empty subfamily of ``values`` plus the full set."""
    full = frozenset(range(num_labels))
    base = list(set(values) | {full})
    out = set()
    for k in range(1, len(base) + 1):
        for fam in itertools.combinations(base, k):
            out.add(frozenset.intersection(*fam))
    return out


def class_lattice(H):
    return closure({v for row in table_sets(H) for v in row}, H.num_labels)


def hull(elements, A):
    out = None
    for e in elements:
        if A <= e:
            out = e if out is None else out & e
    return out


def complexity(elements, A):
    for B in all_subsets(A):
        if A <= hull(elements, B):
            return len(B)
    raise AssertionError


def pivot_dim(elements):
    return max(complexity(elements, A) for A in elements)


def vc(elements, num_labels):
    best = 0
    for A in all_subsets(range(num_labels)):
        if len({A & e for e in elements}) == 2 ** len(A):
            best = max(best, len(A))
    return best


def chain_length(elements):
    elements = sorted(elements, key=len)
    best = {}
    for a in elements:
        best[a] = max([best[b] + 1 for b in elements if b < a], default=0)
    return max(best.values())


def is_mistake(pred, hx, y):
    return y not in pred or not pred <= hx


def game_value(H, N):
    """Minimax mistakes over ``N`` rounds, straight from the definition:
    the adversary picks an instance, the learner a label set, the adversary a
    label, and at the end the score is the worst compatible hypothesis."""
    T = table_sets(H)
    preds = all_subsets(range(H.num_labels))

    @lru_cache(maxsize=None)
    def value(history):
        alive = [h for h in range(len(T)) if all(y in T[h][x] for (x, y, _) in history)]
        if len(history) == N:
            return max(sum(is_mistake(a, T[h][x], y) for (x, y, a) in history) for h in alive)
        best = None
        for x in range(H.num_instances):
            labels = sorted({y for h in alive for y in T[h][x]})
            if not labels:
                continue
            worst_alpha = min(
                max(value(history + ((x, y, a),)) for y in labels) for a in preds)
            best = worst_alpha if best is None else max(best, worst_alpha)
        if best is None:
            return max(sum(is_mistake(a, T[h][x], y) for (x, y, a) in history) for h in alive)
        return best

    return value(())


def learner_worst_case(learner, H, N):
    """Max over compatible traces of length ``N`` (all of them) and over
    compatible hypotheses of the learner's mistake count."""
    T = table_sets(H)
    best = 0

    def walk(trace, alive):
        nonlocal best
        if len(trace) == N:
            preds = [learner.predict(trace[:k], x) for k, (x, _) in enumerate(trace)]
            for h in alive:
                m = 0
                for (x, y), p in zip(trace, preds):
                    pset = frozenset(i for i in range(H.num_labels) if p >> i & 1)
                    m += is_mistake(pset, T[h][x], y)
                best = max(best, m)
            return
        for x in range(H.num_instances):
            for y in range(H.num_labels):
                sub = [h for h in alive if y in T[h][x]]
                if sub:
                    walk(trace + ((x, y),), sub)

    walk((), list(range(len(T))))
    return best


def relevance(T, H, leaf):
    """Relevant ancestor edges of ``leaf`` from the definition."""
    tab = table_sets(H)
    h = T.hypothesis[leaf]
    out = set()
    v = leaf
    while v != T.root:
        p = T.parent[v]
        sibs = [c for c in range(len(T)) if T.parent[c] == p and c != v]
        if v not in T.special or any(T.label[b] not in tab[h][T.instance[p]] for b in sibs):
            out.add(v)
        v = p
    return out


def tree_rank(T, H):
    leaves = [v for v in range(len(T)) if not any(T.parent[c] == v for c in range(len(T)))]
    return min(len(relevance(T, H, u)) for u in leaves)


def littlestone(H):
    """Partial-function Littlestone dimension by explicit recursion over
    sub-classes (as frozensets of table rows)."""
    T = table_sets(H)

    @lru_cache(maxsize=None)
    def L(rows):
        if not rows:
            return -math.inf
        best = 0
        for x in range(H.num_instances):
            groups = {}
            for r in rows:
                if r[x]:
                    groups.setdefault(r[x], []).append(r)
            if len(groups) >= 2:
                dims = sorted((L(frozenset(g)) for g in groups.values()), reverse=True)
                best = max(best, dims[1] + 1)
        return best

    return L(frozenset(T))


def waa_bound(num_h, D, mu, N):
    mu = float(mu)
    return (math.log(num_h) + 0.5 * (D + 1) ** 2 * (mu - 1) ** 2 * N) / math.log(mu)

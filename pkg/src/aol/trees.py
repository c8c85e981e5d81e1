"""Ambiguous shattered trees: validation, relevance, rank and transformations.

Vertices are dense indices ``0..n-1``.  Every non-root vertex doubles as the
edge to its parent, so ``label[v]`` is the label on the edge into ``v`` and
``special`` holds the vertices whose incoming edge is special (the E0 set).
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

from .core import HypothesisClass, iter_bits, labelset, make_class, members
from .exceptions import (InternalInconsistency, InvalidClassicalTree,
                         InvalidTree, NotALeaf, OutOfRange, ParseError, RankTooSmall)
from .lattice import Lattice, lambda_witness, lattice_closure, vc_dimension

NO_PARENT = -1


def _structure_errors(parent, root, instance, label, hypothesis, special) -> list[str]:
    n = len(parent)
    errs = []
    if n == 0:
        return ["a tree needs at least one vertex"]
    if not 0 <= root < n:
        return [f"root {root} out of range"]
    if len(instance) != n or len(label) != n or len(hypothesis) != n:
        return ["labelings must have one slot per vertex"]
    if parent[root] != NO_PARENT:
        errs.append(f"root {root} has a parent")
    for v, p in enumerate(parent):
        if v != root and not 0 <= p < n:
            errs.append(f"vertex {v}: parent {p} out of range")
    if errs:
        return errs
    # every vertex must reach the root
    state = [0] * n
    state[root] = 2
    for v in range(n):
        path = []
        w = v
        while state[w] == 0:
            state[w] = 1
            path.append(w)
            w = parent[w]
            if w == NO_PARENT:
                break
        if w == NO_PARENT or state[w] == 1:
            return [f"vertex {v} does not reach the root"]
        for p in path:
            state[p] = 2
    has_child = [False] * n
    for v in range(n):
        if v != root:
            has_child[parent[v]] = True
    for v in range(n):
        if has_child[v] and instance[v] is None:
            errs.append(f"internal vertex {v} has no instance")
        if not has_child[v] and instance[v] is not None:
            errs.append(f"leaf {v} carries an instance")
        if not has_child[v] and hypothesis[v] is None:
            errs.append(f"leaf {v} has no hypothesis")
        if has_child[v] and hypothesis[v] is not None:
            errs.append(f"internal vertex {v} carries a hypothesis")
        if v != root and label[v] is None:
            errs.append(f"edge {v} has no label")
        if v == root and label[v] is not None:
            errs.append("the root carries an edge label")
    for a in special:
        if not 0 <= a < n or a == root:
            errs.append(f"special edge {a} is not an edge")
    return errs


@dataclass(frozen=True)
class AmbiguousTree:
    """Rooted tree with instances on internal vertices, labels on edges and
    hypotheses on leaves.

    ``origin`` optionally records, for trees cut out of a larger tree, the
    vertex id each vertex had in the source tree.
    """

    parent: tuple[int, ...]
    root: int
    instance: tuple[int | None, ...]
    label: tuple[int | None, ...]
    hypothesis: tuple[int | None, ...]
    special: frozenset = frozenset()
    origin: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        errs = _structure_errors(self.parent, self.root, self.instance, self.label,
                                 self.hypothesis, self.special)
        if errs:
            raise InvalidTree("; ".join(errs))

    @classmethod
    def build(cls, parent: Mapping[int, int], instance: Mapping[int, int],
              label: Mapping[int, int], hypothesis: Mapping[int, int], special=(),
              root: int = 0) -> "AmbiguousTree":
        """Build from sparse maps over vertices ``0..n-1``."""
        n = 1 + len(parent)
        par = [NO_PARENT] * n
        for v, p in parent.items():
            if not 0 <= v < n:
                raise InvalidTree(f"vertex ids must be dense 0..{n - 1}, got {v}")
            par[v] = p
        return cls(tuple(par), root,
                   tuple(instance.get(v) for v in range(n)),
                   tuple(label.get(v) for v in range(n)),
                   tuple(hypothesis.get(v) for v in range(n)),
                   frozenset(special))

    @classmethod
    def leaf(cls, h: int) -> "AmbiguousTree":
        return cls((NO_PARENT,), 0, (None,), (None,), (h,))

    def __len__(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if v != self.root:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(len(self)) if not self.children[v])

    @cached_property
    def internal(self) -> tuple[int, ...]:
        return tuple(v for v in range(len(self)) if self.children[v])

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(v for v in range(len(self)) if v != self.root)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    def ancestors(self, v: int) -> list[int]:
        """``v`` and all its ancestors, bottom-up."""
        out = [v]
        while v != self.root:
            v = self.parent[v]
            out.append(v)
        return out

    def path_edges(self, v: int) -> list[int]:
        """Edges from the root down to ``v``, top-down."""
        return self.ancestors(v)[-2::-1]

    def special_child(self, v: int) -> int | None:
        for c in self.children[v]:
            if c in self.special:
                return c
        return None

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        out, stack = [], [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.children[v]))
        return tuple(out)

    def bfs(self) -> list[int]:
        out, queue = [], deque([self.root])
        while queue:
            v = queue.popleft()
            out.append(v)
            queue.extend(self.children[v])
        return out

    def subtree_vertices(self, q: int) -> list[int]:
        out, stack = [], [q]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(self.children[v])
        return out

    def leaves_below(self, q: int) -> list[int]:
        return sorted(v for v in self.subtree_vertices(q) if not self.children[v])


@dataclass(frozen=True)
class ClassicalTree:
    """Binary perfect tree whose edge labels are non-empty label sets."""

    parent: tuple[int, ...]
    root: int
    instance: tuple[int | None, ...]
    label: tuple[int | None, ...]
    hypothesis: tuple[int | None, ...]

    def __post_init__(self):
        errs = _structure_errors(self.parent, self.root, self.instance, self.label,
                                 self.hypothesis, frozenset())
        if errs:
            raise InvalidClassicalTree("; ".join(errs))

    @classmethod
    def build(cls, parent, instance, label, hypothesis, root: int = 0) -> "ClassicalTree":
        n = 1 + len(parent)
        par = [NO_PARENT] * n
        for v, p in parent.items():
            par[v] = p
        return cls(tuple(par), root, tuple(instance.get(v) for v in range(n)),
                   tuple(label.get(v) for v in range(n)),
                   tuple(hypothesis.get(v) for v in range(n)))

    def __len__(self) -> int:
        return len(self.parent)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids = [[] for _ in self.parent]
        for v, p in enumerate(self.parent):
            if v != self.root:
                kids[p].append(v)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(len(self)) if not self.children[v])

    def ancestors(self, v: int) -> list[int]:
        out = [v]
        while v != self.root:
            v = self.parent[v]
            out.append(v)
        return out


# -- validation -----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    vertex: int
    detail: str

    def __str__(self):
        return f"{self.rule} at {self.vertex}: {self.detail}"


def validate(T: AmbiguousTree, H: HypothesisClass) -> list[Violation]:
    """All violated shattered-tree conditions; an empty list means valid."""
    out = []
    for v in T.internal:
        x = T.instance[v]
        if not 0 <= x < H.num_instances:
            out.append(Violation("range", v, f"instance {x} out of range"))
        k = sum(1 for c in T.children[v] if c in T.special)
        if k != 1:
            out.append(Violation("one-special-child", v, f"{k} special children"))
        labels = [T.label[c] for c in T.children[v]]
        if len(set(labels)) != len(labels):
            out.append(Violation("distinct-sibling-labels", v, f"labels {labels}"))
    for a in T.edges:
        if not 0 <= T.label[a] < H.num_labels:
            out.append(Violation("range", a, f"label {T.label[a]} out of range"))
    bad_range = bool(out) and any(o.rule == "range" for o in out)
    for u in T.leaves:
        h = T.hypothesis[u]
        if not 0 <= h < len(H):
            out.append(Violation("range", u, f"hypothesis {h} out of range"))
            continue
        if bad_range:
            continue
        for a in T.path_edges(u):
            if not H.value(h, T.instance[T.parent[a]]) >> T.label[a] & 1:
                out.append(Violation("consistency", a,
                                     f"label {T.label[a]} not allowed by leaf {u} (h{h})"))
    return out


def check_tree(T: AmbiguousTree, H: HypothesisClass) -> AmbiguousTree:
    errs = validate(T, H)
    if errs:
        raise InvalidTree("; ".join(map(str, errs)))
    return T


def is_valid(T: AmbiguousTree, H: HypothesisClass) -> bool:
    return not validate(T, H)


# -- relevance and rank -------------------------------------------------------------

def _is_relevant(T: AmbiguousTree, H: HypothesisClass, a: int, h: int) -> bool:
    if a not in T.special:
        return True
    v = T.parent[a]
    allowed = H.value(h, T.instance[v])
    return any(not allowed >> T.label[b] & 1 for b in T.children[v])


def relevant_edges(T: AmbiguousTree, H: HypothesisClass, u: int) -> frozenset:
    if not 0 <= u < len(T) or not T.is_leaf(u):
        raise NotALeaf(f"vertex {u} is not a leaf")
    h = T.hypothesis[u]
    return frozenset(a for a in T.path_edges(u) if _is_relevant(T, H, a, h))


def relevance_map(T: AmbiguousTree, H: HypothesisClass) -> dict[int, frozenset]:
    return {u: relevant_edges(T, H, u) for u in T.leaves}


def _weight(weights, h: int) -> int:
    if weights is None:
        return 0
    return weights[h]


def rank(T: AmbiguousTree, H: HypothesisClass, weights=None, aggregate: str = "min") -> int:
    """Minimum over leaves of the relevance count plus the leaf's weight.

    ``aggregate="max"`` takes the maximum over leaves instead.
    """
    if aggregate not in ("min", "max"):
        raise ValueError("aggregate must be 'min' or 'max'")
    scores = [len(relevant_edges(T, H, u)) + _weight(weights, T.hypothesis[u]) for u in T.leaves]
    return min(scores) if aggregate == "min" else max(scores)


def depth(T) -> int:
    return max(len(T.ancestors(u)) - 1 for u in T.leaves)


def arity(T) -> int:
    return max((len(c) for c in T.children), default=0)


def redundant_edges(T: AmbiguousTree, H: HypothesisClass) -> list[int]:
    """Special edges relevant to no leaf, in BFS order."""
    used = set()
    for r in relevance_map(T, H).values():
        used |= r
    return [a for a in T.bfs() if a in T.special and a not in used]


def is_frugal(T: AmbiguousTree, H: HypothesisClass) -> bool:
    return not redundant_edges(T, H)


# -- subtrees and transformations -------------------------------------------------------

def restrict(T: AmbiguousTree, keep, leaf_hyp: Mapping[int, int] | None = None) -> AmbiguousTree:
    """The labeled subtree induced by the vertex set ``keep``.

    A kept vertex hangs from its nearest kept ancestor, and its edge label and
    special status are taken from the ancestor edge leaving that vertex.
    Vertices are renumbered in increasing order of their old ids.
    """
    keep = set(keep)
    order = sorted(keep)
    new_id = {v: i for i, v in enumerate(order)}
    leaf_hyp = leaf_hyp or {}
    par, lab = [], []
    special = set()
    roots = []
    for v in order:
        w, edge = v, None
        while w != T.root:
            edge = w
            w = T.parent[w]
            if w in keep:
                break
        else:
            w = None
        if w is None or (v == T.root):
            roots.append(v)
            par.append(NO_PARENT)
            lab.append(None)
            continue
        par.append(new_id[w])
        lab.append(T.label[edge])
        if edge in T.special:
            special.add(new_id[v])
    if len(roots) != 1:
        raise InvalidTree(f"kept vertices form {len(roots)} components")
    has_child = {p for p in par if p != NO_PARENT}
    inst, hyp = [], []
    for i, v in enumerate(order):
        if i in has_child:
            inst.append(T.instance[v])
            hyp.append(None)
        else:
            inst.append(None)
            if v in leaf_hyp:
                hyp.append(leaf_hyp[v])
            elif T.is_leaf(v):
                hyp.append(T.hypothesis[v])
            else:
                raise InvalidTree(f"vertex {v} becomes a leaf without a hypothesis")
    origin = tuple(T.origin[v] if T.origin is not None else v for v in order)
    return AmbiguousTree(tuple(par), new_id[roots[0]], tuple(inst), tuple(lab), tuple(hyp),
                         frozenset(special), origin)


def trim_frugal(T: AmbiguousTree, H: HypothesisClass) -> AmbiguousTree:
    """Remove redundant special edges by splicing the edge's subtree into the
    place of its parent, one edge at a time in BFS order."""
    while True:
        red = redundant_edges(T, H)
        if not red:
            return T
        a = red[0]
        v = T.parent[a]
        drop = set(T.subtree_vertices(v)) - set(T.subtree_vertices(a))
        T = restrict(T, set(range(len(T))) - drop)


def trim_uniform_rank(T: AmbiguousTree, H: HypothesisClass) -> AmbiguousTree:
    """Cut the tree where a leaf's relevance count reaches the rank, so every
    leaf of the result has exactly ``rank(T)`` relevant edges."""
    rel = relevance_map(T, H)
    target = min(len(r) for r in rel.values())
    # best[v] = (count, -leaf) maximised over leaves below v, count = |R(u) ∩ P*(v)|
    best = {}
    for u, r in rel.items():
        running = 0
        for a in [T.root] + T.path_edges(u):
            if a in r:
                running += 1
            cand = (running, -u)
            if a not in best or cand > best[a]:
                best[a] = cand
    keep = []
    for v in T.preorder:
        if all(best[w][0] < target for w in T.ancestors(v)[1:]):
            keep.append(v)
    keep_set = set(keep)
    leaf_hyp = {}
    for v in keep:
        if not any(c in keep_set for c in T.children[v]):
            leaf_hyp[v] = T.hypothesis[-best[v][1]]
    return restrict(T, keep_set, leaf_hyp)


def reduce_arity(T: AmbiguousTree, H: HypothesisClass, lat: Lattice | None = None) -> AmbiguousTree:
    """Drop children until every vertex has at most ``VC(lat) + 1`` of them.

    At an oversized vertex the kept children are those whose labels form the
    minimal hull witness of all child labels, plus the special child.
    """
    if lat is None:
        lat = lattice_closure(H)
    limit = vc_dimension(lat) + 1
    drop = set()
    for v in T.preorder:
        if v in drop or len(T.children[v]) <= limit:
            continue
        all_labels = labelset(T.label[c] for c in T.children[v])
        _, witness = lambda_witness(lat, all_labels)
        for c in T.children[v]:
            if c not in T.special and not witness >> T.label[c] & 1:
                drop.update(T.subtree_vertices(c))
    if not drop:
        return T
    return restrict(T, set(range(len(T))) - drop)


def compact(T: AmbiguousTree, H: HypothesisClass, N: int) -> AmbiguousTree:
    """A subtree of depth at most ``N**2`` and rank at least ``N``.

    Requires ``rank(T) >= N**2``.  Follows the special-edge path from each
    sub-root, keeps the vertices whose path edge is relevant to a chosen leaf,
    and recurses into the remaining children with target ``N - 1``.
    """
    if N < 0:
        raise OutOfRange("N must be non-negative")
    rel = relevance_map(T, H)
    r = min(len(x) for x in rel.values())
    if r < N * N:
        raise RankTooSmall(f"rank {r} < N^2 = {N * N}")
    below = {v: T.leaves_below(v) for v in range(len(T))}

    def rec(q: int, M: int) -> set:
        if M == 0:
            return {below[q][0]}
        path = [q]
        while not T.is_leaf(path[-1]):
            path.append(T.special_child(path[-1]))
        chosen = None
        for i, vi in enumerate(path):
            hits = path[1:i + 1]
            for u in below[vi]:
                if sum(1 for a in hits if a in rel[u]) == M:
                    chosen = (i, u)
                    break
            if chosen:
                break
        if chosen is None:
            raise InternalInconsistency("no cut point on the special path")
        i, u_star = chosen
        S = [path[j] for j in range(i) if path[j + 1] in rel[u_star]]
        keep = set(S) | {u_star}
        for s in S:
            for w in T.children[s]:
                if w not in T.special:
                    keep |= rec(w, M - 1)
        return keep

    return restrict(T, rec(T.root, N))


# -- classical trees -----------------------------------------------------------------

def validate_classical(T: ClassicalTree, H: HypothesisClass) -> list[str]:
    errs = []
    depths = {len(T.ancestors(u)) for u in T.leaves}
    if len(depths) != 1:
        errs.append("tree is not perfect")
    for v in range(len(T)):
        kids = T.children[v]
        if kids and len(kids) != 2:
            errs.append(f"vertex {v} has {len(kids)} children, expected 2")
        if kids and T.label[kids[0]] == T.label[kids[-1]]:
            errs.append(f"vertex {v}: sibling labels coincide")
        if kids and not 0 <= T.instance[v] < H.num_instances:
            errs.append(f"vertex {v}: instance out of range")
    for u in T.leaves:
        h = T.hypothesis[u]
        if not 0 <= h < len(H):
            errs.append(f"leaf {u}: hypothesis out of range")
            continue
        for a in T.ancestors(u)[:-1]:
            lab = T.label[a]
            if not lab:
                errs.append(f"edge {a}: empty label set")
            elif H.value(h, T.instance[T.parent[a]]) != lab:
                errs.append(f"edge {a}: label {members(lab)} differs from h{h}")
    return errs


def from_classical(T: ClassicalTree, H: HypothesisClass) -> AmbiguousTree:
    """Embed a classical shattered tree as an ambiguous tree of rank = depth.

    Of two sibling label sets, a side with an element outside the other
    becomes the ordinary edge labelled by its smallest such element; the other
    side becomes the special edge labelled by its smallest element.
    """
    errs = validate_classical(T, H)
    if errs:
        raise InvalidClassicalTree("; ".join(errs))
    label = [None] * len(T)
    special = set()
    for v in range(len(T)):
        if not T.children[v]:
            continue
        a, b = T.children[v]
        alpha, beta = T.label[a], T.label[b]
        if alpha & ~beta == 0:
            a, b = b, a
            alpha, beta = beta, alpha
        label[a] = members(alpha & ~beta)[0]
        label[b] = members(beta)[0]
        special.add(b)
    return AmbiguousTree(T.parent, T.root, T.instance, tuple(label), T.hypothesis,
                         frozenset(special))


# -- generators ------------------------------------------------------------------------

def gen_fin_deltas(n: int) -> tuple[HypothesisClass, AmbiguousTree]:
    """Point-exception class ``h_k(x) = {1}`` at ``x == k`` else ``{0,1}``,
    with the staircase tree certifying rank ``n - 1``."""
    if not 2 <= n <= 5:
        raise OutOfRange("gen_fin_deltas needs 2 <= n <= 5")
    tables = [[[1] if x == k else [0, 1] for x in range(n)] for k in range(n)]
    H = make_class(n, 2, tables)
    # vertex = (zeros, trailing ones)
    parent, instance, label, hyp, special = {}, {}, {}, {}, set()
    nodes = [(0, 0)]
    queue = deque([0])
    while queue:
        v = queue.popleft()
        zeros, ones = nodes[v]
        if zeros + ones == n - 1:
            hyp[v] = zeros
            continue
        instance[v] = zeros
        for bit, child in ((0, (zeros + 1, 0)), (1, (zeros, ones + 1))):
            c = len(nodes)
            nodes.append(child)
            parent[c] = v
            label[c] = bit
            if bit == 1:
                special.add(c)
            queue.append(c)
    return H, AmbiguousTree.build(parent, instance, label, hyp, special)


def gen_small_al(n: int) -> tuple[HypothesisClass, AmbiguousTree]:
    """Flipped class ``h_k(x) = {0,1}`` at ``x == k`` else ``{1}`` and its
    three-vertex rank-1 tree."""
    if n < 2:
        raise OutOfRange("gen_small_al needs n >= 2")
    tables = [[[0, 1] if x == k else [1] for x in range(n)] for k in range(n)]
    H = make_class(n, 2, tables)
    T = AmbiguousTree.build({1: 0, 2: 0}, {0: 0}, {1: 0, 2: 1}, {1: 0, 2: 1}, {2})
    return H, T


def gen_many_labels(k: int, l: int) -> tuple[HypothesisClass, AmbiguousTree]:
    """Adversary tree over ``k`` hypotheses and ``l + 1`` labels.

    Each round singles out the ``l`` surviving hypotheses with fewest mistakes
    (ties to lower index); hypothesis ``j`` in that group forbids label
    ``f(j)``.  Label 0 is the special edge.
    """
    if l < 1 or k < 2 * l or k > 6:
        raise OutOfRange("gen_many_labels needs l >= 1, 2l <= k <= 6")
    parent, label, hyp, special = {}, {}, {}, set()
    groups = {}  # internal vertex -> {hypothesis: forbidden label}
    count = [0]

    def grow(v, marks: dict[int, int]):
        if max(marks.values()) >= k or len(marks) == 1:
            hyp[v] = min(marks, key=lambda j: (-marks[j], j))
            return
        alive = sorted(marks, key=lambda j: (marks[j], j))
        group = sorted(alive[:l])
        f = {j: i + 1 for i, j in enumerate(group)}
        groups[v] = f
        stay = {j: marks[j] + (j in f) for j in marks}
        children = [(0, stay)]
        for j, i in f.items():
            children.append((i, {o: marks[o] + 1 for o in marks if o != j}))
        for lab, sub in children:
            c = count[0] = count[0] + 1
            parent[c] = v
            label[c] = lab
            if lab == 0:
                special.add(c)
            grow(c, sub)

    grow(0, {j: 0 for j in range(k)})
    internal = sorted(groups)
    instance = {v: i for i, v in enumerate(internal)}
    full = list(range(l + 1))
    tables = []
    for j in range(k):
        row = []
        for v in internal:
            f = groups[v]
            row.append([y for y in full if y != f[j]] if j in f else full)
        tables.append(row)
    H = make_class(len(internal), l + 1, tables)
    return H, AmbiguousTree.build(parent, instance, label, hyp, special)


def random_tree(rng, H: HypothesisClass, max_depth: int = 4, stop_prob: float = 0.25,
                max_vertices: int = 200) -> AmbiguousTree:
    """A random valid tree for ``H``, grown top-down.

    Each vertex tracks the hypotheses consistent with its path, so every
    choice made is valid and no rejection step is needed.
    """
    parent, instance, label, hyp, special = {}, {}, {}, {}, set()
    stack = [(0, H.all_mask, 0)]
    size = 1
    while stack:
        v, alive, d = stack.pop()
        grow = d < max_depth and size < max_vertices and rng.random() >= stop_prob
        xs = [x for x in range(H.num_instances) if H.split(alive, x)] if grow else []
        if xs:
            x = rng.choice(xs)
            parts = H.split(alive, x)
            ys = sorted(parts)
            width = rng.randint(1, min(len(ys), max(1, max_vertices - size)))
            chosen = sorted(rng.sample(ys, width))
            sp = rng.choice(chosen)
            instance[v] = x
            for y in chosen:
                c = size
                size += 1
                parent[c] = v
                label[c] = y
                if y == sp:
                    special.add(c)
                stack.append((c, parts[y], d + 1))
        else:
            hyp[v] = rng.choice(list(iter_bits(alive)))
    return AmbiguousTree.build(parent, instance, label, hyp, special)


# -- JSON ------------------------------------------------------------------------------

_TREE_KEYS = {"root", "parents", "vertex_instance", "edge_label", "leaf_hypothesis",
              "special_edges"}


def tree_to_dict(T: AmbiguousTree) -> dict:
    return {
        "root": T.root,
        "parents": {str(v): T.parent[v] for v in T.edges},
        "vertex_instance": {str(v): T.instance[v] for v in T.internal},
        "edge_label": {str(v): T.label[v] for v in T.edges},
        "leaf_hypothesis": {str(v): T.hypothesis[v] for v in T.leaves},
        "special_edges": sorted(T.special),
    }


def _int_map(doc, key) -> dict[int, object]:
    m = doc[key]
    if not isinstance(m, dict):
        raise ParseError(f"'{key}' must be an object")
    try:
        return {int(k): v for k, v in m.items()}
    except ValueError as exc:
        raise ParseError(f"'{key}': vertex ids must be integers") from exc


def tree_from_dict(doc) -> AmbiguousTree:
    if not isinstance(doc, dict):
        raise ParseError("tree document must be an object")
    missing = _TREE_KEYS - set(doc)
    extra = set(doc) - _TREE_KEYS
    if missing or extra:
        raise ParseError(f"tree document: missing {sorted(missing)}, unknown {sorted(extra)}")
    parents = _int_map(doc, "parents")
    root = doc["root"]
    n = 1 + len(parents)
    if set(parents) | {root} != set(range(n)):
        raise ParseError(f"vertex ids must be exactly 0..{n - 1}")
    try:
        return AmbiguousTree.build(parents, _int_map(doc, "vertex_instance"),
                                   _int_map(doc, "edge_label"), _int_map(doc, "leaf_hypothesis"),
                                   doc["special_edges"], root)
    except InvalidTree as exc:
        raise ParseError(str(exc)) from exc


def dump_tree(T: AmbiguousTree) -> str:
    return json.dumps(tree_to_dict(T), indent=2)


def load_tree(text: str) -> AmbiguousTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}: {exc.msg}") from exc
    return tree_from_dict(doc)


def classical_to_dict(T: ClassicalTree) -> dict:
    edges = [v for v in range(len(T)) if v != T.root]
    return {
        "root": T.root,
        "parents": {str(v): T.parent[v] for v in edges},
        "vertex_instance": {str(v): T.instance[v] for v in range(len(T)) if T.children[v]},
        "edge_label": {str(v): list(members(T.label[v])) for v in edges},
        "leaf_hypothesis": {str(v): T.hypothesis[v] for v in T.leaves},
    }


def classical_from_dict(doc) -> ClassicalTree:
    keys = _TREE_KEYS - {"special_edges"}
    if not isinstance(doc, dict) or set(doc) != keys:
        raise ParseError(f"classical tree document needs exactly {sorted(keys)}")
    parents = _int_map(doc, "parents")
    root = doc["root"]
    n = 1 + len(parents)
    if set(parents) | {root} != set(range(n)):
        raise ParseError(f"vertex ids must be exactly 0..{n - 1}")
    labels = {v: labelset(ys) for v, ys in _int_map(doc, "edge_label").items()}
    try:
        return ClassicalTree.build(parents, _int_map(doc, "vertex_instance"), labels,
                                   _int_map(doc, "leaf_hypothesis"), root)
    except InvalidTree as exc:
        raise ParseError(str(exc)) from exc

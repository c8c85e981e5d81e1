import json
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from aol.core import make_class
from aol.dimensions import littlestone_tree, partial_littlestone
from aol.exceptions import InvalidClassicalTree, InvalidTree, NotALeaf, OutOfRange, ParseError, RankTooSmall
from aol.lattice import gen_box, lattice_closure, vc_dimension
from aol.trees import (AmbiguousTree, ClassicalTree, arity, check_tree, classical_from_dict,
                       classical_to_dict, compact, depth, dump_tree, from_classical,
                       gen_fin_deltas, gen_many_labels, gen_small_al, is_frugal, load_tree,
                       random_tree, rank, reduce_arity, redundant_edges, relevance_map,
                       relevant_edges, tree_from_dict, tree_to_dict, trim_frugal,
                       trim_uniform_rank, validate)
from strategies import classes


def test_single_leaf():
    H, _ = gen_fin_deltas(2)
    T = AmbiguousTree.leaf(1)
    assert validate(T, H) == [] and rank(T, H) == 0 and depth(T) == 0 and arity(T) == 0
    assert trim_frugal(T, H) == T and trim_uniform_rank(T, H) == T


def test_validation_rules():
    H, _ = gen_fin_deltas(2)
    # two special children, repeated labels, and a leaf inconsistent with its path
    T = AmbiguousTree.build({1: 0, 2: 0}, {0: 0}, {1: 0, 2: 0}, {1: 0, 2: 1}, special={1, 2})
    rules = {v.rule for v in validate(T, H)}
    assert {"one-special-child", "distinct-sibling-labels", "consistency"} <= rules
    with pytest.raises(InvalidTree):
        check_tree(T, H)
    T = AmbiguousTree.build({1: 0}, {0: 5}, {1: 0}, {1: 0}, special={1})
    assert [v.rule for v in validate(T, H)] == ["range"]


def test_structure_errors():
    with pytest.raises(InvalidTree):
        AmbiguousTree.build({1: 2, 2: 1}, {}, {1: 0, 2: 0}, {}, special=())


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_fin_deltas_trees(n):
    H, T = gen_fin_deltas(n)
    assert validate(T, H) == []
    assert rank(T, H) == n - 1
    assert rank(T, H) == oracles.tree_rank(T, H)
    assert depth(T) == n * (n - 1) // 2  # frozen: staircase depth
    assert depth(T) <= n * n - 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_small_al_trees(n):
    H, T = gen_small_al(n)
    assert validate(T, H) == [] and rank(T, H) == 1


@pytest.mark.parametrize("k, l, size", [(2, 1, None), (4, 2, 148)])
def test_many_labels(k, l, size):
    H, T = gen_many_labels(k, l)
    assert validate(T, H) == []
    assert depth(T) <= -(-k * k // l) and rank(T, H) >= (k - 1 + 1) // 2
    assert H.num_labels == l + 1
    if size:
        assert len(T) == size


def test_generator_guards():
    for fn, args in [(gen_fin_deltas, (1,)), (gen_fin_deltas, (6,)), (gen_small_al, (1,)),
                     (gen_many_labels, (3, 2)), (gen_many_labels, (2, 0))]:
        with pytest.raises(OutOfRange):
            fn(*args)


def test_relevance_matches_oracle_on_generators():
    for n in (2, 3, 4):
        H, T = gen_fin_deltas(n)
        for u, r in relevance_map(T, H).items():
            assert set(r) == oracles.relevance(T, H, u)
    with pytest.raises(NotALeaf):
        relevant_edges(T, H, T.root)


def test_weighted_rank():
    H, T = gen_fin_deltas(2)
    assert rank(T, H, weights=[5, 0]) == rank(T, H) + 0
    assert rank(T, H, weights=[5, 5]) == rank(T, H) + 5
    assert rank(T, H, weights=[5, 0], aggregate="max") == 1 + 5


def redundant_example():
    """Root with one special child over x0, whose special edge no leaf uses,
    followed by the two-leaf rank-1 point-exception tree over x1."""
    H, _ = gen_fin_deltas(2)
    T = AmbiguousTree.build(
        {1: 0, 2: 1, 3: 1}, {0: 0, 1: 1}, {1: 1, 2: 0, 3: 1}, {2: 0, 3: 1}, special={1, 3})
    return H, T


def test_trim_frugal_removes_redundant_edge():
    H, T = redundant_example()
    assert validate(T, H) == [] and redundant_edges(T, H) == [1]
    F = trim_frugal(T, H)
    assert is_frugal(F, H) and validate(F, H) == []
    assert depth(F) < depth(T) and rank(F, H) >= rank(T, H)


def test_trim_frugal_keeps_relevant_special_edge():
    H, T = gen_small_al(3)
    assert is_frugal(T, H)
    assert trim_frugal(T, H) == T


@pytest.mark.parametrize("k, l, before", [(2, 1, {1, 2}), (4, 2, {3, 4})])
def test_trim_uniform_rank_equalizes(k, l, before):
    H, T = gen_many_labels(k, l)
    assert {len(r) for r in relevance_map(T, H).values()} == before
    U = trim_uniform_rank(T, H)
    assert validate(U, H) == []
    assert {len(r) for r in relevance_map(U, H).values()} == {min(before)}
    assert rank(U, H) == rank(T, H)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 10 ** 6))
@settings(max_examples=80)
def test_trim_uniform_rank_random(H, seed):
    T = random_tree(random.Random(seed), H, max_depth=5, stop_prob=0.1)
    U = trim_uniform_rank(T, H)
    assert validate(U, H) == []
    assert {len(r) for r in relevance_map(U, H).values()} == {rank(T, H)}


def interval_class():
    """One instance over four labels; values are every interval of the row."""
    intervals = [list(range(a, b + 1)) for a in range(4) for b in range(a, 4)]
    return make_class(1, 4, [[iv] for iv in intervals])


def test_reduce_arity_on_interval_lattice():
    H = interval_class()
    lat = lattice_closure(H)
    assert lat == gen_box(1, 4)
    assert vc_dimension(lat) == 2
    single = {tuple(H.table[h]): h for h in range(len(H))}
    leaf = {y + 1: single[(1 << y,)] for y in range(4)}
    T = AmbiguousTree.build({1: 0, 2: 0, 3: 0, 4: 0}, {0: 0}, {c: c - 1 for c in leaf}, leaf,
                            special={1})
    assert validate(T, H) == [] and arity(T) == 4 and rank(T, H) == 1
    R = reduce_arity(T, H, lat)
    assert validate(R, H) == [] and arity(R) <= 3 and rank(R, H) == 1


def test_reduce_arity_binary_unchanged():
    H, T = gen_fin_deltas(3)
    assert reduce_arity(T, H) == T


@pytest.mark.parametrize("N, max_depth", [(0, 0), (1, 1), (2, 4)])
def test_compact(N, max_depth):
    H, T = gen_fin_deltas(5)
    C = compact(T, H, N)
    assert validate(C, H) == [] and rank(C, H) >= N and depth(C) <= max_depth


def test_compact_rank_guard():
    H, T = gen_fin_deltas(3)
    with pytest.raises(RankTooSmall):
        compact(T, H, 2)


def test_from_classical_littlestone_tree():
    H = make_class(2, 2, [[[0], [0]], [[0], [1]], [[1], [0]], [[1], [1]]])
    C = littlestone_tree(H)
    assert partial_littlestone(H) == 2
    A = from_classical(C, H)
    assert validate(A, H) == [] and rank(A, H) == depth(A) == 2


def test_from_classical_rejects_bad_tree():
    H = make_class(1, 2, [[[0]], [[1]]])
    bad = ClassicalTree.build({1: 0, 2: 0}, {0: 0}, {1: 0b01, 2: 0b01}, {1: 0, 2: 0})
    with pytest.raises(InvalidClassicalTree):
        from_classical(bad, H)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 10 ** 6))
@settings(max_examples=80)
def test_random_tree_transform_contracts(H, seed):
    rng = random.Random(seed)
    T = random_tree(rng, H)
    assert validate(T, H) == []
    assert rank(T, H) == oracles.tree_rank(T, H)
    r, d = rank(T, H), depth(T)
    F = trim_frugal(T, H)
    assert is_frugal(F, H) and rank(F, H) >= r and depth(F) <= d
    lat = lattice_closure(H)
    R = reduce_arity(T, H, lat)
    assert validate(R, H) == [] and rank(R, H) >= r and arity(R) <= vc_dimension(lat) + 1


def test_tree_json_round_trip():
    H, T = gen_fin_deltas(3)
    assert load_tree(dump_tree(T)) == T
    doc = tree_to_dict(T)
    assert tree_from_dict(json.loads(json.dumps(doc))) == T
    with pytest.raises(ParseError):
        tree_from_dict({"root": 0})
    with pytest.raises(ParseError, match="line"):
        load_tree("{\n ,")


def test_classical_json_round_trip():
    H = make_class(2, 2, [[[0], [0]], [[0], [1]], [[1], [0]], [[1], [1]]])
    C = littlestone_tree(H)
    assert classical_from_dict(json.loads(json.dumps(classical_to_dict(C)))) == C

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from aol.core import make_class
from aol.dimensions import (ALSolver, GameState, al_dimension, al_witness_tree, game_value,
                            littlestone_tree, partial_littlestone)
from aol.exceptions import IndexOutOfRange, OutOfRange
from aol.trees import depth, gen_fin_deltas, gen_small_al, rank, validate, validate_classical
from strategies import classes

tiny = classes(max_instances=2, max_labels=2, max_size=3)


@given(tiny, st.integers(0, 3))
@settings(max_examples=40)
def test_game_value_matches_brute_force(H, N):
    assert game_value(H, N) == oracles.game_value(H, N)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 4))
def test_al_equals_game_value(H, N):
    assert al_dimension(H, N) == game_value(H, N)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 5))
def test_pruning_preserves_value(H, N):
    assert al_dimension(H, N) == al_dimension(H, N, prune=False)


@given(classes(max_instances=3, max_labels=2, max_size=4), st.integers(0, 3), st.data())
def test_weighted_al_equals_weighted_game_value(H, N, data):
    w = data.draw(st.lists(st.integers(0, 3), min_size=len(H), max_size=len(H)))
    assert al_dimension(H, N, weights=w) == game_value(H, N, weights=w)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 4))
def test_al_monotone_and_capped(H, N):
    a = al_dimension(H, N)
    assert a <= al_dimension(H, N + 1)
    assert a <= min(N, len(H) - 1)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.integers(0, 4))
def test_witness_tree_certifies_value(H, N):
    T = al_witness_tree(H, N)
    assert validate(T, H) == []
    assert depth(T) <= N
    assert rank(T, H) == al_dimension(H, N)


@given(classes(max_instances=3, max_labels=3, max_size=4), st.data())
def test_weighted_witness(H, data):
    w = data.draw(st.lists(st.integers(0, 2), min_size=len(H), max_size=len(H)))
    T = al_witness_tree(H, 3, weights=w)
    assert rank(T, H, weights=w) == al_dimension(H, 3, weights=w)


@given(classes(max_instances=3, max_labels=3, max_size=5))
def test_partial_littlestone_matches_oracle(H):
    assert partial_littlestone(H) == oracles.littlestone(H)
    C = littlestone_tree(H)
    assert validate_classical(C, H) == []
    assert max(len(C.ancestors(u)) - 1 for u in C.leaves) == partial_littlestone(H)


def test_point_exception_values():
    H, _ = gen_fin_deltas(2)
    assert al_dimension(H, 4) == 1 and game_value(H, 4) == 1
    H, _ = gen_fin_deltas(3)
    assert al_dimension(H, 9) == 2
    assert partial_littlestone(H) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_small_al_values(n):
    H, _ = gen_small_al(n)
    assert al_dimension(H, 6) == 1 and partial_littlestone(H) == 1


def test_full_function_class_littlestone():
    H = make_class(2, 2, [[[a], [b]] for a in (0, 1) for b in (0, 1)])
    assert partial_littlestone(H) == 2


def test_singleton_and_horizon_zero():
    H = make_class(2, 2, [[[0], [0, 1]]])
    assert al_dimension(H, 5) == 0 and game_value(H, 5) == 0
    H, _ = gen_fin_deltas(3)
    assert al_dimension(H, 0) == 0
    assert al_dimension(H, 0, weights=[2, 1, 0]) == 2


def test_game_state_input():
    H, _ = gen_fin_deltas(2)
    s = GameState.initial(H, 4)
    assert game_value(H, s) == 1
    assert game_value(H, GameState(0b01, (3, 0), 2)) == 3


def test_argument_errors():
    H, _ = gen_fin_deltas(2)
    with pytest.raises(OutOfRange):
        al_dimension(H, -1)
    with pytest.raises(IndexOutOfRange):
        al_dimension(H, 2, weights=[0])
    with pytest.raises(OutOfRange):
        ALSolver(H).value(0, [0, 0], 2)


def test_dict_weights():
    H, _ = gen_fin_deltas(2)
    assert al_dimension(H, 2, weights={0: 1}) == al_dimension(H, 2, weights=[1, 0])


def test_long_horizon_does_not_overflow_the_stack():
    H, _ = gen_fin_deltas(2)
    assert al_dimension(H, 2000) == 1

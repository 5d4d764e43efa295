from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from conftest import process_and_constraint, processes
from mahn.errors import CapExceeded
from mahn.model import AtLeastOne, Configuration, labeling_successors, normalize
from mahn.oracle import (
    abstract_supports,
    canonical,
    oracle_count_reach,
    oracle_graph_reach,
    oracle_prp,
    random_walk,
)

# pinned after the first exhaustive run; (q0,q2) is absent because a node
# only enters q2 by hearing a q0 broadcast, whose sender then sits in q1
P1_TWO_NODES = {("q0", "q0"), ("q0", "q1"), ("q1", "q1"), ("q1", "q2")}


def test_p1_one_node(p1):
    assert oracle_graph_reach(p1, 1).reachable_labelings == {("q0",), ("q1",)}


def test_p1_two_nodes_snapshot(p1):
    assert oracle_graph_reach(p1, 2).reachable_labelings == P1_TWO_NODES


def test_no_rules_gives_initial_labelings():
    p = normalize(["x", "y"], [], [], ["x", "y"])
    assert oracle_graph_reach(p, 2).reachable_labelings == {("x", "x"), ("x", "y"), ("y", "y")}


def test_caps(p1):
    with pytest.raises(CapExceeded):
        oracle_graph_reach(p1, 5)
    with pytest.raises(CapExceeded):
        oracle_graph_reach(p1, 0)
    with pytest.warns(UserWarning):
        oracle_graph_reach(p1, 5, cap=5)


def test_oracle_prp_examples(p1):
    assert str(oracle_prp(p1, AtLeastOne("q2"), 4)) == "YES(2)"
    assert str(oracle_prp(p1, AtLeastOne("q0"), 4)) == "YES(1)"
    p = normalize(["q0", "q1", "q2", "q3"], ["a"], [("q0", "!!a", "q1"), ("q0", "??a", "q2")], ["q0"])
    v = oracle_prp(p, AtLeastOne("q3"), 4)
    assert str(v) == "NO_UP_TO(4)" and v.certified
    v = oracle_prp(p, AtLeastOne("q3"), 4, abstraction_cap=None)
    assert str(v) == "NO_UP_TO(4)" and not v.certified


def test_random_walk_examples(p1):
    assert len(random_walk(p1, 3, 0, 5)) == 1
    assert random_walk(p1, 3, 12, 5) == random_walk(p1, 3, 12, 5)
    silent = normalize(["x"], ["a"], [], ["x"])
    assert all(step.event in ("init", "move") for step in random_walk(silent, 3, 6, 1))


def test_canonical_is_order_independent(p1):
    assert canonical(("q2", "q0", "q1"), p1) == canonical(("q1", "q2", "q0"), p1) == ("q0", "q1", "q2")


# ----------------------------------------------------------------------
# properties


def _labeling_closure(p, n):
    start = set(itertools.product(p.initial, repeat=n))
    seen, todo = set(start), list(start)
    while todo:
        for nxt in labeling_successors(p, todo.pop()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return {canonical(l, p) for l in seen}


@given(processes(max_states=4, max_rules=8), st.integers(1, 3))
def test_graph_search_matches_labeling_closure(p, n):
    assert oracle_graph_reach(p, n).reachable_labelings == _labeling_closure(p, n)


@given(processes(max_states=4, max_rules=8), st.integers(1, 3))
def test_count_search_matches_graph_search(p, n):
    graph = {p.quotient(l) for l in oracle_graph_reach(p, n).reachable_labelings}
    assert oracle_count_reach(p, n) == graph


@given(processes(max_states=4, max_rules=8), st.integers(1, 5))
def test_abstraction_covers_every_concrete_support(p, n):
    abstract = abstract_supports(p)
    for vec in oracle_count_reach(p, n):
        assert p.mask(q for q, c in zip(p.states, vec) if c) in abstract


@given(process_and_constraint(max_states=4))
def test_certified_no_matches_plain_search(pair):
    p, phi = pair
    v = oracle_prp(p, phi, 4)
    if v.certified:
        assert not oracle_prp(p, phi, 4, abstraction_cap=None).found


@given(st.lists(st.sampled_from(["a", "b", "c"]), min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_canonical_idempotent(lab, rng):
    p = normalize(["a", "b", "c"], [], [], ["a"])
    shuffled = list(lab)
    rng.shuffle(shuffled)
    c = canonical(tuple(lab), p)
    assert canonical(c, p) == c == canonical(tuple(shuffled), p)


@given(processes(max_states=4), st.integers(0, 2**16))
def test_random_walk_is_deterministic_and_size_preserving(p, seed):
    a = random_walk(p, 3, 10, seed)
    assert a == random_walk(p, 3, 10, seed)
    assert all(isinstance(s.config, Configuration) and s.config.node_count == 3 for s in a)

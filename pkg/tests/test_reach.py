from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from conftest import process_and_constraint, processes
from mahn.ccsolve import decide_prp_cc
from mahn.errors import WrongConstraintClass
from mahn.lang import parse_circuit
from mahn.model import Absent, AtLeastOne, normalize
from mahn.oracle import oracle_graph_reach
from mahn.reach import ByBroadcast, ByReception, Initial, decide_prp_geq1, reachable_states
from mahn.reductions import cvp_to_prp


def test_p1_reach_set_and_iterations(p1):
    res = reachable_states(p1)
    assert res.reachable == {"q0", "q1", "q2"}
    assert res.iterations == 2
    assert res.provenance["q0"] == Initial()
    assert isinstance(res.provenance["q1"], ByBroadcast)
    assert isinstance(res.provenance["q2"], ByReception)
    assert res.provenance["q2"].broadcast.target == "q1"


def test_no_rules_reach_is_initial():
    p = normalize(["x", "y", "z"], [], [], ["x", "y"])
    res = reachable_states(p)
    assert res.reachable == {"x", "y"}
    assert res.iterations == 1


def test_states_added_in_a_pass_wait_for_the_next_one():
    # chain x -> y -> z of broadcasts needs one pass per link
    p = normalize(["x", "y", "z"], ["a"], [("x", "!!a", "y"), ("y", "!!a", "z")], ["x"])
    res = reachable_states(p)
    assert res.discovered_in == {"x": 0, "y": 1, "z": 2}
    assert res.iterations == 3


def test_cvp_and_gate_reaches_ok():
    c = parse_circuit("input x = true; input y = true; gate g = and(x, y); output g expect true;")
    red = cvp_to_prp(c)
    assert "ok" in reachable_states(red.process).reachable


def test_decide_prp_geq1_examples(p1):
    assert decide_prp_geq1(p1, AtLeastOne("q2"))[0]
    assert decide_prp_geq1(p1, AtLeastOne("q0"))[0]
    p = normalize(["q0", "q1", "q2", "q3"], ["a", "b"], [("q0", "!!a", "q1"), ("q0", "??a", "q2")], ["q0"])
    assert not decide_prp_geq1(p, AtLeastOne("q3"))[0]
    with pytest.raises(WrongConstraintClass):
        decide_prp_geq1(p1, Absent("q0"))


# ----------------------------------------------------------------------
# properties


@given(processes())
def test_iterations_bounded_by_state_count(p):
    assert reachable_states(p).iterations <= len(p.states)


@given(processes(max_states=4, max_rules=8))
def test_reach_matches_graph_oracle(p):
    reach = reachable_states(p).reachable
    seen = set()
    for n in (1, 2, 3):
        seen |= oracle_graph_reach(p, n).state_coverage
    assert seen <= reach


@given(processes(), st.randoms(use_true_random=False))
def test_adding_a_rule_never_shrinks_reach(p, rng):
    s, t = rng.choice(p.states), rng.choice(p.states)
    action = rng.choice(["!!", "??"]) + rng.choice(p.user_alphabet or ("a0",))
    alphabet = p.user_alphabet or ("a0",)
    bigger = normalize(p.states, alphabet, list(p.rules) + [(s, action, t)], p.initial)
    assert reachable_states(p).reachable <= reachable_states(bigger).reachable


@given(processes())
def test_provenance_replays_in_discovery_order(p):
    res = reachable_states(p)
    present: set[str] = set()
    for q in sorted(res.reachable, key=lambda x: res.discovered_in[x]):
        just = res.provenance[q]
        k = res.discovered_in[q]
        before = {x for x in present if res.discovered_in[x] < k}
        if isinstance(just, Initial):
            assert q in p.initial
        elif isinstance(just, ByBroadcast):
            assert just.rule.source in before and just.rule.target == q
        else:
            assert just.broadcast.source in before
            assert just.receive.source in before
            assert just.receive.message == just.broadcast.message and just.receive.target == q
        present.add(q)
    assert present == res.reachable


@given(process_and_constraint(absent=False))
def test_presence_queries_agree_across_solvers(pair):
    p, phi = pair
    assert decide_prp_geq1(p, phi)[0] == decide_prp_cc(p, phi)[0]


def _naive_passes(p):
    """Direct transcription of the snapshot loop, no indexing."""
    S, old, it = set(p.initial), None, 0
    found = {q: 0 for q in S}
    while S != old:
        old = set(S)
        it += 1
        for b in p.rules:
            if not b.is_broadcast or b.source not in old:
                continue
            found.setdefault(b.target, it)
            S.add(b.target)
            for r in p.rules:
                if not r.is_broadcast and r.message == b.message and r.source in old:
                    found.setdefault(r.target, it)
                    S.add(r.target)
    return S, it, found


@given(processes(max_states=6, max_rules=14))
def test_indexed_passes_match_direct_loop(p):
    res = reachable_states(p)
    S, it, found = _naive_passes(p)
    assert res.reachable == S
    assert res.iterations == it
    assert res.discovered_in == found

from __future__ import annotations

from hypothesis import given, strategies as st

from conftest import process_and_constraint, processes
from mahn.ccsolve import (
    AddByBroadcast,
    AddByReception,
    DelJoint,
    add_closure,
    add_successors,
    decide_prp_cc,
    del_successors,
    is_post_add,
    is_post_del,
    post_add_family,
    validate_witness,
)
from mahn.lang import CnfFormula
from mahn.model import Absent, And, AtLeastOne, bits, normalize
from mahn.oracle import oracle_prp
from mahn.reach import reachable_states
from mahn.reductions import sat_to_prp

S = frozenset


def test_post_add_family_of_p1(p1):
    fam = post_add_family(p1, {"q0"})
    assert {S({"q0"}), S({"q0", "q1"}), S({"q0", "q1", "q2"})} <= fam
    assert S({"q0", "q2"}) not in fam
    assert not is_post_add(p1, {"q0"}, {"q0", "q2"})


def test_post_add_family_of_full_set_is_itself(p1):
    assert post_add_family(p1, set(p1.states)) == {S(p1.states)}


def test_add_successors_of_p1(p1):
    (succ,) = add_successors(p1, {"q0"})
    assert succ[0] == {"q0", "q1"} and isinstance(succ[1], AddByBroadcast)
    (succ,) = add_successors(p1, {"q0", "q1"})
    assert succ[0] == {"q0", "q1", "q2"} and isinstance(succ[1], AddByReception)
    silent = normalize(["x", "y"], [], [], ["x"])
    assert add_successors(silent, {"x"}) == []
    assert del_successors(silent, {"x", "y"}) == []


def test_del_successors_of_p1(p1):
    succ = del_successors(p1, {"q0", "q1", "q2"})
    targets = {s for s, _ in succ}
    assert {"q1", "q2"} in targets
    assert is_post_del(p1, {"q0", "q1", "q2"}, {"q1", "q2"})
    # removal of q0 is justified on its own by the broadcast q0 -> q1
    assert not any(isinstance(j, DelJoint) and set(j.states) != {"q0"} for _, j in succ)


def test_joint_removal_when_sender_and_receiver_share_a_state():
    # q0 can only vanish if the sender leaves to q1 and every neighbour in
    # q0 receives into q2; q1 must be present afterwards and q2 too
    p = normalize(["q0", "q1", "q2"], ["a"], [("q0", "!!a", "q1"), ("q0", "??a", "q2")], ["q0"])
    assert is_post_del(p, {"q0", "q1", "q2"}, {"q1", "q2"})


def test_decide_prp_cc_on_p1(p1):
    phi = And(Absent("q0"), AtLeastOne("q2"))
    ok, w = decide_prp_cc(p1, phi)
    assert ok
    assert w.add_chain == (S({"q0"}), S({"q0", "q1"}), S({"q0", "q1", "q2"}))
    assert w.del_chain == (S({"q0", "q1", "q2"}), S({"q1", "q2"}))
    assert validate_witness(p1, phi, w)


def test_decide_prp_cc_initial_query(p1):
    ok, w = decide_prp_cc(p1, AtLeastOne("q0"))
    assert ok
    assert w.add_chain == (S({"q0"}),) and w.del_chain == (S({"q0"}),)


def test_unsat_formula_gives_no():
    red = sat_to_prp(CnfFormula(1, ((1,), (-1,))))
    assert decide_prp_cc(red.process, red.query) == (False, None)


def test_unreachable_absence_is_no(p1):
    # q2 can never be present without q1
    assert not decide_prp_cc(p1, And(Absent("q1"), AtLeastOne("q2")))[0]


def test_tampered_witness_is_rejected(p1):
    phi = And(Absent("q0"), AtLeastOne("q2"))
    _, w = decide_prp_cc(p1, phi)
    bad = type(w)((S({"q0"}), S({"q0", "q2"})), (S({"q0", "q2"}), S({"q2"})), (), ())
    assert not validate_witness(p1, phi, bad)


# ----------------------------------------------------------------------
# properties


def _family_closure(p, start):
    seen = {S(start)}
    todo = [S(start)]
    while todo:
        for nxt in post_add_family(p, todo.pop()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


@given(processes(max_states=4, max_rules=8), st.data())
def test_single_adds_reach_the_same_sets_as_family_steps(p, data):
    start = data.draw(st.sets(st.sampled_from(p.states), min_size=1))
    single = {p.names(m) for m in add_closure(p, start)}
    assert single == _family_closure(p, start)


@given(processes(max_states=6, max_rules=12))
def test_add_phase_maximum_is_reach(p):
    closure = add_closure(p, set(p.initial))
    top = max(closure, key=lambda m: len(list(bits(m))))
    assert p.names(top) == reachable_states(p).reachable
    assert all(m & ~top == 0 for m in closure)


@given(process_and_constraint())
def test_witnesses_validate(pair):
    p, phi = pair
    ok, w = decide_prp_cc(p, phi)
    if ok:
        assert validate_witness(p, phi, w)
        assert all(is_post_add(p, a, b) for a, b in zip(w.add_chain, w.add_chain[1:]))
        assert all(is_post_del(p, a, b) for a, b in zip(w.del_chain, w.del_chain[1:]))


@given(process_and_constraint(max_states=4))
def test_oracle_yes_implies_solver_yes(pair):
    p, phi = pair
    verdict = oracle_prp(p, phi, n_max=3, abstraction_cap=None)
    if verdict.found:
        assert decide_prp_cc(p, phi)[0]

from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from conftest import P1_TEXT, processes
from mahn.cardsolve import decide_crp
from mahn.ccsolve import decide_prp_cc
from mahn.errors import (
    CyclicCircuit,
    DslSyntaxError,
    DuplicateEntry,
    EmptyInitialSet,
    MahnError,
    ReservedIdentifier,
    UnknownIdentifier,
    UnknownPlace,
    ZeroTotal,
)
from mahn.lang import (
    parse_card,
    parse_circuit,
    parse_constraint,
    parse_dimacs,
    parse_petri,
    parse_process,
    render_card,
    render_circuit,
    render_constraint,
    render_dimacs,
    render_petri,
    render_process,
    render_trace_lines,
    render_witness,
)
from mahn.model import Absent, And, AtLeastOne, Or
from mahn.randgen import random_circuit, random_cnf, random_constraint, random_safe_net
from mahn.reach import reachable_states


def test_parse_p1(p1):
    assert p1.states == ("q0", "q1", "q2")
    assert len(p1.rules) == 2
    assert p1.initial == ("q0",)


def test_render_parse_fixpoint(p1):
    text = render_process(p1)
    assert parse_process(text) == p1
    assert render_process(parse_process(text)) == text


def test_tau_renders_as_tau():
    p = parse_process("process T { states: a, b; init: a; alphabet: ; rules: a --tau--> b; }")
    assert "a --tau--> b;" in render_process(p)
    assert parse_process(render_process(p)) == p


def test_undeclared_state_in_rule_has_span():
    text = P1_TEXT.replace("q0 --??a--> q2", "q0 --??a--> q7")
    with pytest.raises(UnknownIdentifier) as info:
        parse_process(text)
    span = info.value.span
    assert text[span.begin : span.end] == "q7"
    assert span.line == 7


def test_empty_init_list():
    with pytest.raises(EmptyInitialSet):
        parse_process("process E { states: q0; init: ; alphabet: ; rules: }")


def test_m_tau_is_reserved():
    with pytest.raises(ReservedIdentifier):
        parse_process("process R { states: q0; init: q0; alphabet: m_tau; rules: }")


def test_comments_and_whitespace_are_ignored(p1):
    noisy = "# header\n" + P1_TEXT.replace("rules:", "rules:   # two rules\n\n")
    assert parse_process(noisy) == p1


def test_parse_constraint_examples():
    assert parse_constraint("#ok >= 1") == AtLeastOne("ok")
    assert parse_constraint("#q0 = 0 & #q2 >= 1") == And(Absent("q0"), AtLeastOne("q2"))
    assert parse_constraint("#a >= 1 | #b = 0 & #c >= 1") == Or(
        AtLeastOne("a"), And(Absent("b"), AtLeastOne("c"))
    )
    assert parse_constraint("(#a >= 1 | #b = 0) & #c >= 1") == And(
        Or(AtLeastOne("a"), Absent("b")), AtLeastOne("c")
    )


def test_parse_constraint_checks_names(p1):
    with pytest.raises(UnknownIdentifier):
        parse_constraint("#q3 >= 1", p1)
    for bad in ("#q0 >= 2", "#q0 >=", "q0 >= 1", "(#q0 >= 1", "#q0 = 0 &", ""):
        with pytest.raises(DslSyntaxError):
            parse_constraint(bad, p1)


def test_parse_card_examples(p1):
    card = parse_card("card { q1:1, q2:1, *:0 }", p1)
    assert card.total == 2
    assert [card[q] for q in p1.states] == [0, 1, 1]
    assert parse_card("card { q0:2 }", p1).total == 2
    assert parse_card("card { *:1 }", p1).values == (1, 1, 1)
    with pytest.raises(ZeroTotal):
        parse_card("card { *:0 }", p1)
    with pytest.raises(DuplicateEntry):
        parse_card("card { q0:2, q0:1 }", p1)
    with pytest.raises(UnknownIdentifier):
        parse_card("card { q9:1 }", p1)
    assert parse_card(render_card(card), p1) == card


def test_parse_dimacs_example():
    f = parse_dimacs("c comment\np cnf 2 2\n1 2 0\n-1 0\n")
    assert f.variable_count == 2
    assert f.clauses == ((1, 2), (-1,))
    assert parse_dimacs(render_dimacs(f)) == f
    for bad in ("1 2 0", "p cnf 1 1\n2 0", "p cnf 2 1\n1 x 0", "p cnf 1 1\n0"):
        with pytest.raises(MahnError):
            parse_dimacs(bad)


def test_circuit_reading_own_output_is_cyclic():
    with pytest.raises(CyclicCircuit):
        parse_circuit("input x = true; gate g = and(x, g); output g expect true;")
    with pytest.raises(CyclicCircuit):
        parse_circuit("input x = true; gate g = not(h); gate h = not(x); output g expect true;")
    with pytest.raises(UnknownIdentifier):
        parse_circuit("input x = true; gate g = not(y); output g expect true;")


def test_parse_circuit_and_evaluate():
    c = parse_circuit("input x = true; input y = false; gate g = or(x, y); gate h = not(g); output h expect false;")
    assert not c.evaluate() and c.expected is False
    assert parse_circuit(render_circuit(c)) == c


def test_parse_petri_short_and_long_forms():
    short = parse_petri("place p q; trans t pre p post q; m0 p; m1 q;")
    long = parse_petri("places: p, q;\ntrans t pre p post q;\nm0: p;\nm1: q;\n")
    assert short == long
    assert len(short.transitions) == 1
    assert parse_petri(render_petri(short)) == short
    with pytest.raises(UnknownPlace):
        parse_petri("places: p; trans t pre p post r; m0: p; m1: p;")


def test_witness_renders_as_json(p1):
    _, w = decide_prp_cc(p1, parse_constraint("#q0 = 0 & #q2 >= 1", p1))
    doc = render_witness(w, p1)
    assert doc["add_chain"] == ["{q0}", "{q0,q1}", "{q0,q1,q2}"]
    assert doc["del_chain"] == ["{q0,q1,q2}", "{q1,q2}"]
    json.dumps(doc)
    json.dumps(render_witness(reachable_states(p1), p1))


def test_trace_renders_as_lines(p1):
    res = decide_crp(p1, parse_card("card { q1:1, q2:1, *:0 }", p1))
    assert render_trace_lines(res, p1) == ["{q0:2} --q0!!a--> {q1:1,q2:1}"]


# ----------------------------------------------------------------------
# properties


@given(processes(max_states=8, max_rules=14))
def test_process_round_trip(p):
    text = render_process(p)
    assert parse_process(text) == p
    assert render_process(parse_process(text)) == text


@given(st.randoms(use_true_random=False))
def test_reduction_inputs_round_trip(rng):
    f = random_cnf(rng)
    assert parse_dimacs(render_dimacs(f)) == f
    c = random_circuit(rng)
    assert parse_circuit(render_circuit(c)) == c
    net = random_safe_net(rng)
    assert parse_petri(render_petri(net)) == net


@given(processes(max_states=5), st.randoms(use_true_random=False))
def test_constraint_round_trip(p, rng):
    phi = random_constraint(rng, p, depth=3)
    text = render_constraint(phi)
    back = parse_constraint(text, p)
    # & and | are associative, so only the text and the meaning must survive
    assert render_constraint(back) == text
    for mask in range(1 << len(p.states)):
        present = p.names(mask)
        assert back.holds(present) == phi.holds(present)


@given(processes(max_states=5), st.data())
def test_parse_card_is_total(p, data):
    listed = data.draw(st.dictionaries(st.sampled_from(p.states), st.integers(0, 3)))
    default = data.draw(st.integers(0, 2))
    body = ", ".join(f"{q}:{v}" for q, v in listed.items())
    text = "card { " + body + (", " if body else "") + f"*:{default} }}"
    try:
        card = parse_card(text, p)
    except ZeroTotal:
        assert sum(listed.values()) + default * (len(p.states) - len(listed)) == 0
        return
    for q in p.states:
        assert card[q] == listed.get(q, default)


def _mutations():
    base = P1_TEXT
    return st.one_of(
        st.tuples(st.integers(0, len(base)), st.integers(0, 6)).map(lambda t: base[: t[0]] + base[t[0] + t[1] :]),
        st.tuples(st.integers(0, len(base)), st.text(alphabet="{};:-!?#(),=&|*\n abq0xyz", max_size=4)).map(
            lambda t: base[: t[0]] + t[1] + base[t[0] :]
        ),
        st.text(max_size=40),
    )


@given(_mutations())
def test_parse_errors_carry_spans_inside_input(text):
    try:
        parse_process(text)
    except MahnError as exc:
        assert exc.span is not None
        assert 0 <= exc.span.begin <= exc.span.end <= len(text)
        assert exc.span.line >= 1 and exc.span.column >= 1


@given(st.text(alphabet="#q0123 >=&|()card{}:*,", max_size=30))
def test_constraint_and_card_errors_carry_spans(text):
    p = parse_process(P1_TEXT)
    for parse in (parse_constraint, parse_card):
        try:
            parse(text, p)
        except MahnError as exc:
            assert exc.span is not None
            assert 0 <= exc.span.begin <= exc.span.end <= len(text)

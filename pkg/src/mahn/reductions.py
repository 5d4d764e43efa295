"""Instance generators from SAT, circuit value and 1-safe Petri net reachability.

Each generator returns a process plus a query whose answer coincides with
the source problem's answer, so the generators double as end-to-end tests
of the solvers.  Generated names use ``__`` as a separator and
``name_map`` records which source object produced which name.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Union

from .errors import MahnError, NotOneSafe
from .lang import Circuit, CnfFormula, PetriNet, Transition
from .model import (
    Absent,
    AtLeastOne,
    CardinalityConstraint,
    Constraint,
    Or,
    Process,
    conj,
    disj,
    normalize,
)


@dataclass(frozen=True)
class ReductionOutput:
    process: Process
    query: Union[Constraint, CardinalityConstraint]
    name_map: dict[str, str]


# ----------------------------------------------------------------------
# SAT


def sat_to_prp(f: CnfFormula) -> ReductionOutput:
    """Every node starts in ``q0`` and may commit, by a local step, to one
    literal state per variable; the query demands a consistent choice that
    makes every clause true."""
    pos = [f"v{i}" for i in range(1, f.variable_count + 1)]
    neg = [f"nv{i}" for i in range(1, f.variable_count + 1)]
    states = ["q0", *pos, *neg]
    rules = [("q0", "tau", v) for v in pos] + [("q0", "tau", v) for v in neg]
    p = normalize(states, [], rules, ["q0"], name="sat")

    def lit(l: int) -> Constraint:
        return AtLeastOne(pos[l - 1] if l > 0 else neg[-l - 1])

    clauses = [disj(*(lit(l) for l in c)) for c in f.clauses]
    consistent = [
        Or(conj(AtLeastOne(v), Absent(nv)), conj(Absent(v), AtLeastOne(nv)))
        for v, nv in zip(pos, neg)
    ]
    parts = clauses + consistent
    query = conj(*parts) if parts else AtLeastOne("q0")
    names = {"init": "q0"}
    for i in range(f.variable_count):
        names[f"x{i + 1}"] = pos[i]
        names[f"-x{i + 1}"] = neg[i]
    return ReductionOutput(p, query, names)


# ----------------------------------------------------------------------
# Circuit value


def _val(wire: str, b: bool) -> str:
    return f"{wire}__{'T' if b else 'F'}"


def cvp_to_prp(c: Circuit) -> ReductionOutput:
    """Init nodes keep broadcasting the input values; a gate node waits for
    both operand values in either order, then keeps broadcasting its output
    value; an init node hearing the tested output value moves to ``ok``."""
    _no_separator([w for w, _ in c.inputs] + [g.output for g in c.gates], "wire")
    states = ["q0", "ok"]
    initial = ["q0"]
    messages: dict[str, None] = {}
    rules: list[tuple[str, str, str]] = []
    names = {"init": "q0", "ok": "ok"}

    def msg(wire: str, b: bool) -> str:
        m = _val(wire, b)
        messages.setdefault(m)
        return m

    for wire, b in c.inputs:
        rules.append(("q0", "!!" + msg(wire, b), "q0"))
    for g in c.gates:
        gn = f"g__{g.output}"
        states.append(gn)
        initial.append(gn)
        names[f"gate {g.output}"] = gn
        if g.op == "not":
            for b in (True, False):
                fin = f"{gn}__f{'T' if b else 'F'}"
                states.append(fin)
                rules.append((gn, "??" + msg(g.inputs[0], b), fin))
                rules.append((fin, "!!" + msg(g.output, not b), fin))
            continue
        i1, i2 = g.inputs
        for b1 in (True, False):
            for b2 in (True, False):
                alpha = ("T" if b1 else "F") + ("T" if b2 else "F")
                out = (b1 and b2) if g.op == "and" else (b1 or b2)
                s1, s2, fin = f"{gn}__1{alpha}", f"{gn}__2{alpha}", f"{gn}__f{alpha}"
                states += [s1, s2, fin]
                rules += [
                    (gn, "??" + msg(i1, b1), s2),
                    (s2, "??" + msg(i2, b2), fin),
                    (gn, "??" + msg(i2, b2), s1),
                    (s1, "??" + msg(i1, b1), fin),
                    (fin, "!!" + msg(g.output, out), fin),
                ]
    rules.append(("q0", "??" + msg(c.output, c.expected), "ok"))
    p = normalize(states, messages, rules, initial, name="cvp")
    return ReductionOutput(p, AtLeastOne("ok"), names)


# ----------------------------------------------------------------------
# 1-safe Petri nets

INIT_PLACE = "__init"
INIT_TRANSITION = "__gen"


def _fire(net: PetriNet, m: frozenset[str], t: Transition) -> frozenset[str] | None:
    if not t.pre <= m:
        return None
    rest = m - t.pre
    if t.post & rest:
        raise NotOneSafe(f"firing {t.name!r} at {{{','.join(sorted(m))}}} puts a second token in {sorted(t.post & rest)}")
    return rest | t.post


def petri_markings(net: PetriNet) -> set[frozenset[str]]:
    """Every marking reachable from ``m0``; raises :class:`NotOneSafe`."""
    seen = {net.m0}
    queue = deque([net.m0])
    while queue:
        m = queue.popleft()
        for t in net.transitions:
            m2 = _fire(net, m, t)
            if m2 is not None and m2 not in seen:
                seen.add(m2)
                queue.append(m2)
    return seen


def petri_reach(net: PetriNet, target: frozenset[str] | set[str] | None = None) -> bool:
    """Explicit search for ``target`` (default ``net.m1``) from ``m0``.

    The whole reachable set is explored even after ``target`` is found, so a
    1-safety violation anywhere is reported.
    """
    goal = frozenset(net.m1 if target is None else target)
    return goal in petri_markings(net)


def single_token(net: PetriNet) -> PetriNet:
    """Equivalent net whose initial marking has at most one token: a fresh
    place holds it and a fresh transition produces the original marking."""
    if len(net.m0) <= 1:
        return net
    gen = Transition(INIT_TRANSITION, frozenset({INIT_PLACE}), net.m0)
    return PetriNet(net.places + (INIT_PLACE,), net.transitions + (gen,), frozenset({INIT_PLACE}), net.m1)


def _no_separator(names: list[str], what: str) -> None:
    for x in names:
        if "__" in x:
            raise MahnError(f"{what} name {x!r} contains the reserved separator '__'", ident=x)


def _pn(kind: str, *parts: str) -> str:
    return "__".join((kind, *parts))


def petri_to_crp(net: PetriNet) -> ReductionOutput:
    """One controller node simulates firings with acknowledged messages;
    one node per place records whether it holds a token.

    For each transition ``t`` the controller takes a local step ``ok ->
    ok_t``, then for each input place ``p`` broadcasts ``a_t_p`` and waits
    for the acknowledgement sent by the place node as it loses its token,
    then does the same with ``b`` messages for each output place, and
    returns to ``ok`` on the last acknowledgement.  The cardinality query
    asks for exactly one idle controller and one idle node per place,
    matching the target marking.
    """
    _no_separator(list(net.places) + [t.name for t in net.transitions], "place/transition")
    petri_markings(net)  # 1-safety check on the original net
    net = single_token(net)
    states: dict[str, None] = {}
    messages: dict[str, None] = {}
    rules: list[tuple[str, str, str]] = []
    names: dict[str, str] = {}

    def state(x: str) -> str:
        states.setdefault(x)
        return x

    def message(x: str) -> str:
        messages.setdefault(x)
        return x

    ok = state("ok")
    names["controller"] = ok
    for p in net.places:
        names[f"place {p} marked"] = state(_pn("p1", p))
        names[f"place {p} empty"] = state(_pn("p0", p))

    for t in net.transitions:
        ok_t = state(_pn("ok", t.name))
        names[f"transition {t.name}"] = ok_t
        rules.append((ok, "tau", ok_t))
        steps = [("a", p) for p in net.places if p in t.pre] + [("b", p) for p in net.places if p in t.post]
        cur = ok_t
        for k, (kind, p) in enumerate(steps):
            wait = state(_pn(kind, t.name, p))
            rules.append((cur, "!!" + message(_pn(kind, t.name, p)), wait))
            last = k == len(steps) - 1
            nxt = ok if last else state(_pn(kind + "ack", t.name, p))
            rules.append((wait, "??" + message(_pn(kind + "ack", t.name, p)), nxt))
            cur = nxt
        if not steps:
            rules.append((ok_t, "tau", ok))
        for kind, p in steps:
            aux = state(_pn("aux" + kind, t.name, p))
            src, dst = (_pn("p1", p), _pn("p0", p)) if kind == "a" else (_pn("p0", p), _pn("p1", p))
            rules.append((src, "??" + _pn(kind, t.name, p), aux))
            rules.append((aux, "!!" + message(_pn(kind + "ack", t.name, p)), dst))

    (start,) = net.m0 if net.m0 else (None,)
    initial = [ok] + [_pn("p1", p) if p == start else _pn("p0", p) for p in net.places]
    p_ = normalize(states, messages, rules, initial, name="petri")
    wanted = {ok: 1}
    for p in net.places:
        wanted[_pn("p1", p) if p in net.m1 else _pn("p0", p)] = 1
    card = CardinalityConstraint.from_mapping(p_, wanted, 0)
    return ReductionOutput(p_, card, names)

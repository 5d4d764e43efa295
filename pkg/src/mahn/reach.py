"""Saturation computing every control state that occurs in some reachable
configuration, and the polynomial presence-only query built on it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import WrongConstraintClass
from .model import Constraint, ConstraintClass, Process, Rule, bits, classify_constraint


@dataclass(frozen=True)
class Initial:
    def __str__(self) -> str:
        return "initial"


@dataclass(frozen=True)
class ByBroadcast:
    rule: Rule

    def __str__(self) -> str:
        return f"broadcast {self.rule}"


@dataclass(frozen=True)
class ByReception:
    broadcast: Rule
    receive: Rule

    def __str__(self) -> str:
        return f"reception {self.receive} of {self.broadcast}"


Justification = Union[Initial, ByBroadcast, ByReception]


@dataclass(frozen=True)
class ReachResult:
    reachable: frozenset[str]
    iterations: int
    provenance: dict[str, Justification]
    # pass of the while loop in which each state was added (0 = initial)
    discovered_in: dict[str, int]


def reachable_states(p: Process) -> ReachResult:
    """Least fixpoint of "a broadcast from a present state adds its target and
    every explicit receive target of a present state".

    Each pass reads only the snapshot taken at its start, so states added
    during a pass enable nothing until the next pass.  ``iterations`` counts
    passes of the outer loop, including the final one that changes nothing.
    A (broadcast, reception) combination whose sources were all in the
    previous snapshot already fired in the previous pass, so each pass only
    revisits combinations touching a state that is new in its snapshot.
    """
    bcast_from: dict[int, list[tuple[int, int, Rule]]] = {}
    bcast_on: dict[int, list[tuple[int, Rule]]] = {}
    for q1, a, q2, rule in p.broadcast_rules:
        bcast_from.setdefault(q1, []).append((a, q2, rule))
        bcast_on.setdefault(a, []).append((q1, rule))
    recv_from: dict[int, list[tuple[int, int, Rule]]] = {}
    recv_on: dict[int, list[tuple[int, int, Rule]]] = {}
    for q, a, q3, rule in p.receive_rules:
        recv_from.setdefault(q, []).append((a, q3, rule))
        recv_on.setdefault(a, []).append((q, q3, rule))

    S = p.initial_mask
    old = 0
    provenance: dict[str, Justification] = {p.states[i]: Initial() for i in bits(S)}
    discovered = {q: 0 for q in provenance}
    iterations = 0

    def add(q: int, why: Justification) -> None:
        nonlocal S
        if not S >> q & 1:
            S |= 1 << q
            provenance[p.states[q]] = why
            discovered[p.states[q]] = iterations

    while S != old:
        fresh = S & ~old
        old = S
        iterations += 1
        for d in bits(fresh):
            for a, q2, brule in bcast_from.get(d, ()):
                add(q2, ByBroadcast(brule))
                for q, q3, rrule in recv_on.get(a, ()):
                    if old >> q & 1:
                        add(q3, ByReception(brule, rrule))
            for a, q3, rrule in recv_from.get(d, ()):
                for q1, brule in bcast_on.get(a, ()):
                    if old >> q1 & 1:
                        add(q3, ByReception(brule, rrule))
    assert iterations <= len(p.states), "saturation exceeded |Q| passes"
    return ReachResult(p.names(S), iterations, provenance, discovered)


def decide_prp_geq1(p: Process, phi: Constraint) -> tuple[bool, ReachResult]:
    """Presence-only queries hold iff they hold on the full reachable set."""
    if classify_constraint(phi) is not ConstraintClass.RQ_GEQ1:
        raise WrongConstraintClass("constraint contains #q = 0 atoms; use the CC solver")
    res = reachable_states(p)
    return phi.holds(res.reachable), res

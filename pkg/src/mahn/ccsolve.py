"""Presence/absence queries: search over growing then shrinking state sets.

A query holds iff some set ``T`` with ``T |= phi`` is reached by a chain
``S0 < S1 < ... < Sm = T0 > T1 > ... > Tn = T`` where ``S0`` is a nonempty
subset of the initial states, every ``S(i+1)`` is an add-step successor of
``S(i)`` and every ``T(j+1)`` a delete-step successor of ``T(j)``.

Add steps are searched one state at a time.  A multi-state add step
factors into single adds: a state added by reception whose broadcaster's
target is also new can be preceded by the broadcast add of that target.
:func:`post_add_family` keeps the unfactored operator for cross-checking.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Union

from .model import Constraint, Process, Rule, bits, check_constraint

StateSet = Union[int, Iterable[str]]


def _mask(p: Process, s: StateSet) -> int:
    return s if isinstance(s, int) else p.mask(s)


@dataclass(frozen=True)
class AddByBroadcast:
    state: str
    rule: Rule

    def __str__(self) -> str:
        return f"+{self.state} by {self.rule}"


@dataclass(frozen=True)
class AddByReception:
    state: str
    broadcast: Rule
    receive: Rule

    def __str__(self) -> str:
        return f"+{self.state} by {self.receive} on {self.broadcast}"


@dataclass(frozen=True)
class DelByBroadcast:
    state: str
    rule: Rule

    def __str__(self) -> str:
        return f"-{self.state} by {self.rule}"


@dataclass(frozen=True)
class DelByReception:
    state: str
    broadcast: Rule
    receive: Rule

    def __str__(self) -> str:
        return f"-{self.state} by {self.receive} on {self.broadcast}"


@dataclass(frozen=True)
class DelJoint:
    states: tuple[str, ...]
    broadcast: Rule
    receive: Rule

    def __str__(self) -> str:
        return f"-{{{','.join(self.states)}}} by {self.broadcast} with {self.receive}"


AddJustification = Union[AddByBroadcast, AddByReception]
DelJustification = Union[DelByBroadcast, DelByReception, DelJoint]


@dataclass(frozen=True)
class ChainWitness:
    add_chain: tuple[frozenset[str], ...]
    del_chain: tuple[frozenset[str], ...]
    add_steps: tuple[AddJustification, ...]
    del_steps: tuple[DelJustification, ...]


def _pairs(p: Process) -> list:
    """(broadcast, receive) rule pairs on the same message, explicit receives only."""
    by_msg: dict[int, list] = {}
    for entry in p.receive_rules:
        by_msg.setdefault(entry[1], []).append(entry)
    return [(b, r) for b in p.broadcast_rules for r in by_msg.get(b[1], ())]


def _add_justified(p: Process, q: int, S: int, S2: int) -> bool:
    for s, _, t, _ in p.broadcast_rules:
        if t == q and S >> s & 1:
            return True
    for (s, _, t, _), (r, _, r2, _) in _pairs(p):
        if r2 == q and S >> s & 1 and S >> r & 1 and S2 >> t & 1:
            return True
    return False


def is_post_add(p: Process, S: StateSet, S2: StateSet) -> bool:
    """``S2`` is an add-step successor of ``S``."""
    S, S2 = _mask(p, S), _mask(p, S2)
    if S & ~S2:
        return False
    return all(_add_justified(p, q, S, S2) for q in bits(S2 & ~S))


def is_post_del(p: Process, S: StateSet, S2: StateSet) -> bool:
    """``S2`` is a delete-step successor of ``S``."""
    S, S2 = _mask(p, S), _mask(p, S2)
    if S2 & ~S:
        return False
    gone = S & ~S2
    if not gone:
        return True
    removed = list(bits(gone))
    if len(removed) == 1:
        (q,) = removed
        for s, _, t, _ in p.broadcast_rules:
            if s == q and S2 >> t & 1:
                return True
    if len(removed) > 2:
        return False
    for (s, _, t, _), (r, _, r2, _) in _pairs(p):
        if len(removed) == 1:
            q = removed[0]
            if r == q and S2 >> s & 1 and S2 >> t & 1 and S2 >> r2 & 1:
                return True
            if s == r == q and S2 >> t & 1 and S2 >> r2 & 1:
                return True
        elif {s, r} == set(removed) and S2 >> t & 1 and S2 >> r2 & 1:
            return True
    return False


def post_add_family(p: Process, S: StateSet) -> set[frozenset[str]]:
    """Every add-step successor of ``S``, by brute force over candidate subsets."""
    return {p.names(m) for m in _post_add_masks(p, _mask(p, S))}


def _post_add_masks(p: Process, S: int) -> list[int]:
    cand = 0
    for _, _, t, _ in p.broadcast_rules:
        cand |= 1 << t
    for _, r in _pairs(p):
        cand |= 1 << r[2]
    cand &= ~S
    cbits = list(bits(cand))
    out = []
    for sub in range(1 << len(cbits)):
        S2 = S
        for k, q in enumerate(cbits):
            if sub >> k & 1:
                S2 |= 1 << q
        if is_post_add(p, S, S2):
            out.append(S2)
    return out


def _add_steps(p: Process, S: int, pairs: list | None = None) -> list[tuple[int, AddJustification]]:
    found: dict[int, AddJustification] = {}
    for s, _, t, rule in p.broadcast_rules:
        if S >> s & 1 and not S >> t & 1 and t not in found:
            found[t] = AddByBroadcast(p.states[t], rule)
    for (s, _, t, brule), (r, _, r2, rrule) in _pairs(p) if pairs is None else pairs:
        if S >> r2 & 1 or r2 in found:
            continue
        if S >> s & 1 and S >> r & 1 and (S | 1 << r2) >> t & 1:
            found[r2] = AddByReception(p.states[r2], brule, rrule)
    return [(S | 1 << q, found[q]) for q in sorted(found)]


def _del_steps(p: Process, S: int, pairs: list | None = None) -> list[tuple[int, DelJustification]]:
    found: dict[int, DelJustification] = {}

    def offer(S2: int, just: DelJustification) -> None:
        if S2 not in found:
            found[S2] = just

    for s, _, t, rule in p.broadcast_rules:
        S2 = S & ~(1 << s)
        if S >> s & 1 and S2 >> t & 1:
            offer(S2, DelByBroadcast(p.states[s], rule))
    for (s, _, t, brule), (r, _, r2, rrule) in _pairs(p) if pairs is None else pairs:
        if not (S >> s & 1 and S >> r & 1):
            continue
        S2 = S & ~(1 << r)
        if s != r and S2 >> s & 1 and S2 >> t & 1 and S2 >> r2 & 1:
            offer(S2, DelByReception(p.states[r], brule, rrule))
        S3 = S & ~(1 << s) & ~(1 << r)
        if S3 >> t & 1 and S3 >> r2 & 1:
            names = tuple(sorted({p.states[s], p.states[r]}, key=p.index.__getitem__))
            offer(S3, DelJoint(names, brule, rrule))
    return sorted(found.items())


def add_successors(p: Process, S: StateSet) -> list[tuple[frozenset[str], AddJustification]]:
    return [(p.names(m), j) for m, j in _add_steps(p, _mask(p, S))]


def del_successors(p: Process, S: StateSet) -> list[tuple[frozenset[str], DelJustification]]:
    return [(p.names(m), j) for m, j in _del_steps(p, _mask(p, S))]


def add_closure(p: Process, S: StateSet) -> set[int]:
    """Masks reachable from ``S`` by zero or more single-state add steps."""
    start = _mask(p, S)
    pairs = _pairs(p)
    seen = {start}
    todo = [start]
    while todo:
        for m, _ in _add_steps(p, todo.pop(), pairs):
            if m not in seen:
                seen.add(m)
                todo.append(m)
    return seen


def _nonempty_subsets(mask: int) -> list[int]:
    members = list(bits(mask))
    out = []
    for sub in range(1, 1 << len(members)):
        out.append(sum(1 << members[k] for k in range(len(members)) if sub >> k & 1))
    return sorted(out)


def decide_prp_cc(p: Process, phi: Constraint) -> tuple[bool, ChainWitness | None]:
    """Decide whether some reachable configuration satisfies ``phi``.

    Breadth-first over the add phase from every nonempty subset of the
    initial states, then breadth-first over the delete phase seeded with
    every add-reachable set.  The returned chains are shortest in the
    number of delete steps, then in add steps.
    """
    check_constraint(phi, p)
    sat = phi.compile(p)
    pairs = _pairs(p)

    add_parent: dict[int, tuple[int, AddJustification] | None] = {}
    order: list[int] = []
    queue = deque()
    for s0 in _nonempty_subsets(p.initial_mask):
        add_parent[s0] = None
        queue.append(s0)
    while queue:
        S = queue.popleft()
        order.append(S)
        for S2, just in _add_steps(p, S, pairs):
            if S2 not in add_parent:
                add_parent[S2] = (S, just)
                queue.append(S2)

    del_parent: dict[int, tuple[int, DelJustification] | None] = {}
    queue = deque()
    for S in order:
        del_parent[S] = None
        queue.append(S)
    goal = None
    while queue:
        T = queue.popleft()
        if sat(T):
            goal = T
            break
        for T2, just in _del_steps(p, T, pairs):
            if T2 not in del_parent:
                del_parent[T2] = (T, just)
                queue.append(T2)
    if goal is None:
        return False, None

    dels, dsteps = [goal], []
    while del_parent[dels[-1]] is not None:
        prev, just = del_parent[dels[-1]]
        dsteps.append(just)
        dels.append(prev)
    adds, asteps = [dels[-1]], []
    while add_parent[adds[-1]] is not None:
        prev, just = add_parent[adds[-1]]
        asteps.append(just)
        adds.append(prev)
    adds.reverse()
    asteps.reverse()
    dels.reverse()
    dsteps.reverse()
    witness = ChainWitness(
        tuple(p.names(m) for m in adds),
        tuple(p.names(m) for m in dels),
        tuple(asteps),
        tuple(dsteps),
    )
    return True, witness


def validate_witness(p: Process, phi: Constraint, w: ChainWitness) -> bool:
    """Re-check a witness against the add/delete step predicates."""
    adds = [p.mask(s) for s in w.add_chain]
    dels = [p.mask(s) for s in w.del_chain]
    if not adds or not dels or adds[-1] != dels[0]:
        return False
    if not adds[0] or adds[0] & ~p.initial_mask:
        return False
    n = len(p.states)
    if len(adds) - 1 > n or len(dels) - 1 > n:
        return False
    if not all(is_post_add(p, a, b) for a, b in zip(adds, adds[1:])):
        return False
    if not all(is_post_del(p, a, b) for a, b in zip(dels, dels[1:])):
        return False
    return phi.compile(p)(dels[-1])

"""Exact-count reachability on a fixed number of nodes.

Node count never changes along a run, so a cardinality constraint with
total ``K`` fixes the network size.  Because movement can produce any
topology before each broadcast, the search runs over count vectors of
total ``K`` rather than graphs, breadth-first from every initial vector.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import comb
from typing import Iterator

from .errors import MemoryCapExceeded
from .model import CardinalityConstraint, Counts, Move, Process, Rule, expand_counts


@dataclass(frozen=True)
class TraceStep:
    before: Counts
    rule: Rule
    moves: tuple[Move, ...]
    after: Counts


@dataclass(frozen=True)
class CrpResult:
    answer: bool
    start: Counts | None
    trace: tuple[TraceStep, ...]
    explored: int


def initial_multisets(p: Process, K: int) -> Iterator[Counts]:
    """Count vectors of total ``K`` supported on initial states, in the order
    of their sorted node tuples (``{x:2}`` before ``{x:1,y:1}``)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    init = [p.index[q] for q in p.initial]
    for combo in itertools.combinations_with_replacement(init, K):
        vec = [0] * len(p.states)
        for i in combo:
            vec[i] += 1
        yield tuple(vec)


def decide_crp(p: Process, card: CardinalityConstraint, max_states: int | None = None) -> CrpResult:
    """Breadth-first search for a count vector equal to ``card``.

    ``max_states`` bounds the visited set; exceeding it raises
    :class:`MemoryCapExceeded` instead of exhausting memory.
    """
    if card.states != p.states:
        raise ValueError("cardinality constraint was built for a different process")
    K = card.total
    target = card.values
    bound = comb(K + len(p.states) - 1, len(p.states) - 1)

    parent: dict[Counts, tuple[Counts, Rule, tuple[Move, ...]] | None] = {}
    queue: deque[Counts] = deque()
    goal = None
    for m in initial_multisets(p, K):
        parent[m] = None
        queue.append(m)
        if m == target and goal is None:
            goal = m
    while goal is None and queue:
        m = queue.popleft()
        for m2, rule, moves in expand_counts(p, m):
            if m2 in parent:
                continue
            assert sum(m2) == K
            parent[m2] = (m, rule, moves)
            if max_states is not None and len(parent) > max_states:
                raise MemoryCapExceeded(
                    f"explored more than {max_states} multisets without an answer; raise --mem-cap"
                )
            if m2 == target:
                goal = m2
                break
            queue.append(m2)
    assert len(parent) <= bound, "visited more multisets than exist"
    if goal is None:
        return CrpResult(False, None, (), len(parent))
    steps = []
    cur = goal
    while parent[cur] is not None:
        prev, rule, moves = parent[cur]
        steps.append(TraceStep(prev, rule, moves, cur))
        cur = prev
    steps.reverse()
    return CrpResult(True, cur, tuple(steps), len(parent))

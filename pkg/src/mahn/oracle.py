"""Brute-force ground truth for small instances.

:func:`oracle_graph_reach` explores the transition system on explicit
edge sets with no quotienting at all.  :func:`oracle_prp` asks whether
some network of at most ``n_max`` nodes reaches a configuration whose
state set satisfies a constraint.  It searches every size from 1 upward:
on explicit graphs up to ``graph_n`` nodes, then on count vectors.  A NO
answer can be settled early by :func:`abstract_supports`.  That function
over-approximates every reachable state set of every network size, so
when none of its sets satisfies the constraint, no concrete search can
find one either.
"""

from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import CapExceeded
from .model import Configuration, Constraint, Counts, Labeling, Process, bits, check_constraint, expand_counts

DEFAULT_CAP = 4


@dataclass(frozen=True)
class OracleReport:
    n: int
    reachable_labelings: frozenset[Labeling]
    state_coverage: frozenset[str]
    graph_states: int


def canonical(labeling: Labeling, p: Process | None = None) -> Labeling:
    """Representative of a labeling up to node permutation."""
    if p is None:
        return tuple(sorted(labeling))
    return tuple(sorted(labeling, key=p.index.__getitem__))


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise CapExceeded(f"node count must be >= 1, got {n}")
    if n > cap:
        raise CapExceeded(f"{n} nodes exceeds the oracle cap of {cap}")
    if cap > DEFAULT_CAP and n > DEFAULT_CAP:
        warnings.warn(f"oracle running with {n} nodes above the default cap {DEFAULT_CAP}", stacklevel=3)


def _graph_tables(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    neighbors = []
    for E in range(1 << len(pairs)):
        nb: list[list[int]] = [[] for _ in range(n)]
        for k, (u, v) in enumerate(pairs):
            if E >> k & 1:
                nb[u].append(v)
                nb[v].append(u)
        neighbors.append(tuple(tuple(x) for x in nb))
    return pairs, neighbors


def _graph_search(
    p: Process, n: int, stop: Callable[[Labeling], bool] | None = None
) -> tuple[set[Labeling], int, Labeling | None]:
    """Breadth-first search over (labels, edge set) pairs.

    Movement successors of ``(l, E)`` are ``(l, E')`` for every ``E'``;
    they are pushed once per labeling, the first time it is seen, which
    produces exactly the same reachable set.
    """
    pairs, neighbors = _graph_tables(n)
    n_edge_sets = 1 << len(pairs)
    recv = {}
    for q in p.states:
        for a in p.alphabet:
            recv[q, a] = tuple(sorted(p.receivers(q, a), key=p.index.__getitem__))
    bcast = {q: p.broadcasts_from(q) for q in p.states}

    labelings: set[Labeling] = set()
    seen: set[tuple[Labeling, int]] = set()
    queue: deque[tuple[Labeling, int]] = deque()

    def visit(lab: Labeling, E: int) -> Labeling | None:
        if lab not in labelings:
            labelings.add(lab)
            for E2 in range(n_edge_sets):
                seen.add((lab, E2))
                queue.append((lab, E2))
            if stop is not None and stop(lab):
                return lab
        elif (lab, E) not in seen:
            seen.add((lab, E))
            queue.append((lab, E))
        return None

    for lab in itertools.product(p.initial, repeat=n):
        hit = visit(lab, 0)
        if hit is not None:
            return labelings, len(seen), hit
    while queue:
        lab, E = queue.popleft()
        nbrs = neighbors[E]
        for v in range(n):
            for rule in bcast[lab[v]]:
                choices = [recv[lab[u], rule.message] for u in nbrs[v]]
                for picked in itertools.product(*choices):
                    new = list(lab)
                    new[v] = rule.target
                    for u, q in zip(nbrs[v], picked):
                        new[u] = q
                    hit = visit(tuple(new), E)
                    if hit is not None:
                        return labelings, len(seen), hit
    return labelings, len(seen), None


def oracle_graph_reach(p: Process, n: int, cap: int = DEFAULT_CAP) -> OracleReport:
    """Every labeling reachable on ``n`` nodes, explored on explicit graphs."""
    _check_cap(n, cap)
    labelings, count, _ = _graph_search(p, n)
    canon = frozenset(canonical(lab, p) for lab in labelings)
    coverage = frozenset(q for lab in labelings for q in lab)
    return OracleReport(n, canon, coverage, count)


def _initial_counts(p: Process, n: int) -> Iterator[Counts]:
    init = [p.index[q] for q in p.initial]
    for combo in itertools.combinations_with_replacement(init, n):
        vec = [0] * len(p.states)
        for i in combo:
            vec[i] += 1
        yield tuple(vec)


def _count_search(
    p: Process, n: int, stop: Callable[[Counts], bool] | None = None
) -> tuple[set[Counts], Counts | None]:
    seen: set[Counts] = set()
    queue: deque[Counts] = deque()
    for m in _initial_counts(p, n):
        seen.add(m)
        queue.append(m)
        if stop is not None and stop(m):
            return seen, m
    while queue:
        m = queue.popleft()
        for m2, _, _ in expand_counts(p, m):
            if m2 not in seen:
                seen.add(m2)
                queue.append(m2)
                if stop is not None and stop(m2):
                    return seen, m2
    return seen, None


def oracle_count_reach(p: Process, n: int) -> frozenset[Counts]:
    """Every count vector reachable on ``n`` nodes."""
    if n < 1:
        raise CapExceeded(f"node count must be >= 1, got {n}")
    return frozenset(_count_search(p, n)[0])


def _support(vec: Counts) -> int:
    return sum(1 << i for i, c in enumerate(vec) if c)


def _abstract_splits(x: int, parts: int, cap: int) -> set[tuple[int, ...]]:
    """Abstract count tuples a pool of abstract size ``x`` can be cut into.

    Values ``0 .. cap-1`` are exact and ``cap`` stands for "cap or more".
    """
    out = set()
    for tup in itertools.product(range(cap + 1), repeat=parts):
        if x < cap:
            if cap not in tup and sum(tup) == x:
                out.add(tup)
        elif cap in tup or sum(tup) >= cap:
            out.add(tup)
    return out


def abstract_supports(p: Process, cap: int = 2) -> frozenset[int]:
    """State-set masks over-approximating every network size's reachable sets.

    Each count is kept exactly below ``cap`` and collapsed to "many" at or
    above it.  Every abstract operation (taking one sender out of a pool,
    cutting a pool into receiver groups, adding groups) returns every
    abstract result some concretization could produce, so each concrete
    run of any size is matched by an abstract run.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    k = len(p.states)
    init_idx = [p.index[q] for q in p.initial]

    def add(x: int, y: int) -> int:
        return min(x + y, cap)

    start = set()
    for vals in itertools.product(range(cap + 1), repeat=len(init_idx)):
        if any(vals):
            vec = [0] * k
            for i, v in zip(init_idx, vals):
                vec[i] = v
            start.add(tuple(vec))
    seen = set(start)
    todo = list(start)
    while todo:
        m = todo.pop()
        for s, a, t, _ in p.broadcast_rules:
            if not m[s]:
                continue
            pools = list(m)
            after_sender = [m[s] - 1] if m[s] < cap else [cap - 1, cap]
            for rest in after_sender:
                pools[s] = rest
                partial = {tuple([0] * k)}
                partial = {tuple(add(v, 1) if i == t else v for i, v in enumerate(vec)) for vec in partial}
                for q in range(k):
                    if not pools[q]:
                        continue
                    targets = [x for x in bits(p.recv_mask(q, a)) if x != q] + [q]
                    cuts = _abstract_splits(pools[q], len(targets), cap)
                    nxt = set()
                    for vec in partial:
                        for cut in cuts:
                            new = list(vec)
                            for x, c in zip(targets, cut):
                                new[x] = add(new[x], c)
                            nxt.add(tuple(new))
                    partial = nxt
                for vec in partial:
                    if vec not in seen:
                        seen.add(vec)
                        todo.append(vec)
    return frozenset(_support(v) for v in seen)


@dataclass(frozen=True)
class OracleVerdict:
    found: bool
    n: int
    witness: Labeling | None = None
    # True when the NO answer was settled for every size by abstract_supports
    certified: bool = False

    def __str__(self) -> str:
        return f"YES({self.n})" if self.found else f"NO_UP_TO({self.n})"


def oracle_prp(
    p: Process,
    phi: Constraint,
    n_max: int,
    graph_n: int = 3,
    abstraction_cap: int | None = 2,
) -> OracleVerdict:
    """Least network size ``n <= n_max`` whose runs reach a state set satisfying ``phi``.

    Sizes up to ``graph_n`` are searched on explicit graphs, larger ones on
    count vectors.  Pass ``abstraction_cap=None`` to force the exhaustive
    search even when the over-approximation already rules every size out.
    """
    if n_max < 1:
        raise CapExceeded("n_max must be >= 1")
    if graph_n > DEFAULT_CAP:
        raise CapExceeded(f"graph search above {DEFAULT_CAP} nodes is not supported here")
    check_constraint(phi, p)
    sat = phi.compile(p)
    if abstraction_cap is not None:
        if not any(sat(m) for m in abstract_supports(p, abstraction_cap)):
            return OracleVerdict(False, n_max, certified=True)
    for n in range(1, n_max + 1):
        if n <= graph_n:
            _, _, hit = _graph_search(p, n, stop=lambda lab: sat(p.mask(lab)))
            if hit is not None:
                return OracleVerdict(True, n, canonical(hit, p))
        else:
            _, vec = _count_search(p, n, stop=lambda m: sat(_support(m)))
            if vec is not None:
                lab = tuple(q for q, c in zip(p.states, vec) for _ in range(c))
                return OracleVerdict(True, n, lab)
    return OracleVerdict(False, n_max)


@dataclass(frozen=True)
class WalkStep:
    config: Configuration
    event: str


def random_walk(p: Process, n: int, steps: int, seed: int) -> list[WalkStep]:
    """Random execution: even steps move, odd steps broadcast when possible."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    pairs = list(itertools.combinations(range(n), 2))

    def random_edges() -> frozenset[tuple[int, int]]:
        return frozenset(e for e in pairs if rng.random() < 0.5)

    config = Configuration(tuple(rng.choice(p.initial) for _ in range(n)), random_edges())
    trace = [WalkStep(config, "init")]
    for i in range(steps):
        enabled = [(v, r) for v in range(n) for r in p.broadcasts_from(config.labels[v])]
        if i % 2 == 1 and enabled:
            v, rule = rng.choice(enabled)
            labels = list(config.labels)
            labels[v] = rule.target
            moved = []
            for u in config.neighbors(v):
                opts = sorted(p.receivers(config.labels[u], rule.message), key=p.index.__getitem__)
                labels[u] = rng.choice(opts)
                moved.append(f"{u}:{labels[u]}")
            config = Configuration(tuple(labels), config.edges)
            event = f"broadcast node {v} {rule}" + (f" recv {' '.join(moved)}" if moved else "")
        else:
            config = Configuration(config.labels, random_edges())
            event = "move"
        trace.append(WalkStep(config, event))
    return trace

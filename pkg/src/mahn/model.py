"""Processes, configurations, constraints and their one-step semantics.

A process runs on every node of a network whose topology may change
arbitrarily between steps.  Three views of a configuration are supported:

* :class:`Configuration` -- labels plus an explicit undirected edge set;
* a *labeling* -- a plain tuple of state names (edges forgotten, which is
  sound because a movement step can produce any edge set);
* a *count vector* -- a tuple of occurrence counts aligned with
  ``Process.states`` (node identities forgotten).

State and message names are interned to dense integers in declaration
order; sets of states are handled internally as ``int`` bitmasks.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    DuplicateEntry,
    EmptyInitialSet,
    InvalidEdge,
    InvalidReceiverChoice,
    MahnError,
    NotASender,
    ReservedIdentifier,
    UnknownIdentifier,
    ZeroTotal,
)

TAU = "m_tau"
BROADCAST = "!!"
RECEIVE = "??"

Labeling = tuple[str, ...]
Counts = tuple[int, ...]


@dataclass(frozen=True)
class Rule:
    source: str
    action: str
    message: str
    target: str

    def __post_init__(self) -> None:
        if self.action not in (BROADCAST, RECEIVE):
            raise ValueError(f"unknown action {self.action!r}")

    @property
    def is_broadcast(self) -> bool:
        return self.action == BROADCAST

    @property
    def is_tau(self) -> bool:
        return self.message == TAU

    def label(self) -> str:
        return "tau" if self.is_tau else f"{self.action}{self.message}"

    def __str__(self) -> str:
        return f"{self.source} --{self.label()}--> {self.target}"


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Process:
    """A normalized process; build it with :func:`normalize`.

    ``alphabet`` contains the reserved message ``m_tau`` exactly when some
    rule is a local (tau) step.  Implicit receive self-loops are not stored
    in ``rules``; they are materialized in the receiver table.
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    rules: tuple[Rule, ...]
    initial: tuple[str, ...]
    name: str = "P"

    index: dict[str, int] = field(init=False, repr=False, compare=False)
    msg_index: dict[str, int] = field(init=False, repr=False, compare=False)
    initial_mask: int = field(init=False, repr=False, compare=False)
    # (q, a) -> bitmask of explicit receive targets; absent pairs self-loop
    explicit_recv: dict[tuple[int, int], int] = field(init=False, repr=False, compare=False)
    # (source, message, target, rule) in rule order, as interned ints
    broadcast_rules: tuple[tuple[int, int, int, Rule], ...] = field(init=False, repr=False, compare=False)
    receive_rules: tuple[tuple[int, int, int, Rule], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {q: i for i, q in enumerate(self.states)}
        msg_index = {a: i for i, a in enumerate(self.alphabet)}
        if not self.initial:
            raise EmptyInitialSet("the set of initial states is empty")
        for q in self.initial:
            if q not in index:
                raise UnknownIdentifier(f"unknown initial state {q!r}", ident=q)
        bcast, recv = [], []
        explicit: dict[tuple[int, int], int] = {}
        for r in self.rules:
            for q in (r.source, r.target):
                if q not in index:
                    raise UnknownIdentifier(f"unknown state {q!r} in rule {r}", ident=q)
            if r.message not in msg_index:
                raise UnknownIdentifier(f"unknown message {r.message!r} in rule {r}", ident=r.message)
            entry = (index[r.source], msg_index[r.message], index[r.target], r)
            if r.is_broadcast:
                bcast.append(entry)
            else:
                if r.is_tau:
                    raise ReservedIdentifier(f"{TAU} cannot be received explicitly", ident=TAU)
                recv.append(entry)
                key = (entry[0], entry[1])
                explicit[key] = explicit.get(key, 0) | 1 << entry[2]
        set_ = object.__setattr__
        set_(self, "index", index)
        set_(self, "msg_index", msg_index)
        set_(self, "initial_mask", sum(1 << index[q] for q in set(self.initial)))
        set_(self, "explicit_recv", explicit)
        set_(self, "broadcast_rules", tuple(bcast))
        set_(self, "receive_rules", tuple(recv))

    def recv_mask(self, q: int, a: int) -> int:
        """Bitmask of the states a node in ``q`` may move to on hearing ``a``; never empty."""
        return self.explicit_recv.get((q, a), 1 << q)

    # -- naming helpers -------------------------------------------------

    @property
    def user_alphabet(self) -> tuple[str, ...]:
        return tuple(a for a in self.alphabet if a != TAU)

    def mask(self, states: Iterable[str]) -> int:
        m = 0
        for q in states:
            try:
                m |= 1 << self.index[q]
            except KeyError:
                raise UnknownIdentifier(f"unknown state {q!r}", ident=q) from None
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.states[i] for i in bits(mask))

    def format_set(self, mask: int) -> str:
        return "{" + ",".join(self.states[i] for i in bits(mask)) + "}"

    def counts(self, mapping: Mapping[str, int] | Sequence[int]) -> Counts:
        """Count vector from a ``{state: n}`` mapping (missing states = 0)."""
        if not isinstance(mapping, Mapping):
            vec = tuple(int(c) for c in mapping)
            if len(vec) != len(self.states):
                raise ValueError("count vector length does not match the state set")
            return vec
        vec = [0] * len(self.states)
        for q, c in mapping.items():
            if q not in self.index:
                raise UnknownIdentifier(f"unknown state {q!r}", ident=q)
            vec[self.index[q]] = int(c)
        return tuple(vec)

    def counts_dict(self, vec: Counts) -> dict[str, int]:
        return {self.states[i]: c for i, c in enumerate(vec) if c}

    def format_counts(self, vec: Counts) -> str:
        return "{" + ",".join(f"{self.states[i]}:{c}" for i, c in enumerate(vec) if c) + "}"

    def quotient(self, labeling: Iterable[str]) -> Counts:
        vec = [0] * len(self.states)
        for q in labeling:
            vec[self.index[q]] += 1
        return tuple(vec)

    # -- semantics helpers ----------------------------------------------

    def receivers(self, q: str, a: str) -> frozenset[str]:
        try:
            qi, ai = self.index[q], self.msg_index[a]
        except KeyError as exc:
            raise UnknownIdentifier(f"unknown identifier {exc.args[0]!r}", ident=exc.args[0]) from None
        return self.names(self.recv_mask(qi, ai))

    def broadcasts_from(self, q: str) -> list[Rule]:
        return [r for r in self.rules if r.is_broadcast and r.source == q]


RawRule = Union[Rule, tuple[str, str, str]]


def _parse_raw_rule(raw: RawRule) -> Rule:
    if isinstance(raw, Rule):
        if not raw.is_broadcast and raw.is_tau:
            raise ReservedIdentifier(f"{TAU} is reserved", ident=TAU)
        return raw
    source, action, target = raw
    if action == "tau":
        return Rule(source, BROADCAST, TAU, target)
    kind, message = action[:2], action[2:]
    if kind not in (BROADCAST, RECEIVE) or not message:
        raise MahnError(f"malformed action {action!r}")
    if message == TAU:
        raise ReservedIdentifier(f"{TAU} is reserved; use a tau rule", ident=TAU)
    return Rule(source, kind, message, target)


def normalize(
    states: Iterable[str],
    alphabet: Iterable[str],
    rules: Iterable[RawRule],
    initial: Iterable[str],
    name: str = "P",
) -> Process:
    """Build a :class:`Process` from raw declarations.

    Rules may be :class:`Rule` objects or ``(source, action, target)``
    triples with ``action`` one of ``"!!a"``, ``"??a"`` or ``"tau"``.
    Local ``tau`` steps become broadcasts of the reserved message ``m_tau``,
    whose reception never changes a state.  Duplicate rules are dropped.
    """
    states = tuple(states)
    alphabet = tuple(alphabet)
    for kind, names in (("state", states), ("message", alphabet)):
        seen: set[str] = set()
        for x in names:
            if x in seen:
                raise DuplicateEntry(f"{kind} {x!r} declared twice", ident=x)
            seen.add(x)
    if TAU in alphabet:
        raise ReservedIdentifier(f"{TAU} is reserved and cannot be declared", ident=TAU)
    parsed = list(dict.fromkeys(_parse_raw_rule(raw) for raw in rules))
    if any(r.is_tau for r in parsed):
        alphabet = alphabet + (TAU,)
    init_names = list(initial)
    if not init_names:
        raise EmptyInitialSet("the set of initial states is empty")
    index = {q: i for i, q in enumerate(states)}
    for q in init_names:
        if q not in index:
            raise UnknownIdentifier(f"unknown initial state {q!r}", ident=q)
    init = tuple(sorted(set(init_names), key=index.__getitem__))
    return Process(states, alphabet, tuple(parsed), init, name)


def receivers(p: Process, q: str, a: str) -> frozenset[str]:
    return p.receivers(q, a)


# ----------------------------------------------------------------------
# Graph level


@dataclass(frozen=True)
class Configuration:
    """A labeled undirected graph; edges are stored as ``(i, j)`` with ``i < j``."""

    labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        if not self.labels:
            raise MahnError("a configuration needs at least one node")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "edges", _canonical_edges(self.edges, len(self.labels)))

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def neighbors(self, v: int) -> list[int]:
        return sorted({j if i == v else i for i, j in self.edges if v in (i, j)})


def _canonical_edges(edges: Iterable[tuple[int, int]], n: int) -> frozenset[tuple[int, int]]:
    out = set()
    for e in edges:
        try:
            u, v = e
        except (TypeError, ValueError):
            raise InvalidEdge(f"malformed edge {e!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidEdge(f"edge {e!r} references a node outside 0..{n - 1}")
        if u == v:
            raise InvalidEdge(f"self-loop edge {e!r} is not allowed")
        out.add((min(u, v), max(u, v)))
    return frozenset(out)


def broadcast_step(
    p: Process, c: Configuration, sender: int, rule: Rule, choice: Mapping[int, str]
) -> Configuration:
    """Fire ``rule`` at ``sender``; ``choice`` gives each neighbor's new state."""
    if not 0 <= sender < c.node_count:
        raise NotASender(f"node {sender} does not exist")
    if not rule.is_broadcast or rule not in p.rules:
        raise NotASender(f"{rule} is not a broadcast rule of the process")
    if c.labels[sender] != rule.source:
        raise NotASender(f"node {sender} is in {c.labels[sender]!r}, not {rule.source!r}")
    nbrs = set(c.neighbors(sender))
    for u, q in choice.items():
        if u not in nbrs:
            raise InvalidReceiverChoice(f"node {u} is not adjacent to sender {sender}")
        if q not in p.receivers(c.labels[u], rule.message):
            raise InvalidReceiverChoice(
                f"node {u} in {c.labels[u]!r} cannot move to {q!r} on {rule.message!r}"
            )
    missing = nbrs - set(choice)
    if missing:
        raise InvalidReceiverChoice(f"no receiver choice for neighbors {sorted(missing)}")
    labels = list(c.labels)
    labels[sender] = rule.target
    for u, q in choice.items():
        labels[u] = q
    return Configuration(tuple(labels), c.edges)


def movement_step(c: Configuration, new_edges: Iterable[tuple[int, int]]) -> Configuration:
    return Configuration(c.labels, _canonical_edges(new_edges, c.node_count))


# ----------------------------------------------------------------------
# Labeling level


def labeling_successors(p: Process, labeling: Sequence[str]) -> set[Labeling]:
    """One movement-then-broadcast step on a labeling.

    Any node other than the sender may be a neighbor, and a neighbor may
    also keep its state, so each other node independently picks from
    ``receivers(q, a) | {q}``.
    """
    lab = tuple(labeling)
    if not lab:
        raise MahnError("empty labeling")
    out: set[Labeling] = set()
    for v, qv in enumerate(lab):
        for r in p.broadcasts_from(qv):
            options = []
            for u, qu in enumerate(lab):
                if u == v:
                    options.append((r.target,))
                else:
                    options.append(tuple(p.receivers(qu, r.message) | {qu}))
            out.update(itertools.product(*options))
    return out


# ----------------------------------------------------------------------
# Count level


def _splits(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of ``parts`` naturals summing to ``total`` (stars and bars)."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


Move = tuple[int, int, int]  # (from state, to state, how many nodes)


def expand_counts(p: Process, m: Counts) -> Iterator[tuple[Counts, Rule, tuple[Move, ...]]]:
    """Yield ``(successor, rule, moves)`` for every one-step successor of ``m``.

    Each successor is yielded once, with the first (rule, receiver
    distribution) that produces it.  ``moves`` lists receiver transfers
    ``(q, q', k)``: ``k`` nodes that were in ``q`` received and moved to ``q'``.
    """
    seen: set[Counts] = set()
    n = len(p.states)
    for s, a, t, rule in p.broadcast_rules:
        if m[s] < 1:
            continue
        base = list(m)
        base[s] -= 1
        base[t] += 1
        # nodes available as receivers are those in their pre-broadcast state
        avail = list(m)
        avail[s] -= 1
        partial: dict[Counts, tuple[Move, ...]] = {tuple(base): ()}
        for q in range(n):
            if not avail[q]:
                continue
            targets = [x for x in bits(p.recv_mask(q, a)) if x != q]
            if not targets:
                continue
            nxt: dict[Counts, tuple[Move, ...]] = {}
            for vec, moves in partial.items():
                for split in _splits(avail[q], len(targets) + 1):
                    moved = avail[q] - split[-1]
                    if not moved:
                        nxt.setdefault(vec, moves)
                        continue
                    new = list(vec)
                    new[q] -= moved
                    extra = []
                    for x, k in zip(targets, split):
                        if k:
                            new[x] += k
                            extra.append((q, x, k))
                    nxt.setdefault(tuple(new), moves + tuple(extra))
            partial = nxt
        for vec, moves in partial.items():
            if vec not in seen:
                seen.add(vec)
                yield vec, rule, moves


def multiset_successors(p: Process, m: Counts | Mapping[str, int]) -> set[Counts]:
    vec = p.counts(m)
    if sum(vec) < 1:
        raise MahnError("a multiset needs total count >= 1")
    return {succ for succ, _, _ in expand_counts(p, vec)}


# ----------------------------------------------------------------------
# Constraints


class ConstraintClass(enum.Enum):
    RQ_GEQ1 = "RQ_GEQ1"
    CC = "CC"


class Constraint:
    """Base of the constraint AST: ``#q >= 1``, ``#q = 0``, ``&``, ``|``."""

    def holds(self, present: frozenset[str] | set[str]) -> bool:
        raise NotImplementedError

    def atoms(self) -> Iterator["Constraint"]:
        raise NotImplementedError

    def compile(self, p: Process) -> Callable[[int], bool]:
        """Evaluate over a state bitmask of ``p``."""
        raise NotImplementedError

    def states(self) -> set[str]:
        return {a.state for a in self.atoms()}  # type: ignore[attr-defined]

    def __and__(self, other: "Constraint") -> "Constraint":
        return And(self, other)

    def __or__(self, other: "Constraint") -> "Constraint":
        return Or(self, other)


@dataclass(frozen=True)
class AtLeastOne(Constraint):
    state: str

    def holds(self, present):
        return self.state in present

    def atoms(self):
        yield self

    def compile(self, p):
        bit = 1 << p.index[self.state]
        return lambda mask: bool(mask & bit)

    def __str__(self) -> str:
        return f"#{self.state} >= 1"


@dataclass(frozen=True)
class Absent(Constraint):
    state: str

    def holds(self, present):
        return self.state not in present

    def atoms(self):
        yield self

    def compile(self, p):
        bit = 1 << p.index[self.state]
        return lambda mask: not mask & bit

    def __str__(self) -> str:
        return f"#{self.state} = 0"


@dataclass(frozen=True)
class And(Constraint):
    left: Constraint
    right: Constraint

    def holds(self, present):
        return self.left.holds(present) and self.right.holds(present)

    def atoms(self):
        yield from self.left.atoms()
        yield from self.right.atoms()

    def compile(self, p):
        f, g = self.left.compile(p), self.right.compile(p)
        return lambda mask: f(mask) and g(mask)

    def __str__(self) -> str:
        def side(c: Constraint) -> str:
            return f"({c})" if isinstance(c, Or) else str(c)

        return f"{side(self.left)} & {side(self.right)}"


@dataclass(frozen=True)
class Or(Constraint):
    left: Constraint
    right: Constraint

    def holds(self, present):
        return self.left.holds(present) or self.right.holds(present)

    def atoms(self):
        yield from self.left.atoms()
        yield from self.right.atoms()

    def compile(self, p):
        f, g = self.left.compile(p), self.right.compile(p)
        return lambda mask: f(mask) or g(mask)

    def __str__(self) -> str:
        return f"{self.left} | {self.right}"


def conj(*parts: Constraint) -> Constraint:
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for c in parts[1:]:
        out = And(out, c)
    return out


def disj(*parts: Constraint) -> Constraint:
    if not parts:
        raise ValueError("empty disjunction")
    out = parts[0]
    for c in parts[1:]:
        out = Or(out, c)
    return out


def check_constraint(phi: Constraint, p: Process) -> None:
    for q in phi.states():
        if q not in p.index:
            raise UnknownIdentifier(f"constraint mentions unknown state {q!r}", ident=q)


def eval_constraint(phi: Constraint, present: Iterable[str]) -> bool:
    return phi.holds(frozenset(present))


def classify_constraint(phi: Constraint) -> ConstraintClass:
    if any(isinstance(a, Absent) for a in phi.atoms()):
        return ConstraintClass.CC
    return ConstraintClass.RQ_GEQ1


@dataclass(frozen=True)
class CardinalityConstraint:
    """Exact occurrence count for every state of a process."""

    states: tuple[str, ...]
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.states) != len(self.values):
            raise ValueError("states and values differ in length")
        if any(v < 0 for v in self.values):
            raise ValueError("cardinalities must be natural numbers")
        if sum(self.values) < 1:
            raise ZeroTotal("cardinality constraint has total 0")

    @classmethod
    def from_mapping(cls, p: Process, mapping: Mapping[str, int], default: int = 0) -> "CardinalityConstraint":
        for q in mapping:
            if q not in p.index:
                raise UnknownIdentifier(f"unknown state {q!r}", ident=q)
        return cls(p.states, tuple(int(mapping.get(q, default)) for q in p.states))

    @property
    def total(self) -> int:
        return sum(self.values)

    def __getitem__(self, q: str) -> int:
        return self.values[self.states.index(q)]

    def __str__(self) -> str:
        body = ", ".join(f"{q}:{v}" for q, v in zip(self.states, self.values) if v)
        return "card { " + (body + ", " if body else "") + "*:0 }"


def eval_card(card: CardinalityConstraint, m: Counts | Mapping[str, int]) -> bool:
    if isinstance(m, Mapping):
        if any(q not in card.states and c for q, c in m.items()):
            return False
        return all(m.get(q, 0) == v for q, v in zip(card.states, card.values))
    return tuple(m) == card.values

"""Seeded random instances for cross-validation.

Every generator takes a :class:`random.Random` so the same code serves
scripted experiments (fixed seeds) and hypothesis tests (``st.randoms()``).
"""

from __future__ import annotations

import random

from .errors import NotOneSafe
from .lang import Circuit, CnfFormula, Gate, PetriNet, Transition
from .model import Absent, And, AtLeastOne, Constraint, Or, Process, normalize
from .reductions import petri_markings


def random_process(
    rng: random.Random,
    max_states: int = 5,
    max_rules: int = 10,
    max_messages: int = 2,
    tau_rate: float = 0.15,
) -> Process:
    nq = rng.randint(1, max_states)
    states = [f"q{i}" for i in range(nq)]
    messages = [f"a{i}" for i in range(rng.randint(1, max_messages))]
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        s, t = rng.choice(states), rng.choice(states)
        if rng.random() < tau_rate:
            rules.append((s, "tau", t))
        else:
            rules.append((s, rng.choice(("!!", "??")) + rng.choice(messages), t))
    initial = rng.sample(states, rng.randint(1, min(2, nq)))
    return normalize(states, messages, rules, initial)


def random_constraint(rng: random.Random, p: Process, depth: int = 2, absent: bool = True) -> Constraint:
    """Random formula over ``p``'s states; ``absent=False`` keeps it in RQ>=1."""
    if depth == 0 or rng.random() < 0.3:
        q = rng.choice(p.states)
        return Absent(q) if absent and rng.random() < 0.5 else AtLeastOne(q)
    op = And if rng.random() < 0.5 else Or
    return op(random_constraint(rng, p, depth - 1, absent), random_constraint(rng, p, depth - 1, absent))


def random_cnf(rng: random.Random, max_vars: int = 8, max_clauses: int = 12) -> CnfFormula:
    n = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        width = rng.randint(1, min(3, n))
        vs = rng.sample(range(1, n + 1), width)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return CnfFormula(n, tuple(clauses))


def _recent(rng: random.Random, wires: list[str]) -> str:
    # geometric preference for recent wires so deep circuits appear
    k = 0
    while k < len(wires) - 1 and rng.random() < 0.5:
        k += 1
    return wires[-1 - k]


def random_circuit(rng: random.Random, gates: int | None = None, max_gates: int = 8, max_inputs: int = 4) -> Circuit:
    n_gates = gates if gates is not None else rng.randint(1, max_gates)
    inputs = tuple((f"x{i}", rng.random() < 0.5) for i in range(rng.randint(1, max_inputs)))
    wires = [w for w, _ in inputs]
    gs = []
    for k in range(n_gates):
        op = rng.choice(("and", "or", "not"))
        out = f"g{k}"
        ins = (_recent(rng, wires),) if op == "not" else (_recent(rng, wires), _recent(rng, wires))
        gs.append(Gate(op, ins, out))
        wires.append(out)
    return Circuit(inputs, tuple(gs), wires[-1], rng.random() < 0.5)


def random_safe_net(rng: random.Random, max_places: int = 4, max_transitions: int = 4) -> PetriNet:
    """Random net that is 1-safe from its initial marking (rejection sampling)."""
    while True:
        places = tuple(f"p{i}" for i in range(rng.randint(1, max_places)))

        def subset(lo: int = 0) -> frozenset[str]:
            return frozenset(rng.sample(places, rng.randint(lo, min(2, len(places)))))

        trans = tuple(Transition(f"t{i}", subset(1), subset()) for i in range(rng.randint(1, max_transitions)))
        m0 = subset()
        net = PetriNet(places, trans, m0, m0)
        try:
            reachable = sorted(petri_markings(net), key=lambda m: sorted(m))
        except NotOneSafe:
            continue
        # aim for a reachable target half the time, an arbitrary one otherwise
        m1 = rng.choice(reachable) if rng.random() < 0.5 else subset()
        return PetriNet(places, trans, m0, m1)

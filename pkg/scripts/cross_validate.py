"""Cross-validate the symbolic solvers against brute-force search.

Runs the same comparisons as the acceptance gate with configurable seed
and sample counts, and prints one summary line per experiment.

    python3 scripts/cross_validate.py --seed 7 --count 500
"""

from __future__ import annotations

import argparse
import itertools
import random
import time

from mahn.cardsolve import decide_crp
from mahn.ccsolve import decide_prp_cc
from mahn.model import CardinalityConstraint
from mahn.oracle import oracle_graph_reach, oracle_prp
from mahn.randgen import random_constraint, random_process
from mahn.reach import reachable_states


def reach_vs_graph(rng: random.Random, count: int, max_states: int) -> str:
    bad = 0
    for _ in range(count):
        p = random_process(rng, max_states=max_states, max_rules=2 * max_states)
        seen: set[str] = set()
        for n in range(1, 5):
            seen |= oracle_graph_reach(p, n).state_coverage
        bad += seen != reachable_states(p).reachable
    return f"reach vs graph oracle (n<=4): {count} processes, {bad} differ"


def prp_vs_oracle(rng: random.Random, count: int, max_states: int) -> str:
    bad = yes = certified = 0
    for _ in range(count):
        p = random_process(rng, max_states=max_states, max_rules=2 * max_states)
        phi = random_constraint(rng, p, depth=2)
        nq = len(p.states)
        solver = decide_prp_cc(p, phi)[0]
        verdict = oracle_prp(p, phi, nq * (nq + 2))
        bad += solver != verdict.found
        yes += solver
        certified += verdict.certified
    return f"decide_prp_cc vs oracle_prp: {count} pairs, {yes} YES, {certified} certified NO, {bad} differ"


def crp_vs_graph(rng: random.Random, count: int, max_states: int) -> str:
    bad = checked = 0
    for _ in range(count):
        p = random_process(rng, max_states=max_states, max_rules=2 * max_states)
        for K in (1, 2, 3):
            reached = {p.quotient(lab) for lab in oracle_graph_reach(p, K).reachable_labelings}
            for combo in itertools.combinations_with_replacement(range(len(p.states)), K):
                vals = [0] * len(p.states)
                for i in combo:
                    vals[i] += 1
                card = CardinalityConstraint(p.states, tuple(vals))
                bad += decide_crp(p, card).answer != (card.values in reached)
                checked += 1
    return f"decide_crp vs graph oracle (K<=3): {checked} cards, {bad} differ"


EXPERIMENTS = {"reach": reach_vs_graph, "prp": prp_vs_oracle, "crp": crp_vs_graph}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-states", type=int, default=5)
    ap.add_argument("--only", choices=sorted(EXPERIMENTS), action="append")
    args = ap.parse_args()
    for name in args.only or list(EXPERIMENTS):
        rng = random.Random(args.seed)
        t0 = time.perf_counter()
        line = EXPERIMENTS[name](rng, args.count, args.max_states)
        print(f"{line} [{time.perf_counter() - t0:.1f}s]")


if __name__ == "__main__":
    main()

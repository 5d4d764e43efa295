"""Time the reductions end to end as instances grow.

For circuits the time should grow polynomially (log-log slope near 1);
for CNF formulas the cardinality-free solver is exponential in the worst
case, which shows up as a steep curve in the number of variables.

    python3 scripts/scaling.py cvp --sizes 8 16 32 64 128
    python3 scripts/scaling.py sat --sizes 2 4 6 8
"""

from __future__ import annotations

import argparse
import math
import random
import statistics
import time

from mahn.ccsolve import decide_prp_cc
from mahn.randgen import random_circuit, random_cnf
from mahn.reach import decide_prp_geq1
from mahn.reductions import cvp_to_prp, sat_to_prp


def time_cvp(rng: random.Random, size: int) -> float:
    c = random_circuit(rng, gates=size)
    t = time.perf_counter()
    red = cvp_to_prp(c)
    decide_prp_geq1(red.process, red.query)
    return time.perf_counter() - t


def time_sat(rng: random.Random, size: int) -> float:
    f = random_cnf(rng, max_vars=size, max_clauses=2 * size)
    t = time.perf_counter()
    red = sat_to_prp(f)
    decide_prp_cc(red.process, red.query)
    return time.perf_counter() - t


def slope(points: list[tuple[int, float]]) -> float:
    xs = [math.log(x) for x, _ in points]
    ys = [math.log(y) for _, y in points]
    mx, my = statistics.fmean(xs), statistics.fmean(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("kind", choices=["cvp", "sat"])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    run = time_cvp if args.kind == "cvp" else time_sat
    rng = random.Random(args.seed)
    points = []
    for size in args.sizes:
        med = statistics.median(run(rng, size) for _ in range(args.samples))
        points.append((size, med))
        print(f"{args.kind} size {size:>4}: median {med * 1e3:9.2f} ms")
    if len(points) > 1:
        print(f"log-log slope: {slope(points):.2f}")


if __name__ == "__main__":
    main()

"""Command-line front end.

Exit status: 0 = YES (or success), 1 = NO, 2 = error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .cardsolve import decide_crp
from .ccsolve import decide_prp_cc
from .errors import MahnError
from .lang import (
    parse_card,
    parse_circuit,
    parse_constraint,
    parse_dimacs,
    parse_petri,
    parse_process,
    render_card,
    render_constraint,
    render_process,
    render_trace_lines,
    render_witness,
)
from .model import ConstraintClass, Process, classify_constraint
from .oracle import oracle_prp, random_walk
from .reach import decide_prp_geq1, reachable_states
from .reductions import cvp_to_prp, petri_to_crp, sat_to_prp

SCHEMA = 1
EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2


def _state_bytes(p: Process) -> int:
    # rough per-entry cost of the visited dict: key tuple, parent tuple, hash slot
    return 200 + 16 * len(p.states)


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.color = fmt == "text" and os.environ.get("MAHN_COLOR", "1") != "0" and sys.stdout.isatty()

    def verdict(self, yes: bool, text: str | None = None) -> str:
        word = text or ("YES" if yes else "NO")
        if not self.color:
            return word
        return f"\033[{32 if yes else 31}m{word}\033[0m"

    def emit(self, payload: dict[str, Any], lines: list[str]) -> None:
        if self.fmt == "json":
            print(json.dumps({"schema": SCHEMA, **payload}, indent=2))
        else:
            print("\n".join(lines))


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _inline(arg: str) -> str:
    return _read(arg[1:]) if arg.startswith("@") else arg


def _fmt(p: Process, states) -> str:
    return "{" + ",".join(sorted(states, key=p.index.__getitem__)) + "}"


def cmd_reach(args: argparse.Namespace, out: _Out) -> int:
    p = parse_process(_read(args.file))
    res = reachable_states(p)
    lines = [f"reachable: {_fmt(p, res.reachable)}", f"iterations: {res.iterations}"]
    lines += [f"  {q}: {res.provenance[q]}" for q in sorted(res.provenance, key=p.index.__getitem__)]
    out.emit({"command": "reach", "answer": True, "witness": render_witness(res, p)}, lines)
    return EXIT_YES


def cmd_check(args: argparse.Namespace, out: _Out) -> int:
    p = parse_process(_read(args.file))
    phi = parse_constraint(_inline(args.constraint), p)
    cls = classify_constraint(phi)
    if cls is ConstraintClass.RQ_GEQ1:
        answer, res = decide_prp_geq1(p, phi)
        witness = render_witness(res, p)
        lines = [out.verdict(answer), f"reachable: {_fmt(p, res.reachable)} after {res.iterations} passes"]
    else:
        answer, w = decide_prp_cc(p, phi)
        witness = render_witness(w, p) if w is not None else None
        lines = [out.verdict(answer)]
        if w is not None:
            lines.append("add: " + " -> ".join(_fmt(p, s) for s in w.add_chain))
            lines += [f"  {j}" for j in w.add_steps]
            lines.append("del: " + " -> ".join(_fmt(p, s) for s in w.del_chain))
            lines += [f"  {j}" for j in w.del_steps]
    payload = {"command": "check", "class": cls.value, "answer": answer, "witness": witness}
    out.emit(payload, lines)
    return EXIT_YES if answer else EXIT_NO


def cmd_check_crp(args: argparse.Namespace, out: _Out) -> int:
    p = parse_process(_read(args.file))
    card = parse_card(_inline(args.card), p)
    cap = None if args.mem_cap is None else max(1, args.mem_cap // _state_bytes(p))
    res = decide_crp(p, card, max_states=cap)
    lines = [out.verdict(res.answer), f"explored: {res.explored}"]
    if res.answer:
        lines.append(f"start: {p.format_counts(res.start)}")
        lines += render_trace_lines(res, p)
    payload = {"command": "check-crp", "answer": res.answer, "witness": render_witness(res, p) if res.answer else None}
    if not res.answer:
        payload["explored"] = res.explored
    out.emit(payload, lines)
    return EXIT_YES if res.answer else EXIT_NO


def cmd_oracle(args: argparse.Namespace, out: _Out) -> int:
    p = parse_process(_read(args.file))
    phi = parse_constraint(_inline(args.constraint), p)
    v = oracle_prp(p, phi, args.n_max, graph_n=args.graph_n)
    lines = [out.verdict(v.found, str(v))]
    if v.witness is not None:
        lines.append("labels: " + ",".join(v.witness))
    payload = {
        "command": "oracle",
        "answer": v.found,
        "verdict": str(v),
        "witness": list(v.witness) if v.witness else None,
        "certified_for_all_sizes": v.certified,
    }
    out.emit(payload, lines)
    return EXIT_YES if v.found else EXIT_NO


def cmd_simulate(args: argparse.Namespace, out: _Out) -> int:
    p = parse_process(_read(args.file))
    if args.n < 1 or args.steps < 0:
        raise MahnError("--n must be >= 1 and --steps >= 0")
    trace = random_walk(p, args.n, args.steps, args.seed)
    lines = []
    for i, st in enumerate(trace):
        edges = ",".join(f"{u}-{v}" for u, v in sorted(st.config.edges))
        lines.append(f"{i}: ({','.join(st.config.labels)}) edges={{{edges}}} [{st.event}]")
    payload = {
        "command": "simulate",
        "answer": True,
        "witness": [
            {"labels": list(st.config.labels), "edges": sorted(map(list, st.config.edges)), "event": st.event}
            for st in trace
        ],
    }
    out.emit(payload, lines)
    return EXIT_YES


def _write_generated(args: argparse.Namespace, out: _Out, kind: str, red, query_text: str, query_name: str) -> int:
    d = Path(args.out)
    d.mkdir(parents=True, exist_ok=True)
    proc_path, query_path, names_path = d / "process.mahn", d / query_name, d / "names.json"
    proc_path.write_text(render_process(red.process), encoding="utf-8")
    query_path.write_text(query_text + "\n", encoding="utf-8")
    names_path.write_text(json.dumps(red.name_map, indent=2) + "\n", encoding="utf-8")
    paths = {"process": str(proc_path), "query": str(query_path), "names": str(names_path)}
    out.emit({"command": kind, "answer": True, "witness": paths}, [f"wrote {v}" for v in paths.values()])
    return EXIT_YES


def cmd_gen_sat(args, out):
    red = sat_to_prp(parse_dimacs(_read(args.file)))
    return _write_generated(args, out, "gen-sat", red, render_constraint(red.query), "query.phi")


def cmd_gen_cvp(args, out):
    red = cvp_to_prp(parse_circuit(_read(args.file)))
    return _write_generated(args, out, "gen-cvp", red, render_constraint(red.query), "query.phi")


def cmd_gen_petri(args, out):
    red = petri_to_crp(parse_petri(_read(args.file)))
    return _write_generated(args, out, "gen-petri", red, render_card(red.query), "query.card")


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--mem-cap", type=_nonneg, metavar="BYTES", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="mahn", description="Reachability checks for broadcast protocols with mobility.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--mem-cap", type=_nonneg, metavar="BYTES", default=None,
                        help="approximate memory bound for the cardinality search")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reach", parents=[common], help="states occurring in some reachable configuration")
    p.add_argument("file")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("check", parents=[common], help="presence/absence query")
    p.add_argument("file")
    p.add_argument("constraint", help="constraint text, or @path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("check-crp", parents=[common], help="exact cardinality query")
    p.add_argument("file")
    p.add_argument("card", help="cardinality text, or @path")
    p.set_defaults(func=cmd_check_crp)

    p = sub.add_parser("oracle", parents=[common], help="brute-force search over small networks")
    p.add_argument("file")
    p.add_argument("constraint")
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--graph-n", type=int, default=3, help="sizes searched on explicit graphs (max 4)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", parents=[common], help="seeded random execution")
    p.add_argument("file")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    for name, func, what in (
        ("gen-sat", cmd_gen_sat, "DIMACS CNF"),
        ("gen-cvp", cmd_gen_cvp, "circuit"),
        ("gen-petri", cmd_gen_petri, "1-safe Petri net"),
    ):
        p = sub.add_parser(name, parents=[common], help=f"generate a process and query from a {what} file")
        p.add_argument("file")
        p.add_argument("--out", required=True, metavar="DIR")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out(args.format)
    try:
        return args.func(args, out)
    except (MahnError, OSError, UnicodeDecodeError, RecursionError, ValueError) as exc:
        kind = type(exc).__name__
        span = getattr(exc, "span", None)
        if isinstance(exc, RecursionError):
            msg = "input nested too deeply"
        elif isinstance(exc, OSError):
            msg = f"{exc.strerror or exc}: {exc.filename}" if exc.filename else str(exc)
        else:
            msg = str(exc)
        if args.format == "json":
            err: dict[str, Any] = {"kind": kind, "message": msg}
            if span is not None:
                err.update(line=span.line, column=span.column)
            print(json.dumps({"schema": SCHEMA, "command": args.command, "answer": None, "error": err}, indent=2))
        else:
            print(f"mahn: error: {kind}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

"""Text formats: the process DSL, constraints, cardinality constraints,
DIMACS CNF, Boolean circuits and 1-safe Petri nets, plus printers.

Process DSL::

    process P1 {
      states: q0, q1, q2;
      init: q0;
      alphabet: a;
      rules:
        q0 --!!a--> q1;
        q0 --??a--> q2;
        q1 --tau--> q0;
    }

``#`` starts a comment in process, circuit and net files; whitespace is
insignificant.  Every parse error carries a :class:`SourceSpan`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Iterable

from .errors import (
    CyclicCircuit,
    DslSyntaxError,
    DuplicateEntry,
    MahnError,
    SourceSpan,
    UnknownIdentifier,
    UnknownPlace,
    ZeroTotal,
)
from .model import (
    TAU,
    Absent,
    And,
    AtLeastOne,
    CardinalityConstraint,
    Constraint,
    Or,
    Process,
    normalize,
)

IDENT = r"[A-Za-z][A-Za-z0-9_]*"

_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<arrow>-->)
  | (?P<dash>--)
  | (?P<bang>!!)
  | (?P<query>\?\?)
  | (?P<ge>>=)
  | (?P<nat>[0-9]+)
  | (?P<ident>{IDENT})
  | (?P<punct>[{{}}();:,=&|*@-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    begin: int
    end: int


def tokenize(text: str, comments: bool = True) -> list[Token]:
    """Split ``text``; with ``comments=False`` a ``#`` is an ordinary symbol."""
    out = []
    pos = 0
    while pos < len(text):
        if not comments and text[pos] == "#":
            out.append(Token("hash", "#", pos, pos + 1))
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", SourceSpan.at(text, pos, pos + 1))
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            tok_kind = "punct" if kind == "punct" else kind
            out.append(Token(tok_kind, m.group(), m.start(), m.end()))
        pos = m.end()
    return out


class _Stream:
    def __init__(self, text: str, comments: bool = True):
        self.text = text
        self.toks = tokenize(text, comments)
        self.i = 0

    def span(self, tok: Token | None = None) -> SourceSpan:
        if tok is None:
            tok = self.peek()
        if tok is None:
            return SourceSpan.at(self.text, len(self.text))
        return SourceSpan.at(self.text, tok.begin, tok.end)

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def error(self, what: str) -> DslSyntaxError:
        tok = self.peek()
        found = "end of input" if tok is None else repr(tok.text)
        return DslSyntaxError(f"expected {what}, found {found}", self.span())

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok is None or tok.text != text:
            raise self.error(repr(text))
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            raise self.error(what)
        self.i += 1
        return tok

    def nat(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "nat":
            raise self.error("a natural number")
        self.i += 1
        return tok

    def end(self) -> None:
        if self.peek() is not None:
            raise self.error("end of input")

    def ident_list(self, terminator: str = ";") -> list[Token]:
        out = []
        if self.at(terminator):
            return out
        out.append(self.ident())
        while self.accept(","):
            out.append(self.ident())
        return out


# ----------------------------------------------------------------------
# Process DSL


def parse_process(text: str) -> Process:
    s = _Stream(text)
    s.expect("process")
    name = s.ident("process name").text
    s.expect("{")
    s.expect("states")
    s.expect(":")
    states = s.ident_list()
    s.expect(";")
    init_tok = s.expect("init")
    s.expect(":")
    init = s.ident_list()
    s.expect(";")
    s.expect("alphabet")
    s.expect(":")
    alphabet = s.ident_list()
    s.expect(";")
    s.expect("rules")
    s.expect(":")
    rules: list[tuple[str, str, str]] = []
    where: dict[str, Token] = {}
    for tok in states + init + alphabet:
        where.setdefault(tok.text, tok)
    while not s.at("}"):
        src = s.ident("rule source state or '}'")
        s.expect("--")
        if s.accept("!!"):
            msg = s.ident("message")
            action = "!!" + msg.text
        elif s.accept("??"):
            msg = s.ident("message")
            action = "??" + msg.text
        elif s.at("tau"):
            msg = s.ident()
            action = "tau"
        else:
            raise s.error("'!!', '??' or 'tau'")
        s.expect("-->")
        tgt = s.ident("rule target state")
        s.expect(";")
        rules.append((src.text, action, tgt.text))
        for tok in (src, msg, tgt):
            where.setdefault(tok.text, tok)
    s.expect("}")
    s.end()
    try:
        return normalize(
            [t.text for t in states],
            [t.text for t in alphabet],
            rules,
            [t.text for t in init],
            name=name,
        )
    except MahnError as exc:
        if exc.span is None:
            tok = where.get(exc.ident) if exc.ident else None
            exc.with_span(s.span(tok) if tok is not None else s.span(init_tok))
        raise


def render_process(p: Process) -> str:
    lines = [
        f"process {p.name} {{",
        f"  states: {', '.join(p.states)};",
        f"  init: {', '.join(p.initial)};",
        f"  alphabet: {', '.join(p.user_alphabet)};",
        "  rules:",
    ]
    for r in p.rules:
        lines.append(f"    {r.source} --{r.label()}--> {r.target};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Constraints


def parse_constraint(text: str, p: Process | None = None) -> Constraint:
    """``#q >= 1`` and ``#q = 0`` atoms, ``&`` binding tighter than ``|``."""
    s = _Stream(text, comments=False)

    def atom() -> Constraint:
        if s.accept("("):
            inner = disjunction()
            s.expect(")")
            return inner
        s.expect("#")
        tok = s.ident("state name")
        if p is not None and tok.text not in p.index:
            raise UnknownIdentifier(f"unknown state {tok.text!r}", s.span(tok), tok.text)
        if s.accept(">="):
            one = s.nat()
            if one.text != "1":
                raise DslSyntaxError("only '>= 1' is supported", s.span(one))
            return AtLeastOne(tok.text)
        if s.accept("="):
            zero = s.nat()
            if zero.text != "0":
                raise DslSyntaxError("only '= 0' is supported", s.span(zero))
            return Absent(tok.text)
        raise s.error("'>= 1' or '= 0'")

    def conjunction() -> Constraint:
        out = atom()
        while s.accept("&"):
            out = And(out, atom())
        return out

    def disjunction() -> Constraint:
        out = conjunction()
        while s.accept("|"):
            out = Or(out, conjunction())
        return out

    if not s.toks:
        raise DslSyntaxError("empty constraint", SourceSpan.at(text, 0, len(text)))
    phi = disjunction()
    s.end()
    return phi


def render_constraint(phi: Constraint) -> str:
    return str(phi)


def parse_card(text: str, p: Process) -> CardinalityConstraint:
    """``card { q1:1, q2:1, *:0 }``; ``*`` sets the default for unlisted states."""
    s = _Stream(text, comments=False)
    start = s.expect("card")
    s.expect("{")
    entries: dict[str, int] = {}
    default = None
    while True:
        tok = s.peek()
        if tok is not None and tok.text == "*":
            s.i += 1
            key = "*"
        else:
            tok = s.ident("state name or '*'")
            key = tok.text
        s.expect(":")
        value = int(s.nat().text)
        if key == "*":
            if default is not None:
                raise DuplicateEntry("default '*' given twice", s.span(tok), "*")
            default = value
        else:
            if key in entries:
                raise DuplicateEntry(f"state {key!r} listed twice", s.span(tok), key)
            if key not in p.index:
                raise UnknownIdentifier(f"unknown state {key!r}", s.span(tok), key)
            entries[key] = value
        if not s.accept(","):
            break
    s.expect("}")
    s.end()
    try:
        return CardinalityConstraint.from_mapping(p, entries, default or 0)
    except ZeroTotal as exc:
        raise exc.with_span(SourceSpan.at(text, start.begin, len(text))) from None


def render_card(card: CardinalityConstraint) -> str:
    return str(card)


# ----------------------------------------------------------------------
# DIMACS


@dataclass(frozen=True)
class CnfFormula:
    variable_count: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ValueError(f"literal {lit} out of range")

    def evaluate(self, assignment: dict[int, bool]) -> bool:
        return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in self.clauses)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    nums: list[tuple[int, int, int]] = []  # value, begin, end
    pos = 0
    for line in text.splitlines(keepends=True):
        stripped = line.strip()
        if stripped.startswith("c") or not stripped or stripped.startswith("%"):
            pos += len(line)
            continue
        if stripped.startswith("p"):
            parts = stripped.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf" or not all(x.isdigit() for x in parts[2:]):
                raise DslSyntaxError("malformed problem line, expected 'p cnf VARS CLAUSES'", SourceSpan.at(text, pos, pos + len(line)))
            header = (int(parts[2]), int(parts[3]))
            pos += len(line)
            continue
        if header is None:
            raise DslSyntaxError("clause before the 'p cnf' line", SourceSpan.at(text, pos, pos + len(line)))
        for m in re.finditer(r"\S+", line):
            try:
                nums.append((int(m.group()), pos + m.start(), pos + m.end()))
            except ValueError:
                raise DslSyntaxError(f"bad literal {m.group()!r}", SourceSpan.at(text, pos + m.start(), pos + m.end())) from None
        pos += len(line)
    if header is None:
        raise DslSyntaxError("missing 'p cnf' line", SourceSpan.at(text, 0, len(text)))
    nvars, nclauses = header
    clauses, cur = [], []
    for value, b, e in nums:
        if value == 0:
            if not cur:
                raise DslSyntaxError("empty clause", SourceSpan.at(text, b, e))
            clauses.append(tuple(cur))
            cur = []
        elif abs(value) > nvars:
            raise DslSyntaxError(f"literal {value} exceeds variable count {nvars}", SourceSpan.at(text, b, e))
        else:
            cur.append(value)
    if cur:
        clauses.append(tuple(cur))
    if len(clauses) != nclauses:
        raise DslSyntaxError(
            f"header announces {nclauses} clauses, found {len(clauses)}", SourceSpan.at(text, 0, len(text))
        )
    return CnfFormula(nvars, tuple(clauses))


def render_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.variable_count} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class Gate:
    op: str  # "and" | "or" | "not"
    inputs: tuple[str, ...]
    output: str


@dataclass(frozen=True)
class Circuit:
    inputs: tuple[tuple[str, bool], ...]
    gates: tuple[Gate, ...]
    output: str
    expected: bool

    def __post_init__(self) -> None:
        defined: set[str] = set()
        for name, _ in self.inputs:
            if name in defined:
                raise DuplicateEntry(f"input {name!r} defined twice", ident=name)
            defined.add(name)
        for g in self.gates:
            for i in g.inputs:
                if i not in defined:
                    if i == g.output or i in {h.output for h in self.gates}:
                        raise CyclicCircuit(f"gate {g.output!r} reads {i!r} before it is defined", ident=i)
                    raise UnknownIdentifier(f"gate {g.output!r} reads undefined wire {i!r}", ident=i)
            if g.output in defined:
                raise DuplicateEntry(f"wire {g.output!r} defined twice", ident=g.output)
            defined.add(g.output)
        if self.output not in defined:
            raise UnknownIdentifier(f"output {self.output!r} is not defined", ident=self.output)

    def evaluate(self) -> bool:
        val = dict(self.inputs)
        for g in self.gates:
            xs = [val[i] for i in g.inputs]
            if g.op == "and":
                val[g.output] = xs[0] and xs[1]
            elif g.op == "or":
                val[g.output] = xs[0] or xs[1]
            else:
                val[g.output] = not xs[0]
        return val[self.output]


def _bool(s: _Stream) -> bool:
    tok = s.ident("'true' or 'false'")
    if tok.text not in ("true", "false"):
        raise DslSyntaxError("expected 'true' or 'false'", s.span(tok))
    return tok.text == "true"


def parse_circuit(text: str) -> Circuit:
    """``input x = true;`` ... ``gate g = and(x, y);`` ... ``output g expect false;``"""
    s = _Stream(text)
    inputs, gates = [], []
    where: dict[str, Token] = {}
    while s.accept("input"):
        tok = s.ident("input name")
        s.expect("=")
        inputs.append((tok.text, _bool(s)))
        s.expect(";")
        where.setdefault(tok.text, tok)
    while s.accept("gate"):
        tok = s.ident("gate name")
        s.expect("=")
        op = s.ident("'and', 'or' or 'not'")
        if op.text not in ("and", "or", "not"):
            raise DslSyntaxError("expected 'and', 'or' or 'not'", s.span(op))
        s.expect("(")
        args = [s.ident("wire name")]
        if op.text != "not":
            s.expect(",")
            args.append(s.ident("wire name"))
        s.expect(")")
        s.expect(";")
        gates.append(Gate(op.text, tuple(a.text for a in args), tok.text))
        for t in [tok, *args]:
            where.setdefault(t.text, t)
    s.expect("output")
    out = s.ident("output wire")
    where.setdefault(out.text, out)
    s.expect("expect")
    expected = _bool(s)
    s.expect(";")
    s.end()
    try:
        return Circuit(tuple(inputs), tuple(gates), out.text, expected)
    except MahnError as exc:
        tok = where.get(exc.ident) if exc.ident else None
        raise exc.with_span(s.span(tok) if tok else SourceSpan.at(text, 0, len(text))) from None


def render_circuit(c: Circuit) -> str:
    lines = [f"input {n} = {str(v).lower()};" for n, v in c.inputs]
    lines += [f"gate {g.output} = {g.op}({', '.join(g.inputs)});" for g in c.gates]
    lines.append(f"output {c.output} expect {str(c.expected).lower()};")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Petri nets


@dataclass(frozen=True)
class Transition:
    name: str
    pre: frozenset[str]
    post: frozenset[str]


@dataclass(frozen=True)
class PetriNet:
    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    m0: frozenset[str]
    m1: frozenset[str]

    def __post_init__(self) -> None:
        known = set(self.places)
        if len(known) != len(self.places):
            raise DuplicateEntry("place declared twice")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise DuplicateEntry("transition declared twice")
        for t in self.transitions:
            for q in t.pre | t.post:
                if q not in known:
                    raise UnknownPlace(f"transition {t.name!r} uses unknown place {q!r}", ident=q)
        for q in self.m0 | self.m1:
            if q not in known:
                raise UnknownPlace(f"marking uses unknown place {q!r}", ident=q)


def parse_petri(text: str) -> PetriNet:
    """``places: p, q; trans t pre p post q; m0: p; m1: q;``

    The short form ``place p q; ... m0 p; m1 q;`` is accepted too: the
    header may be ``place`` or ``places``, colons are optional and commas
    between names are optional.
    """
    s = _Stream(text)
    where: dict[str, Token] = {}
    if not s.accept("place"):
        s.expect("places")
    s.accept(":")
    places = _list_until(s, ";")
    s.expect(";")
    trans = []
    while s.accept("trans"):
        name = s.ident("transition name")
        s.expect("pre")
        pre = _list_until(s, "post")
        s.expect("post")
        post = _list_until(s, ";")
        s.expect(";")
        trans.append(Transition(name.text, frozenset(t.text for t in pre), frozenset(t.text for t in post)))
        for t in pre + post:
            where.setdefault(t.text, t)
    s.expect("m0")
    s.accept(":")
    m0 = _list_until(s, ";")
    s.expect(";")
    s.expect("m1")
    s.accept(":")
    m1 = _list_until(s, ";")
    s.expect(";")
    s.end()
    for t in m0 + m1:
        where.setdefault(t.text, t)
    try:
        return PetriNet(
            tuple(t.text for t in places),
            tuple(trans),
            frozenset(t.text for t in m0),
            frozenset(t.text for t in m1),
        )
    except MahnError as exc:
        tok = where.get(exc.ident) if exc.ident else None
        raise exc.with_span(s.span(tok) if tok else SourceSpan.at(text, 0, len(text))) from None


def _list_until(s: _Stream, stop: str) -> list[Token]:
    """Identifiers, possibly none, separated by optional commas, ending before ``stop``."""
    out: list[Token] = []
    while not s.at(stop):
        out.append(s.ident())
        if s.accept(",") and s.at(stop):
            raise s.error("identifier")
    return out


def render_petri(net: PetriNet) -> str:
    order = {q: i for i, q in enumerate(net.places)}

    def lst(xs: Iterable[str]) -> str:
        return ", ".join(sorted(xs, key=order.__getitem__))

    lines = [f"places: {', '.join(net.places)};"]
    for t in net.transitions:
        lines.append(f"trans {t.name} pre {lst(t.pre)} post {lst(t.post)};".replace("  ", " "))
    lines.append(f"m0: {lst(net.m0)};")
    lines.append(f"m1: {lst(net.m1)};")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# Witness output


def render_witness(w: Any, p: Process) -> dict:
    """JSON-ready rendering of a solver witness (see the CLI for the envelope)."""
    from .cardsolve import CrpResult
    from .ccsolve import ChainWitness
    from .reach import ReachResult

    def fmt(states: Iterable[str]) -> str:
        return "{" + ",".join(sorted(states, key=p.index.__getitem__)) + "}"

    if isinstance(w, ReachResult):
        return {
            "reachable": fmt(w.reachable),
            "iterations": w.iterations,
            "provenance": {q: str(w.provenance[q]) for q in sorted(w.provenance, key=p.index.__getitem__)},
        }
    if isinstance(w, ChainWitness):
        return {
            "add_chain": [fmt(s) for s in w.add_chain],
            "del_chain": [fmt(s) for s in w.del_chain],
            "add_steps": [str(j) for j in w.add_steps],
            "del_steps": [str(j) for j in w.del_steps],
        }
    if isinstance(w, CrpResult):
        return {
            "start": p.format_counts(w.start) if w.start is not None else None,
            "trace": [
                {
                    "from": p.format_counts(st.before),
                    "rule": str(st.rule),
                    "receivers": [f"{p.states[a]}->{p.states[b]}:{k}" for a, b, k in st.moves],
                    "to": p.format_counts(st.after),
                }
                for st in w.trace
            ],
            "explored": w.explored,
        }
    raise TypeError(f"cannot render {type(w).__name__}")


def render_trace_lines(res: Any, p: Process) -> list[str]:
    """Multiset trace as ``{q0:2} --q0!!a--> {q1:1,q2:1}`` lines."""
    out = []
    for st in res.trace:
        label = f"{st.rule.source} tau" if st.rule.is_tau else f"{st.rule.source}!!{st.rule.message}"
        out.append(f"{p.format_counts(st.before)} --{label}--> {p.format_counts(st.after)}")
    return out


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)

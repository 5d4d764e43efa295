"""Reachability checking for broadcast protocols on mobile ad hoc networks."""

from __future__ import annotations

__version__ = "0.1.0"

from .cardsolve import CrpResult, decide_crp
from .ccsolve import ChainWitness, decide_prp_cc, validate_witness
from .errors import MahnError
from .lang import parse_card, parse_constraint, parse_process, render_process
from .model import CardinalityConstraint, Process, Rule, classify_constraint, normalize
from .oracle import oracle_graph_reach, oracle_prp
from .reach import decide_prp_geq1, reachable_states

__all__ = [
    "CardinalityConstraint",
    "ChainWitness",
    "CrpResult",
    "MahnError",
    "Process",
    "Rule",
    "classify_constraint",
    "decide_crp",
    "decide_prp_cc",
    "decide_prp_geq1",
    "normalize",
    "oracle_graph_reach",
    "oracle_prp",
    "parse_card",
    "parse_constraint",
    "parse_process",
    "reachable_states",
    "render_process",
    "validate_witness",
]

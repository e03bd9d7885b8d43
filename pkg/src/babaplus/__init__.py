"""Deterministic engine for a hallway-extended Baba-is-You fragment, plus a
PCP-to-level compiler and reduction verifier."""

from .grid import (
    Direction, Entity, GameObject, Level, NounKind, PropertyKind, Status, Text,
    enforce_cap, objects_at, state_hash,
)
from .rules import (
    ComplementItem, NounSelector, Paradox, PropertyMap, Rule, check_legality,
    parse_sentence, resolve_properties, scan_rules,
)
from .engine import Blocked, MoveAction, Moves, Outcome, StepOnTerminal, TraceEvent, push_chain, run, step
from .pcp import (
    GeneralPcpInstance, PcpInstance, binarize, check_solution, parse_pcp_text,
    solve_bounded, solve_naive, PAPER_INSTANCE, PAPER_SOLUTION,
)
from .compiler import (
    CompiledLevel, GadgetContract, compile_instance, compute_l,
    synthesize_moves, verify,
)
from .levelfile import load_level, save_level

__all__ = [name for name in dir() if not name.startswith("_")]

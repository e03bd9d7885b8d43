"""Command line front end: compile, solve, verify, simulate, oracle-check, serve."""
from __future__ import annotations

import argparse
import itertools
import sys
from pathlib import Path

from .compiler import compile_instance, synthesize_moves, verify
from .engine import MoveAction, outcome_of, run
from .grid import state_hash
from .levelfile import load_level, save_level
from .pcp import (
    PcpInstance, check_solution, format_pcp_text, parse_pcp_text, solve_bounded,
)

_ACTION_CODES = {
    "u": MoveAction.UP, "d": MoveAction.DOWN, "l": MoveAction.LEFT,
    "r": MoveAction.RIGHT, "w": MoveAction.WAIT,
}


def _read_pcp(path: str) -> PcpInstance:
    return parse_pcp_text(Path(path).read_text())


def _parse_moves(text: str) -> list[MoveAction]:
    moves = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if tok in _ACTION_CODES:
            moves.append(_ACTION_CODES[tok])
        else:
            moves.append(MoveAction(tok))
    return moves


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="babaplus")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a PCP file into a level document")
    p.add_argument("pcp_file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--contracts", help="also write the gadget contract sidecar")

    p = sub.add_parser("solve-pcp", help="bounded breadth-first search for a solution")
    p.add_argument("pcp_file")
    p.add_argument("--max-len", type=int, default=8)

    p = sub.add_parser("verify", help="compile, synthesize, and run a claimed solution")
    p.add_argument("pcp_file")
    p.add_argument("--solution", required=True, help="comma separated indices, e.g. 1,2,1")

    p = sub.add_parser("simulate", help="run a move list against a level document")
    p.add_argument("level_file")
    p.add_argument("--moves", required=True, help="comma separated U,D,L,R,W")
    p.add_argument("--trace", action="store_true", help="print every trace event")

    p = sub.add_parser("oracle-check", help="verify() agrees with direct string checking")
    p.add_argument("pcp_file")
    p.add_argument("--depth", type=int, default=2)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    args = parser.parse_args(argv)

    if args.command == "compile":
        compiled = compile_instance(_read_pcp(args.pcp_file))
        Path(args.output).write_text(save_level(compiled.level))
        if args.contracts:
            import json
            sidecar = [
                {"kind": c.kind, "obligations": list(c.obligations),
                 "footprint": list(c.footprint)}
                for c in compiled.contracts
            ]
            Path(args.contracts).write_text(json.dumps(sidecar, indent=2) + "\n")
        print(f"wrote {args.output} ({compiled.level.width}x{compiled.level.height})")
        return 0

    if args.command == "solve-pcp":
        inst = _read_pcp(args.pcp_file)
        sol = solve_bounded(inst, args.max_len)
        if sol is None:
            print(f"no solution of length <= {args.max_len}")
            return 1
        print(",".join(str(i) for i in sol))
        return 0

    if args.command == "verify":
        inst = _read_pcp(args.pcp_file)
        sol = tuple(int(i) for i in args.solution.split(","))
        outcome = verify(inst, sol)
        print(f"outcome: {outcome.status}"
              + (f" ({outcome.reason})" if outcome.reason else "")
              + (f" at turn {outcome.turn}" if outcome.turn is not None else ""))
        return 0 if outcome.won else 1

    if args.command == "simulate":
        level = load_level(Path(args.level_file).read_text())
        moves = _parse_moves(args.moves)
        final, outcome, trace = run(level, moves)
        if args.trace:
            for event in trace:
                print(event.serialize())
        print(f"outcome: {outcome.status}"
              + (f" ({outcome.reason})" if outcome.reason else ""))
        print(f"turn: {final.turn}")
        print(f"state_hash: {state_hash(final)}")
        return 0 if outcome.won else 1

    if args.command == "oracle-check":
        inst = _read_pcp(args.pcp_file)
        mismatches = 0
        total = 0
        for length in range(1, args.depth + 1):
            for seq in itertools.product(range(1, inst.arity + 1), repeat=length):
                total += 1
                expected = check_solution(inst, seq)
                got = verify(inst, seq).won
                if expected != got:
                    mismatches += 1
                    print(f"MISMATCH {seq}: oracle={expected} level={got}")
        print(f"checked {total} sequences, {mismatches} mismatches")
        return 0 if mismatches == 0 else 1

    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())

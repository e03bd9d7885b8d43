"""Human-diffable level documents.

Format: header lines (``width``, ``height``, ``hallway``, ``turn``,
``status``), a legend mapping one character to the full object stack of a
cell, the finite grid rows, then ``obj`` overflow lines for hallway
occupants. Loading reassigns object ids in a deterministic scan order, so a
round trip preserves the state hash.
"""
from __future__ import annotations

from .grid import (
    Direction, Entity, Level, NounKind, PLACEABLE_KINDS, Status, Text,
)

_LEGEND_CHARS = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "!$%&'*+,-/:;<=>?@[]^_`{|}~"
)


class ParseError(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class InvariantViolation(ValueError):
    pass


def _payload_token(obj) -> str:
    payload = obj.payload
    if isinstance(payload, Text):
        return f"text:{payload.word}"
    return payload.kind.value


def _parse_payload(token: str):
    if token.startswith("text:"):
        return Text(token[5:])
    return Entity(NounKind(token))


def _cell_signature(level: Level, x: int, y: int) -> tuple[str, ...]:
    parts = []
    for oid in level.ids_at(x, y):
        obj = level.objects[oid]
        parts.append(f"{_payload_token(obj)}|{obj.facing.value}")
    return tuple(sorted(parts))


def save_level(level: Level) -> str:
    lines = [
        f"width {level.width}",
        f"height {level.height}",
        f"hallway {level.hallway_rows[0]} {level.hallway_rows[1]}",
        f"turn {level.turn}",
        f"status {level.status} {level.status_detail or '-'} "
        f"{'-' if level.status_turn is None else level.status_turn}",
    ]
    signatures: dict[tuple[str, ...], str] = {(): "."}
    grid_rows: list[str] = []
    order: list[tuple[str, ...]] = []
    for y in range(level.height):
        row = []
        for x in range(level.width):
            sig = _cell_signature(level, x, y)
            if sig not in signatures:
                if len(order) >= len(_LEGEND_CHARS):
                    raise ValueError("legend overflow: too many distinct stacks")
                signatures[sig] = _LEGEND_CHARS[len(order)]
                order.append(sig)
            row.append(signatures[sig])
        grid_rows.append("".join(row))
    for sig in order:
        lines.append(f"legend {signatures[sig]} " + " ".join(sig))
    lines.append("grid")
    lines.extend(grid_rows)
    overflow = sorted(
        (o.y, o.x, _payload_token(o), o.facing.value)
        for o in level.objects.values() if o.x >= level.width
    )
    for y, x, token, facing in overflow:
        lines.append(f"obj {token} {x} {y} {facing}")
    return "\n".join(lines) + "\n"


def load_level(text: str) -> Level:
    width = height = None
    hallway: tuple[int, int] | None = None
    turn = 0
    status = Status.RUNNING
    status_detail = None
    status_turn = None
    legend: dict[str, tuple[str, ...]] = {".": ()}
    grid_rows: list[str] = []
    overflow: list[tuple[str, int, int, str]] = []
    in_grid = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if in_grid and height is not None and len(grid_rows) < height:
            grid_rows.append(line)
            continue
        parts = line.split()
        try:
            if parts[0] == "width":
                width = int(parts[1])
            elif parts[0] == "height":
                height = int(parts[1])
            elif parts[0] == "hallway":
                hallway = (int(parts[1]), int(parts[2]))
            elif parts[0] == "turn":
                turn = int(parts[1])
            elif parts[0] == "status":
                status = parts[1]
                if len(parts) > 2 and parts[2] != "-":
                    status_detail = parts[2]
                if len(parts) > 3 and parts[3] != "-":
                    status_turn = int(parts[3])
            elif parts[0] == "legend":
                legend[parts[1]] = tuple(parts[2:])
            elif parts[0] == "grid":
                in_grid = True
            elif parts[0] == "obj":
                overflow.append((parts[1], int(parts[2]), int(parts[3]), parts[4]))
            else:
                raise ParseError(lineno, f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, str(exc)) from exc
    if width is None or height is None or hallway is None:
        raise ParseError(0, "missing width/height/hallway header")
    if len(grid_rows) != height:
        raise ParseError(0, f"expected {height} grid rows, got {len(grid_rows)}")
    level = Level(width=width, height=height, hallway_rows=hallway)
    for y, row in enumerate(grid_rows):
        if len(row) != width:
            raise ParseError(0, f"grid row {y} has {len(row)} cells, expected {width}")
        for x, ch in enumerate(row):
            if ch not in legend:
                raise ParseError(0, f"unknown legend char {ch!r}")
            for part in legend[ch]:
                token, facing = part.split("|")
                payload = _parse_payload(token)
                if isinstance(payload, Entity) and payload.kind not in PLACEABLE_KINDS:
                    raise InvariantViolation(f"{token} is not placeable")
                level.spawn(payload, x, y, Direction(facing))
    for token, x, y, facing in sorted(overflow, key=lambda o: (o[2], o[1], o[0], o[3])):
        if x >= width and y not in hallway:
            raise InvariantViolation(
                f"object at {(x, y)} is in the hallway columns but off the hallway rows")
        level.spawn(_parse_payload(token), x, y, Direction(facing))
    level.turn = turn
    level.status = status
    level.status_detail = status_detail
    level.status_turn = status_turn
    return level

"""Turn execution: movement, duplication, transformation, annihilation, sink, win/lose.

A step runs fixed phases, re-scanning rules between mutating phases:
player movement, autonomous movement, transforms, duplication, open/shut
annihilation, sink, cap enforcement, win check.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from .grid import (
    Direction, Entity, GameObject, Level, LostReason, NounKind,
    PropertyKind, Status, Text, enforce_cap,
)
from .rules import Paradox, PropertyMap, Rule, analyze


class MoveAction(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"
    WAIT = "wait"

    @property
    def direction(self) -> Optional[Direction]:
        return None if self is MoveAction.WAIT else Direction(self.value)


@dataclass(frozen=True)
class TraceEvent:
    turn: int
    kind: str
    data: tuple

    def serialize(self) -> str:
        inner = " ".join(str(v) for v in self.data)
        return f"turn={self.turn} kind={self.kind} {inner}".rstrip()


class StepOnTerminal(Exception):
    pass


@dataclass(frozen=True)
class Blocked:
    pass


@dataclass(frozen=True)
class Moves:
    moves: tuple[tuple[int, tuple[int, int], tuple[int, int]], ...]


def push_chain(level: Level, start: tuple[int, int], direction: Direction,
               props: PropertyMap) -> Union[Blocked, Moves]:
    """Shift the contiguous run of pushable objects beginning at ``start``.

    The run extends while cells contain a pushable object; a STOP object in any
    run cell or in the first cell beyond it blocks the whole push, as does the
    border (hallway top/bottom behave like the border).
    """
    dx, dy = direction.delta
    x, y = start
    run_cells: list[tuple[int, int]] = []
    while True:
        if not level.in_bounds(x, y):
            return Blocked()
        objs = [level.objects[i] for i in level.ids_at(x, y)]
        if any(props.has(o, PropertyKind.STOP) for o in objs):
            return Blocked()
        if any(props.has(o, PropertyKind.PUSH) for o in objs):
            run_cells.append((x, y))
            x, y = x + dx, y + dy
            continue
        break  # first free cell beyond the run
    moves = []
    for cx, cy in run_cells:
        for oid in level.ids_at(cx, cy):
            obj = level.objects[oid]
            if props.has(obj, PropertyKind.PUSH):
                moves.append((oid, (cx, cy), (cx + dx, cy + dy)))
    return Moves(tuple(moves))


def _apply_moves(level: Level, moves: Moves, events: list[TraceEvent], turn: int) -> None:
    for oid, _src, dst in moves.moves:
        level.move_object(level.objects[oid], *dst)
    for oid, src, dst in moves.moves:
        events.append(TraceEvent(turn, "moved", (oid, src, dst)))


def _try_move(level: Level, obj: GameObject, direction: Direction,
              props: PropertyMap, events: list[TraceEvent], turn: int) -> bool:
    dx, dy = direction.delta
    tx, ty = obj.x + dx, obj.y + dy
    if not level.in_bounds(tx, ty):
        return False
    targets = [level.objects[i] for i in level.ids_at(tx, ty)]
    if any(props.has(o, PropertyKind.STOP) for o in targets):
        return False
    if any(props.has(o, PropertyKind.PUSH) for o in targets):
        result = push_chain(level, (tx, ty), direction, props)
        if isinstance(result, Blocked):
            return False
        _apply_moves(level, result, events, turn)
    src = obj.pos
    level.move_object(obj, tx, ty)
    obj.facing = direction
    events.append(TraceEvent(turn, "moved", (obj.id, src, (tx, ty))))
    return True


def _diff_rules(old: frozenset[Rule], new: frozenset[Rule],
                events: list[TraceEvent], turn: int) -> None:
    for rule in sorted(new - old, key=lambda r: r.serialize()):
        events.append(TraceEvent(turn, "rule_formed", (rule.serialize(),)))
    for rule in sorted(old - new, key=lambda r: r.serialize()):
        events.append(TraceEvent(turn, "rule_broken", (rule.serialize(),)))


def step(level: Level, action: MoveAction) -> tuple[Level, list[TraceEvent]]:
    """Advance one turn. Returns a new Level; the input is not modified."""
    if level.status != Status.RUNNING:
        raise StepOnTerminal(f"level is {level.status}")
    new = level.copy()
    events: list[TraceEvent] = []
    _step_inplace(new, action, events)
    return new, events


class _ScanCache:
    __slots__ = ("version", "result")

    def __init__(self):
        self.version = None
        self.result = None


def _scan(level: Level, prev_rules: Optional[frozenset[Rule]],
          events: list[TraceEvent], turn: int,
          cache: Optional[_ScanCache] = None) -> tuple[Optional[PropertyMap], frozenset[Rule]]:
    """Scan + legality + paradox. Returns (map, rules); map None on terminal.

    Rules and properties depend only on positions and payloads, so a scan can
    be reused while the level version is unchanged.
    """
    if cache is not None and cache.version == level._version:
        rules, resolution, illegal = cache.result
    else:
        rules, resolution, illegal = analyze(level)
        if cache is not None:
            cache.version = level._version
            cache.result = (rules, resolution, illegal)
    if prev_rules is not None:
        _diff_rules(prev_rules, rules, events, turn)
    if illegal is not None:
        level.mark_lost(LostReason.ILLEGAL_EMPTY_RULE)
        events.append(TraceEvent(turn, "status_changed", (level.status, LostReason.ILLEGAL_EMPTY_RULE.value)))
        return None, rules
    if isinstance(resolution, Paradox):
        level.mark_lost(LostReason.PARADOX)
        events.append(TraceEvent(turn, "status_changed", (level.status, LostReason.PARADOX.value)))
        return None, rules
    return resolution, rules


def _step_inplace(level: Level, action: MoveAction, events: list[TraceEvent]) -> None:
    turn = level.turn
    cache = _ScanCache()

    # 1: scan + legality + paradox
    props, rules = _scan(level, None, events, turn, cache)
    if props is None:
        level.turn += 1
        return

    # 2: player movement
    direction = action.direction
    if direction is not None:
        for oid in props.ids_with(level, PropertyKind.YOU):
            if oid in level.objects:
                _try_move(level, level.objects[oid], direction, props, events, turn)

    # 3: re-scan
    props, rules = _scan(level, rules, events, turn, cache)
    if props is None:
        level.turn += 1
        return

    # 4: autonomous movement (blocked movers reverse and retry once)
    for oid in props.ids_with(level, PropertyKind.MOVE):
        if oid not in level.objects:
            continue
        obj = level.objects[oid]
        if not _try_move(level, obj, obj.facing, props, events, turn):
            obj.facing = obj.facing.opposite
            _try_move(level, obj, obj.facing, props, events, turn)

    # 5: re-scan, then apply transformations simultaneously
    props, rules = _scan(level, rules, events, turn, cache)
    if props is None:
        level.turn += 1
        return
    if props.transforms:
        spawns: list[tuple[GameObject, NounKind]] = []  # extra transform targets
        for oid in sorted(props.transforms):
            if oid not in level.objects:
                continue
            obj = level.objects[oid]
            targets = props.transforms[oid]
            old_kind = obj.payload.kind.value
            real = [t for t in targets if t not in (NounKind.EMPTY.value, NounKind.LEVEL.value)]
            if NounKind.EMPTY.value in targets:
                level.remove(oid)
                events.append(TraceEvent(turn, "transformed", (oid, old_kind, "empty")))
                continue
            if not real:
                continue
            obj.set_payload(Entity(NounKind(real[0])))
            obj.facing = Direction.RIGHT  # rebirth resets facing to the default
            events.append(TraceEvent(turn, "transformed", (oid, old_kind, real[0])))
            for extra in real[1:]:
                spawns.append((obj, NounKind(extra)))
        for src, kind in spawns:
            dup = level.spawn(Entity(kind), src.x, src.y)
            events.append(TraceEvent(turn, "transformed", (dup.id, src.payload.kind.value, kind.value)))
        level.invalidate()
        props, rules = _scan(level, rules, events, turn, cache)
        if props is None:
            level.turn += 1
            return

    # 6: duplication
    more_ids = props.ids_with(level, PropertyKind.MORE)
    if more_ids:
        for oid in more_ids:
            if oid not in level.objects:
                continue
            src = level.objects[oid]
            for d in (Direction.UP, Direction.DOWN, Direction.LEFT, Direction.RIGHT):
                dx, dy = d.delta
                tx, ty = src.x + dx, src.y + dy
                if not level.in_bounds(tx, ty):
                    continue
                cell = [level.objects[i] for i in level.ids_at(tx, ty)]
                if any(props.has(o, PropertyKind.STOP) for o in cell):
                    continue
                dup = level.spawn(src.payload, tx, ty, src.facing)
                events.append(TraceEvent(turn, "duplicated", (oid, dup.id)))
        props, rules = _scan(level, rules, events, turn, cache)
        if props is None:
            level.turn += 1
            return

    # 7: open/shut annihilation
    cells = sorted({level.objects[o].pos for o in props.ids_with(level, PropertyKind.OPEN)
                    if o in level.objects})
    for pos in cells:
        opens = [i for i in level.ids_at(*pos)
                 if props.has(level.objects[i], PropertyKind.OPEN)]
        shuts = [i for i in level.ids_at(*pos)
                 if props.has(level.objects[i], PropertyKind.SHUT)
                 and not props.has(level.objects[i], PropertyKind.OPEN)]
        for a, b in zip(opens, shuts):
            level.remove(a)
            level.remove(b)
            events.append(TraceEvent(turn, "annihilated", (a, b)))

    # 8: sink
    if PropertyKind.SINK in props.level_flags:
        for oid in sorted(level.objects):
            level.remove(oid)
        events.append(TraceEvent(turn, "sunk", ("level",)))
        level.mark_lost(LostReason.LEVEL_SINK)
        events.append(TraceEvent(turn, "status_changed", (level.status, LostReason.LEVEL_SINK.value)))
        level.turn += 1
        return
    sink_cells = sorted({level.objects[o].pos for o in props.ids_with(level, PropertyKind.SINK)
                         if o in level.objects})
    for pos in sink_cells:
        ids = level.ids_at(*pos)
        if len(ids) > 1:
            for oid in list(ids):
                level.remove(oid)
            events.append(TraceEvent(turn, "sunk", (pos,)))

    # 9: cap enforcement, restricted to cells that received objects this step
    touched: set[tuple[int, int]] = set()
    for ev in events:
        if ev.kind == "moved":
            touched.add(ev.data[2])
        elif ev.kind == "duplicated":
            dup = level.objects.get(ev.data[1])
            if dup is not None:
                touched.add(dup.pos)
    for pos, payload, removed in enforce_cap(level, touched):
        events.append(TraceEvent(turn, "cap_reset", (pos, payload.token(), removed)))

    # 10: win check
    props, rules = _scan(level, rules, events, turn, cache)
    if props is None:
        level.turn += 1
        return
    won = False
    win_ids = set(props.ids_with(level, PropertyKind.WIN))
    if win_ids:
        win_cells = {level.objects[i].pos for i in win_ids if i in level.objects}
        for oid in props.ids_with(level, PropertyKind.YOU):
            if oid in level.objects and level.objects[oid].pos in win_cells:
                won = True
                break
    if PropertyKind.YOU in props.level_flags and PropertyKind.WIN in props.level_flags:
        won = True
    if won:
        level.mark_won()
        events.append(TraceEvent(turn, "status_changed", (level.status,)))
    level.turn += 1


@dataclass(frozen=True)
class Outcome:
    status: str  # "won" | "lost" | "running"
    turn: Optional[int] = None
    reason: Optional[str] = None

    @property
    def won(self) -> bool:
        return self.status == Status.WON


def outcome_of(level: Level) -> Outcome:
    if level.status == Status.RUNNING:
        return Outcome("running")
    return Outcome(level.status, level.status_turn, level.status_detail)


def run(level: Level, actions: list[MoveAction]) -> tuple[Level, Outcome, list[TraceEvent]]:
    """Fold the step over the actions, stopping at the first terminal status.

    The input level is never modified; stepping happens on a single working
    copy."""
    trace: list[TraceEvent] = []
    current = level.copy()
    for action in actions:
        if current.status != Status.RUNNING:
            break
        events: list[TraceEvent] = []
        _step_inplace(current, action, events)
        trace.extend(events)
    return current, outcome_of(current), trace

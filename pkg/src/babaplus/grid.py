"""World representation: objects on a finite grid plus a two-row right-infinite hallway.

Coordinates: origin top-left, x grows rightward, y grows downward. Cells with
x >= width exist only on the two hallway rows and extend arbitrarily far right.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Union


class NounKind(str, Enum):
    BABA = "baba"
    WALL = "wall"
    TILE = "tile"
    ROAD = "road"
    LAVA = "lava"
    ICE = "ice"
    RUBBLE = "rubble"
    BRICK = "brick"
    PLANK = "plank"
    TRACK = "track"
    GRASS = "grass"
    BIRD = "bird"
    BAT = "bat"
    CAT = "cat"
    BUG = "bug"
    BEE = "bee"
    DOG = "dog"
    CAR = "car"
    CRAB = "crab"
    CIRCLE = "circle"
    TREE = "tree"
    BANANA = "banana"
    # selector-only nouns; never placeable as objects
    LEVEL = "level"
    EMPTY = "empty"


#: nouns that may exist as entities on the grid
PLACEABLE_KINDS = frozenset(k for k in NounKind if k not in (NounKind.LEVEL, NounKind.EMPTY))


class PropertyKind(str, Enum):
    YOU = "you"
    PUSH = "push"
    STOP = "stop"
    MOVE = "move"
    WIN = "win"
    SINK = "sink"
    OPEN = "open"
    SHUT = "shut"
    MORE = "more"


class Direction(str, Enum):
    UP = "up"
    DOWN = "down"
    LEFT = "left"
    RIGHT = "right"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITES[self]


_DELTAS = {
    Direction.UP: (0, -1),
    Direction.DOWN: (0, 1),
    Direction.LEFT: (-1, 0),
    Direction.RIGHT: (1, 0),
}
_OPPOSITES = {
    Direction.UP: Direction.DOWN,
    Direction.DOWN: Direction.UP,
    Direction.LEFT: Direction.RIGHT,
    Direction.RIGHT: Direction.LEFT,
}


@dataclass(frozen=True)
class Entity:
    kind: NounKind

    def token(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class Text:
    """A word object on the grid. ``word`` is the serialized token:
    a noun name, a property name, or one of is/on/without/and/not."""

    word: str

    def token(self) -> str:
        return "text:" + self.word


Payload = Union[Entity, Text]

STRUCTURAL_WORDS = ("is", "on", "without", "and", "not")


def noun_text(kind: NounKind) -> Text:
    return Text(kind.value)


def prop_text(prop: PropertyKind) -> Text:
    return Text(prop.value)


IS, ON, WITHOUT, AND, NOT = (Text(w) for w in STRUCTURAL_WORDS)


class GameObject:
    """Mutable positioned object. ``kind_token`` caches the entity kind string
    (None for text) because enum value lookups dominate hot paths."""

    __slots__ = ("id", "payload", "x", "y", "facing", "kind_token")

    def __init__(self, id: int, payload: Payload, x: int, y: int,
                 facing: Direction = Direction.RIGHT):
        self.id = id
        self.x = x
        self.y = y
        self.facing = facing
        self.set_payload(payload)

    def set_payload(self, payload: Payload) -> None:
        self.payload = payload
        self.kind_token = payload.kind.value if isinstance(payload, Entity) else None

    @property
    def pos(self) -> tuple[int, int]:
        return (self.x, self.y)

    @property
    def is_text(self) -> bool:
        return self.kind_token is None

    @property
    def kind(self) -> Optional[NounKind]:
        return self.payload.kind if isinstance(self.payload, Entity) else None

    def copy(self) -> "GameObject":
        return GameObject(self.id, self.payload, self.x, self.y, self.facing)

    def __repr__(self) -> str:
        return f"GameObject({self.id}, {self.payload!r}, {self.x}, {self.y}, {self.facing.value})"


class Status:
    RUNNING = "running"
    WON = "won"
    LOST = "lost"


class LostReason(str, Enum):
    PARADOX = "paradox"
    ILLEGAL_EMPTY_RULE = "illegal_empty_rule"
    LEVEL_SINK = "level_sink"


@dataclass
class Level:
    """Mutable world state. ``hallway_rows`` are the only valid rows at x >= width."""

    width: int
    height: int
    hallway_rows: tuple[int, int]
    objects: dict[int, GameObject] = field(default_factory=dict)
    turn: int = 0
    status: str = Status.RUNNING
    status_detail: Optional[str] = None
    status_turn: Optional[int] = None
    _next_id: int = 0
    _version: int = 0
    _text_version: int = 0
    _index: Optional[dict[tuple[int, int], list[int]]] = field(default=None, repr=False)

    def spawn(self, payload: Payload, x: int, y: int,
              facing: Direction = Direction.RIGHT) -> GameObject:
        if isinstance(payload, Entity) and payload.kind not in PLACEABLE_KINDS:
            raise ValueError(f"{payload.kind.value} is selector-only and cannot be placed")
        if not self.in_bounds(x, y):
            raise ValueError(f"position {(x, y)} outside the playable region")
        obj = GameObject(self._next_id, payload, x, y, facing)
        self._next_id += 1
        self.objects[obj.id] = obj
        if self._index is not None:
            cell = self._index.setdefault((x, y), [])
            cell.append(obj.id)
            cell.sort()
        self._version += 1
        if isinstance(payload, Text):
            self._text_version += 1
        return obj

    def remove(self, obj_id: int) -> None:
        obj = self.objects.pop(obj_id, None)
        if obj is not None and self._index is not None:
            cell = self._index.get(obj.pos)
            if cell and obj_id in cell:
                cell.remove(obj_id)
                if not cell:
                    del self._index[obj.pos]
        self._version += 1
        if obj is not None and isinstance(obj.payload, Text):
            self._text_version += 1

    def move_object(self, obj: GameObject, x: int, y: int) -> None:
        if self._index is not None:
            cell = self._index.get(obj.pos)
            if cell and obj.id in cell:
                cell.remove(obj.id)
                if not cell:
                    del self._index[obj.pos]
            dest = self._index.setdefault((x, y), [])
            dest.append(obj.id)
            dest.sort()
        obj.x, obj.y = x, y
        self._version += 1
        if isinstance(obj.payload, Text):
            self._text_version += 1

    def in_bounds(self, x: int, y: int) -> bool:
        if x < 0 or y < 0 or y >= self.height:
            return False
        if x >= self.width:
            return y in self.hallway_rows
        return True

    def invalidate(self) -> None:
        self._index = None
        self._version += 1
        self._text_version += 1

    def _position_index(self) -> dict[tuple[int, int], list[int]]:
        if self._index is None:
            idx: dict[tuple[int, int], list[int]] = {}
            for oid in sorted(self.objects):
                idx.setdefault(self.objects[oid].pos, []).append(oid)
            self._index = idx
        return self._index

    def ids_at(self, x: int, y: int) -> list[int]:
        return self._position_index().get((x, y), [])

    def mark_won(self) -> None:
        if self.status == Status.RUNNING:
            self.status = Status.WON
            self.status_turn = self.turn

    def mark_lost(self, reason: LostReason) -> None:
        if self.status == Status.RUNNING:
            self.status = Status.LOST
            self.status_detail = reason.value
            self.status_turn = self.turn

    def copy(self) -> "Level":
        new = Level(
            width=self.width,
            height=self.height,
            hallway_rows=self.hallway_rows,
            objects={oid: o.copy() for oid, o in self.objects.items()},
            turn=self.turn,
            status=self.status,
            status_detail=self.status_detail,
            status_turn=self.status_turn,
        )
        new._next_id = self._next_id
        return new


def objects_at(level: Level, pos: tuple[int, int]) -> list[GameObject]:
    """All objects at ``pos`` in stable id order; empty list off-world."""
    return [level.objects[i] for i in level.ids_at(*pos)]


def enforce_cap(level: Level,
                cells: Optional[Iterable[tuple[int, int]]] = None
                ) -> list[tuple[tuple[int, int], Payload, int]]:
    """Trim every (tile, payload) group above six copies down to six.

    The six lowest ids survive. Returns (pos, payload, removed-count) per
    trim. ``cells`` restricts the check to positions that may have changed.
    """
    groups: dict[tuple[tuple[int, int], Payload], list[int]] = {}
    if cells is None:
        for oid in sorted(level.objects):
            obj = level.objects[oid]
            groups.setdefault((obj.pos, obj.payload), []).append(oid)
    else:
        for pos in sorted(set(cells)):
            for oid in level.ids_at(*pos):
                obj = level.objects[oid]
                groups.setdefault((pos, obj.payload), []).append(oid)
    trimmed = []
    for (pos, payload), ids in sorted(groups.items(),
                                      key=lambda kv: (kv[0][0], repr(kv[0][1]))):
        if len(ids) > 6:
            for oid in ids[6:]:
                level.remove(oid)
            trimmed.append((pos, payload, len(ids) - 6))
    return trimmed


def state_hash(level: Level) -> str:
    """Stable digest of the full world state, independent of insertion order.

    Hashes the canonically sorted multiset of (payload, position, facing)
    tuples rather than raw ids, so a saved-and-reloaded level (which reassigns
    ids deterministically) hashes identically.
    """
    h = hashlib.sha256()
    h.update(f"{level.width},{level.height},{level.hallway_rows},"
             f"{level.turn},{level.status},{level.status_detail}".encode())
    rows = sorted(
        (o.payload.token(), o.x, o.y, o.facing.value)
        for o in level.objects.values()
    )
    for row in rows:
        h.update(repr(row).encode())
    return h.hexdigest()


def check_invariants(level: Level) -> None:
    """Assert hallway confinement and the per-tile object cap."""
    counts: dict[tuple[tuple[int, int], Payload], int] = {}
    for obj in level.objects.values():
        if obj.x >= level.width and obj.y not in level.hallway_rows:
            raise AssertionError(f"object {obj.id} escaped the hallway at {obj.pos}")
        if not level.in_bounds(obj.x, obj.y):
            raise AssertionError(f"object {obj.id} out of bounds at {obj.pos}")
        key = (obj.pos, obj.payload)
        counts[key] = counts.get(key, 0) + 1
        if counts[key] > 6:
            raise AssertionError(f"cap exceeded at {obj.pos} for {obj.payload}")

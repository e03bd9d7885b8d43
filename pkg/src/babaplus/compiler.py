"""Compile five-pair PCP instances into levels winnable iff the instance is.

Level anatomy (width l+6, height 25; hallway = 2nd/3rd rows from the bottom):

* Bottom five rows: alpha templates (4th row from the bottom), an all-wall
  shelf, two tile-filled feed rows extending into the hallway, beta templates
  (bottom row). Template stacks carry their own wall so duplication can only
  drop copies onto the neighbouring feed row.
* Track row (18): a guarded dog sleeps in a den at the west end. A press
  mints a signal lava that rides a tile wire down into the den and turns the
  dog into a car ("dog on lava is car"). The car runs east, forms
  "tree is empty" against the east border exactly once, sweeps the locked
  player to the east parking banana, runs back and becomes a dog again on the
  den's road ("car on road is dog").
* Button columns above the track: pushing up on a button's IS completes
  "lava and ice on <companion> is more" for the pair, parks the button's
  animal on a banana perch, and mints a lock ice onto the player
  ("baba on ice is not you"). The freshly minted perch ice gives the animal
  one downward step next turn ("<animals> on ice is move"), restoring the
  chain and depositing player-plus-lock onto the track, where the car later
  sweeps them to the parking banana that dissolves the lock
  ("ice on banana is empty").
* A comparison column in the north-west, blocked below by a tree until the
  first press, rewires the level into the endgame on one downward push; a
  crab two cells above a "level is sink" slot enforces the two-turn deadline.
* A pre-seeded matched lava/ice pair starts at the east end of the feed rows
  and settles as the hallway's permanent last column: it annihilates in any
  honest win and otherwise keeps "level without lava and without ice" false,
  so the comparison cannot be won without duplication.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .engine import MoveAction, Outcome, _step_inplace, outcome_of, run
from .grid import Direction, Entity, Level, NounKind, Status, Text
from .pcp import EmptySolution, PcpInstance

HEIGHT = 25
TRACK_ROW = 18
NAV_ROW = 19
BUTTON_COLS = (7, 13, 19, 25, 31)
ANIMALS = (NounKind.BIRD, NounKind.BAT, NounKind.CAT, NounKind.BUG, NounKind.BEE)
COMPANIONS = (NounKind.RUBBLE, NounKind.BRICK, NounKind.PLANK, NounKind.TRACK, NounKind.GRASS)
HOME = (1, TRACK_ROW)
WIRE_COL = 1
WIRE_ROWS = tuple(range(12, 18))
COMPARISON_COL = 10
CRAB_COL = 14
SHAFT_COL = 34
RULEBOOK_LEFT = 17
RULEBOOK_RIGHT = 30

RULEBOOK = {
    RULEBOOK_LEFT: (
        "lava and ice on tile is move",
        "bird and bat and cat and bug and bee is push",
        "bird and bat and cat and bug and bee on ice is move",
        "level without lava and without ice is you and win",
        "baba on ice is not you",
        "dog on lava is car",
        "lava on dog is empty",
        "car on road is dog",
        "ice on banana is empty",
    ),
    RULEBOOK_RIGHT: (
        "wall is stop",
        "car is move",
        "car is push",
        "baba is push",
        "dog is move",
        "dog is not move",
        "lava is open",
        "circle is push",
        "tree is stop",
    ),
}


@dataclass(frozen=True)
class GadgetContract:
    kind: str
    obligations: tuple[str, ...]
    footprint: tuple[int, int, int, int]  # x0, y0, x1, y1 inclusive


@dataclass
class CompiledLevel:
    level: Level
    contracts: list[GadgetContract]
    button_press_cells: dict[int, tuple[int, int]]
    wall_approach: tuple[int, int]
    timer_duration: int
    feed_columns: dict[int, tuple[list[int], list[int]]]
    spawn: tuple[int, int]

    @property
    def parking(self) -> tuple[int, int]:
        return (self.level.width - 4, TRACK_ROW)


class ArityMismatch(ValueError):
    pass


def compute_l(inst: PcpInstance) -> int:
    """max(sum of alpha lengths, sum of beta lengths, 33)."""
    if inst.arity != 5:
        raise ArityMismatch(f"expected 5 pairs, got {inst.arity}")
    total_a = sum(len(a) for a, _ in inst.pairs)
    total_b = sum(len(b) for _, b in inst.pairs)
    return max(total_a, total_b, 33)


def compile_instance(inst: PcpInstance) -> CompiledLevel:
    if inst.arity != 5:
        raise ArityMismatch(f"expected 5 pairs, got {inst.arity}")
    l = compute_l(inst)
    width = l + 6
    height = HEIGHT
    hallway = (height - 3, height - 2)
    level = Level(width=width, height=height, hallway_rows=hallway)
    contracts: list[GadgetContract] = []
    keep_open: set[tuple[int, int]] = set()

    def wall(x: int, y: int) -> None:
        level.spawn(Entity(NounKind.WALL), x, y)

    def text(word: str, x: int, y: int) -> None:
        level.spawn(Text(word), x, y)

    def sentence(words: str, x: int, y: int, frozen: bool = False) -> None:
        for i, w in enumerate(words.split()):
            text(w, x + i, y)
            if frozen:
                wall(x + i, y)

    alpha_row, shelf_row = height - 4, height - 5  # 21, 20
    beta_row = height - 1                          # 24
    feed_alpha, feed_beta = hallway                # 22, 23

    for x in range(width):
        wall(x, shelf_row)
        level.spawn(Entity(NounKind.TILE), x, feed_alpha)
        level.spawn(Entity(NounKind.TILE), x, feed_beta)

    # pre-seeded matched pair: settles as the hallway's permanent last column
    level.spawn(Entity(NounKind.LAVA), width - 1, feed_alpha, Direction.RIGHT)
    level.spawn(Entity(NounKind.ICE), width - 1, feed_beta, Direction.RIGHT)

    # ---- template rows ----
    feed_columns: dict[int, tuple[list[int], list[int]]] = {i: ([], []) for i in range(1, 6)}

    def lay_templates(row: int, strings: list[str], ones_are_lava: bool, slot: int) -> None:
        x = 2
        for i, s in enumerate(strings):
            comp = COMPANIONS[i]
            for ch in s:
                lava = (ch == "1") == ones_are_lava
                level.spawn(Entity(NounKind.ROAD), x, row)
                level.spawn(Entity(comp), x, row)
                level.spawn(Entity(NounKind.LAVA if lava else NounKind.ICE), x, row,
                            Direction.RIGHT)
                wall(x, row)
                feed_columns[i + 1][slot].append(x)
                x += 1
            if i < len(strings) - 1:
                wall(x, row)
                x += 1
        for x2 in list(range(0, 2)) + list(range(x, width)):
            wall(x2, row)

    lay_templates(alpha_row, [a for a, _ in inst.pairs], ones_are_lava=True, slot=0)
    lay_templates(beta_row, [b for _, b in inst.pairs], ones_are_lava=False, slot=1)
    contracts.append(GadgetContract(
        "strip", ("templates are walled in; duplication feeds the hallway rows only",),
        (0, shelf_row, width - 1, height - 1)))
    contracts.append(GadgetContract(
        "hallway", ("copies settle right of the tile strip in press order",),
        (width, feed_alpha, width + 1, feed_beta)))

    # ---- timer den, wire, signal template ----
    level.spawn(Entity(NounKind.DOG), *HOME, Direction.RIGHT)
    level.spawn(Entity(NounKind.ROAD), *HOME)
    for y in WIRE_ROWS:
        level.spawn(Entity(NounKind.TILE), WIRE_COL, y)
        keep_open.add((WIRE_COL, y))
    sig_y = WIRE_ROWS[0] - 1  # 11
    level.spawn(Entity(NounKind.ROAD), WIRE_COL, sig_y)
    level.spawn(Entity(NounKind.LAVA), WIRE_COL, sig_y, Direction.DOWN)
    for comp in COMPANIONS:
        level.spawn(Entity(comp), WIRE_COL, sig_y)

    # ---- east end of the track: latent "tree is empty" + parking banana ----
    text("tree", width - 4, TRACK_ROW)
    text("is", width - 3, TRACK_ROW)
    text("empty", width - 1, TRACK_ROW)
    level.spawn(Entity(NounKind.BANANA), width - 4, TRACK_ROW)
    contracts.append(GadgetContract(
        "timer",
        ("first press forms 'tree is empty' exactly once; later runs bounce off it",
         "the player stays locked until the strip has cleared"),
        (0, sig_y - 1, width - 1, TRACK_ROW)))

    # ---- buttons ----
    press_cells: dict[int, tuple[int, int]] = {}
    for i, bx in enumerate(BUTTON_COLS, start=1):
        depth = i
        is_row = TRACK_ROW - 1       # 17
        slot_row = is_row - depth    # arm row, 16..12
        perch_row = slot_row - 1
        comp = COMPANIONS[i - 1]
        text("is", bx, is_row)
        for y in range(slot_row + 1, is_row):
            text("is", bx, y)  # decoy IS chain so each arm sits on its own row
        keep_open.add((bx, slot_row))
        level.spawn(Entity(ANIMALS[i - 1]), bx, slot_row, Direction.DOWN)
        level.spawn(Entity(NounKind.BANANA), bx, perch_row)
        sentence(f"lava and ice on {comp.value}", bx - 5, slot_row, frozen=True)
        text("more", bx + 1, slot_row)
        wall(bx + 1, slot_row)
        # trigger pocket: road-stacked ice copied onto the perch at each press
        level.spawn(Entity(NounKind.ROAD), bx + 1, perch_row)
        level.spawn(Entity(NounKind.ICE), bx + 1, perch_row, Direction.DOWN)
        level.spawn(Entity(comp), bx + 1, perch_row)
        wall(bx + 1, perch_row)
        # lock pocket: road-stacked ice copied onto the player at each press
        level.spawn(Entity(NounKind.ROAD), bx + 1, is_row)
        level.spawn(Entity(NounKind.ICE), bx + 1, is_row, Direction.DOWN)
        level.spawn(Entity(comp), bx + 1, is_row)
        wall(bx + 1, is_row)
        press_cells[i] = (bx, TRACK_ROW)
        contracts.append(GadgetContract(
            f"button({i})",
            ("press forms the pair's MORE rules; the player loses YOU one turn later",
             "the gadget is back in its initial configuration after the timer"),
            (bx - 5, perch_row - 1, bx + 1, TRACK_ROW)))
        contracts.append(GadgetContract(
            f"duplicator({i})",
            ("each press appends the pair's strings to the feed rows in press order",),
            (bx - 5, slot_row, bx + 1, slot_row)))

    # ---- comparison column ----
    px = COMPARISON_COL
    text("wall", px, 2)
    level.spawn(Entity(NounKind.CIRCLE), px, 3)
    text("you", px, 4)
    text("push", px, 5)
    text("ice", px, 6)
    text("move", px, 7)
    text("is", px, 8)
    level.spawn(Entity(NounKind.TREE), px, 9)
    for y in range(2, 10):
        keep_open.add((px, y))
    keep_open.add((px, 1))
    sentence("lava and ice on road is", px - 6, 3, frozen=True)
    sentence("baba is", px - 2, 4, frozen=True)
    sentence("lava and ice is", px - 4, 5, frozen=True)
    sentence("is shut", px + 1, 7, frozen=True)
    sentence("crab is", px - 2, 8, frozen=True)
    contracts.append(GadgetContract(
        "comparison",
        ("wall word pushable only after a press removed the tree",
         "the push hands control to the hallway strings and arms the crab"),
        (px - 6, 2, px + 2, 9)))

    # ---- crab countdown ----
    level.spawn(Entity(NounKind.CRAB), CRAB_COL, 2, Direction.DOWN)
    text("level", CRAB_COL, 5)
    sentence("is sink", CRAB_COL + 1, 6, frozen=True)
    keep_open.update({(CRAB_COL, 3), (CRAB_COL, 4), (CRAB_COL, 6)})

    # ---- rulebook (frozen, inside the sealed north-east zone) ----
    for col, rules in RULEBOOK.items():
        for row, words in enumerate(rules, start=1):
            sentence(words, col, row, frozen=True)

    # ---- corridors, shaft, and the wall fill ----
    for x in range(2, SHAFT_COL + 1):
        keep_open.add((x, 0))
    for y in range(1, TRACK_ROW):
        keep_open.add((SHAFT_COL, y))
    for x in range(1, width):
        keep_open.add((x, TRACK_ROW))
    for x in range(1, SHAFT_COL - 1):
        keep_open.add((x, NAV_ROW))

    spawn = (3, NAV_ROW)
    level.spawn(Entity(NounKind.BABA), *spawn, Direction.RIGHT)

    for y in range(0, shelf_row):
        for x in range(0, width):
            if (x, y) in keep_open:
                continue
            if level.ids_at(x, y):
                continue
            wall(x, y)

    timer_duration = 2 * width + 4
    return CompiledLevel(
        level=level,
        contracts=contracts,
        button_press_cells=press_cells,
        wall_approach=(px, 1),
        timer_duration=timer_duration,
        feed_columns=feed_columns,
        spawn=spawn,
    )


def _walkable(level: Level, x: int, y: int) -> bool:
    if not (0 <= x < level.width and 0 <= y < level.height):
        return False
    return not level.ids_at(x, y)


_DIR_ACTION = {
    (0, -1): MoveAction.UP,
    (0, 1): MoveAction.DOWN,
    (-1, 0): MoveAction.LEFT,
    (1, 0): MoveAction.RIGHT,
}


def find_player(level: Level) -> Optional[tuple[int, int]]:
    for oid in sorted(level.objects):
        obj = level.objects[oid]
        if obj.kind is NounKind.BABA:
            return obj.pos
    return None


def _nav_moves(level: Level, start: tuple[int, int],
               goal: tuple[int, int]) -> Optional[list[MoveAction]]:
    """Shortest walk over object-free cells (the start may be occupied)."""
    if start == goal:
        return []
    frontier = deque([start])
    came: dict[tuple[int, int], tuple[int, int]] = {start: start}
    while frontier:
        cur = frontier.popleft()
        for dx, dy in ((0, -1), (0, 1), (-1, 0), (1, 0)):
            nxt = (cur[0] + dx, cur[1] + dy)
            if nxt in came or not _walkable(level, *nxt):
                continue
            came[nxt] = cur
            if nxt == goal:
                path = [nxt]
                while path[-1] != start:
                    path.append(came[path[-1]])
                path.reverse()
                return [_DIR_ACTION[(b[0] - a[0], b[1] - a[1])]
                        for a, b in zip(path, path[1:])]
            frontier.append(nxt)
    return None


class SynthesisError(RuntimeError):
    pass


def synthesize_moves(compiled: CompiledLevel, sol: tuple[int, ...]) -> list[MoveAction]:
    """Concrete winning attempt: press buttons in reverse solution order,
    wait out the timer after each press, then push the wall word down and
    merge the hallway rows."""
    moves, _outcome = _synthesize(compiled, sol)
    return moves


def _synthesize(compiled: CompiledLevel,
                sol: tuple[int, ...]) -> tuple[list[MoveAction], Outcome]:
    if not sol:
        raise EmptySolution("solutions are nonempty index sequences")
    for idx in sol:
        if idx not in compiled.button_press_cells:
            raise ValueError(f"index {idx} outside 1..5")
    moves: list[MoveAction] = []
    sim = compiled.level.copy()

    def do(action: MoveAction) -> None:
        moves.append(action)
        if sim.status == Status.RUNNING:
            _step_inplace(sim, action, [])

    def navigate(goal: tuple[int, int]) -> None:
        pos = find_player(sim)
        if pos is None:
            raise SynthesisError("player object missing during synthesis")
        path = _nav_moves(sim, pos, goal)
        if path is None:
            raise SynthesisError(f"no route from {pos} to {goal}")
        for action in path:
            do(action)

    for idx in reversed(sol):
        navigate(compiled.button_press_cells[idx])
        do(MoveAction.UP)
        for _ in range(compiled.timer_duration):
            do(MoveAction.WAIT)
    navigate(compiled.wall_approach)
    do(MoveAction.DOWN)   # push the comparison column
    do(MoveAction.DOWN)   # merge the hallway rows
    for _ in range(4):    # leave room for the crab if the merge did not win
        do(MoveAction.WAIT)
    return moves, outcome_of(sim)


def verify(inst: PcpInstance, sol: tuple[int, ...],
           compiled: Optional[CompiledLevel] = None) -> Outcome:
    """Compile, synthesize the move list, and run it. Won iff ``sol`` solves
    ``inst``. The synthesis walks its own simulation of the exact same move
    list, so its final outcome is the run outcome."""
    if compiled is None:
        compiled = compile_instance(inst)
    _moves, outcome = _synthesize(compiled, tuple(sol))
    return outcome

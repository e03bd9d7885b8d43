import pytest

from babaplus.grid import Direction, Entity, Level, NounKind, Text


def make_level(width=8, height=6, hallway=None):
    if hallway is None:
        hallway = (height - 3, height - 2)
    return Level(width=width, height=height, hallway_rows=hallway)


def put(level, kind, x, y, facing=Direction.RIGHT):
    return level.spawn(Entity(NounKind(kind)), x, y, facing)


def put_text(level, word, x, y):
    return level.spawn(Text(word), x, y)


def put_row(level, words, x, y):
    out = []
    for i, word in enumerate(words.split()):
        out.append(put_text(level, word, x + i, y))
    return out


@pytest.fixture
def level():
    return make_level()

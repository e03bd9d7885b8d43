"""Sentence scanning, parsing, and property resolution.

Rules are read from contiguous runs of text objects, left-to-right in rows and
top-to-bottom in columns. Conditions written anywhere in an AND-joined subject
list distribute to every subject in the list, so "lava and ice on tile is move"
conditions both nouns.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .grid import Direction, Entity, GameObject, Level, NounKind, PropertyKind, Text

NOUN_TOKENS = frozenset(k.value for k in NounKind)
PROP_TOKENS = frozenset(p.value for p in PropertyKind)


def is_noun(tok: str) -> bool:
    return tok in NOUN_TOKENS


def is_prop(tok: str) -> bool:
    return tok in PROP_TOKENS


@dataclass(frozen=True)
class NounSelector:
    noun: str
    negated: bool = False
    conditions: tuple[tuple[str, str], ...] = ()  # ("on"|"without", noun)

    def serialize(self) -> str:
        parts = (["not"] if self.negated else []) + [self.noun]
        for i, (kind, noun) in enumerate(self.conditions):
            if i:
                parts.append("and")
            parts += [kind, noun]
        return " ".join(parts)


@dataclass(frozen=True)
class ComplementItem:
    target: str  # property or noun token
    negated: bool = False

    def serialize(self) -> str:
        return ("not " if self.negated else "") + self.target


@dataclass(frozen=True)
class Rule:
    subjects: tuple[NounSelector, ...]
    complements: tuple[ComplementItem, ...]

    def serialize(self) -> str:
        subj = " and ".join(s.serialize() for s in self.subjects)
        comp = " and ".join(c.serialize() for c in self.complements)
        return f"{subj} is {comp}"


@dataclass(frozen=True)
class Paradox:
    """No self-consistent reading of the rules exists; the level is lost."""


@dataclass
class PropertyMap:
    """Effective properties: kind-wide grants for unconditioned rules, plus
    per-object grants/cancels for conditioned or negated selectors. A cancel
    from any scope beats every grant (NOT wins)."""

    kind_grants: dict[str, set[PropertyKind]]
    kind_cancels: dict[str, set[PropertyKind]]
    obj_grants: dict[int, set[PropertyKind]]
    obj_cancels: dict[int, set[PropertyKind]]
    by_kind: dict[str, list[int]]
    level_flags: frozenset[PropertyKind]
    transforms: dict[int, tuple[str, ...]]  # targets: noun tokens, possibly "empty"
    rules: frozenset[Rule]

    def has(self, obj: GameObject, prop: PropertyKind) -> bool:
        if obj.is_text:
            return prop is PropertyKind.PUSH  # text is pushable by default
        kind = obj.payload.kind.value
        granted = (
            prop in self.kind_grants.get(kind, _EMPTY_PROPS)
            or prop in self.obj_grants.get(obj.id, _EMPTY_PROPS)
        )
        if not granted:
            return False
        return not (
            prop in self.kind_cancels.get(kind, _EMPTY_PROPS)
            or prop in self.obj_cancels.get(obj.id, _EMPTY_PROPS)
        )

    def props_of(self, obj: GameObject) -> frozenset[PropertyKind]:
        if obj.is_text:
            return frozenset((PropertyKind.PUSH,))
        kind = obj.payload.kind.value
        granted = (self.kind_grants.get(kind, _EMPTY_PROPS)
                   | self.obj_grants.get(obj.id, _EMPTY_PROPS))
        if not granted:
            return frozenset()
        return frozenset(granted
                         - self.kind_cancels.get(kind, _EMPTY_PROPS)
                         - self.obj_cancels.get(obj.id, _EMPTY_PROPS))

    def ids_with(self, level: Level, prop: PropertyKind) -> list[int]:
        out = set()
        for kind, props in self.kind_grants.items():
            if prop in props:
                out.update(self.by_kind.get(kind, ()))
        for oid, props in self.obj_grants.items():
            if prop in props:
                out.add(oid)
        return sorted(
            oid for oid in out
            if oid in level.objects and self.has(level.objects[oid], prop))


_EMPTY_PROPS: frozenset = frozenset()


def parse_sentence(tokens: list[str]) -> list[Rule]:
    """All rules encoded by one contiguous token run (greedy, longest match)."""
    rules: list[Rule] = []
    i = 0
    n = len(tokens)
    while i < n:
        parsed = _try_parse(tokens, i)
        if parsed is None:
            i += 1
        else:
            rule, consumed = parsed
            rules.append(rule)
            i += consumed
    return rules


def _try_parse(tokens: list[str], start: int) -> Optional[tuple[Rule, int]]:
    n = len(tokens)
    i = start
    subjects: list[NounSelector] = []
    while True:
        negated = False
        j = i
        if j < n and tokens[j] == "not":
            negated = True
            j += 1
        if not (j < n and is_noun(tokens[j])):
            return None
        noun = tokens[j]
        i = j + 1
        conds: list[tuple[str, str]] = []
        while True:
            k = i
            if k < n and tokens[k] == "and":
                k += 1
            if k < n and tokens[k] in ("on", "without") and k + 1 < n and is_noun(tokens[k + 1]):
                conds.append((tokens[k], tokens[k + 1]))
                i = k + 2
            else:
                break
        subjects.append(NounSelector(noun, negated, tuple(conds)))
        if i < n and tokens[i] == "and":
            k = i + 1
            if k < n and (is_noun(tokens[k]) or (tokens[k] == "not" and k + 1 < n and is_noun(tokens[k + 1]))):
                i = k
                continue
            return None
        break
    if not (i < n and tokens[i] == "is"):
        return None
    i += 1
    comps: list[ComplementItem] = []
    while True:
        negated = False
        j = i
        if j < n and tokens[j] == "not":
            negated = True
            j += 1
        if j < n and (is_noun(tokens[j]) or is_prop(tokens[j])):
            comps.append(ComplementItem(tokens[j], negated))
            i = j + 1
        else:
            break
        if i < n and tokens[i] == "and":
            k = i + 1
            if k < n and (
                is_noun(tokens[k]) or is_prop(tokens[k])
                or (tokens[k] == "not" and k + 1 < n and (is_noun(tokens[k + 1]) or is_prop(tokens[k + 1])))
            ):
                i = k
                continue
        break
    if not comps:
        return None
    # distribute the union of conditions across the whole subject list
    if len(subjects) > 1:
        union: list[tuple[str, str]] = []
        for s in subjects:
            for c in s.conditions:
                if c not in union:
                    union.append(c)
        subjects = [NounSelector(s.noun, s.negated, tuple(union)) for s in subjects]
    return Rule(tuple(subjects), tuple(comps)), i - start


_scan_cache: dict[int, tuple[int, frozenset[Rule]]] = {}


def scan_rules(level: Level) -> frozenset[Rule]:
    """Parse every horizontal and vertical run of contiguous text objects.

    Cached per level identity while no text object has appeared, vanished, or
    moved; entity motion cannot change the sentence set.
    """
    key = id(level)
    cached = _scan_cache.get(key)
    if cached is not None and cached[0] == level._text_version:
        return cached[1]
    rules = _scan_rules_uncached(level)
    if len(_scan_cache) > 256:
        _scan_cache.clear()
    _scan_cache[key] = (level._text_version, rules)
    return rules


def _scan_rules_uncached(level: Level) -> frozenset[Rule]:
    words: dict[tuple[int, int], str] = {}
    for oid in sorted(level.objects):
        obj = level.objects[oid]
        if obj.is_text and obj.pos not in words:  # stacked texts read as the oldest
            words[obj.pos] = obj.payload.word
    rules: set[Rule] = set()
    by_row: dict[int, list[int]] = {}
    by_col: dict[int, list[int]] = {}
    for (x, y) in words:
        by_row.setdefault(y, []).append(x)
        by_col.setdefault(x, []).append(y)
    for y, xs in by_row.items():
        for run in _runs(sorted(xs)):
            rules.update(parse_sentence([words[(x, y)] for x in run]))
    for x, ys in by_col.items():
        for run in _runs(sorted(ys)):
            rules.update(parse_sentence([words[(x, y)] for y in run]))
    return frozenset(rules)


def _runs(sorted_coords: list[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for c in sorted_coords:
        if runs and c == runs[-1][-1] + 1:
            runs[-1].append(c)
        else:
            runs.append([c])
    return [r for r in runs if len(r) >= 2]


def check_legality(rules: frozenset[Rule]) -> Optional[Rule]:
    """The offending rule if any rule has an empty-noun subject, else None."""
    for rule in sorted(rules, key=lambda r: r.serialize()):
        for sel in rule.subjects:
            if sel.noun == NounKind.EMPTY.value:
                return rule
    return None


def _conditions_hold(level: Level, sel: NounSelector, obj: GameObject) -> bool:
    objects = level.objects
    for cond, noun in sel.conditions:
        # an object does not satisfy its own presence for ON: another object
        # of that kind must share the tile
        present = False
        for oid in level.ids_at(obj.x, obj.y):
            if oid != obj.id and objects[oid].kind_token == noun:
                present = True
                break
        if cond == "on" and not present:
            return False
        if cond == "without" and present:
            return False
    return True


def _base_token(obj: GameObject) -> Optional[str]:
    return obj.kind_token


def _count_kind_at(level: Level, pos: tuple[int, int], noun: str) -> int:
    return sum(
        1 for o in (level.objects[i] for i in level.ids_at(*pos))
        if _base_token(o) == noun
    )


def resolve_properties(level: Level, rules: frozenset[Rule]) -> Union[PropertyMap, Paradox]:
    """Fixed-point property/transform resolution.

    Positive selectors match an object's base kind; negated selectors match
    against the kinds produced by the previous round's transforms, so a rule
    whose negated subject re-enters its own complement ("not tree is tree")
    oscillates and is reported as a Paradox. Without negated subjects the
    computation is closed after a single round.
    """
    objects = level.objects
    base: dict[int, str] = {}
    by_kind: dict[str, list[int]] = {}
    kind_counts: dict[str, int] = {}
    for oid, o in objects.items():
        tok = o.kind_token
        if tok is None:
            continue
        base[oid] = tok
        bucket = by_kind.get(tok)
        if bucket is None:
            by_kind[tok] = [oid]
            kind_counts[tok] = 1
        else:
            bucket.append(oid)
            kind_counts[tok] += 1
    has_negated_subject = any(
        sel.negated for rule in rules for sel in rule.subjects)

    def match(sel: NounSelector, eff: dict[int, str]) -> list[int]:
        if sel.negated:
            pool = [oid for oid in base
                    if eff.get(oid) is not None and eff[oid] != sel.noun]
        else:
            pool = by_kind.get(sel.noun, ())
        if not sel.conditions:
            return list(pool)
        return [oid for oid in pool
                if _conditions_hold(level, sel, objects[oid])]

    def one_round(eff: dict[int, str]):
        kind_grants: dict[str, set[PropertyKind]] = {}
        kind_cancels: dict[str, set[PropertyKind]] = {}
        obj_grants: dict[int, set[PropertyKind]] = {}
        obj_cancels: dict[int, set[PropertyKind]] = {}
        level_grants: set[PropertyKind] = set()
        level_cancels: set[PropertyKind] = set()
        transforms: dict[int, set[str]] = {}
        frozen: set[int] = set()
        for rule in rules:
            prop_comps = [(PropertyKind(c.target), c.negated)
                          for c in rule.complements if is_prop(c.target)]
            noun_comps = [c.target for c in rule.complements
                          if is_noun(c.target) and not c.negated]
            for sel in rule.subjects:
                if sel.noun == NounKind.LEVEL.value:
                    if _level_conditions_hold(level, sel, kind_counts):
                        for tgt, negated in prop_comps:
                            (level_cancels if negated else level_grants).add(tgt)
                    continue
                if not sel.negated and not sel.conditions and not noun_comps:
                    # whole-kind rule: no per-object bookkeeping needed
                    for tgt, negated in prop_comps:
                        store = kind_cancels if negated else kind_grants
                        store.setdefault(sel.noun, set()).add(tgt)
                    continue
                matched = match(sel, eff)
                if not matched:
                    continue
                for tgt, negated in prop_comps:
                    store = obj_cancels if negated else obj_grants
                    for oid in matched:
                        store.setdefault(oid, set()).add(tgt)
                for target in noun_comps:
                    for oid in matched:
                        if target == base[oid] and not sel.negated:
                            frozen.add(oid)  # X IS X freezes X
                        else:
                            transforms.setdefault(oid, set()).add(target)
        for oid in frozen:
            transforms.pop(oid, None)
        if transforms:
            for rule in rules:
                vetoes = [c.target for c in rule.complements
                          if c.negated and is_noun(c.target)]
                if not vetoes:
                    continue
                for sel in rule.subjects:
                    if sel.noun == NounKind.LEVEL.value:
                        continue
                    for oid in match(sel, eff):
                        if oid in transforms:
                            transforms[oid] -= set(vetoes)
                            if not transforms[oid]:
                                del transforms[oid]
        return (kind_grants, kind_cancels, obj_grants, obj_cancels,
                frozenset(level_grants - level_cancels), transforms)

    def as_map(result) -> PropertyMap:
        kind_grants, kind_cancels, obj_grants, obj_cancels, level_flags, transforms = result
        return PropertyMap(
            kind_grants=kind_grants,
            kind_cancels=kind_cancels,
            obj_grants=obj_grants,
            obj_cancels=obj_cancels,
            by_kind=by_kind,
            level_flags=level_flags,
            transforms={oid: tuple(sorted(t)) for oid, t in transforms.items()},
            rules=rules,
        )

    if not has_negated_subject:
        return as_map(one_round(base))

    def frozen_output(result):
        kind_grants, kind_cancels, obj_grants, obj_cancels, level_flags, transforms = result
        def freeze(d):
            return tuple(sorted((k, tuple(sorted(p.value for p in v)))
                                for k, v in d.items()))
        return (
            freeze(kind_grants), freeze(kind_cancels),
            freeze(obj_grants), freeze(obj_cancels),
            tuple(sorted(p.value for p in level_flags)),
            tuple(sorted((oid, tuple(sorted(t))) for oid, t in transforms.items())),
        )

    eff = dict(base)
    bound = 2 * len(PropertyKind) * max(1, len(level.objects)) + 2
    prev = None
    for _ in range(bound):
        result = one_round(eff)
        output = frozen_output(result)
        if output == prev:
            return as_map(result)
        prev = output
        transforms = result[5]
        eff = dict(base)
        for oid, targets in transforms.items():
            real = sorted(t for t in targets if t != NounKind.EMPTY.value)
            if real:
                eff[oid] = real[0]
            elif NounKind.EMPTY.value in targets:
                eff.pop(oid, None)
    return Paradox()


def _level_conditions_hold(level: Level, sel: NounSelector,
                           kind_counts: dict[str, int]) -> bool:
    for cond, noun in sel.conditions:
        count = kind_counts.get(noun, 0)
        if cond == "on" and count == 0:
            return False
        if cond == "without" and count > 0:
            return False
    return True


def analyze(level: Level) -> tuple[frozenset[Rule], Union[PropertyMap, Paradox], Optional[Rule]]:
    """One scan: (rules, resolution-or-paradox, offending-empty-rule-or-None)."""
    rules = scan_rules(level)
    illegal = check_legality(rules)
    resolution = resolve_properties(level, rules)
    return rules, resolution, illegal

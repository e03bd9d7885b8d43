"""Post correspondence instances, solution checking, bounded search, binarization.

The bounded solver is the independent correctness oracle for the level
compiler: a compiled level must be winnable exactly when the instance has a
solution.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from math import ceil, log2
from typing import Optional, Sequence


class EmptySolution(ValueError):
    pass


class IndexOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class PcpInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("instance needs at least one pair")
        for a, b in self.pairs:
            if set(a) - {"0", "1"} or set(b) - {"0", "1"}:
                raise ValueError("strings must be over {0,1}")

    @property
    def arity(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class GeneralPcpInstance:
    alphabet: tuple[str, ...]
    pairs: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]

    def __post_init__(self):
        allowed = set(self.alphabet)
        if len(self.alphabet) != len(allowed) or not allowed:
            raise ValueError("alphabet must be nonempty and duplicate-free")
        for a, b in self.pairs:
            if set(a) - allowed or set(b) - allowed:
                raise ValueError("symbol outside the alphabet")


def check_solution(inst: PcpInstance, indices: Sequence[int]) -> bool:
    """True iff the alpha and beta concatenations along ``indices`` are equal."""
    if not indices:
        raise EmptySolution("solutions are nonempty index sequences")
    for i in indices:
        if not 1 <= i <= inst.arity:
            raise IndexOutOfRange(f"index {i} outside 1..{inst.arity}")
    alpha = "".join(inst.pairs[i - 1][0] for i in indices)
    beta = "".join(inst.pairs[i - 1][1] for i in indices)
    return alpha == beta


def solve_bounded(inst: PcpInstance, max_len: int) -> Optional[tuple[int, ...]]:
    """Shortest (then lexicographically least) solution of length <= max_len.

    Breadth-first over index sequences with prefix pruning: a partial whose
    concatenations diverge (neither a prefix of the other) can never extend to
    a solution and is dropped.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    # state: the outstanding suffix on the longer side; +suffix means alpha is
    # ahead by that string, -suffix means beta is ahead
    start = ("", 0)
    queue: deque[tuple[str, int, tuple[int, ...]]] = deque()
    seen: set[tuple[str, int]] = {start}
    queue.append(("", 0, ()))
    while queue:
        surplus, side, seq = queue.popleft()
        if len(seq) >= max_len:
            continue
        for i in range(1, inst.arity + 1):
            a, b = inst.pairs[i - 1]
            if side >= 0:
                alpha, beta = surplus + a, b
            else:
                alpha, beta = a, surplus + b
            if alpha.startswith(beta):
                ns, nside = alpha[len(beta):], 1
            elif beta.startswith(alpha):
                ns, nside = beta[len(alpha):], -1
            else:
                continue
            nseq = seq + (i,)
            if ns == "":
                return nseq
            key = (ns, nside)
            if key not in seen:
                seen.add(key)
                queue.append((ns, nside, nseq))
    return None


def solve_naive(inst: PcpInstance, max_len: int) -> Optional[tuple[int, ...]]:
    """Exhaustive no-pruning enumeration, shortest-first. Cross-check oracle."""
    from itertools import product

    for length in range(1, max_len + 1):
        for seq in product(range(1, inst.arity + 1), repeat=length):
            if check_solution(inst, seq):
                return seq
    return None


def binarize(g: GeneralPcpInstance) -> PcpInstance:
    """Map each symbol to a fixed-width big-endian code by alphabet order."""
    width = max(1, ceil(log2(len(g.alphabet)))) if len(g.alphabet) > 1 else 1
    codes = {sym: format(i, f"0{width}b") for i, sym in enumerate(g.alphabet)}
    pairs = tuple(
        ("".join(codes[s] for s in a), "".join(codes[s] for s in b))
        for a, b in g.pairs
    )
    return PcpInstance(pairs)


def parse_pcp_text(text: str) -> PcpInstance:
    """Plain text format: line 1 arity k; then k lines "alpha beta" ("-" = empty)."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("empty PCP document")
    arity = int(lines[0])
    if len(lines) - 1 < arity:
        raise ValueError(f"expected {arity} pair lines, got {len(lines) - 1}")
    pairs = []
    for ln in lines[1:arity + 1]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad pair line: {ln!r}")
        a, b = parts
        pairs.append(("" if a == "-" else a, "" if b == "-" else b))
    return PcpInstance(tuple(pairs))


def format_pcp_text(inst: PcpInstance) -> str:
    lines = [str(inst.arity)]
    for a, b in inst.pairs:
        lines.append(f"{a or '-'} {b or '-'}")
    return "\n".join(lines) + "\n"


#: the five-pair worked example used throughout the tests
PAPER_INSTANCE = PcpInstance((
    ("1", "10"),
    ("0", "10"),
    ("010", "01"),
    ("11", "1"),
    ("010", "10"),
))

PAPER_SOLUTION = (1, 2, 1, 3, 3, 4)

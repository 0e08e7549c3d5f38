"""Cellular automata engines: elementary one-dimensional rules and Life.

The host-level steppers here are the slow reference implementations used
as oracles; the charged versions live in the zoo.  Elementary rows are
stored as a uniform background plus the finite set of cells that differ
from it, so every rule (including the ones that flip a blank background)
keeps a bounded description and the support window grows by at most one
cell per side per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class EcaRow:
    """One row: background value plus positions differing from it."""

    background: int
    flipped: frozenset[int]

    @classmethod
    def single_one(cls) -> "EcaRow":
        return cls(background=0, flipped=frozenset({0}))

    def value_at(self, pos: int) -> int:
        return 1 - self.background if pos in self.flipped else self.background

    def window(self, half_width: int) -> str:
        return "".join(
            str(self.value_at(p)) for p in range(-half_width, half_width + 1)
        )


def eca_step(row: EcaRow, rule: int) -> EcaRow:
    """One synchronous update of every cell under the given rule."""
    if not 0 <= rule <= 255:
        raise ValueError("rule must be in 0..255")
    b = row.background
    new_background = (rule >> (7 * b)) & 1
    candidates = set()
    for p in row.flipped:
        candidates.update((p - 1, p, p + 1))
    flipped = set()
    for p in candidates:
        idx = row.value_at(p - 1) * 4 + row.value_at(p) * 2 + row.value_at(p + 1)
        if (rule >> idx) & 1 != new_background:
            flipped.add(p)
    return EcaRow(background=new_background, flipped=frozenset(flipped))


def eca_row_fn(rule: int, n: int) -> int:
    """The n-th row from a single 1, read as a natural number.

    The row is decoded MSB-first over the centered window of width
    2n + 1, which pins the function down deterministically.
    """
    row = EcaRow.single_one()
    for _ in range(n):
        row = eca_step(row, rule)
    return int(row.window(n), 2)


# -- Conway's Life ---------------------------------------------------------

_NEIGHBORS = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)

Cells = frozenset


def life_step(cells: frozenset) -> frozenset:
    """One Life generation on an unbounded grid of live cells."""
    counts: dict[tuple[int, int], int] = {}
    for (x, y) in cells:
        for dx, dy in _NEIGHBORS:
            q = (x + dx, y + dy)
            counts[q] = counts.get(q, 0) + 1
    return frozenset(
        p for p, c in counts.items() if c == 3 or (c == 2 and p in cells)
    )


def parse_pattern(text: str) -> frozenset:
    """Read a plain-text grid: '#' live, '.' dead."""
    cells = set()
    for r, line in enumerate(text.splitlines()):
        line = line.strip()
        for c, ch in enumerate(line):
            if ch == "#":
                cells.add((r, c))
            elif ch != ".":
                raise ValueError(f"bad pattern character {ch!r}")
    return frozenset(cells)


def normalized(cells: frozenset) -> frozenset:
    """Translate a pattern so its bounding box starts at the origin."""
    if not cells:
        return cells
    minx = min(x for x, _ in cells)
    miny = min(y for _, y in cells)
    return frozenset((x - minx, y - miny) for x, y in cells)


def life_config(index: int) -> frozenset:
    """The index-th initial configuration (index >= 1).

    The index is written in binary and laid row-major, MSB first, into
    the smallest square box that holds its digits; 1 means live.  The
    enumeration is total and concrete, nothing more.
    """
    if index < 1:
        raise ValueError("configuration index starts at 1")
    bits = format(index, "b")
    side = math.isqrt(len(bits))
    if side * side < len(bits):
        side += 1
    return frozenset(
        (i // side, i % side) for i, b in enumerate(bits) if b == "1"
    )


def life_alive_count(n: int) -> int:
    """How many of the first n configurations are non-empty after n steps.

    The unbounded-grid stepper never truncates, so no padding policy is
    needed for the growth of the pattern.
    """
    alive = 0
    for index in range(1, n + 1):
        cells = life_config(index)
        for _ in range(n):
            cells = life_step(cells)
            if not cells:
                break
        if cells:
            alive += 1
    return alive

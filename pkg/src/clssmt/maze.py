"""Labyrinth generation and parsing for the path-finding benchmark.

A maze is a rectangular grid of free and blocked cells addressed as
(column, row) with row 0 at the top.  Free cells become Pos(c, r) atoms;
the four movement combinators receive one arrow per pair of adjacent
free cells, and a nullary start combinator provides the entry position.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import RepositoryError

Cell = tuple[int, int]


@dataclass(frozen=True)
class Maze:
    width: int
    height: int
    free: frozenset[Cell]
    start: Cell
    goal: Cell

    def __post_init__(self) -> None:
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if cell not in self.free:
                raise RepositoryError(f"{name} cell {cell} is not a free cell")


def generate_maze(n: int, seed: int = 0, density: float = 0.2) -> Maze:
    """Deterministic n-by-n maze: obstacles sampled cell by cell with
    the given density, start pinned to the bottom-left corner and goal
    to the top-right.
    """
    if n < 2:
        raise ValueError("maze size must be at least 2")
    if not 0 <= density < 1:
        raise ValueError("obstacle density must lie in [0, 1)")
    rng = random.Random(seed)
    start = (0, n - 1)
    goal = (n - 1, 0)
    free = set()
    for row in range(n):
        for col in range(n):
            cell = (col, row)
            if cell in (start, goal) or rng.random() >= density:
                free.add(cell)
    return Maze(n, n, frozenset(free), start, goal)


def parse_layout(text: str) -> Maze:
    """Parse a drawing: one row per line, '.' free, '#' blocked,
    'S' start, 'G' goal (both free).
    """
    rows = [line for line in text.splitlines() if line.strip()]
    if not rows:
        raise RepositoryError("empty maze layout")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise RepositoryError("maze layout rows differ in length")
    free: set[Cell] = set()
    start: Cell | None = None
    goal: Cell | None = None
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == "#":
                continue
            if ch == "S":
                start = (c, r)
            elif ch == "G":
                goal = (c, r)
            elif ch != ".":
                raise RepositoryError(f"unexpected maze character {ch!r} at row {r}")
            free.add((c, r))
    if start is None or goal is None:
        raise RepositoryError("maze layout needs exactly one S and one G")
    return Maze(width, len(rows), frozenset(free), start, goal)


def maze_to_repository(maze: Maze) -> str:
    """Emit the combinator repository text for a maze.  Movement
    combinators with no usable cell pair are omitted entirely.
    """

    def pos(cell: Cell) -> str:
        return f"Pos({cell[0]}, {cell[1]})"

    def arrows(delta: Cell) -> list[str]:
        dc, dr = delta
        pairs = []
        for col, row in sorted(maze.free, key=lambda c: (c[1], c[0])):
            source = (col - dc, row - dr)
            if source in maze.free:
                pairs.append(f"({pos(source)} -> {pos((col, row))})")
        return pairs

    moves = [
        ("left", (-1, 0)),
        ("right", (1, 0)),
        ("up", (0, -1)),
        ("down", (0, 1)),
    ]
    lines = []
    for name, delta in moves:
        pairs = arrows(delta)
        if pairs:
            lines.append(f"{name} : " + " & ".join(pairs))
    lines.append(f"start : {pos(maze.start)}")
    return "\n".join(lines) + "\n"


def goal_type_text(maze: Maze) -> str:
    return f"Pos({maze.goal[0]}, {maze.goal[1]})"

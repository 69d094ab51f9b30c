"""Shared fixture corpus and the acceptance report hook.

The corpus helpers build the same environments the acceptance criteria
sweep, so the unit tests and the acceptance tests cannot drift apart.
"""
from __future__ import annotations

from typing import List, Tuple

import pytest

from swarmfill.grid import (
    Environment,
    gen_corridor,
    gen_hard_family,
    gen_maze,
    gen_rect,
    gen_square,
    parse_map,
)

# hand-drawn shapes that exercise branching, loops, and dead ends
SHAPES = {
    "lbend": "D....\n....#\n....#\n..###",
    "comb": "D............\n.#.#.#.#.#.##\n.#.#.#.#.#.##",
    "ring": "D...\n.##.\n.##.\n....",
    "tee": "..D..\n..#..\n.....",
    "zig": "D.##\n#.##\n#..#\n##..\n##..",
}


def shape_envs() -> List[Tuple[str, Environment]]:
    return [(name, parse_map(text)) for name, text in SHAPES.items()]


def single_door_corpus() -> List[Tuple[str, Environment]]:
    """Corridors, squares, shapes, and mazes, all with one door."""
    out: List[Tuple[str, Environment]] = []
    out.extend((f"corridor{a}", gen_corridor(a)) for a in (1, 2, 3, 5, 8, 13))
    out.extend((f"square{n}", gen_square(n)) for n in (2, 3, 4, 6, 8))
    out.extend(shape_envs())
    out.extend(
        (f"maze{s}", gen_maze(9, 7, 40, 1, seed=s)) for s in range(10)
    )
    return out


def multi_door_corpus() -> List[Tuple[str, Environment]]:
    out: List[Tuple[str, Environment]] = [
        ("pair", parse_map("D.D")),
        ("diag", gen_rect(5, 3, [(0, 0), (4, 2)])),
        ("corners", gen_rect(6, 5, [(0, 0), (5, 0), (0, 4), (5, 4)])),
    ]
    out.extend((f"mmaze{s}", gen_maze(9, 7, 40, 2, seed=s)) for s in range(6))
    out.extend((f"hard{k}", gen_hard_family(k)) for k in (1, 2, 4, 8))
    return out


@pytest.fixture(scope="session")
def single_door_envs() -> List[Tuple[str, Environment]]:
    return single_door_corpus()


@pytest.fixture(scope="session")
def multi_door_envs() -> List[Tuple[str, Environment]]:
    return multi_door_corpus()


# ---------- acceptance reporting ----------

# test_acceptance appends "criterion NN: PASS/FAIL - note" lines here; the
# summary hook replays them after the run so they show without -s
ACCEPTANCE_LINES: List[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)

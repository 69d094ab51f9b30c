"""swarmfill: deterministic simulator for door-fed robot swarms filling pixel grids."""
from __future__ import annotations

from .grid import (
    Direction,
    Environment,
    MapError,
    Pixel,
    bfs_distances,
    env_hash,
    gen_corridor,
    gen_hard_family,
    gen_maze,
    gen_rect,
    gen_square,
    parse_map,
    render_map,
)
from .kernel import Action, LocalView, Role, World, left_side
from .strategies import STRATEGIES, get_strategy

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Direction",
    "Environment",
    "LocalView",
    "MapError",
    "Pixel",
    "Role",
    "STRATEGIES",
    "World",
    "bfs_distances",
    "env_hash",
    "gen_corridor",
    "gen_hard_family",
    "gen_maze",
    "gen_rect",
    "gen_square",
    "get_strategy",
    "left_side",
    "parse_map",
    "render_map",
    "__version__",
]

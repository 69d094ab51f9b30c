"""How occupancy-tree depth and travel efficiency scale on n x n squares.

The depth-first chain threads one long snake through the square, so its
tree depth tracks the area and per-robot travel efficiency decays as n
grows.  The branching chain hands robots off down many short limbs, which
keeps depth near the side length and efficiency roughly flat.  This script
prints both trends side by side.

Usage: python3 scripts/depth_trends.py [--sizes 8,16,32]
"""
from __future__ import annotations

import argparse
from fractions import Fraction

from swarmfill.grid import gen_square
from swarmfill.kernel import World
from swarmfill.metrics import compute_metrics
from swarmfill.strategies import get_strategy
from swarmfill.trace import from_world


def measure(name: str, n: int):
    world = World(gen_square(n), get_strategy(name), record_history=True)
    world.run()
    rec = compute_metrics(from_world(world))
    return rec.tree_depth, rec.avg_ratio


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="8,16,32")
    sizes = [int(s) for s in ap.parse_args().sizes.split(",")]

    print(f"{'n':>4} {'strategy':>8} {'depth':>6} {'depth/n':>8} {'avg ratio':>10}")
    trends = {}
    for name in ("dflf", "bflf"):
        per_n = []
        for n in sizes:
            depth, ratio = measure(name, n)
            per_n.append((Fraction(depth, n), ratio))
            print(f"{n:>4} {name:>8} {depth:>6} {float(depth) / n:>8.2f} {float(ratio):>10.3f}")
        trends[name] = per_n

    for name, per_n in trends.items():
        lo = min(d for d, _ in per_n)
        hi = max(d for d, _ in per_n)
        print(
            f"{name}: depth/n spans {float(lo):.2f}..{float(hi):.2f}"
            f" ({float(hi / lo):.2f}x across sizes)"
        )


if __name__ == "__main__":
    main()

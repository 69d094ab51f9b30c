"""Fill-time overhead on the comb family that punishes door-count guessing.

Each instance is a comb of k teeth behind k doors; the adversarial shape
forces the flow-network strategy to pay for discovering how many doors are
actually feeding it.  The interesting quantity is fill_time / lower_bound
as k doubles: it should climb, but by shrinking increments, the signature
of logarithmic growth in k.

Usage: python3 scripts/hard_ratios.py [--ks 2,4,8,16,32]
"""
from __future__ import annotations

import argparse
import math
from fractions import Fraction

from swarmfill.grid import gen_hard_family
from swarmfill.kernel import World
from swarmfill.metrics import compute_metrics, lower_bound
from swarmfill.strategies import get_strategy
from swarmfill.trace import from_world


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--ks", default="2,4,8,16,32")
    ks = [int(s) for s in ap.parse_args().ks.split(",")]

    print(f"{'k':>4} {'area':>6} {'fill':>6} {'LB':>5} {'ratio':>7} {'ratio/log2(k+1)':>16}")
    rows = []
    for k in ks:
        env = gen_hard_family(k)
        world = World(env, get_strategy("lflf"), record_history=True)
        world.run()
        rec = compute_metrics(from_world(world))
        lb = lower_bound(env)
        ratio = Fraction(rec.fill_time, lb)
        rows.append(ratio)
        norm = float(ratio) / math.log2(k + 1)
        print(f"{k:>4} {env.area:>6} {rec.fill_time:>6} {lb:>5} {float(ratio):>7.3f} {norm:>16.3f}")

    steps = [float(b - a) for a, b in zip(rows, rows[1:])]
    print("increments per doubling:", ", ".join(f"{s:+.3f}" for s in steps))
    print("nondecreasing:", all(s >= 0 for s in steps))


if __name__ == "__main__":
    main()

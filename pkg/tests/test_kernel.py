"""Engine semantics: spawning, the move delay, arbitration, determinism.

Everything here is observed through traces rather than by poking at engine
internals, so these tests pin behavior the strategies are allowed to rely
on without caring how the engine is organized inside.
"""
from __future__ import annotations

import pytest

from swarmfill.grid import gen_corridor, gen_maze, gen_square, parse_map
from swarmfill.kernel import World
from swarmfill.strategies import get_strategy
from swarmfill.trace import dumps, from_world, replay


def run_trace(env, name, **kw):
    world = World(env, get_strategy(name), **kw)
    world.run()
    return from_world(world)


# ---------- start of time ----------


def test_doors_start_with_leaders():
    tr = run_trace(parse_map("D.D"), "lflf")
    start = tr.positions(0)
    assert set(start) == {(0, 0), (2, 0)}
    assert all(role == "leader" for _, role in start.values())


def test_fresh_robot_appears_when_door_vacated():
    tr = run_trace(gen_corridor(3), "dflf")
    # t=1: the leader stepped off the door and a fresh follower sits on it
    at1 = tr.positions(1)
    assert (0, 0) in at1 and (1, 0) in at1
    rid_fresh, role_fresh = at1[(0, 0)]
    assert rid_fresh != tr.positions(0)[(0, 0)][0]
    assert role_fresh != "leader"


def test_door_never_empty():
    for env, name in [
        (gen_corridor(5), "dflf"),
        (gen_square(4), "bflf"),
        (parse_map("D.D"), "lflf"),
    ]:
        tr = run_trace(env, name)
        for t in range(len(tr.steps)):
            occ = tr.positions(t)
            assert all(d in occ for d in env.doors), (name, t)


# ---------- movement rules ----------


def test_move_delay_one_step_gap():
    # the follower may only enter a pixel observed empty, so it trails the
    # leader by two pixels and closes up one step after each vacancy
    tr = run_trace(gen_corridor(3), "dflf")
    assert (1, 0) not in tr.positions(2)  # vacated this very step, not entered
    assert (1, 0) in tr.positions(3)


def test_conflicting_claims_settle_by_approach_side():
    # two leaders want the middle pixel in the same step; the east approach
    # outranks the west one, so the east door's robot takes it
    env = parse_map("D.D")
    assert env.doors == ((0, 0), (2, 0))
    tr = run_trace(env, "lflf")
    rid_mid, _ = tr.positions(1)[(1, 0)]
    assert rid_mid == 1  # spawned on the east door
    assert tr.fill_time == 1


def test_one_robot_per_pixel_throughout():
    for env, name in [(gen_maze(9, 7, 40, 1, seed=4), "bflf"), (gen_square(4), "dflf")]:
        tr = run_trace(env, name)
        for t, rows in enumerate(tr.steps):
            pixels = [(i, j) for _, i, j, _ in rows]
            assert len(pixels) == len(set(pixels)), (name, t)
            assert all(p in env.free for p in pixels)


def test_robots_move_at_most_one_pixel_per_step():
    tr = run_trace(gen_maze(9, 7, 40, 1, seed=7), "bflf")
    prev = {}
    for rows in tr.steps:
        cur = {rid: (i, j) for rid, i, j, _ in rows}
        for rid, p in cur.items():
            if rid in prev:
                q = prev[rid]
                assert abs(p[0] - q[0]) + abs(p[1] - q[1]) <= 1
        assert all(rid in cur for rid in prev)  # robots never disappear
        prev = cur


def test_visitation_is_monotone():
    tr = run_trace(parse_map("D....\n....#\n....#\n..###"), "bflf")
    seen = set()
    for occ in replay(tr):
        assert seen <= (seen | set(occ))
        seen |= set(occ)
    assert seen == set(tr.env.free)  # the run fills the region


# ---------- run control ----------


def test_run_fills_then_halts():
    world = World(gen_square(3), get_strategy("bflf"))
    world.run()
    assert world.halted and not world.timed_out
    assert world.fill_time is not None and world.halt_time is not None
    assert world.fill_time <= world.halt_time
    occ_final = {r.pos for r in world.robots.values()}
    assert occ_final == set(world.env.free)


def test_step_budget_times_out():
    world = World(gen_square(8), get_strategy("dflf"))
    world.run(max_steps=5)
    assert world.timed_out and not world.halted
    assert world.fill_time is None
    assert world.t == 5


def test_stepping_after_halt_is_refused():
    world = World(gen_corridor(2), get_strategy("dflf"))
    world.run()
    with pytest.raises(RuntimeError):
        world.step()


# ---------- determinism ----------


@pytest.mark.parametrize(
    "env,name",
    [
        (gen_square(4), "bflf"),
        (gen_maze(9, 7, 40, 2, seed=3), "lflf"),
        (gen_corridor(8), "dflf"),
    ],
)
def test_repeated_runs_are_byte_identical(env, name):
    assert dumps(run_trace(env, name)) == dumps(run_trace(env, name))


def test_masked_views_change_nothing():
    env = gen_maze(9, 7, 40, 1, seed=1)
    plain = dumps(run_trace(env, "bflf"))
    for seed in (0, 1, 99):
        masked = dumps(run_trace(env, "bflf", masked=True, mask_seed=seed))
        assert masked == plain

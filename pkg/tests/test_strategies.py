"""Behavior of the three dispersion strategies, pinned on small fixtures."""
from __future__ import annotations

import pytest

from swarmfill.grid import (
    gen_corridor,
    gen_hard_family,
    gen_maze,
    gen_square,
    parse_map,
)
from swarmfill.kernel import World
from swarmfill.strategies import STRATEGIES, get_strategy
from swarmfill.trace import dumps, from_world, payload


def run_trace(env, name):
    world = World(env, get_strategy(name))
    world.run()
    return from_world(world)


def first_appearances(tr):
    first = {}
    for t in range(len(tr.steps)):
        for rid, _, _, _ in tr.steps[t]:
            first.setdefault(rid, t)
    return first


def test_registry_contents():
    assert sorted(STRATEGIES) == ["bflf", "dflf", "lflf"]
    assert get_strategy("dflf").sensor_radius == 2
    assert get_strategy("bflf").sensor_radius == 3
    assert get_strategy("lflf").sensor_radius == 3
    with pytest.raises(ValueError):
        get_strategy("nope")


# ---------- depth-first chain ----------


@pytest.mark.parametrize("area", range(1, 13))
def test_dflf_corridor_halts_at_twice_area_minus_one(area):
    tr = run_trace(gen_corridor(area), "dflf")
    assert tr.halt_time == 2 * area - 1
    final = set(tr.positions(tr.last_t))
    assert final == set(tr.env.free)


def test_dflf_first_leader_snakes_the_square():
    # the pioneer walks every pixel of the 3x3 before settling; the weave
    # near the door comes from later robots already standing on its trail
    tr = run_trace(gen_square(3), "dflf")
    path = []
    for t in range(len(tr.steps)):
        for rid, i, j, _ in tr.steps[t]:
            if rid == 0 and (not path or path[-1] != (i, j)):
                path.append((i, j))
    assert path == [
        (0, 0), (0, 1), (1, 1), (1, 0), (2, 0),
        (2, 1), (2, 2), (1, 2), (0, 2),
    ]
    assert tr.halt_time == 17  # 2*9 - 1


def test_dflf_lead_passes_backward():
    tr = run_trace(gen_corridor(3), "dflf")
    assert tr.positions(2)[(2, 0)][1] == "leader"
    # one step after the pioneer settles, the robot behind it carries the lead
    assert tr.positions(3)[(2, 0)][1] == "stopped"
    assert tr.positions(3)[(1, 0)][1] == "leader"


def test_dflf_population_equals_area():
    for env in (gen_corridor(6), gen_square(4), gen_maze(9, 7, 40, 1, seed=2)):
        tr = run_trace(env, "dflf")
        assert len(first_appearances(tr)) == env.area
        assert all(role == "stopped" for _, role in tr.positions(tr.last_t).values())


# ---------- branching chain ----------


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_bflf_fills_squares_within_the_chain_bound(n):
    tr = run_trace(gen_square(n), "bflf")
    area = n * n
    assert tr.fill_time is not None
    assert tr.fill_time <= tr.halt_time <= 2 * area - 1
    assert set(tr.positions(tr.last_t)) == set(tr.env.free)


def test_bflf_tree_depth_tracks_side_not_area():
    assert_depth = {4: 7, 6: 11}
    from swarmfill.metrics import compute_metrics

    for n, depth in assert_depth.items():
        rec = compute_metrics(run_trace(gen_square(n), "bflf"))
        assert rec.tree_depth == depth


def test_bflf_door_emits_every_step_or_next():
    tr = run_trace(gen_square(4), "bflf")
    spawns = sorted(set(first_appearances(tr).values()))
    assert spawns == [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 16]
    for t in range(tr.fill_time):
        assert t in spawns or (t + 1) in spawns


def test_bflf_beats_the_snake_on_squares():
    # branching pays off: same region, earlier fill than the single chain
    n = 6
    chain = run_trace(gen_square(n), "dflf")
    branch = run_trace(gen_square(n), "bflf")
    assert branch.fill_time < chain.fill_time


def test_bflf_settled_robots_never_move_again():
    tr = run_trace(gen_maze(9, 7, 40, 1, seed=5), "bflf")
    settled = {}
    for t in range(len(tr.steps)):
        for rid, i, j, role in tr.steps[t]:
            if rid in settled:
                assert settled[rid] == (i, j), f"robot {rid} moved after stopping"
            if role == "stopped":
                settled.setdefault(rid, (i, j))


# ---------- flow network ----------


@pytest.mark.parametrize(
    "env",
    [gen_corridor(5), gen_square(4), gen_maze(9, 7, 40, 1, seed=0)],
    ids=["corridor5", "square4", "maze0"],
)
def test_lflf_single_door_reduces_to_the_chain(env):
    a = payload(dumps(run_trace(env, "dflf")))
    b = payload(dumps(run_trace(env, "lflf")))
    assert a == b


def test_lflf_leader_count_tracks_active_doors():
    world = World(parse_map("D.D"), get_strategy("lflf"))
    world.run()
    tr = from_world(world)
    leaders = [
        sum(1 for _, _, _, role in tr.steps[t] if role == "leader")
        for t in range(len(tr.steps))
    ]
    assert leaders == [2, 2, 1, 0]
    assert world.active_door_series == [2, 2, 1, 0]


def test_lflf_two_doors_fill_faster_than_one():
    one = run_trace(gen_corridor(9), "dflf")
    two = run_trace(parse_map("D.......D"), "lflf")
    assert two.fill_time < one.fill_time


def test_lflf_splice_event_on_the_two_tooth_comb():
    # the two flows meet behind the wall; the shorter one grafts itself onto
    # the longer and hands over its cut-off tail
    tr = run_trace(gen_hard_family(2), "lflf")
    assert len(tr.splices) == 1
    s = tr.splices[0]
    assert (s.t, s.tip, s.target, s.cut) == (8, (0, 1), (1, 1), (1, 2))


def test_lflf_fills_every_multi_door_fixture():
    for seed in range(4):
        env = gen_maze(9, 7, 40, 2, seed=seed)
        tr = run_trace(env, "lflf")
        assert tr.fill_time is not None, f"seed {seed}"
        assert set(tr.positions(tr.last_t)) == set(env.free)

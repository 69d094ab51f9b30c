"""Breadth-leaning dispersal: branching probes throttled by a motion rule.

The visited region grows as a tree rooted at the door.  Any robot beside an
unvisited pixel nobody else is heading for claims it and probes deeper.  A
robot leaving a pixel hands the robot behind it a branch assignment: the
next live child of that pixel, rotating clockwise from its own exit, so
successive arrivals fan out over the subtrees.  Movement is throttled so
the incoming chain never tears: a robot advances only while its parent
pixel is occupied or someone is heading there.  A probe with nothing left
to do stops once a live robot has pulled up next to it; the door robot
never settles while anyone else is live, and halts once it stands alone.
"""
from __future__ import annotations

from typing import Optional, Tuple

from ..grid import CLOCKWISE, DELTA, OPPOSITE, PRIORITY, Direction
from ..kernel import Action, LocalView, Message, MessageKind, OwnState, Role, StateUpdate

PARKED = StateUpdate(role=Role.STOPPED, heading=None, tailing=None, pending=None, waiting=False)


def _cw_from(d: Direction) -> Tuple[Direction, Direction, Direction]:
    a = CLOCKWISE[d]
    b = CLOCKWISE[a]
    return (a, b, CLOCKWISE[b])


class BranchingChainStrategy:
    name = "bflf"
    sensor_radius = 3
    comm_radius = 3
    uses_flow_links = False
    tell_relay = True
    # a branch assignment can go stale in flight (its pixel claimed by some
    # other trail); a dead one must evaporate rather than aim my heading at
    # a pixel I will never enter, which would desync the chain behind me
    pending_revalidate = True
    max_doors: Optional[int] = 1
    # the slice of a robot's memory this decision rule actually reads; the
    # role label is trace bookkeeping here, never branched on
    state_fields = ("heading", "tailing", "waiting")

    def decide(self, view: LocalView) -> Action:
        me = view.me

        # targets are picked on landing somewhere new; a held robot keeps
        # aiming at the same pixel, and a live claim on an unvisited pixel
        # is a choice already made, so the heading others read stays true
        held = me.waiting and me.heading is not None
        claiming = me.heading is not None and view.frontier(DELTA[me.heading])
        if not held and not claiming:
            for d in PRIORITY:
                if view.frontier(DELTA[d]) and not self._claimed(view, DELTA[d]):
                    return self._advance(view, me, d)

        heading = me.heading
        if heading is not None:
            off = DELTA[heading]
            if view.frontier(off) and not self._provably_lost(view, heading):
                # contested claims settle by the approach-side rule; a loss
                # I cannot prove from here re-aims once the pixel reads
                # visited, one step after the winner lands
                return self._advance(view, me, heading)
            if (
                view.in_region(off)
                and view.tree_parent(off) == OPPOSITE[heading]
                and ((nb := view.robot(off)) is None or self._working(nb))
            ):
                return self._advance(view, me, heading)
            # route dead: wall, settled robot, lost claim race, or a pixel
            # some other trail owns; take my pixel's next live branch instead
            for d in _cw_from(heading):
                if self._live_child(view, d):
                    return self._redirect(view, me, d)

        if me.tailing is None and view.is_door((0, 0)):
            if not any(i.role is not Role.STOPPED for _, i in view.iter_robots()):
                return Action(halt=True, if_stay=PARKED)
            # the source feeds whichever branch still takes robots
            for d in PRIORITY:
                if self._live_child(view, d):
                    return self._redirect(view, me, d)
            return Action(if_stay=StateUpdate(role=Role.LEADER, heading=None, pending=None, waiting=True))

        parent = DELTA[me.tailing] if me.tailing is not None else None
        for roff, info in view.iter_robots():
            if info.role is Role.STOPPED or abs(roff[0]) + abs(roff[1]) > 2:
                continue
            target = None
            if info.heading is not None:
                target = (roff[0] + DELTA[info.heading][0], roff[1] + DELTA[info.heading][1])
            if roff == parent or target == (0, 0) or (parent is not None and target == parent):
                return Action(if_stay=PARKED)  # the follower caught up: this pixel is done
        return Action(if_stay=StateUpdate(role=Role.LEADER, heading=None, pending=None, waiting=True))

    # -- pieces --

    def _redirect(self, view: LocalView, me: OwnState, d: Direction) -> Action:
        """Swing the heading onto a new branch.

        Turning onto an unvisited pixel goes immediately; nobody downstream
        depends on it.  Turning onto a trail pixel is published for one step
        before moving, so a robot timing its move off my heading never finds
        me somewhere I was not pointing.
        """
        if view.frontier(DELTA[d]):
            return self._advance(view, me, d)
        return Action(if_stay=StateUpdate(role=Role.FOLLOWER, heading=d, waiting=True))

    @staticmethod
    def _claimed(view: LocalView, off: Tuple[int, int]) -> bool:
        for roff, info in view.iter_robots():
            if info.role is Role.STOPPED or info.heading is None:
                continue
            if (roff[0] + DELTA[info.heading][0], roff[1] + DELTA[info.heading][1]) == off:
                return True
        return False

    def _provably_lost(self, view: LocalView, heading: Direction) -> bool:
        """Will a rival visibly take my claimed pixel this very step?

        A rival aimed at the same pixel from a higher-priority side wins the
        tie, but only if it actually moves now.  Its throttle is decidable
        from here: both of us stand beside the contested pixel, so its
        parent is within my sensing range, and any robot heading for that
        parent is adjacent to it.  When the proof falls together I treat the
        pixel as gone and re-aim a step early; when it does not, I hold my
        claim and let the tie play out.
        """
        tgt = DELTA[heading]
        mine = int(OPPOSITE[heading])
        for roff, o in view.iter_robots():
            if o.role is Role.STOPPED or o.heading is None:
                continue
            ooff = DELTA[o.heading]
            if (roff[0] + ooff[0], roff[1] + ooff[1]) != tgt:
                continue
            if int(OPPOSITE[o.heading]) >= mine:
                continue
            if o.tailing is None:
                return True
            oparent = (roff[0] + DELTA[o.tailing][0], roff[1] + DELTA[o.tailing][1])
            if view.occupied(oparent):
                return True
            for woff, w in view.iter_robots():
                if w.role is Role.STOPPED or w.heading is None or woff == roff:
                    continue
                if (woff[0] + DELTA[w.heading][0], woff[1] + DELTA[w.heading][1]) == oparent:
                    return True
        return False

    @staticmethod
    def _working(nb) -> bool:
        """A robot with no heading has nowhere left to send anyone: it is
        only waiting out the stop protocol.  Routes through it are dead."""
        return nb.role is not Role.STOPPED and nb.heading is not None

    def _live_child(self, view: LocalView, d: Direction) -> bool:
        """Does the pixel one step over still take robots from this one?"""
        off = DELTA[d]
        if view.frontier(off):
            return not self._claimed(view, off)
        if not view.in_region(off) or view.tree_parent(off) != OPPOSITE[d]:
            return False
        nb = view.robot(off)
        return nb is None or self._working(nb)

    def _motion_ok(self, view: LocalView, me: OwnState) -> bool:
        """Advance only while the chain behind stays taut."""
        if me.tailing is None:
            return True
        parent = DELTA[me.tailing]
        if view.occupied(parent):
            return True
        for roff, info in view.iter_robots():
            if info.role is Role.STOPPED or info.heading is None:
                continue
            if (roff[0] + DELTA[info.heading][0], roff[1] + DELTA[info.heading][1]) == parent:
                return True
        return False

    def _advance(self, view: LocalView, me: OwnState, d: Direction) -> Action:
        role = Role.LEADER if view.frontier(DELTA[d]) else Role.FOLLOWER
        hold = StateUpdate(role=role, heading=d, waiting=True)
        if view.occupied(DELTA[d]) or not self._motion_ok(view, me):
            return Action(if_stay=hold)
        return Action(
            move=d,
            if_move=StateUpdate(
                role=role,
                heading=self._predict_from(view, d),
                tailing=OPPOSITE[d],
                waiting=False,
            ),
            if_stay=hold,
            msgs_move=(Message(MessageKind.TELL, OPPOSITE[d], payload=self._hand_out(view, d)),),
        )

    def _predict_from(self, view: LocalView, d: Direction) -> Optional[Direction]:
        """Heading to publish while crossing into the next pixel.

        The chain behind reads headings to time its own moves, so a robot
        in motion must show where it goes next, not where it has been.
        Everything one step past the landing pixel is still in view.  When
        nothing past the landing pixel is live the published heading is
        empty, which tells the chain this branch takes no more robots.
        """
        base = DELTA[d]
        for dd in PRIORITY:
            n = (base[0] + DELTA[dd][0], base[1] + DELTA[dd][1])
            if view.frontier(n) and not self._claimed(view, n):
                return dd
        for dd in (d,) + _cw_from(d):
            n = (base[0] + DELTA[dd][0], base[1] + DELTA[dd][1])
            if not view.in_region(n) or view.tree_parent(n) != OPPOSITE[dd]:
                continue
            nb = view.robot(n)
            if nb is None or self._working(nb):
                return dd
        return None

    def _hand_out(self, view: LocalView, outgoing: Direction) -> Direction:
        """Branch assignment for whoever takes my pixel next.

        Predict what that robot will do on its own: claim the first open
        frontier here (mine excepted), else take the next live branch over.
        A wrong guess shows a false heading to the chain behind it.
        """
        out = DELTA[outgoing]
        for d in PRIORITY:
            off = DELTA[d]
            if off != out and view.frontier(off) and not self._claimed(view, off):
                return d
        for d in _cw_from(outgoing):
            if self._live_child(view, d):
                return d
        return outgoing

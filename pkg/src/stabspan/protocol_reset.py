"""Cooperative reset: freeze the network, wipe, restart at a clean build.

Any node whose local view fails the shared consistency predicate freezes; the
freeze floods outward carrying a hop distance.  A front that chases its own
tail around a cycle (which arbitrary initial wave states can seed) inflates
the distance until it hits the cap and dies; a front started by a fresh
trigger has distance 0 and always covers the whole graph first.  A node whose
neighborhood is fully frozen wipes its mutable blocks to the canonical blank
and turns CLEAN; once its neighbors have all wiped or receded it returns to
NONE, and ordinary rules resume behind a fully quiet neighborhood.  Epochs tag
wave generations (initiators bump, joiners copy) and never gate a transition.
"""

from __future__ import annotations

from .consistency import DEFAULT_ALPHA, locally_consistent
from .kernel import LocalView, Rule
from .state import P_RESET, RW_CLEAN, RW_FREEZE, RW_NONE, NodeState, blank_state


def g_trigger(alpha: float):
    def guard(view: LocalView) -> bool:
        return (view.st.r_wave == RW_NONE and view.quiet
                and locally_consistent(view, alpha) is not None)
    return guard


def a_trigger(view: LocalView) -> NodeState:
    return view.st.replace(r_wave=RW_FREEZE, r_epoch=(view.st.r_epoch + 1) % 4,
                           r_dist=0, phase=P_RESET)


def _freeze_source(view: LocalView) -> int | None:
    best = None
    for u in view.env.adj_ids[view.id]:
        su = view.nbr[u]
        if su.r_wave == RW_FREEZE and su.r_dist < view.env.n:
            k = (su.r_dist, u)
            if best is None or k < best:
                best = k
    return None if best is None else best[1]


def g_join(view: LocalView) -> bool:
    return view.st.r_wave == RW_NONE and _freeze_source(view) is not None


def a_join(view: LocalView) -> NodeState:
    u = view.nbr[_freeze_source(view)]
    return view.st.replace(r_wave=RW_FREEZE, r_epoch=u.r_epoch,
                           r_dist=u.r_dist + 1, phase=P_RESET)


def g_clean(view: LocalView) -> bool:
    st = view.st
    if st.r_wave != RW_FREEZE:
        return False
    at_cap = st.r_dist >= view.env.n
    for u in view.env.adj_ids[view.id]:
        w = view.nbr[u].r_wave
        if w == RW_NONE and not at_cap:
            return False  # that neighbor still has to join this front
        if w == RW_NONE and at_cap:
            continue  # a dying front cannot recruit; wipe without it
        if w not in (RW_FREEZE, RW_CLEAN):
            return False
    return True


def a_clean(view: LocalView) -> NodeState:
    st = blank_state(view.env, view.id)
    st.r_wave = RW_CLEAN
    st.r_epoch = view.st.r_epoch
    return st


def g_recede(view: LocalView) -> bool:
    if view.st.r_wave != RW_CLEAN:
        return False
    return all(view.nbr[u].r_wave in (RW_CLEAN, RW_NONE)
               for u in view.env.adj_ids[view.id])


def a_recede(view: LocalView) -> NodeState:
    return view.st.replace(r_wave=RW_NONE)


def reset_rules(alpha: float = DEFAULT_ALPHA) -> list[Rule]:
    """Dominant recovery rules; declared ahead of every other protocol."""
    return [
        Rule("reset_trigger", g_trigger(alpha), a_trigger, None),
        Rule("reset_join", g_join, a_join, None),
        Rule("reset_clean", g_clean, a_clean, None),
        Rule("reset_recede", g_recede, a_recede, None),
    ]

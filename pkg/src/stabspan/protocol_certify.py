"""Distributed construction of the certificate labels on the augmented tree.

Zones are the recursion's working units: a zone at depth d is a maximal set of
tree-connected nodes agreeing on their first d subtree numbers, none of them
already a center.  Each zone drags its working root to a centroid (the 5-step
transfer realized as a designate/adopt/acknowledge handshake), hands out
subtree numbers one announced pair at a time, floods each numbered subtree
with (number, running max weight, orientation code) plus feedback, and then
recurses inside each subtree.  A node whose zone shrank to itself records its
own center level and leaves the phase.
"""

from __future__ import annotations

from .consistency import cert_children, cert_ready, center_served, zone_prefix_eq
from .kernel import LocalView, Rule
from .state import (CW_BCAST, CW_FBACK, CW_IDLE, NodeState, O_CHILD, O_PARENT,
                    O_SELF, P_CERTIFY, P_DONE, RW_NONE)


def _settled_root(view: LocalView) -> bool:
    st = view.st
    return (st.c_wparent == 0 and st.c_xfer == 0 and st.c_annid == 0
            and st.c_wave == CW_IDLE and not st.is_center)


def _heaviest_child(view: LocalView):
    best = None
    for u in cert_children(view):
        k = (-view.nbr[u].c_wdesc, u)
        if best is None or k < best:
            best = k
    return None if best is None else best[1]


def g_designate(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and _settled_root(view) and cert_ready(view)):
        return False
    w = _heaviest_child(view)
    return w is not None and 2 * view.nbr[w].c_wdesc > st.c_wdesc


def a_designate(view: LocalView) -> NodeState:
    st = view.st
    w = _heaviest_child(view)
    return st.replace(c_xfer=w, c_wparent=w,
                      c_wdesc=st.c_wdesc - view.nbr[w].c_wdesc)


def g_adopt_root(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.is_center or st.c_wave != CW_IDLE or st.c_wparent == 0:
        return False
    v = view.nbr.get(st.c_wparent)
    if v is None or v.r_wave != RW_NONE or v.phase != P_CERTIFY:
        return False
    return (v.c_xfer == view.id and v.c_wparent == view.id
            and len(v.c_levels) == len(st.c_levels)
            and zone_prefix_eq(v.c_levels, st.c_levels, len(st.c_levels)))


def a_adopt_root(view: LocalView) -> NodeState:
    st = view.st
    v = view.nbr[st.c_wparent]
    # A transfer marker of our own necessarily predates this adoption.
    return st.replace(c_wparent=0, c_wdesc=v.c_wdesc + st.c_wdesc, c_xfer=0)


def g_ack_transfer(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.c_xfer == 0:
        return False
    w = view.nbr.get(st.c_xfer)
    return (w is not None and w.r_wave == RW_NONE and w.phase == P_CERTIFY
            and w.c_wparent != view.id)


def a_ack_transfer(view: LocalView) -> NodeState:
    return view.st.replace(c_xfer=0)


def g_become_center(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and _settled_root(view) and cert_ready(view)):
        return False
    w = _heaviest_child(view)
    return w is None or 2 * view.nbr[w].c_wdesc <= st.c_wdesc


def a_become_center(view: LocalView) -> NodeState:
    st = view.st
    return st.replace(c_levels=st.c_levels + ((1, 0, O_SELF, 0),))


def g_announce(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and st.phase == P_CERTIFY and st.is_center):
        return False
    served, unserved = center_served(view)
    if st.c_annid:
        target = view.nbr.get(st.c_annid)
        if target is not None and len(target.c_levels) <= len(st.c_levels) - 1:
            return False  # announced pair not yet confirmed
        return True  # confirmed: advance or clear
    return bool(unserved)


def a_announce(view: LocalView) -> NodeState:
    st = view.st
    served, unserved = center_served(view)
    if not unserved:
        return st.replace(c_annid=0, c_annnum=0)
    pick = min(unserved, key=lambda u: (-view.nbr[u].c_wdesc, u))
    return st.replace(c_annid=pick, c_annnum=1 + len(served))


def g_confirm_number(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.is_center or st.c_wave != CW_IDLE or st.c_wparent == 0:
        return False
    c = view.nbr.get(st.c_wparent)
    if c is None or c.r_wave != RW_NONE or c.phase != P_CERTIFY:
        return False
    return (c.is_center and c.center_level == len(st.c_levels)
            and c.c_annid == view.id
            and zone_prefix_eq(c.c_levels, st.c_levels, len(st.c_levels)))


def a_confirm_number(view: LocalView) -> NodeState:
    st = view.st
    c = view.nbr[st.c_wparent]
    code = O_PARENT if st.c_wparent == st.a_orient else O_CHILD
    rec = (c.c_annnum, view.env.widx[(view.id, st.c_wparent)], code, 1)
    return st.replace(c_levels=st.c_levels + (rec,), c_wave=CW_BCAST)


def g_wave_push(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.is_center or st.c_wave != CW_IDLE or st.c_wparent == 0:
        return False
    y = view.nbr.get(st.c_wparent)
    if y is None or y.r_wave != RW_NONE or y.phase not in (P_CERTIFY, P_DONE):
        return False
    mylen = len(st.c_levels)
    if len(y.c_levels) < mylen + 1:
        return False
    if y.is_center and y.center_level == mylen:
        return False  # that push arrives through the announcement instead
    return zone_prefix_eq(y.c_levels, st.c_levels, mylen) \
        and not (y.is_center and y.center_level < mylen)


def a_wave_push(view: LocalView) -> NodeState:
    st = view.st
    y = view.nbr[st.c_wparent]
    mylen = len(st.c_levels)
    num, maxw, _, dmod = y.c_levels[mylen]
    rec = (num, max(maxw, view.env.widx[(view.id, st.c_wparent)]),
           O_PARENT if st.c_wparent == st.a_orient else O_CHILD,
           (dmod + 1) % 4)
    return st.replace(c_levels=st.c_levels + (rec,), c_wave=CW_BCAST)


def g_wave_feedback(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.c_wave != CW_BCAST:
        return False
    if not cert_ready(view):
        return False  # a neighbor yet to enter the phase may join this subtree
    ell = len(st.c_levels) - 1
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase != P_CERTIFY:
            continue
        if su.c_wparent != view.id or su.is_center:
            continue
        if not zone_prefix_eq(su.c_levels, st.c_levels, ell):
            continue
        if len(su.c_levels) <= ell:
            return False  # child has not pushed this level yet
        if su.c_levels[ell][0] == st.c_levels[ell][0] and su.c_wave != CW_FBACK:
            return False
    return True


def a_wave_feedback(view: LocalView) -> NodeState:
    return view.st.replace(c_wave=CW_FBACK)


def g_recurse_root(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.c_wave != CW_FBACK or st.c_wparent == 0:
        return False
    c = view.nbr.get(st.c_wparent)
    return (c is not None and c.r_wave == RW_NONE
            and c.phase in (P_CERTIFY, P_DONE) and c.is_center
            and c.center_level == len(st.c_levels) - 1)


def a_recurse_root(view: LocalView) -> NodeState:
    return view.st.replace(c_wparent=0, c_wave=CW_IDLE)


def g_recurse_flow(view: LocalView) -> bool:
    # The parent has collected this node's feedback once it is itself in
    # feedback, or once it moved anywhere past this level (a longer stack
    # presupposes the whole subtree finished here, whatever its wave state).
    st = view.st
    if not view.quiet or st.c_wave != CW_FBACK or st.c_wparent == 0:
        return False
    y = view.nbr.get(st.c_wparent)
    if y is None or y.r_wave != RW_NONE or y.phase not in (P_CERTIFY, P_DONE):
        return False
    return (y.c_wave == CW_FBACK
            or len(y.c_levels) > len(st.c_levels)
            or (y.c_wave == CW_IDLE and len(y.c_levels) == len(st.c_levels)))


def a_recurse_flow(view: LocalView) -> NodeState:
    return view.st.replace(c_wave=CW_IDLE)


def g_enter_done(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and st.is_center and st.c_annid == 0 and st.c_xfer == 0
            and st.c_wave == CW_IDLE):
        return False
    _, unserved = center_served(view)
    return not unserved


def a_enter_done(view: LocalView) -> NodeState:
    return view.st.replace(phase=P_DONE)


def certify_rules(ms=None, alpha: float | None = None) -> list[Rule]:
    """Ordered certification rules.

    ms rides on the configuration's environment; alpha is accepted for
    interface symmetry with the memory cap, which the shared consistency
    predicate enforces.
    """
    return [
        Rule("migrate_designate", g_designate, a_designate, P_CERTIFY),
        Rule("migrate_adopt", g_adopt_root, a_adopt_root, P_CERTIFY),
        Rule("migrate_ack", g_ack_transfer, a_ack_transfer, P_CERTIFY),
        Rule("become_center", g_become_center, a_become_center, P_CERTIFY),
        Rule("announce_pair", g_announce, a_announce, P_CERTIFY),
        Rule("confirm_number", g_confirm_number, a_confirm_number, P_CERTIFY),
        Rule("wave_push", g_wave_push, a_wave_push, P_CERTIFY),
        Rule("wave_feedback", g_wave_feedback, a_wave_feedback, P_CERTIFY),
        Rule("recurse_root", g_recurse_root, a_recurse_root, P_CERTIFY),
        Rule("recurse_flow", g_recurse_flow, a_recurse_flow, P_CERTIFY),
        Rule("enter_done", g_enter_done, a_enter_done, P_CERTIFY),
    ]

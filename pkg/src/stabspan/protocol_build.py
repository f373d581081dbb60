"""Construction rules: backbone, token-coordinated Kruskal, augmentation.

The backbone is a first-contact spanning tree of the minimum-identifier node:
a node re-parents only when it strictly improves its root identifier, so once
a node carries the true minimum its parent freezes, the root's subtree only
grows, and the subtree-size convergecast at the root is sound: count == n
certifies a frozen spanning backbone before the token ever moves.

The token itself is a depth-first wave over the frozen backbone, encoded in
(active, tour-parity) flags; there is no token variable that corruption could
simply erase.  The tour repeats per milestone class until a full pass adds no
edge, then moves to the next class; the component-size convergecast retires
the whole phase once the selected forest spans.
"""

from __future__ import annotations

from .consistency import best_add_candidate, token_at
from .kernel import LocalView, Rule
from .state import (CW_IDLE, NodeState, P_AUGMENT, P_BUILD, P_CERTIFY,
                    RN_DONE, RN_IDLE, RN_WAIT, RW_NONE)


def _quiet_build(view: LocalView, u: int) -> NodeState | None:
    su = view.nbr[u]
    if su.r_wave == RW_NONE and su.phase == P_BUILD:
        return su
    return None


# -- backbone ---------------------------------------------------------------

def _best_offer(view: LocalView):
    """Strictly better (root, neighbor) adoption offer, if any."""
    st = view.st
    best = None
    for u in view.env.adj_ids[view.id]:
        su = _quiet_build(view, u)
        if su is None or su.b_root >= st.b_root or su.b_dist + 1 >= view.env.n:
            continue
        k = (su.b_root, u)
        if best is None or k < best:
            best = k
    return best


def g_adopt(view: LocalView) -> bool:
    return view.quiet and _best_offer(view) is not None


def a_adopt(view: LocalView) -> NodeState:
    # Adoption happens strictly before the root wakes the token, when every
    # tour flag is still at its blank value; stay there so the first tour
    # reads this node as unvisited.  Counters restart in the new root's
    # frame: stale values from the old frame would over-count upstream.
    root, u = _best_offer(view)
    su = view.nbr[u]
    return view.st.replace(
        b_root=root, b_parent=u, b_dist=su.b_dist + 1,
        b_dfs_done=True, b_tflag=0, b_next=0,
        b_count=1, b_ccount=1 if view.st.b_comp == root else 0,
    )


def _count_target(view: LocalView) -> int:
    st = view.st
    total = 1
    for u in view.env.adj_ids[view.id]:
        su = _quiet_build(view, u)
        if su is not None and su.b_parent == view.id and su.b_root == st.b_root:
            total += su.b_count
    return total


def g_count(view: LocalView) -> bool:
    if not view.quiet:
        return False
    t = _count_target(view)
    return t <= view.env.n and t != view.st.b_count


def a_count(view: LocalView) -> NodeState:
    return view.st.replace(b_count=_count_target(view))


def _ccount_target(view: LocalView) -> int:
    st = view.st
    total = 1 if st.b_comp == st.b_root else 0
    for u in view.env.adj_ids[view.id]:
        su = _quiet_build(view, u)
        if su is not None and su.b_parent == view.id and su.b_root == st.b_root:
            total += su.b_ccount
    return total


def g_ccount(view: LocalView) -> bool:
    if not view.quiet:
        return False
    t = _ccount_target(view)
    return t <= view.env.n and t != view.st.b_ccount


def a_ccount(view: LocalView) -> NodeState:
    return view.st.replace(b_ccount=_ccount_target(view))


def _is_backbone_root(view: LocalView) -> bool:
    return view.st.b_parent == 0 and view.st.b_root == view.id


def g_root_wake(view: LocalView) -> bool:
    st = view.st
    return (view.quiet and _is_backbone_root(view) and st.b_dfs_done
            and st.b_count == view.env.n and st.b_ccount < view.env.n)


def a_root_wake(view: LocalView) -> NodeState:
    # First tour: flip parity so every blank node reads as unvisited.
    return view.st.replace(b_dfs_done=False, b_tflag=1 - view.st.b_tflag,
                           b_next=0, b_added=False)


# -- token work: edge additions and the renaming wave ------------------------

def g_work_add(view: LocalView) -> bool:
    st = view.st
    return (view.quiet and not st.b_busy and st.b_rens == RN_IDLE
            and not st.b_dfs_done and token_at(view)
            and best_add_candidate(view) is not None)


def a_work_add(view: LocalView) -> NodeState:
    st = view.st
    u = best_add_candidate(view)
    su = view.nbr[u]
    changes = dict(
        b_bits=st.b_bits | (1 << view.env.pos[view.id][u]),
        b_addreq=u, b_busy=True,
    )
    if su.b_comp < st.b_comp and su.b_compd + 1 < view.env.n:
        changes.update(b_comp=su.b_comp, b_compp=u, b_compd=su.b_compd + 1,
                       b_renp=u, b_rens=RN_WAIT)
    return st.replace(**changes)


def _accept_source(view: LocalView) -> int | None:
    for u in view.env.adj_ids[view.id]:
        su = _quiet_build(view, u)
        if su is not None and su.b_addreq == view.id \
                and view.nbr_bit(u) and not view.bit(u):
            return u
    return None


def g_accept(view: LocalView) -> bool:
    return view.quiet and _accept_source(view) is not None


def a_accept(view: LocalView) -> NodeState:
    st = view.st
    v = _accept_source(view)
    sv = view.nbr[v]
    changes = dict(b_bits=st.b_bits | (1 << view.env.pos[view.id][v]))
    if sv.b_comp < st.b_comp and sv.b_compd + 1 < view.env.n:
        changes.update(b_comp=sv.b_comp, b_compp=v, b_compd=sv.b_compd + 1,
                       b_renp=v, b_rens=RN_WAIT)
    return st.replace(**changes)


def _rename_source(view: LocalView):
    st = view.st
    best = None
    for u in view.tree_nbrs():
        su = _quiet_build(view, u)
        if su is not None and su.b_comp < st.b_comp and su.b_compd + 1 < view.env.n:
            k = (su.b_comp, u)
            if best is None or k < best:
                best = k
    return best


def g_rename_join(view: LocalView) -> bool:
    return view.quiet and _rename_source(view) is not None


def a_rename_join(view: LocalView) -> NodeState:
    comp, u = _rename_source(view)
    return view.st.replace(b_comp=comp, b_compp=u, b_compd=view.nbr[u].b_compd + 1,
                           b_renp=u, b_rens=RN_WAIT)


def g_rename_done(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.b_rens != RN_WAIT:
        return False
    for z in view.tree_nbrs():
        if z == st.b_renp:
            continue
        sz = view.nbr[z]
        if sz.b_comp != st.b_comp or sz.b_rens == RN_WAIT:
            return False
    return True


def a_rename_done(view: LocalView) -> NodeState:
    return view.st.replace(b_rens=RN_DONE)


def g_finalize(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and st.b_busy and st.b_addreq):
        return False
    su = _quiet_build(view, st.b_addreq)
    if su is None or not view.nbr_bit(st.b_addreq) or su.b_comp != st.b_comp:
        return False
    if st.b_rens == RN_WAIT or su.b_rens == RN_WAIT:
        return False
    return st.b_rens == RN_DONE or su.b_rens == RN_DONE


def a_finalize(view: LocalView) -> NodeState:
    return view.st.replace(b_busy=False, b_addreq=0, b_added=True)


def g_rename_clean(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.b_rens != RN_DONE or st.b_busy or st.b_renp == 0:
        return False
    sp = _quiet_build(view, st.b_renp)
    return (sp is not None and sp.b_rens == RN_IDLE
            and sp.b_comp == st.b_comp and sp.b_addreq != view.id)


def a_rename_clean(view: LocalView) -> NodeState:
    return view.st.replace(b_rens=RN_IDLE, b_renp=0)


# -- token movement: depth-first wave over the frozen backbone ---------------

def _children(view: LocalView):
    me = view.id
    for u in view.env.adj_ids[me]:
        su = view.nbr[u]
        if su.phase == P_BUILD and su.r_wave == RW_NONE and su.b_parent == me:
            yield u, su


def _next_unserved_child(view: LocalView) -> int | None:
    st = view.st
    for u, su in _children(view):
        if not (su.b_dfs_done and su.b_tflag == st.b_tflag):
            return u
    return None


def g_set_next(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and not st.b_dfs_done and not st.b_busy
            and st.b_rens == RN_IDLE and token_at(view)):
        return False
    if best_add_candidate(view) is not None:
        return False
    want = _next_unserved_child(view)
    return want is not None and st.b_next != want


def a_set_next(view: LocalView) -> NodeState:
    return view.st.replace(b_next=_next_unserved_child(view))


def g_activate(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.b_parent == 0:
        return False
    p = _quiet_build(view, st.b_parent)
    if p is None or p.b_dfs_done or p.b_next != view.id:
        return False
    return st.b_tflag != p.b_tflag  # stale only: never rerun a finished visit


def a_activate(view: LocalView) -> NodeState:
    p = view.nbr[view.st.b_parent]
    return view.st.replace(
        b_dfs_done=False, b_tflag=p.b_tflag, b_pidx=p.b_pidx,
        b_added=False, b_added_sub=False, b_next=0,
    )


def _tour_finished_here(view: LocalView) -> bool:
    st = view.st
    if st.b_dfs_done or st.b_busy or st.b_rens != RN_IDLE:
        return False
    if not token_at(view):
        return False
    if best_add_candidate(view) is not None:
        return False
    return _next_unserved_child(view) is None


def g_node_done(view: LocalView) -> bool:
    return (view.quiet and view.st.b_parent != 0 and _tour_finished_here(view))


def a_node_done(view: LocalView) -> NodeState:
    st = view.st
    added = st.b_added
    for _, su in _children(view):
        added = added or su.b_added_sub
    return st.replace(b_dfs_done=True, b_added_sub=added, b_next=0)


def g_tour_end(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and _is_backbone_root(view) and st.b_ccount < view.env.n
            and _tour_finished_here(view)):
        return False
    added = st.b_added or any(su.b_added_sub for _, su in _children(view))
    return added or st.b_pidx + 1 < view.env.num_ms


def a_tour_end(view: LocalView) -> NodeState:
    st = view.st
    added = st.b_added or any(su.b_added_sub for _, su in _children(view))
    changes = dict(b_tflag=1 - st.b_tflag, b_added=False, b_next=0)
    if not added:
        changes["b_pidx"] = st.b_pidx + 1
    return st.replace(**changes)


def g_retire(view: LocalView) -> bool:
    st = view.st
    if not (view.quiet and _is_backbone_root(view) and st.b_ccount == view.env.n
            and not st.b_busy and st.b_rens == RN_IDLE):
        return False
    # Normally the token must be home; a single node never spawned one.
    return token_at(view) or (st.b_dfs_done and st.b_count == view.env.n)


def a_retire(view: LocalView) -> NodeState:
    return view.st.replace(phase=P_AUGMENT, a_orient=0, a_depth=0, a_desc=0, a_total=0)


# -- augmentation: orientation, descendant counts, totals --------------------

def _augment_parent(view: LocalView) -> int | None:
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave == RW_NONE and su.phase == P_AUGMENT:
            return u
    return None


def g_enter_augment(view: LocalView) -> bool:
    return view.quiet and _augment_parent(view) is not None


def a_enter_augment(view: LocalView) -> NodeState:
    u = _augment_parent(view)
    return view.st.replace(phase=P_AUGMENT, a_orient=u,
                           a_depth=view.nbr[u].a_depth + 1, a_desc=0, a_total=0)


def g_desc_set(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.a_desc != 0:
        return False
    for u in view.tree_nbrs():
        if u == st.a_orient:
            continue
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase < P_AUGMENT or su.a_desc == 0:
            return False
    return True


def a_desc_set(view: LocalView) -> NodeState:
    st = view.st
    total = 1 + sum(view.nbr[u].a_desc for u in view.tree_nbrs() if u != st.a_orient)
    return st.replace(a_desc=total)


def g_total_set(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.a_total != 0 or st.a_desc == 0:
        return False
    if st.a_orient == 0:
        return True
    p = view.nbr[st.a_orient]
    return p.r_wave == RW_NONE and p.phase >= P_AUGMENT and p.a_total != 0


def a_total_set(view: LocalView) -> NodeState:
    st = view.st
    total = st.a_desc if st.a_orient == 0 else view.nbr[st.a_orient].a_total
    return st.replace(a_total=total)


def g_enter_certify(view: LocalView) -> bool:
    st = view.st
    if not view.quiet or st.a_total == 0 or st.a_desc == 0:
        return False
    if st.a_orient == 0:
        return True
    p = view.nbr[st.a_orient]
    return p.r_wave == RW_NONE and p.phase >= P_CERTIFY


def a_enter_certify(view: LocalView) -> NodeState:
    st = view.st
    return st.replace(phase=P_CERTIFY, c_wparent=st.a_orient, c_wdesc=st.a_desc,
                      c_wave=CW_IDLE, c_xfer=0, c_annid=0, c_annnum=0, c_levels=())


def build_rules(ms=None) -> list[Rule]:
    """Ordered construction rules; all weight logic reads milestone indices.

    ms is carried by the configuration's environment; the parameter documents
    the dependency and lets callers assert a matching codec.
    """
    return [
        Rule("enter_augment", g_enter_augment, a_enter_augment, P_BUILD),
        Rule("retire_build", g_retire, a_retire, P_BUILD),
        Rule("root_wake", g_root_wake, a_root_wake, P_BUILD),
        Rule("adopt_root", g_adopt, a_adopt, P_BUILD),
        Rule("count_sync", g_count, a_count, P_BUILD),
        Rule("ccount_sync", g_ccount, a_ccount, P_BUILD),
        Rule("add_accept", g_accept, a_accept, P_BUILD),
        Rule("rename_join", g_rename_join, a_rename_join, P_BUILD),
        Rule("rename_done", g_rename_done, a_rename_done, P_BUILD),
        Rule("finalize_add", g_finalize, a_finalize, P_BUILD),
        Rule("rename_clean", g_rename_clean, a_rename_clean, P_BUILD),
        Rule("work_add", g_work_add, a_work_add, P_BUILD),
        Rule("set_next_child", g_set_next, a_set_next, P_BUILD),
        Rule("child_activate", g_activate, a_activate, P_BUILD),
        Rule("node_done", g_node_done, a_node_done, P_BUILD),
        Rule("tour_end", g_tour_end, a_tour_end, P_BUILD),
        Rule("desc_set", g_desc_set, a_desc_set, P_AUGMENT),
        Rule("total_set", g_total_set, a_total_set, P_AUGMENT),
        Rule("enter_certify", g_enter_certify, a_enter_certify, P_AUGMENT),
    ]

"""The one locally_consistent predicate shared by every protocol module.

Returns a reason string when a node's local view is something no clean-start
execution can produce, None otherwise.  The reset trigger fires exactly on
these reasons (plus the memory cap), so every check here must be provably
unreachable from a clean start under any scheduler; the convergence fleet is
the empirical audit of that claim.

Checks only read quiet neighbors (reset wave NONE); nodes mid-wipe carry
meaningless values.
"""

from __future__ import annotations

from .certificate import CertificateLabel, LevelRecord, verify_node
from .kernel import LocalView
from .state import (CW_FBACK, CW_IDLE, NodeState, O_SELF, P_AUGMENT, P_BUILD,
                    P_CERTIFY, P_DONE, P_RESET, RN_IDLE, RW_NONE,
                    serialized_bits)

# Frozen after measuring peak serialized bits over clean and corrupted runs:
# the acceptance fleet (n in [8, 32], every valid-k regime) peaks at
# peak/(ceil(log2 n) * s) = 39.5, but the cap must also never fire on the
# tiniest legal networks, where the fixed field frame (~90 bits at n = 2) is
# charged against a budget of ceil(log2 n) * s = 1 bit.  One constant covers
# both with headroom.  See tests/test_acceptance.py criterion 9.
DEFAULT_ALPHA = 100


def best_add_candidate(view: LocalView) -> int | None:
    """Lightest addable edge at this node for the current token class.

    Addable: unselected on both sides, transformed class equals the token's
    current class, and the endpoints live in different components.  Choice is
    by (neighbor component, neighbor id).
    """
    if view._cand != -1:
        return view._cand
    st = view.st
    env = view.env
    best = None
    key = None
    for u in env.adj_ids[view.id]:
        su = view.nbr[u]
        if su.phase != P_BUILD or su.r_wave != RW_NONE:
            continue
        if su.b_comp == st.b_comp:
            continue
        if env.widx[(view.id, u)] != st.b_pidx:
            continue
        if view.bit(u) or view.nbr_bit(u):
            continue
        k = (su.b_comp, u)
        if key is None or k < key:
            key, best = k, u
    view._cand = best
    return best


def token_at(view: LocalView) -> bool:
    """The virtual token sits at an active-current node with no active-current child."""
    st = view.st
    if st.b_dfs_done:
        return False
    if st.b_parent:
        p = view.nbr.get(st.b_parent)
        if p is None or p.phase != P_BUILD or p.b_tflag != st.b_tflag:
            return False
    elif st.b_root != view.id:
        return False
    for u in view.env.adj_ids[view.id]:
        su = view.nbr[u]
        if su.b_parent == view.id and su.phase == P_BUILD \
                and not su.b_dfs_done and su.b_tflag == st.b_tflag:
            return False
    return True


def label_of(st: NodeState) -> CertificateLabel:
    return CertificateLabel(
        orient_parent=st.a_orient, desc_count=st.a_desc, total_n=st.a_total,
        levels=tuple(LevelRecord(*r) for r in st.c_levels))


def zone_prefix_eq(a: tuple, b: tuple, upto: int) -> bool:
    """Subtree numbers agree on levels [0, upto)."""
    if len(a) < upto or len(b) < upto:
        return False
    return all(a[i][0] == b[i][0] for i in range(upto))


def cert_ready(view: LocalView) -> bool:
    """All tree neighbors have entered certification (quiet ones only count)."""
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase < P_CERTIFY:
            return False
    return True


def cert_children(view: LocalView) -> list[int]:
    """Same-zone working children at this node's current level."""
    st = view.st
    mylen = len(st.c_levels)
    out = []
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase != P_CERTIFY:
            continue
        if su.c_wparent != view.id or su.is_center:
            continue
        if len(su.c_levels) != mylen:
            continue
        if zone_prefix_eq(su.c_levels, st.c_levels, mylen):
            out.append(u)
    return out


def center_served(view: LocalView) -> tuple[list[int], list[int]]:
    """(served, unserved) subtree roots around a settled center.

    Served roots already copied their announced number (a record exists at the
    center's level); unserved ones still sit at the center's level awaiting
    their pair.  Served roots may have recursed, so working parents no longer
    identify them; the stack prefix does.
    """
    st = view.st
    lc = len(st.c_levels) - 1
    served, unserved = [], []
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase not in (P_CERTIFY, P_DONE):
            continue
        if not zone_prefix_eq(su.c_levels, st.c_levels, lc):
            continue
        if len(su.c_levels) > lc:
            served.append(u)
        elif su.phase == P_CERTIFY and su.c_wparent == view.id \
                and not su.is_center and len(su.c_levels) == lc:
            unserved.append(u)
    return served, unserved


def _check_build(view: LocalView) -> str | None:
    st, env, me = view.st, view.env, view.id
    n = env.n
    if not 1 <= st.b_root <= me:
        return "backbone: root id out of range"
    if st.b_parent == 0:
        if st.b_root != me or st.b_dist != 0:
            return "backbone: rootless node without self claim"
    else:
        p = view.nbr.get(st.b_parent)
        if p is None:
            return "backbone: parent is not a neighbor"
        if p.r_wave == RW_NONE and p.phase == P_BUILD:
            if st.b_root < p.b_root:
                return "backbone: root below parent's"
            if st.b_root == p.b_root and st.b_dist != p.b_dist + 1:
                return "backbone: distance breaks parent chain"
        if st.b_dist >= n:
            return "backbone: distance overflow"
    if not 1 <= st.b_count <= n or st.b_ccount > n:
        return "backbone: counter out of range"
    total = 1
    for u in env.adj_ids[me]:
        su = view.nbr[u]
        if su.r_wave == RW_NONE and su.phase == P_BUILD \
                and su.b_parent == me and su.b_root == st.b_root:
            total += su.b_count
    if total > n:
        return "backbone: subtree counts exceed n"
    if not 1 <= st.b_comp <= me:
        return "kruskal: component name out of range"
    if st.b_comp == me:
        if st.b_compp != 0 or st.b_compd != 0:
            return "kruskal: self-named component with a support chain"
    else:
        if st.b_compp == 0 or st.b_compp not in view.nbr:
            return "kruskal: component name without support"
        if st.b_compd >= n:
            return "kruskal: support chain too long"
        both_bits = view.bit(st.b_compp) and view.nbr_bit(st.b_compp)
        if not both_bits and not (st.b_busy and st.b_addreq == st.b_compp
                                  and view.bit(st.b_compp)):
            return "kruskal: support chain off the selected tree"
        sp = view.nbr[st.b_compp]
        if sp.r_wave == RW_NONE and sp.phase == P_BUILD:
            if sp.b_comp > st.b_comp:
                return "kruskal: support source renamed upward"
            if sp.b_comp == st.b_comp and st.b_compd != sp.b_compd + 1:
                return "kruskal: support chain depth breaks"
    if st.b_pidx >= env.num_ms:
        return "kruskal: token class out of range"
    if st.b_busy and st.b_addreq == 0:
        return "kruskal: busy without a pending addition"
    if st.b_addreq:
        if not st.b_busy or st.b_addreq not in view.nbr:
            return "kruskal: stray addition request"
        if not view.bit(st.b_addreq):
            return "kruskal: addition request without own edge bit"
        u = view.nbr[st.b_addreq]
        if u.r_wave == RW_NONE and u.phase == P_BUILD and view.nbr_bit(st.b_addreq) \
                and u.b_comp == st.b_comp and st.b_rens == RN_IDLE and u.b_rens == RN_IDLE:
            # Neither side ever renamed: the merged edge joined equal components.
            return "kruskal: addition handshake with equal components"
    if st.b_rens != RN_IDLE:
        if st.b_renp == 0 or st.b_renp not in view.nbr:
            return "kruskal: rename wave without a source"
        if not (view.bit(st.b_renp) and view.nbr_bit(st.b_renp)) \
                and not (st.b_busy and st.b_addreq == st.b_renp
                         and view.bit(st.b_renp)):
            return "kruskal: rename source is not a tree neighbor"
    if not st.b_dfs_done:
        if st.b_parent:
            p = view.nbr[st.b_parent]
            if p.r_wave == RW_NONE and not (p.phase == P_BUILD and not p.b_dfs_done
                                            and p.b_tflag == st.b_tflag):
                return "token: active node with inactive parent"
    if st.b_next:
        c = view.nbr.get(st.b_next)
        if c is None or (c.r_wave == RW_NONE and c.phase == P_BUILD and c.b_parent != me):
            return "token: descend pointer at a non-child"
    # Edge-bit symmetry, modulo an addition handshake in flight.
    for u in env.adj_ids[me]:
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase == P_RESET:
            continue
        mine, theirs = view.bit(u), view.nbr_bit(u)
        if mine and not theirs and st.b_addreq != u:
            return "kruskal: asymmetric selection bits"
        if theirs and not mine and not (su.phase == P_BUILD and su.b_addreq == me):
            return "kruskal: asymmetric selection bits"
    return None


def _check_augment(view: LocalView) -> str | None:
    st, env, me = view.st, view.env, view.id
    n = env.n
    if st.a_desc > n:
        return "augment: descendant count overflow"
    if st.a_total and st.a_total != n:
        return "augment: wrong total"
    if st.a_depth >= n:
        return "augment: orientation depth overflow"
    if st.a_orient:
        if st.a_orient not in view.nbr:
            return "augment: orientation parent is not a neighbor"
        if not (view.bit(st.a_orient) and view.nbr_bit(st.a_orient)):
            return "augment: orientation off the selected tree"
        p = view.nbr[st.a_orient]
        if p.r_wave == RW_NONE and p.phase != P_RESET:
            if p.phase < P_AUGMENT:
                return "augment: oriented toward a node still building"
            if st.a_depth != p.a_depth + 1:
                return "augment: orientation depth breaks the chain"
            if st.a_total and p.phase in (P_AUGMENT, P_CERTIFY, P_DONE) \
                    and p.a_total and p.a_total != st.a_total:
                return "augment: total disagrees with parent"
            if st.a_total and p.a_total == 0:
                return "augment: total ahead of parent"
    else:
        if st.a_depth != 0:
            return "augment: root with nonzero depth"
        if st.a_desc and st.a_desc != n:
            return "augment: root without full tree"
    for u in view.tree_nbrs():
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase < P_AUGMENT:
            continue
        if u != st.a_orient and su.a_orient != me:
            return "augment: unclaimed selected edge"
    if st.a_desc:
        s = 1
        for u in env.adj_ids[me]:
            su = view.nbr[u]
            if su.r_wave != RW_NONE or su.phase == P_RESET:
                continue
            if u == st.a_orient or not (view.bit(u) and view.nbr_bit(u)):
                continue
            if su.phase < P_AUGMENT or su.a_desc == 0:
                return "augment: descendant count set before children"
            s += su.a_desc
        if s != st.a_desc:
            return "augment: descendant counts do not add up"
    return None


def _check_certify(view: LocalView) -> str | None:
    st, env, me = view.st, view.env, view.id
    n = env.n
    levels = st.c_levels
    if len(levels) > env.level_cap:
        return "certify: level stack over the balance bound"
    for i, (num, widx, orient, dmod) in enumerate(levels):
        if not 1 <= num <= n:
            return "certify: subtree number out of range"
        if not 0 <= widx < env.num_ms:
            return "certify: weight index out of range"
        if orient == O_SELF and (i != len(levels) - 1 or widx != 0 or dmod != 0):
            return "certify: malformed center record"
        if orient not in (0, 1, 2) or not 0 <= dmod < 4:
            return "certify: bad orientation or distance code"
    if st.a_total != n or st.a_desc == 0:
        return "certify: entered without an augmented tree"
    if not 1 <= st.c_wdesc <= n:
        return "certify: working size out of range"
    tree = view.tree_nbrs()
    if st.c_wparent and st.c_wparent not in tree:
        return "certify: working parent off the tree"
    if st.c_xfer:
        if st.c_xfer not in tree or st.c_wparent != st.c_xfer:
            return "certify: dangling root transfer"
    center = st.is_center
    if st.c_annid:
        if not center or st.c_annid not in tree or not 1 <= st.c_annnum <= n:
            return "certify: malformed announcement"
    if center and st.c_wave != CW_IDLE:
        return "certify: center with a live wave"
    if center and st.c_xfer:
        return "certify: center mid-transfer"
    if st.c_wave != CW_IDLE and not levels:
        return "certify: wave without a pushed record"
    if st.c_wave == CW_FBACK and st.c_wparent == 0:
        return "certify: feedback at a zone root"
    if st.c_wparent and not center:
        wp = view.nbr[st.c_wparent]
        if wp.r_wave == RW_NONE and wp.phase == P_CERTIFY \
                and wp.c_wparent == me and st.c_xfer != st.c_wparent \
                and wp.c_xfer != me:
            return "certify: mutual working parents"
    if st.c_wparent == 0 and not center and st.c_xfer == 0 \
            and st.c_annid == 0 and st.c_wave == CW_IDLE and cert_ready(view):
        kids = cert_children(view)
        if st.c_wdesc != 1 + sum(view.nbr[u].c_wdesc for u in kids):
            return "certify: zone size disagrees with its subtrees"
    # Eager cross-check between settled adjacent centers (cut rule only).
    if center:
        for u in env.adj_ids[me]:
            su = view.nbr[u]
            if su.r_wave != RW_NONE or su.phase not in (P_CERTIFY, P_DONE):
                continue
            if not su.is_center or u in tree:
                continue
            cl_me, cl_u = len(levels) - 1, len(su.c_levels) - 1
            sep = None
            for i in range(min(cl_me, cl_u) + 1):
                if i == cl_me or i == cl_u or su.c_levels[i][0] != levels[i][0]:
                    sep = i
                    break
            if sep is not None and sep < len(levels) and sep < len(su.c_levels):
                if env.widx[(me, u)] < max(levels[sep][1], su.c_levels[sep][1]):
                    return "certify: adjacent centers expose a lighter crossing edge"
    return None


def _check_done(view: LocalView) -> str | None:
    st, env, me = view.st, view.env, view.id
    if not st.is_center or st.c_annid or st.c_xfer or st.c_wave != CW_IDLE:
        return "done: entered without a finished certificate"
    present = set()
    nbr_labels = {}
    for u in env.adj_ids[me]:
        su = view.nbr[u]
        nbr_labels[u] = label_of(su)
        if su.r_wave == RW_NONE and su.phase == P_DONE:
            present.add(u)
    bad = verify_node(me, label_of(st), nbr_labels, {u: env.widx[(me, u)] for u in nbr_labels},
                      env.n, env.num_ms, present=present)
    if bad:
        return f"verify: {bad[0]}"
    for u in sorted(present):
        su = view.nbr[u]
        on_tree = view.bit(u) and view.nbr_bit(u)
        oriented = st.a_orient == u or su.a_orient == me
        if on_tree != oriented:
            return "done: selected edges disagree with the orientation"
    return None


def locally_consistent(view: LocalView, alpha: float = DEFAULT_ALPHA) -> str | None:
    """Reason the local view is corrupt, or None if it could be a clean state."""
    st = view.st
    env = view.env
    if st.r_wave != RW_NONE:
        return None  # mid-reset states are the reset protocol's business
    if st.phase == P_RESET:
        return "phase: reset flag without a reset wave"
    if not P_BUILD <= st.phase <= P_DONE:
        return "phase: unknown phase"
    my_stage = st.phase
    for u in env.adj_ids[view.id]:
        su = view.nbr[u]
        if su.r_wave != RW_NONE or su.phase == P_RESET:
            continue
        lo, hi = min(my_stage, su.phase), max(my_stage, su.phase)
        if lo == P_BUILD and hi >= P_CERTIFY:
            return "phase: neighbor phases impossibly far apart"
    if serialized_bits(st, env, env.graph.degree(view.id)) > memory_cap(env.n, env.s, alpha):
        return "space: mutable state exceeds the memory cap"
    if st.phase == P_BUILD:
        return _check_build(view)
    if st.phase == P_AUGMENT:
        return _check_augment(view)
    if st.phase == P_CERTIFY:
        return _check_certify(view)
    return _check_done(view)


def _ceil_log2(n: int) -> int:
    if n <= 1:
        return 1
    return (n - 1).bit_length()


def memory_cap(n: int, s: int, alpha: float = DEFAULT_ALPHA) -> int:
    """The alpha * ceil(log2 n) * s bit budget a node's state may not exceed."""
    return int(alpha * _ceil_log2(n) * s)

"""Bounded exhaustive prover search for certificate soundness tests.

For a fixed spanning tree, an accepting labeling must orient exactly that
tree (anything else certifies a different tree), which forces the descendant
counts leaf-to-root; the adversary's freedom is the root choice and the level
records.  The search assigns one decomposition level at a time across all
still-uncentered nodes: per-level domains are small (a center mark or one
record), and the verifier's pairwise constraints prune as soon as their
participants are placed.  Any full assignment is reconstructed into labels
and confirmed against the real verifier, so the search can never report a
spurious acceptance; optimal trees in the test corpus double as the guard
against over-pruning.
"""

from __future__ import annotations

from stabspan.certificate import (CertificateLabel, LevelRecord, level_cap,
                                  verify_all)
from stabspan.graph import WeightedGraph
from stabspan.milestones import MilestoneSet, transform_index
from stabspan.state import O_CHILD, O_PARENT, O_SELF

SELF = None  # domain marker: the node centers at this level


def _orient_tree(g: WeightedGraph, tree, root):
    adj = {v: [] for v in g.nodes}
    for u, v in tree:
        adj[u].append(v)
        adj[v].append(u)
    parent = {root: 0}
    order = [root]
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                order.append(y)
                stack.append(y)
    desc = {v: 1 for v in g.nodes}
    for v in reversed(order):
        if parent[v]:
            desc[parent[v]] += desc[v]
    return parent, desc, order, adj


def accepting_labeling_exists(g: WeightedGraph, tree, ms: MilestoneSet,
                              node_budget: int = 50_000_000) -> bool:
    """True iff some width-capped labeling of `tree` makes every node accept."""
    num_ms = len(ms.milestones)
    cap = level_cap(g.n)
    n = g.n
    widx = {}
    for u, v, w in g.edges:
        widx[(u, v)] = widx[(v, u)] = transform_index(w, ms)
    tree_set = {tuple(sorted(e)) for e in tree}
    non_tree = [(u, v) for u, v, _ in g.edges if (u, v) not in tree_set]
    records = [(num, w, o, d)
               for num in range(1, n + 1)
               for w in range(num_ms)
               for o in (O_PARENT, O_CHILD)
               for d in range(4)]
    budget = [node_budget]

    for root in g.nodes:
        parent, desc, order, tadj = _orient_tree(g, tree, root)
        children = {v: [u for u in tadj[v] if parent[u] == v] for v in g.nodes}

        def level_ok_node(v, cur, alive) -> bool:
            """Checks firing once v and all its alive tree neighbors placed."""
            rv = cur[v]
            if rv is SELF:
                nums = [cur[u][0] for u in tadj[v]
                        if u in alive and cur[u] is not SELF]
                return len(nums) == len(set(nums))
            if sum(1 for u in tadj[v] if u in alive and cur[u] is SELF) >= 2:
                return False  # two same-level centers cannot share my zone
            claims = sum(1 for u in children[v] if u in alive
                         and (cur[u] is SELF or cur[u][2] == O_CHILD))
            if claims != (1 if rv[2] == O_CHILD else 0):
                return False  # the center sits below exactly one claimed child
            if rv[2] == O_CHILD:
                for u in children[v]:
                    if u not in alive:
                        continue
                    ru = cur[u]
                    if ru is SELF:
                        if rv[1] == widx[(v, u)] and rv[3] == 1:
                            break
                    elif ru[2] != O_PARENT and ru[0] == rv[0] \
                            and rv[1] == max(ru[1], widx[(v, u)]) \
                            and ru[3] == (rv[3] - 1) % 4:
                        break
                else:
                    return False
            return True

        def pair_ok(x, y, cur) -> bool:
            """Tree-edge constraints once both endpoints are placed."""
            rx, ry = cur[x], cur[y]
            w = widx[(x, y)]
            if rx is SELF and ry is SELF:
                return False  # one center per zone
            if rx is SELF or ry is SELF:
                c, o = (x, y) if rx is SELF else (y, x)
                ro = cur[o]
                points = (ro[2] == O_PARENT and parent[o] == c) or \
                         (ro[2] == O_CHILD and parent[c] == o)
                return points and ro[1] == w and ro[3] == 1
            if rx[0] != ry[0]:
                return False  # tree neighbors stay in one zone
            x_to_y = ((rx[2] == O_PARENT and parent[x] == y)
                      or (rx[2] == O_CHILD and parent[y] == x)) \
                and rx[1] == max(ry[1], w) and ry[3] == (rx[3] - 1) % 4
            y_to_x = ((ry[2] == O_PARENT and parent[y] == x)
                      or (ry[2] == O_CHILD and parent[x] == y)) \
                and ry[1] == max(rx[1], w) and rx[3] == (ry[3] - 1) % 4
            if not x_to_y and not y_to_x:
                return False
            for r, a, b in ((rx, x, y), (ry, y, x)):
                if r[2] == O_PARENT and parent[a] == b:
                    rb = cur[b]
                    if rb is SELF:
                        if r[1] != w or r[3] != 1:
                            return False
                    elif r[1] != max(rb[1], w) or rb[3] != (r[3] - 1) % 4:
                        return False
            return True

        def cut_advance(x, y, cur, alive):
            """None = reject; True = separated now; False = still together."""
            rx, ry = cur[x], cur[y]
            w = widx[(x, y)]
            if rx is SELF and ry is SELF:
                return None
            if rx is SELF or ry is SELF:
                other = ry if rx is SELF else rx
                return True if w >= other[1] else None
            if rx[0] != ry[0]:
                return True if w >= max(rx[1], ry[1]) else None
            return False

        def unary_ok(v, r, alive) -> bool:
            if r is SELF:
                return True
            if r[2] == O_PARENT:
                p = parent[v]
                if p == 0 or p not in alive:
                    return False  # upward code needs a live in-zone parent
            return True

        def solve(level, alive, sep, stacks):
            if budget[0] <= 0:
                raise RuntimeError("prover search budget exhausted")
            budget[0] -= 1
            if not alive:
                labels = {
                    v: CertificateLabel(
                        orient_parent=parent[v], desc_count=desc[v], total_n=n,
                        levels=tuple(LevelRecord(*r) if r is not SELF
                                     else LevelRecord(1, 0, O_SELF, 0)
                                     for r in stacks[v]))
                    for v in g.nodes
                }
                # The real verifier has the final word: the level encoding
                # may under-constrain, in which case the search just goes on.
                return not verify_all(labels, g, ms)
            if level >= cap:
                return False
            nodes = [v for v in order if v in alive]
            force_self = level == cap - 1
            cur = {}

            def place(i) -> bool:
                if budget[0] <= 0:
                    raise RuntimeError("prover search budget exhausted")
                if i == len(nodes):
                    new_sep = dict(sep)
                    for e in non_tree:
                        if sep[e]:
                            continue
                        x, y = e
                        if x not in alive or y not in alive:
                            continue
                        st = cut_advance(x, y, cur, alive)
                        if st is None:
                            return False
                        new_sep[e] = st
                    new_alive = {v for v in alive if cur[v] is not SELF}
                    new_stacks = {v: (stacks[v] + (cur[v],) if v in alive else stacks[v])
                                  for v in g.nodes}
                    return solve(level + 1, new_alive, new_sep, new_stacks)
                v = nodes[i]
                budget[0] -= 1
                domain = (SELF,) if force_self else (SELF,) + tuple(records)
                for r in domain:
                    if not unary_ok(v, r, alive):
                        continue
                    cur[v] = r
                    ok = True
                    for u in tadj[v]:
                        if u in alive and u in cur and not pair_ok(v, u, cur):
                            ok = False
                            break
                    if ok:
                        for x in [v] + [u for u in tadj[v] if u in alive]:
                            if x in cur and all(u in cur or u not in alive
                                                for u in tadj[x]):
                                if not level_ok_node(x, cur, alive):
                                    ok = False
                                    break
                    if ok and place(i + 1):
                        return True
                cur.pop(v, None)
                return False

            return place(0)

        if solve(0, set(g.nodes), {e: False for e in non_tree},
                 {v: () for v in g.nodes}):
            return True
    return False

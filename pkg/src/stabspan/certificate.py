"""Distributed proof of minimum spanning trees: labels, labeler, verifier.

A certificate has two parts.  The acyclicity part (parent pointer, descendant
count, total count) pins down a rooted spanning tree.  The recursive part
stores, per decomposition level, the node's subtree number under that level's
center, the maximum transformed weight on its tree path to the center, and a
2-bit direction code relative to the base orientation.  The verifier is purely
local: a node reads only its own label and its neighbors' labels.

Weights appear everywhere as milestone indices, never raw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .graph import WeightedGraph
from .milestones import MilestoneSet, transform_index
from .state import O_CHILD, O_PARENT, O_SELF, ORIENT_NAMES


@dataclass(frozen=True)
class LevelRecord:
    subtree_number: int
    maxw_index: int
    orient: int  # O_SELF | O_PARENT | O_CHILD
    dmod: int = 0  # distance to this level's center, modulo 4

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.subtree_number, self.maxw_index, self.orient, self.dmod)


@dataclass(frozen=True)
class CertificateLabel:
    orient_parent: int  # 0 = root
    desc_count: int
    total_n: int
    levels: tuple[LevelRecord, ...]

    @property
    def is_center_at(self) -> int | None:
        if self.levels and self.levels[-1].orient == O_SELF:
            return len(self.levels) - 1
        return None


def level_cap(n: int) -> int:
    """Balanced centers give at most floor(log2 n) + 1 stack records."""
    return (n.bit_length() - 1) + 1 if n > 1 else 1


def find_center(adj: Mapping[int, Iterable[int]], scope: set[int]) -> int:
    """Node of the subtree `scope` whose removal leaves pieces of size <= |scope|/2.

    Ties broken by smaller identifier.  adj is tree adjacency; only edges with
    both ends in scope count.
    """
    if not scope:
        raise ValueError("scope must be nonempty")
    best = None
    for v in sorted(scope):
        worst = 0
        seen = {v}
        for u in adj[v]:
            if u not in scope or u in seen:
                continue
            size = 0
            stack = [u]
            seen.add(u)
            while stack:
                x = stack.pop()
                size += 1
                for y in adj[x]:
                    if y in scope and y not in seen:
                        seen.add(y)
                        stack.append(y)
            worst = max(worst, size)
        if 2 * worst <= len(scope):
            best = v
            break  # sorted iteration: first qualifying id is the smallest
    if best is None:
        raise AssertionError("a centroid always exists")
    return best


def _orient_tree(nodes: Iterable[int], adj: Mapping[int, list[int]], root: int):
    """Parent map and descendant counts for the tree rooted at root."""
    parent = {root: 0}
    order = [root]
    stack = [root]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
                stack.append(u)
    desc = {v: 1 for v in parent}
    for v in reversed(order):
        if parent[v]:
            desc[parent[v]] += desc[v]
    return parent, desc


def reference_label(g: WeightedGraph, tree: Iterable[tuple[int, int]],
                    ms: MilestoneSet) -> dict[int, CertificateLabel]:
    """Centralized prover: label any spanning tree by recursive centroid split.

    The tree need not be minimal; completeness demands acceptance only when it
    is minimal under transformed weights.
    """
    edges = [tuple(sorted(e)) for e in tree]
    adj: dict[int, list[int]] = {v: [] for v in g.nodes}
    for u, v in edges:
        if not g.has_edge(u, v):
            raise ValueError(f"({u}, {v}) is not a graph edge")
        adj[u].append(v)
        adj[v].append(u)
    if len(edges) != g.n - 1:
        raise ValueError("not a spanning tree: wrong edge count")
    root = g.nodes[0]
    parent, desc = _orient_tree(g.nodes, adj, root)
    if len(parent) != g.n:
        raise ValueError("not a spanning tree: disconnected")
    for v in adj:
        adj[v].sort()

    levels: dict[int, list[LevelRecord]] = {v: [] for v in g.nodes}

    def widx(u: int, v: int) -> int:
        return transform_index(g.weight(u, v), ms)

    def label_zone(scope: set[int]) -> None:
        center = find_center(adj, scope)
        levels[center].append(LevelRecord(1, 0, O_SELF))
        comps: list[tuple[int, set[int]]] = []  # (attach node, members)
        for u in adj[center]:
            if u not in scope:
                continue
            members = {u}
            stack = [u]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in scope and y != center and y not in members:
                        members.add(y)
                        stack.append(y)
            comps.append((u, members))
        comps.sort(key=lambda c: (-len(c[1]), c[0]))
        for rank, (attach, members) in enumerate(comps, start=1):
            # Walk outward from the center, carrying the running max index
            # and the hop distance.
            hop = {attach: center}
            maxw = {attach: widx(attach, center)}
            dist = {attach: 1}
            stack = [attach]
            orderd = [attach]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in members and y not in hop:
                        hop[y] = x
                        maxw[y] = max(maxw[x], widx(y, x))
                        dist[y] = dist[x] + 1
                        stack.append(y)
                        orderd.append(y)
            for x in orderd:
                code = O_PARENT if hop[x] == parent[x] else O_CHILD
                levels[x].append(LevelRecord(rank, maxw[x], code, dist[x] % 4))
            label_zone(members)

    label_zone(set(g.nodes))
    return {
        v: CertificateLabel(orient_parent=parent[v], desc_count=desc[v],
                            total_n=g.n, levels=tuple(levels[v]))
        for v in g.nodes
    }


# ---------------------------------------------------------------------------
# Verification

def _center_level(levels: tuple[LevelRecord, ...]) -> int:
    return len(levels) - 1


def check_self(label: CertificateLabel, nbr_ids: Iterable[int], n: int,
               num_ms: int) -> list[str]:
    """Structural checks that need no neighbor labels."""
    bad = []
    lv = label.levels
    if not lv:
        bad.append("malformed: empty level stack")
        return bad
    if len(lv) > level_cap(n):
        bad.append(f"malformed: {len(lv)} levels exceeds cap {level_cap(n)}")
    for i, rec in enumerate(lv):
        if not 1 <= rec.subtree_number <= n:
            bad.append(f"malformed: level {i} subtree number {rec.subtree_number}")
        if not 0 <= rec.maxw_index < num_ms:
            bad.append(f"malformed: level {i} weight index {rec.maxw_index}")
        if rec.orient not in (O_SELF, O_PARENT, O_CHILD):
            bad.append(f"malformed: level {i} orientation {rec.orient}")
        if rec.orient == O_SELF and i != len(lv) - 1:
            bad.append(f"malformed: interior center record at level {i}")
        if not 0 <= rec.dmod < 4:
            bad.append(f"malformed: level {i} center distance {rec.dmod}")
    if lv[-1].orient != O_SELF:
        bad.append("malformed: stack does not end at own center level")
    elif lv[-1].maxw_index != 0 or lv[-1].dmod != 0:
        bad.append("malformed: center record carries weight or distance")
    if not 1 <= label.desc_count <= n:
        bad.append(f"acyclicity: descendant count {label.desc_count}")
    if label.total_n != n:
        bad.append(f"acyclicity: total {label.total_n} != n")
    if label.orient_parent == 0:
        if label.desc_count != label.total_n:
            bad.append("acyclicity: root without full descendant count")
    else:
        if label.orient_parent not in set(nbr_ids):
            bad.append("acyclicity: parent pointer is not a neighbor")
        if label.desc_count == label.total_n:
            bad.append("acyclicity: full count at a non-root")
    return bad


def verify_node(node_id: int, label: CertificateLabel,
                nbr_labels: Mapping[int, CertificateLabel],
                edge_widx: Mapping[int, int], n: int, num_ms: int,
                present: set[int] | None = None,
                complete: bool | None = None,
                nbr_ids: Iterable[int] | None = None) -> list[str]:
    """All local checks at one node; empty list means accept.

    `present` limits relational checks to those neighbor labels that are
    final; aggregate checks (descendant sums, child-direction existence) run
    only when every neighbor is present.  `complete` overrides that judgment
    and `nbr_ids` the neighbor set, for callers whose nbr_labels map is
    itself partial.  Tolerates arbitrary garbage.
    """
    all_ids = set(nbr_labels)
    if present is None:
        present = all_ids
    if complete is None:
        complete = present == all_ids

    bad = check_self(label, nbr_ids if nbr_ids is not None else all_ids, n, num_ms)
    if bad:
        return bad

    cl_me = _center_level(label.levels)
    parent = label.orient_parent
    children = [u for u in sorted(present)
                if nbr_labels[u].orient_parent == node_id]

    # Acyclicity: totals agree pairwise; descendant counts add up.
    for u in sorted(present):
        if nbr_labels[u].total_n != label.total_n:
            bad.append(f"acyclicity: total mismatch with {u}")
    if complete:
        s = 1 + sum(nbr_labels[u].desc_count for u in children)
        if s != label.desc_count:
            bad.append(f"acyclicity: descendant count {label.desc_count} != 1+children {s}")
        if parent and nbr_labels.get(parent) is not None:
            if nbr_labels[parent].desc_count <= label.desc_count:
                bad.append("acyclicity: parent descendant count not larger")

    def rec(u: int, i: int) -> LevelRecord | None:
        lu = nbr_labels[u].levels
        return lu[i] if i < len(lu) else None

    def tree_edge(u: int) -> bool:
        return u == parent or nbr_labels[u].orient_parent == node_id

    # Level prefixes along tree edges; a zone has a single center, and a
    # node sitting right next to its zone's center can only point at it:
    # their tree path is that one edge.
    center_nbr_at: dict[int, int] = {}
    for u in sorted(present):
        if not tree_edge(u):
            continue
        lu = nbr_labels[u].levels
        if not lu:
            continue  # neighbor malformation is its own rejection
        cl_u = len(lu) - 1
        sep = min(cl_me, cl_u)
        for i in range(sep):
            ru = rec(u, i)
            if ru is None or ru.subtree_number != label.levels[i].subtree_number:
                bad.append(f"levels: prefix break with {u} at level {i}")
                break
        else:
            if cl_me == cl_u and lu and lu[-1].orient == O_SELF:
                bad.append(f"levels: adjacent centers of level {cl_me} share a zone ({u})")
            elif cl_u < cl_me and lu[-1].orient == O_SELF:
                if cl_u in center_nbr_at:
                    bad.append(f"levels: two level-{cl_u} centers "
                               f"({center_nbr_at[cl_u]}, {u}) in one zone")
                center_nbr_at[cl_u] = u
                mine = label.levels[cl_u]
                points_at_u = (mine.orient == O_PARENT and parent == u) or \
                    (mine.orient == O_CHILD and nbr_labels[u].orient_parent == node_id)
                if not points_at_u or mine.maxw_index != edge_widx[u] or mine.dmod != 1:
                    bad.append(f"levels: neighbor {u} is this zone's center "
                               f"but level {cl_u} does not point at it")
            # While both endpoints stay non-centers they share a zone, and the
            # zone's center sits on exactly one side of this edge: somebody's
            # direction, running maximum, and center distance must point
            # straight across it.
            u_parent = nbr_labels[u].orient_parent
            for i in range(sep):
                mine, ru = label.levels[i], lu[i]
                me_to_u = ((mine.orient == O_PARENT and parent == u)
                           or (mine.orient == O_CHILD and u_parent == node_id)) \
                    and mine.maxw_index == max(ru.maxw_index, edge_widx[u]) \
                    and ru.dmod == (mine.dmod - 1) % 4
                u_to_me = ((ru.orient == O_PARENT and u_parent == node_id)
                           or (ru.orient == O_CHILD and parent == u)) \
                    and ru.maxw_index == max(mine.maxw_index, edge_widx[u]) \
                    and mine.dmod == (ru.dmod - 1) % 4
                if not me_to_u and not u_to_me:
                    bad.append(f"levels: edge to {u} faces away from every "
                               f"level-{i} center")
                    break

    # Direction codes resolve and the max-weight recursion holds.
    def dir_consistent(t: int, i: int) -> bool:
        rt = rec(t, i)
        if rt is None:
            return False
        lt = nbr_labels[t].levels
        cl_t = len(lt) - 1
        if cl_t < i:
            return False  # t stopped being a zone-mate earlier
        mine = label.levels[i]
        if cl_t == i:
            if lt[-1].orient != O_SELF:
                return False
            return mine.maxw_index == edge_widx[t] and mine.dmod == 1
        if rt.subtree_number != mine.subtree_number:
            return False
        if rt.dmod != (mine.dmod - 1) % 4:
            return False
        return mine.maxw_index == max(rt.maxw_index, edge_widx[t])

    for i in range(cl_me):
        mine = label.levels[i]
        if mine.orient == O_PARENT:
            if parent == 0:
                bad.append(f"levels: parent direction at level {i} but no parent")
            elif parent in present and not dir_consistent(parent, i):
                bad.append(f"levels: direction to parent inconsistent at level {i}")
        elif mine.orient == O_CHILD:
            if complete:
                ok = False
                for t in children:
                    rt = rec(t, i)
                    if rt is not None and rt.orient == O_PARENT:
                        continue  # that child points back toward me
                    if dir_consistent(t, i):
                        ok = True
                        break
                if not ok:
                    bad.append(f"levels: no consistent child direction at level {i}")
        # The center sits below exactly one child when my code says child,
        # and below none when it says parent: in-zone children marked
        # child-direction or centered at this level carry that claim.
        if complete:
            claims = 0
            for t in children:
                lt = nbr_labels[t].levels
                if not lt or len(lt) <= i:
                    continue  # left the zone at an earlier level
                cl_t = len(lt) - 1
                if (cl_t == i and lt[-1].orient == O_SELF) or \
                        (cl_t > i and lt[i].orient == O_CHILD):
                    claims += 1
            if claims != (1 if mine.orient == O_CHILD else 0):
                bad.append(f"levels: {claims} subtrees claim the level-{i} "
                           f"center under a {ORIENT_NAMES[mine.orient]} code")

    # Cut check on non-tree edges: a strictly lighter crossing edge refutes
    # minimality; equal weights tolerate alternative optima.
    for u in sorted(present):
        if tree_edge(u):
            continue
        lu = nbr_labels[u].levels
        if not lu:
            continue
        cl_u = len(lu) - 1
        sep = None
        for i in range(min(cl_me, cl_u) + 1):
            if i == cl_me or i == cl_u:
                sep = i
                break
            if lu[i].subtree_number != label.levels[i].subtree_number:
                sep = i
                break
        if sep is None:
            bad.append(f"cut: no separation level with {u}")
            continue
        if sep == cl_me and sep == cl_u:
            bad.append(f"cut: two centers of level {sep} share a zone ({u})")
            continue
        mw_me = label.levels[sep].maxw_index
        ru = rec(u, sep)
        mw_u = ru.maxw_index if ru is not None else 0
        if edge_widx[u] < max(mw_me, mw_u):
            bad.append(f"cut: edge to {u} lighter than tree path (level {sep})")

    # A center's in-zone tree neighbors head distinct subtrees.
    if complete and cl_me == len(label.levels) - 1:
        seen_nums: dict[int, int] = {}
        for u in sorted(all_ids):
            if not tree_edge(u):
                continue
            lu = nbr_labels[u].levels
            if len(lu) <= cl_me:
                continue
            if any(lu[i].subtree_number != label.levels[i].subtree_number
                   for i in range(cl_me)):
                continue
            num = lu[cl_me].subtree_number
            if num in seen_nums:
                bad.append(f"levels: children {seen_nums[num]} and {u} share subtree number {num}")
            seen_nums[num] = u
    return bad


def verify_all(labels: Mapping[int, CertificateLabel], g: WeightedGraph,
               ms: MilestoneSet) -> set[int]:
    """Apply verify_node everywhere; empty set means the proof certifies."""
    num_ms = len(ms.milestones)
    rejecting = set()
    for v in g.nodes:
        widx = {u: transform_index(w, ms) for u, w in g.adj[v]}
        nbrs = {u: labels[u] for u, _ in g.adj[v]}
        if verify_node(v, labels[v], nbrs, widx, g.n, num_ms):
            rejecting.add(v)
    return rejecting


# ---------------------------------------------------------------------------
# Dump format

def labels_to_json_obj(labels: Mapping[int, CertificateLabel], n: int, k: int) -> dict:
    return {
        "n": n,
        "k": k,
        "nodes": [
            {
                "id": v,
                "parent": lab.orient_parent,
                "desc": lab.desc_count,
                "total": lab.total_n,
                "levels": [
                    {"num": r.subtree_number, "maxw_index": r.maxw_index,
                     "orient": ORIENT_NAMES[r.orient], "dmod": r.dmod}
                    for r in lab.levels
                ],
            }
            for v, lab in sorted(labels.items())
        ],
    }


def labels_from_json_obj(obj: dict) -> tuple[dict[int, CertificateLabel], int, int]:
    names = {name: code for code, name in enumerate(ORIENT_NAMES)}
    labels = {}
    for rec in obj["nodes"]:
        labels[rec["id"]] = CertificateLabel(
            orient_parent=rec["parent"], desc_count=rec["desc"],
            total_n=rec["total"],
            levels=tuple(LevelRecord(r["num"], r["maxw_index"], names[r["orient"]],
                                     r.get("dmod", 0))
                         for r in rec["levels"]),
        )
    return labels, obj["n"], obj["k"]

"""Sequential ground truth: Kruskal, brute-force enumeration, tree checks.

Used by tests and the harness only; the distributed protocol never calls in
here.  Tie-breaking is fixed to (weight, min endpoint, max endpoint) so
fixtures stay reproducible even with equal weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator

from .graph import WeightedGraph

EdgeSet = tuple[tuple[int, int], ...]

BRUTE_FORCE_LIMIT = 9


class _DSU:
    def __init__(self, nodes: Iterable[int]):
        self.parent = {v: v for v in nodes}

    def find(self, v: int) -> int:
        p = self.parent
        while p[v] != v:
            p[v] = p[p[v]]
            v = p[v]
        return v

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class MstResult:
    edges: EdgeSet
    weight: int            # total under the weight function used to sort
    original_weight: int   # total under the graph's own weights


def kruskal(g: WeightedGraph, weight_fn: Callable[[int], int] | None = None) -> MstResult:
    """Minimum spanning tree under weight_fn(w), deterministic tie-break."""
    fn = weight_fn or (lambda w: w)
    order = sorted(g.edges, key=lambda e: (fn(e[2]), e[0], e[1]))
    dsu = _DSU(g.nodes)
    picked: list[tuple[int, int]] = []
    total = orig = 0
    for u, v, w in order:
        if dsu.union(u, v):
            picked.append((u, v))
            total += fn(w)
            orig += w
            if len(picked) == g.n - 1:
                break
    return MstResult(edges=tuple(sorted(picked)), weight=total, original_weight=orig)


def is_spanning_tree(g: WeightedGraph, es: Iterable[tuple[int, int]]) -> bool:
    """True iff es has n-1 graph edges forming a connected acyclic cover."""
    edges = [tuple(sorted(e)) for e in es]
    if len(set(edges)) != len(edges) or len(edges) != g.n - 1:
        return False
    if not all(g.has_edge(u, v) for u, v in edges):
        return False
    dsu = _DSU(g.nodes)
    for u, v in edges:
        if not dsu.union(u, v):
            return False
    root = dsu.find(g.nodes[0])
    return all(dsu.find(v) == root for v in g.nodes)


def spanning_trees(g: WeightedGraph) -> Iterator[EdgeSet]:
    """All spanning trees by explicit enumeration; desk-scale graphs only."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"enumeration limited to n <= {BRUTE_FORCE_LIMIT}, got n={g.n}")
    if g.n == 1:
        yield ()
        return
    pairs = [(u, v) for u, v, _ in g.edges]
    for combo in combinations(pairs, g.n - 1):
        if is_spanning_tree(g, combo):
            yield tuple(sorted(combo))


def tree_weight(g: WeightedGraph, es: Iterable[tuple[int, int]],
                weight_fn: Callable[[int], int] | None = None) -> int:
    fn = weight_fn or (lambda w: w)
    return sum(fn(g.weight(u, v)) for u, v in es)


def brute_force_mst_weight(g: WeightedGraph) -> int:
    """Minimum original weight over all spanning trees, by enumeration."""
    return min(tree_weight(g, t) for t in spanning_trees(g))

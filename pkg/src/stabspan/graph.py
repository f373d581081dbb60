"""Immutable weighted graphs, deterministic generators, and the text format.

Canonical text form: first line "n m", then one "u v w" line per edge with
u < v, sorted by (u, v).  Blank lines and '#' comments are ignored on parse.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class GraphFormatError(ValueError):
    """Raised on malformed graph text; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class WeightedGraph:
    """Connected undirected graph with integer weights, immutable after build."""

    n: int
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]  # (u, v, w) with u < v, sorted
    adj: Mapping[int, tuple[tuple[int, int], ...]] = field(repr=False)  # v -> ((nbr, w), ...)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def max_id(self) -> int:
        return self.nodes[-1]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self.adj[v])

    def weight(self, u: int, v: int) -> int:
        for x, w in self.adj[u]:
            if x == v:
                return w
        raise KeyError(f"no edge ({u}, {v})")

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return any(x == v for x, _ in self.adj[u])


def build_graph(n: int, edges: Iterable[tuple[int, int, int]],
                nodes: Iterable[int] | None = None,
                max_weight: int | None = None) -> WeightedGraph:
    """Validate and freeze a graph; raises ValueError on any invariant breach."""
    node_set = set(nodes) if nodes is not None else set(range(1, n + 1))
    if len(node_set) != n:
        raise ValueError(f"expected {n} distinct nodes, got {len(node_set)}")
    if any(v < 1 for v in node_set):
        raise ValueError("node identifiers must be positive")
    if any(v > n**3 for v in node_set):
        raise ValueError(f"node identifiers must be <= n^3 = {n**3}")
    cap = max_weight if max_weight is not None else n
    seen: set[tuple[int, int]] = set()
    canon = []
    for u, v, w in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if u not in node_set or v not in node_set:
            raise ValueError(f"edge ({u}, {v}) references unknown node")
        a, b = (u, v) if u < v else (v, u)
        if (a, b) in seen:
            raise ValueError(f"duplicate edge ({a}, {b})")
        if not 1 <= w <= max(cap, 1):
            raise ValueError(f"weight {w} of edge ({a}, {b}) outside [1, {max(cap, 1)}]")
        seen.add((a, b))
        canon.append((a, b, w))
    canon.sort()
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in sorted(node_set)}
    for u, v, w in canon:
        adj[u].append((v, w))
        adj[v].append((u, w))
    frozen = {v: tuple(sorted(nbrs)) for v, nbrs in adj.items()}
    g = WeightedGraph(n=n, nodes=tuple(sorted(node_set)), edges=tuple(canon), adj=frozen)
    if not is_connected(g):
        raise ValueError("graph is not connected")
    return g


def is_connected(g: WeightedGraph) -> bool:
    """Traversal from an arbitrary node reaches all n nodes."""
    if g.n == 0:
        return False
    start = g.nodes[0]
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u, _ in g.adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == g.n


KINDS = ("path", "star", "complete", "grid", "random_connected")
WEIGHT_DISTS = ("uniform_1_to_n", "all_equal", "distinct_shuffled")


def _weights_for(m: int, n: int, weight_dist: str, rng: random.Random) -> list[int]:
    if weight_dist == "all_equal":
        return [1] * m
    if weight_dist == "uniform_1_to_n":
        return [rng.randint(1, n) for _ in range(m)]
    if weight_dist == "distinct_shuffled":
        # A shuffled deck of 1..n, dealt cyclically; truly distinct when m <= n.
        deck = list(range(1, n + 1))
        rng.shuffle(deck)
        return [deck[i % n] for i in range(m)]
    raise ValueError(f"unknown weight_dist {weight_dist!r}")


def generate(kind: str, n: int, weight_dist: str = "uniform_1_to_n",
             seed: int = 0) -> WeightedGraph:
    """Deterministic graph generator; identifiers are 1..n."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(f"graphgen:{kind}:{n}:{weight_dist}:{seed}")
    pairs: list[tuple[int, int]] = []
    if kind == "path":
        pairs = [(i, i + 1) for i in range(1, n)]
    elif kind == "star":
        pairs = [(1, i) for i in range(2, n + 1)]
    elif kind == "complete":
        pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    elif kind == "grid":
        side = round(n**0.5)
        if side * side != n:
            raise ValueError(f"grid needs a perfect square, got n={n}")
        def at(r, c):
            return r * side + c + 1
        for r in range(side):
            for c in range(side):
                if c + 1 < side:
                    pairs.append((at(r, c), at(r, c + 1)))
                if r + 1 < side:
                    pairs.append((at(r, c), at(r + 1, c)))
    elif kind == "random_connected":
        # Random recursive tree plus a seeded number of extra edges.
        for v in range(2, n + 1):
            pairs.append((rng.randint(1, v - 1), v))
        extra = rng.randint(0, n) if n > 2 else 0
        have = set(pairs)
        tries = 0
        while extra > 0 and tries < 20 * n:
            tries += 1
            u = rng.randint(1, n)
            v = rng.randint(1, n)
            if u == v:
                continue
            a, b = min(u, v), max(u, v)
            if (a, b) in have:
                continue
            have.add((a, b))
            pairs.append((a, b))
            extra -= 1
    pairs = [(min(u, v), max(u, v)) for u, v in pairs]
    ws = _weights_for(len(pairs), n, weight_dist, rng)
    return build_graph(n, [(u, v, w) for (u, v), w in zip(pairs, ws)])


def parse_graph(text: str | bytes, max_weight: int | None = None) -> WeightedGraph:
    """Parse the text format, rejecting malformed or disconnected input."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise GraphFormatError("header must be 'n m'", lineno)
            try:
                header = (int(parts[0]), int(parts[1]))
            except ValueError:
                raise GraphFormatError("header must be two integers", lineno) from None
            if header[0] < 1:
                raise GraphFormatError("n must be positive", lineno)
            continue
        if len(parts) != 3:
            raise GraphFormatError("edge line must be 'u v w'", lineno)
        try:
            u, v, w = (int(p) for p in parts)
        except ValueError:
            raise GraphFormatError("edge line must be three integers", lineno) from None
        if u >= v:
            raise GraphFormatError("edges must satisfy u < v", lineno)
        edges.append((u, v, w))
    if header is None:
        raise GraphFormatError("empty input: missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise GraphFormatError(f"header promised {m} edges, found {len(edges)}")
    node_ids = sorted({x for u, v, _ in edges for x in (u, v)})
    if len(node_ids) < n:
        # Isolated nodes can only occur for n == 1 with no edges.
        if n == 1 and not edges:
            return build_graph(1, [], nodes=[1])
        raise GraphFormatError("graph is not connected: nodes missing from edge list")
    try:
        return build_graph(n, edges, nodes=node_ids, max_weight=max_weight)
    except ValueError as e:
        raise GraphFormatError(str(e)) from None


def write_graph(g: WeightedGraph) -> str:
    """Canonical text form; parse(write(g)) == g."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"

"""Node state schema, bit-exact accounting, and configurations.

Every mutable field has a declared width so a state serializes to a canonical
bit string.  Transformed weights appear only as milestone indices (s bits);
raw weights stay in non-mutable memory (the graph itself).
"""

from __future__ import annotations

import random
from typing import Iterator, Mapping

from .graph import WeightedGraph
from .milestones import MilestoneSet, code_length, transform_index

# Phases (3 bits charged):
P_RESET, P_BUILD, P_AUGMENT, P_CERTIFY, P_DONE = range(5)
PHASE_NAMES = ("RESET", "BUILD", "AUGMENT", "CERTIFY", "DONE")

# Reset wave:
RW_NONE, RW_FREEZE, RW_CLEAN = range(3)

# Rename wave (component renaming after an edge addition):
RN_IDLE, RN_WAIT, RN_DONE = range(3)

# Certification wave:
CW_IDLE, CW_BCAST, CW_FBACK = range(3)

# Orientation codes in certificate level records:
O_SELF, O_PARENT, O_CHILD = range(3)
ORIENT_NAMES = ("self", "parent", "child")

_FIELDS = (
    "phase",
    "r_wave", "r_epoch", "r_dist",
    "b_root", "b_parent", "b_dist", "b_count", "b_ccount",
    "b_dfs_done", "b_tflag", "b_next", "b_pidx",
    "b_added", "b_added_sub", "b_busy", "b_addreq",
    "b_comp", "b_compp", "b_compd", "b_renp", "b_rens", "b_bits",
    "a_orient", "a_depth", "a_desc", "a_total",
    "c_wparent", "c_wdesc", "c_xfer", "c_annid", "c_annnum", "c_wave",
    "c_levels",
)


class Env:
    """Shared non-mutable context: graph shape, milestone codec, field widths."""

    __slots__ = (
        "graph", "ms", "n", "max_id", "s", "num_ms", "level_cap",
        "id_bits", "cnt_bits", "lvl_bits", "widx", "pos", "adj_ids", "min_id",
    )

    def __init__(self, graph: WeightedGraph, ms: MilestoneSet):
        self.graph = graph
        self.ms = ms
        self.n = graph.n
        self.max_id = graph.max_id
        self.s = code_length(ms)
        self.num_ms = len(ms.milestones)
        self.level_cap = (self.n.bit_length() - 1) + 1 if self.n > 1 else 1
        self.id_bits = max(1, self.max_id.bit_length())  # covers 0..max_id
        self.cnt_bits = max(1, self.n.bit_length())      # covers 0..n
        self.lvl_bits = max(1, self.level_cap.bit_length())
        self.widx: dict[tuple[int, int], int] = {}
        self.pos: dict[int, dict[int, int]] = {}
        self.adj_ids: dict[int, tuple[int, ...]] = {}
        for v in graph.nodes:
            nbrs = graph.adj[v]
            self.adj_ids[v] = tuple(u for u, _ in nbrs)
            self.pos[v] = {u: i for i, (u, _) in enumerate(nbrs)}
            for u, w in nbrs:
                self.widx[(v, u)] = transform_index(w, ms)
        self.min_id = graph.nodes[0]

    def edge_widx(self, u: int, v: int) -> int:
        return self.widx[(u, v)]


class NodeState:
    """One node's mutable memory; copied on write, never shared mid-step."""

    __slots__ = _FIELDS

    def __init__(self, **kw):
        for f in _FIELDS:
            setattr(self, f, kw[f])

    def copy(self) -> "NodeState":
        st = NodeState.__new__(NodeState)
        for f in _FIELDS:
            setattr(st, f, getattr(self, f))
        return st

    def replace(self, **kw) -> "NodeState":
        st = self.copy()
        for f, val in kw.items():
            setattr(st, f, val)
        return st

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, f) for f in _FIELDS)

    def __eq__(self, other) -> bool:
        return isinstance(other, NodeState) and self.as_tuple() == other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return "NodeState(" + ", ".join(f"{f}={getattr(self, f)!r}" for f in _FIELDS) + ")"

    # Certificate helpers; levels holds (number, maxw_index, orient, dmod).
    @property
    def is_center(self) -> bool:
        return bool(self.c_levels) and self.c_levels[-1][2] == O_SELF

    @property
    def center_level(self) -> int | None:
        return len(self.c_levels) - 1 if self.is_center else None


def blank_state(env: Env, node_id: int) -> NodeState:
    """Canonical post-reset state: the clean BUILD start every run expects."""
    return NodeState(
        phase=P_BUILD,
        r_wave=RW_NONE, r_epoch=0, r_dist=0,
        b_root=node_id, b_parent=0, b_dist=0, b_count=1, b_ccount=1,
        b_dfs_done=True, b_tflag=0, b_next=0, b_pidx=0,
        b_added=False, b_added_sub=False, b_busy=False, b_addreq=0,
        b_comp=node_id, b_compp=0, b_compd=0, b_renp=0, b_rens=RN_IDLE, b_bits=0,
        a_orient=0, a_depth=0, a_desc=0, a_total=0,
        c_wparent=0, c_wdesc=0, c_xfer=0, c_annid=0, c_annnum=0, c_wave=CW_IDLE,
        c_levels=(),
    )


def _gamma_bits(num: int) -> int:
    """Elias-gamma length: prefix-free code for positive integers."""
    return 2 * (num.bit_length() - 1) + 1


def serialized_bits(state: NodeState, env: Env, degree: int) -> int:
    """Length of the canonical bit encoding of one node's mutable memory.

    phase 3; reset wave+epoch 2+2; NodeId fields id_bits each; counters
    cnt_bits each; milestone indices s bits; flags 1 bit; per-edge selection
    bits degree bits; the level stack is length-prefixed with gamma-coded
    subtree numbers.
    """
    idb, cntb, s = env.id_bits, env.cnt_bits, env.s
    bits = 3                      # phase
    bits += 2 + 2 + cntb          # r_wave, r_epoch, r_dist (front hop bound)
    bits += idb                   # b_root
    bits += idb                   # b_parent (0 = none)
    bits += cntb                  # b_dist
    bits += cntb                  # b_count
    bits += cntb                  # b_ccount
    bits += 1 + 1                 # b_dfs_done, b_tflag
    bits += idb                   # b_next
    bits += s                     # b_pidx (milestone index)
    bits += 1 + 1 + 1             # b_added, b_added_sub, b_busy
    bits += idb                   # b_addreq
    bits += idb                   # b_comp
    bits += idb + cntb            # b_compp, b_compd (component-name support chain)
    bits += idb                   # b_renp
    bits += 2                     # b_rens
    bits += degree                # b_bits: one selection bit per incident edge
    bits += idb                   # a_orient
    bits += cntb                  # a_depth
    bits += cntb + cntb           # a_desc, a_total
    bits += idb + cntb            # c_wparent, c_wdesc
    bits += idb                   # c_xfer
    bits += idb + cntb            # c_annid, c_annnum
    bits += 2                     # c_wave
    bits += env.lvl_bits          # level-stack length prefix
    for num, _widx, _orient, _dmod in state.c_levels:
        bits += _gamma_bits(max(1, num)) + s + 2 + 2
    return bits


class Configuration:
    """All node states at one instant, plus references to non-mutable memory."""

    __slots__ = ("states", "graph", "ms", "env")

    def __init__(self, states: Mapping[int, NodeState], graph: WeightedGraph,
                 ms: MilestoneSet, env: Env | None = None):
        self.states = dict(states)
        self.graph = graph
        self.ms = ms
        self.env = env if env is not None else Env(graph, ms)

    @classmethod
    def clean_start(cls, graph: WeightedGraph, ms: MilestoneSet) -> "Configuration":
        env = Env(graph, ms)
        return cls({v: blank_state(env, v) for v in graph.nodes}, graph, ms, env)

    def copy(self) -> "Configuration":
        return Configuration(dict(self.states), self.graph, self.ms, self.env)

    def state_bits(self, v: int) -> int:
        return serialized_bits(self.states[v], self.env, self.graph.degree(v))

    def canonical_key(self) -> tuple:
        return tuple((v, self.states[v].as_tuple()) for v in self.graph.nodes)

    def __eq__(self, other) -> bool:
        return isinstance(other, Configuration) and self.canonical_key() == other.canonical_key()

    def nodes(self) -> Iterator[int]:
        return iter(self.graph.nodes)


def _rand_levels(env: Env, rng: random.Random) -> tuple:
    depth = rng.randint(0, env.level_cap)
    out = []
    for i in range(depth):
        orient = rng.choice((O_SELF, O_PARENT, O_CHILD)) if i == depth - 1 else rng.choice((O_PARENT, O_CHILD))
        out.append((rng.randint(1, env.n), rng.randrange(env.num_ms), orient,
                    rng.randrange(4)))
    return tuple(out)


def _rand_state(env: Env, v: int, rng: random.Random) -> NodeState:
    deg = env.graph.degree(v)
    return NodeState(
        phase=rng.randrange(5),
        r_wave=rng.randrange(3), r_epoch=rng.randrange(4),
        r_dist=rng.randint(0, env.n),
        b_root=rng.randint(0, env.max_id), b_parent=rng.randint(0, env.max_id),
        b_dist=rng.randint(0, env.n), b_count=rng.randint(0, env.n),
        b_ccount=rng.randint(0, env.n),
        b_dfs_done=bool(rng.getrandbits(1)), b_tflag=rng.getrandbits(1),
        b_next=rng.randint(0, env.max_id), b_pidx=rng.randrange(env.num_ms),
        b_added=bool(rng.getrandbits(1)), b_added_sub=bool(rng.getrandbits(1)),
        b_busy=bool(rng.getrandbits(1)), b_addreq=rng.randint(0, env.max_id),
        b_comp=rng.randint(0, env.max_id), b_compp=rng.randint(0, env.max_id),
        b_compd=rng.randint(0, env.n), b_renp=rng.randint(0, env.max_id),
        b_rens=rng.randrange(3), b_bits=rng.getrandbits(deg) if deg else 0,
        a_orient=rng.randint(0, env.max_id), a_depth=rng.randint(0, env.n),
        a_desc=rng.randint(0, env.n), a_total=rng.randint(0, env.n),
        c_wparent=rng.randint(0, env.max_id), c_wdesc=rng.randint(0, env.n),
        c_xfer=rng.randint(0, env.max_id), c_annid=rng.randint(0, env.max_id),
        c_annnum=rng.randint(0, env.n), c_wave=rng.randrange(3),
        c_levels=_rand_levels(env, rng),
    )


CORRUPTION_POLICIES = ("random_bits", "swap_states", "stale_phase", "garbage_certificates")


def corrupt(cfg: Configuration, rng: random.Random, policy: str) -> Configuration:
    """Arbitrary-but-well-formed mutable states over the same non-mutable memory."""
    env = cfg.env
    states = {v: st.copy() for v, st in cfg.states.items()}
    if policy == "random_bits":
        for v in sorted(states):
            states[v] = _rand_state(env, v, rng)
    elif policy == "swap_states":
        ids = sorted(states)
        perm = ids[:]
        rng.shuffle(perm)
        src = {v: cfg.states[u].copy() for v, u in zip(ids, perm)}
        for v, st in src.items():
            deg = env.graph.degree(v)
            st.b_bits &= (1 << deg) - 1  # respect the new holder's edge-bit width
            states[v] = st
    elif policy == "stale_phase":
        for v in sorted(states):
            states[v].phase = rng.randrange(5)
    elif policy == "garbage_certificates":
        for v in sorted(states):
            st = states[v]
            st.phase = P_DONE
            st.r_wave = RW_NONE
            st.a_orient = rng.choice((0,) + env.adj_ids[v])
            st.a_desc = rng.randint(0, env.n)
            st.a_total = rng.randint(0, env.n)
            st.c_levels = _rand_levels(env, rng)
            deg = env.graph.degree(v)
            st.b_bits = rng.getrandbits(deg) if deg else 0
    else:
        raise ValueError(f"unknown corruption policy {policy!r}")
    return Configuration(states, cfg.graph, cfg.ms, env)

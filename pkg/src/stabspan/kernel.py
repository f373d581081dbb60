"""State-model execution engine.

A rule is a guard/action pair over a node's local view (own state, neighbor
states, own id, incident edge weights).  A scheduler picks a non-empty subset
of enabled nodes each step; selected nodes apply their highest-priority
enabled rule simultaneously against the pre-step configuration.  Rounds follow
the classic slowest-process measure: a round ends once every node enabled at
its start has stepped or stopped being enabled.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .state import Configuration, Env, NodeState
from .state import corrupt as corrupt  # re-export: one corruption implementation


class LocalView:
    """Everything one rule evaluation may read."""

    __slots__ = ("id", "st", "nbr", "w", "env", "quiet", "_tree", "_cand")

    def __init__(self, node_id: int, st: NodeState, nbr: dict[int, NodeState],
                 w: dict[int, int], env: Env, quiet: bool):
        self.id = node_id
        self.st = st
        self.nbr = nbr
        self.w = w
        self.env = env
        self.quiet = quiet
        self._tree = None
        self._cand = -1  # memo: best addable edge target, None when absent

    def tree_nbrs(self) -> list[int]:
        """Neighbors joined by a symmetrically selected edge (both bits set)."""
        if self._tree is None:
            st, pos, env = self.st, self.env.pos[self.id], self.env
            me = self.id
            out = []
            for u in self.env.adj_ids[me]:
                if st.b_bits >> pos[u] & 1 and self.nbr[u].b_bits >> env.pos[u][me] & 1:
                    out.append(u)
            self._tree = out
        return self._tree

    def bit(self, u: int) -> bool:
        """My selection bit for edge (me, u)."""
        return bool(self.st.b_bits >> self.env.pos[self.id][u] & 1)

    def nbr_bit(self, u: int) -> bool:
        """u's selection bit for edge (u, me)."""
        return bool(self.nbr[u].b_bits >> self.env.pos[u][self.id] & 1)


@dataclass(frozen=True)
class Rule:
    """Named guard/action; phase narrows where the engine even evaluates it."""

    name: str
    guard: Callable[[LocalView], bool]
    action: Callable[[LocalView], NodeState]
    phase: int | None = None


def make_view(cfg: Configuration, v: int) -> LocalView:
    env = cfg.env
    states = cfg.states
    st = states[v]
    nbr = {}
    w = {}
    quiet = st.r_wave == 0
    for u, wt in env.graph.adj[v]:
        su = states[u]
        nbr[u] = su
        w[u] = wt
        if su.r_wave != 0:
            quiet = False
    return LocalView(v, st, nbr, w, env, quiet)


def enabled(cfg: Configuration, v: int, rules: Sequence[Rule]) -> list[str]:
    """Names of all rules whose guard holds on v's local view; pure."""
    view = make_view(cfg, v)
    phase = view.st.phase
    return [r.name for r in rules if (r.phase is None or r.phase == phase) and r.guard(view)]


def first_enabled(cfg: Configuration, v: int, rules: Sequence[Rule]) -> Rule | None:
    view = make_view(cfg, v)
    phase = view.st.phase
    for r in rules:
        if (r.phase is None or r.phase == phase) and r.guard(view):
            return r
    return None


# ---------------------------------------------------------------------------
# Schedulers

SCHEDULER_KINDS = ("all_enabled", "single_random", "random_subset",
                   "adversarial_stubborn", "adversarial_starve_one")


class SchedulerPolicy:
    """Picks a non-empty subset of the (sorted) enabled node list each step."""

    kind = "base"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(f"sched:{self.kind}:{seed}")

    def select(self, enabled_nodes: Sequence[int]) -> list[int]:
        raise NotImplementedError


class AllEnabled(SchedulerPolicy):
    kind = "all_enabled"

    def select(self, enabled_nodes):
        return list(enabled_nodes)


class SingleRandom(SchedulerPolicy):
    kind = "single_random"

    def select(self, enabled_nodes):
        return [enabled_nodes[self.rng.randrange(len(enabled_nodes))]]


class RandomSubset(SchedulerPolicy):
    kind = "random_subset"

    def select(self, enabled_nodes):
        picked = [v for v in enabled_nodes if self.rng.getrandbits(1)]
        if not picked:
            picked = [enabled_nodes[self.rng.randrange(len(enabled_nodes))]]
        return picked


class AdversarialStubborn(SchedulerPolicy):
    """Re-activates the same minimal set for as long as it stays enabled."""

    kind = "adversarial_stubborn"

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self.last: int | None = None

    def select(self, enabled_nodes):
        if self.last is not None and self.last in enabled_nodes:
            return [self.last]
        self.last = enabled_nodes[0]
        return [self.last]


class AdversarialStarveOne(SchedulerPolicy):
    """Starves one victim for as long as scheduler legality allows."""

    kind = "adversarial_starve_one"

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self.victim: int | None = None

    def select(self, enabled_nodes):
        if self.victim is None:
            self.victim = enabled_nodes[self.rng.randrange(len(enabled_nodes))]
        rest = [v for v in enabled_nodes if v != self.victim]
        return rest if rest else list(enabled_nodes)


def make_scheduler(kind: str, seed: int = 0) -> SchedulerPolicy:
    table = {c.kind: c for c in (AllEnabled, SingleRandom, RandomSubset,
                                 AdversarialStubborn, AdversarialStarveOne)}
    if kind not in table:
        raise ValueError(f"unknown scheduler kind {kind!r}")
    return table[kind](seed)


# ---------------------------------------------------------------------------
# Stepping and runs

@dataclass
class StepRecord:
    step: int
    activated: tuple[int, ...]
    round: int
    enabled_count: int


@dataclass
class ExecutionTrace:
    initial: Configuration
    final: Configuration
    steps: list[StepRecord]
    rounds: int
    step_count: int
    peak_bits: dict[int, int]
    cause: str  # "silent" | "round_budget_exhausted"
    activations: list[tuple[int, ...]] = field(default_factory=list)


class Engine:
    """Incremental enabled-set tracking over a mutable state table."""

    def __init__(self, cfg: Configuration, rules: Sequence[Rule]):
        self.cfg = cfg.copy()
        self.rules = list(rules)
        self.env = cfg.env
        self.cache: dict[int, Rule | None] = {}
        self.dirty: set[int] = set(cfg.graph.nodes)
        self.peak = {v: cfg.state_bits(v) for v in cfg.graph.nodes}

    def refresh(self) -> None:
        for v in self.dirty:
            self.cache[v] = first_enabled(self.cfg, v, self.rules)
        self.dirty.clear()

    def enabled_nodes(self) -> list[int]:
        self.refresh()
        return sorted(v for v, r in self.cache.items() if r is not None)

    def apply(self, chosen: Sequence[int]) -> list[tuple[int, str]]:
        """Apply each chosen node's first enabled rule against the pre-step states."""
        cfg = self.cfg
        updates: list[tuple[int, str, NodeState]] = []
        for v in chosen:
            rule = self.cache[v]
            if rule is None:
                raise RuntimeError(f"scheduler activated non-enabled node {v}")
            updates.append((v, rule.name, rule.action(make_view(cfg, v))))
        fired = []
        for v, name, ns in updates:
            fired.append((v, name))
            if ns is not cfg.states[v] and ns != cfg.states[v]:
                cfg.states[v] = ns
                bits = cfg.state_bits(v)
                if bits > self.peak[v]:
                    self.peak[v] = bits
                self.dirty.add(v)
                self.dirty.update(self.env.adj_ids[v])
        return fired


def step(cfg: Configuration, rules: Sequence[Rule], policy: SchedulerPolicy,
         rng: random.Random | None = None) -> Configuration:
    """One pure scheduler step; raises if no node is enabled."""
    eng = Engine(cfg, rules)
    en = eng.enabled_nodes()
    if not en:
        raise RuntimeError("step() called with no enabled node")
    chosen = sorted(set(policy.select(en)))
    if not chosen:
        raise RuntimeError("scheduler returned an empty activation set")
    eng.apply(chosen)
    return eng.cfg


def run_until_silent(cfg: Configuration, rules: Sequence[Rule],
                     policy: SchedulerPolicy, max_rounds: int,
                     retain_steps: bool = False,
                     step_hook: Callable[[int, list[tuple[int, str]], Configuration], None] | None = None,
                     ) -> ExecutionTrace:
    """Iterate steps until silence or the round budget runs out."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    initial = cfg.copy()
    eng = Engine(cfg, rules)
    steps: list[StepRecord] = []
    activations: list[tuple[int, ...]] = []
    rounds = 0
    stepno = 0
    pending: set[int] | None = None  # nodes enabled at round start, not yet served
    step_cap = max_rounds * max(4, cfg.graph.n) * 4
    cause = "silent"
    while True:
        en = eng.enabled_nodes()
        if not en:
            cause = "silent"
            break
        if pending is None:
            pending = set(en)
        if rounds >= max_rounds or stepno >= step_cap:
            cause = "round_budget_exhausted"
            break
        chosen = sorted(set(policy.select(en)))
        if not chosen or any(v not in eng.cache or eng.cache[v] is None for v in chosen):
            raise RuntimeError("scheduler produced an illegal activation set")
        fired = eng.apply(chosen)
        stepno += 1
        activations.append(tuple(chosen))
        if retain_steps:
            steps.append(StepRecord(step=stepno, activated=tuple(chosen),
                                    round=rounds, enabled_count=len(en)))
        if step_hook is not None:
            step_hook(stepno, fired, eng.cfg)
        # Round bookkeeping: served = stepped or no longer enabled.
        pending.difference_update(chosen)
        if pending:
            eng.refresh()
            pending = {v for v in pending if eng.cache.get(v) is not None}
        if not pending:
            rounds += 1
            pending = None
    return ExecutionTrace(initial=initial, final=eng.cfg, steps=steps,
                          rounds=rounds, step_count=stepno, peak_bits=dict(eng.peak),
                          cause=cause, activations=activations)


def reference_rounds(initial: Configuration, rules: Sequence[Rule],
                     activations: Sequence[tuple[int, ...]]) -> int:
    """Recompute the round count from an activation log by full replay.

    Uses only the pure enabled() scan, no incremental caching: an independent
    reading of the definition to cross-check the runner's counter against.
    """
    cfg = initial.copy()
    scan = lambda: {v for v in cfg.graph.nodes if first_enabled(cfg, v, rules) is not None}
    rounds = 0
    pending: set[int] | None = None
    for chosen in activations:
        if pending is None:
            pending = scan()
        new_states = {v: first_enabled(cfg, v, rules).action(make_view(cfg, v)) for v in chosen}
        cfg.states.update(new_states)
        pending -= set(chosen)
        pending &= scan()
        if not pending:
            rounds += 1
            pending = None
    return rounds


def trace_to_jsonl(trace: ExecutionTrace) -> str:
    """Step records as JSON lines; requires a run with retain_steps=True."""
    import json
    lines = [json.dumps({"step": r.step, "activated": list(r.activated),
                         "round": r.round, "enabled_count": r.enabled_count})
             for r in trace.steps]
    return "\n".join(lines) + ("\n" if lines else "")


def silence_closure(cfg: Configuration, rules: Sequence[Rule], invocations: int = 100) -> bool:
    """True iff repeated scheduler invocations find nothing enabled and change nothing."""
    eng = Engine(cfg, rules)
    before = cfg.canonical_key()
    for _ in range(invocations):
        if eng.enabled_nodes():
            return False
    return eng.cfg.canonical_key() == before

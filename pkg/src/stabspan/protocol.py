"""Full protocol stack assembly and output extraction."""

from __future__ import annotations

from .consistency import DEFAULT_ALPHA
from .kernel import Rule
from .milestones import MilestoneSet
from .protocol_build import build_rules
from .protocol_certify import certify_rules
from .protocol_reset import reset_rules
from .state import Configuration, P_BUILD


def full_rules(ms: MilestoneSet | None = None,
               alpha: float = DEFAULT_ALPHA) -> list[Rule]:
    """Reset first (it dominates), then construction, then certification."""
    return reset_rules(alpha) + build_rules(ms) + certify_rules(ms, alpha)


def selected_tree(cfg: Configuration) -> tuple[tuple[int, int], ...]:
    """Edges selected on both sides; raises if any bit lacks its mirror."""
    env = cfg.env
    for v in cfg.graph.nodes:
        if cfg.states[v].phase <= P_BUILD and cfg.graph.n > 1:
            raise ValueError(f"node {v} has not finished building")
    picked = []
    for u, v, _w in cfg.graph.edges:
        a = cfg.states[u].b_bits >> env.pos[u][v] & 1
        b = cfg.states[v].b_bits >> env.pos[v][u] & 1
        if a != b:
            raise ValueError(f"asymmetric selection bits on edge ({u}, {v})")
        if a:
            picked.append((u, v))
    return tuple(picked)

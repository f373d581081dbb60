"""stabspan: silent self-stabilizing approximate minimum spanning trees.

Milestone-quantized weights feed a token-coordinated distributed Kruskal; the
result is certified in place by a recursive-centers proof labeling that a
one-round local verifier checks, and a cooperative reset recovers from any
corrupted start.  Everything runs on a deterministic state-model simulator
with adversarial schedulers and bit-exact space metering.
"""

from .certificate import (CertificateLabel, LevelRecord, find_center,
                          reference_label, verify_all, verify_node)
from .graph import (WeightedGraph, build_graph, generate, is_connected,
                    parse_graph, write_graph)
from .kernel import (ExecutionTrace, LocalView, Rule, SchedulerPolicy, corrupt,
                     enabled, make_scheduler, reference_rounds,
                     run_until_silent, silence_closure, step, trace_to_jsonl)
from .milestones import (MilestoneSet, approximation_bound, code_length,
                         index_of, milestone_at, milestone_set, transform,
                         transform_index, valid_k_range)
from .oracle import (MstResult, brute_force_mst_weight, is_spanning_tree,
                     kruskal, spanning_trees, tree_weight)
from .protocol import full_rules, selected_tree
from .state import Configuration, Env, NodeState, blank_state, serialized_bits

__all__ = [name for name in dir() if not name.startswith("_")]

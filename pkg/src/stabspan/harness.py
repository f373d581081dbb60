"""Trial runner and fleet executor.

A trial assembles the full rule stack, optionally corrupts the start, runs to
silence, extracts the selected tree, compares against the sequential oracle,
and verifies the distributed proof.  Fleets are Cartesian products of graphs,
trade-off parameters, schedulers, corruptions, and seeds with deterministic,
re-runnable output.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .certificate import verify_all
from .consistency import DEFAULT_ALPHA, label_of, memory_cap
from .graph import WeightedGraph, generate, parse_graph
from .kernel import make_scheduler, run_until_silent, silence_closure
from .milestones import (approximation_bound, code_length, milestone_set,
                         transform, valid_k_range)
from .oracle import kruskal, tree_weight
from .protocol import full_rules, selected_tree
from .state import Configuration, P_DONE, RW_NONE, corrupt

# Round budgets are C * n^3, with C frozen from calibration runs over the
# acceptance fleet: the worst observed rounds-to-silence was 0.67 * n^3, on
# the smallest fleet graphs (n=8, corrupted starts) where fixed protocol
# overhead dominates; C=12 leaves ~18x slack there and far more at scale.
ROUND_BUDGET_C = 12
DEFAULT_MAX_ROUNDS = 10**6


def cubic_budget(n: int, c: int = ROUND_BUDGET_C) -> int:
    return max(100, c * n**3)


@dataclass
class TrialResult:
    graph: str
    n: int
    k: int
    scheduler: str
    seed: int
    corruption: str | None
    rounds_to_silence: int
    steps: int
    cause: str
    tree_weight: int | None
    oracle_weight: int
    transformed_weight: int | None
    transformed_optimum: int
    ratio: str | None
    bound: str
    within_bound: bool
    verified: bool
    rejecting: list[int]
    peak_bits: int
    bits_cap: int
    reset_count: int
    max_levels: int
    closure_ok: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def run_trial(g: WeightedGraph, k: int, scheduler: str = "all_enabled",
              corruption: str | None = None, seed: int = 0,
              max_rounds: int = DEFAULT_MAX_ROUNDS,
              alpha: float = DEFAULT_ALPHA,
              graph_name: str = "graph",
              check_closure: bool = True,
              trace_out: str | None = None) -> TrialResult:
    """One full protocol run with oracle comparison and proof verification."""
    ms = milestone_set(max(g.n, 2), k)
    cfg = Configuration.clean_start(g, ms)
    if corruption is not None and corruption != "none":
        cfg = corrupt(cfg, random.Random(f"corrupt:{corruption}:{seed}"), corruption)
    rules = full_rules(ms, alpha)

    resets = 0
    wave_active = False

    def hook(stepno, fired, cur):
        nonlocal resets, wave_active
        triggered = any(name == "reset_trigger" for _, name in fired)
        if triggered and not wave_active:
            resets += 1
            wave_active = True
        elif wave_active and any(name == "reset_recede" for _, name in fired):
            if all(cur.states[v].r_wave == RW_NONE for v in g.nodes):
                wave_active = False

    trace = run_until_silent(cfg, rules, make_scheduler(scheduler, seed),
                             max_rounds=max_rounds, step_hook=hook,
                             retain_steps=trace_out is not None)
    if trace_out is not None:
        from .kernel import trace_to_jsonl
        with open(trace_out, "w", encoding="utf-8") as fh:
            fh.write(trace_to_jsonl(trace))
    silent = trace.cause == "silent"
    done = silent and all(trace.final.states[v].phase == P_DONE for v in g.nodes)

    fn = (lambda w: transform(w, ms))
    opt = kruskal(g)
    opt_t = kruskal(g, fn)
    tw = wt = None
    verified = False
    rejecting: list[int] = []
    if done:
        tree = selected_tree(trace.final)
        tw = tree_weight(g, tree)
        wt = tree_weight(g, tree, fn)
        labels = {v: label_of(trace.final.states[v]) for v in g.nodes}
        rejecting = sorted(verify_all(labels, g, ms))
        verified = not rejecting
    bound = approximation_bound(k, max(g.n, 2))
    ratio = Fraction(tw, opt.weight) if tw is not None and opt.weight else None
    within = ratio is not None and ratio <= bound
    if g.n == 1:
        within = silent and done
        ratio = Fraction(1)
    peak = max(trace.peak_bits.values())
    max_levels = max((len(trace.final.states[v].c_levels) for v in g.nodes))
    closure = silence_closure(trace.final, rules) if (silent and check_closure) else False
    return TrialResult(
        graph=graph_name, n=g.n, k=k, scheduler=scheduler, seed=seed,
        corruption=corruption, rounds_to_silence=trace.rounds, steps=trace.step_count,
        cause=trace.cause, tree_weight=tw, oracle_weight=opt.original_weight,
        transformed_weight=wt, transformed_optimum=opt_t.weight,
        ratio=str(ratio) if ratio is not None else None, bound=str(bound),
        within_bound=within, verified=verified, rejecting=rejecting,
        peak_bits=peak, bits_cap=memory_cap(g.n, code_length(ms), alpha),
        reset_count=resets, max_levels=max_levels, closure_ok=closure,
    )


# ---------------------------------------------------------------------------
# Fleets

def _load_graph(spec: dict) -> tuple[str, WeightedGraph]:
    if "file" in spec:
        with open(spec["file"], "r", encoding="utf-8") as fh:
            return spec["file"], parse_graph(fh.read())
    name = f"gen:{spec['kind']}:{spec['n']}:{spec.get('weight_dist', 'uniform_1_to_n')}:{spec.get('seed', 0)}"
    return name, generate(spec["kind"], spec["n"],
                          spec.get("weight_dist", "uniform_1_to_n"),
                          spec.get("seed", 0))


def _resolve_k(kspec, n: int) -> int:
    lo, hi = valid_k_range(max(n, 2))
    if kspec == "min":
        return lo
    if kspec == "max":
        return hi
    k = int(kspec)
    if not lo <= k <= hi:
        raise ValueError(f"k={k} invalid for n={n} (valid [{lo}, {hi}])")
    return k


def fleet_trials(spec: dict) -> Iterator[dict]:
    """Expand a fleet specification into trial descriptors, in canonical order."""
    graphs = spec.get("graphs", [])
    ks = spec.get("ks", [0])
    schedulers = spec.get("schedulers", ["all_enabled"])
    corruptions = spec.get("corruptions", ["none"])
    seeds = spec.get("seeds", [0])
    max_rounds = spec.get("max_rounds")
    for gspec in graphs:
        name, g = _load_graph(gspec)
        budget = max_rounds if max_rounds else cubic_budget(g.n)
        for kspec in ks:
            k = _resolve_k(kspec, g.n)
            for sched in schedulers:
                for corr in corruptions:
                    for seed in seeds:
                        yield dict(graph_name=name, g=g, k=k, scheduler=sched,
                                   corruption=None if corr == "none" else corr,
                                   seed=seed, max_rounds=budget)


def run_fleet(spec: dict, jobs: int = 1,
              progress: bool = False) -> list[TrialResult]:
    """Run every trial in the spec; deterministic output order."""
    trials = list(fleet_trials(spec))
    results: list[TrialResult] = []
    if jobs > 1:
        import multiprocessing as mp
        with mp.Pool(jobs) as pool:
            results = pool.map(_run_one, trials, chunksize=4)
    else:
        for i, t in enumerate(trials):
            results.append(_run_one(t))
            if progress and (i + 1) % 50 == 0:
                print(f"  {i + 1}/{len(trials)} trials", flush=True)
    return results


def _run_one(t: dict) -> TrialResult:
    return run_trial(t["g"], t["k"], t["scheduler"], t["corruption"], t["seed"],
                     max_rounds=t["max_rounds"], graph_name=t["graph_name"])


def fleet_summary(results: Iterable[TrialResult]) -> dict:
    """Worst-case view: max ratio per k, max bits per (n, k), max rounds."""
    max_ratio: dict[int, Fraction] = {}
    max_bits: dict[str, int] = {}
    max_rounds = 0
    failures = 0
    for r in results:
        if r.cause != "silent" or not r.verified or not r.within_bound:
            failures += 1
        if r.ratio is not None:
            f = Fraction(r.ratio)
            if f > max_ratio.get(r.k, Fraction(0)):
                max_ratio[r.k] = f
        key = f"n={r.n},k={r.k}"
        max_bits[key] = max(max_bits.get(key, 0), r.peak_bits)
        max_rounds = max(max_rounds, r.rounds_to_silence)
    return {
        "max_ratio_per_k": {str(k): str(v) for k, v in sorted(max_ratio.items())},
        "max_bits_per_nk": dict(sorted(max_bits.items())),
        "max_rounds": max_rounds,
        "failures": failures,
    }

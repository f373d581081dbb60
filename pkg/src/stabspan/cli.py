"""Command-line front end: milestones, simulate, fleet, verify."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from .certificate import labels_from_json_obj, verify_all
from .graph import generate, parse_graph
from .harness import (DEFAULT_MAX_ROUNDS, TrialResult, fleet_summary,
                      run_fleet, run_trial)
from .kernel import SCHEDULER_KINDS
from .milestones import (approximation_bound, code_length, milestone_set)
from .state import CORRUPTION_POLICIES


def _load_graph_arg(arg: str):
    if arg.startswith("gen:"):
        parts = arg.split(":")
        if len(parts) < 3:
            raise SystemExit("generator spec is gen:kind:n[:dist[:seed]]")
        kind, n = parts[1], int(parts[2])
        dist = parts[3] if len(parts) > 3 else "uniform_1_to_n"
        seed = int(parts[4]) if len(parts) > 4 else 0
        return arg, generate(kind, n, dist, seed)
    with open(arg, "r", encoding="utf-8") as fh:
        return arg, parse_graph(fh.read())


def cmd_milestones(args) -> int:
    ms = milestone_set(args.n, args.k)
    bound = approximation_bound(args.k, args.n)
    print(json.dumps({
        "n": args.n,
        "k": args.k,
        "milestones": list(ms.milestones),
        "cardinality": len(ms.milestones),
        "code_length": code_length(ms),
        "approximation_bound": str(bound),
    }, sort_keys=True))
    return 0


def cmd_simulate(args) -> int:
    name, g = _load_graph_arg(args.graph)
    result = run_trial(g, args.k, scheduler=args.scheduler,
                       corruption=None if args.corrupt == "none" else args.corrupt,
                       seed=args.seed, max_rounds=args.max_rounds,
                       graph_name=name, trace_out=args.trace)
    payload = result.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    print(payload)
    ok = (result.cause == "silent" and result.verified and result.within_bound
          and result.closure_ok)
    return 0 if ok else 1


def _read_spec(path: str) -> dict:
    with open(path, "rb") as fh:
        blob = fh.read()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        return tomllib.loads(blob.decode("utf-8"))
    return json.loads(blob.decode("utf-8"))


def _flatten_csv(results: list[TrialResult]) -> str:
    import csv
    import io
    buf = io.StringIO()
    rows = [asdict(r) for r in results]
    if not rows:
        return ""
    for row in rows:
        row["rejecting"] = " ".join(map(str, row["rejecting"]))
    writer = csv.DictWriter(buf, fieldnames=sorted(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_fleet(args) -> int:
    spec = _read_spec(args.spec)
    results = run_fleet(spec, jobs=args.jobs, progress=not args.quiet)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            if args.csv:
                fh.write(_flatten_csv(results))
            else:
                for r in results:
                    fh.write(r.to_json() + "\n")
    summary = fleet_summary(results)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["failures"] == 0 else 1


def cmd_verify(args) -> int:
    _, g = _load_graph_arg(args.graph)
    with open(args.labels, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    labels, n, k = labels_from_json_obj(obj)
    if n != g.n:
        print(f"label dump is for n={n}, graph has n={g.n}", file=sys.stderr)
        return 1
    ms = milestone_set(max(n, 2), k)
    rejecting = sorted(verify_all(labels, g, ms))
    print(json.dumps({"rejecting": rejecting, "certified": not rejecting}))
    return 0 if not rejecting else 1


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="stabspan",
        description="Silent self-stabilizing approximate-MST simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("milestones", help="print a milestone set as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_milestones)

    p = sub.add_parser("simulate", help="run one trial")
    p.add_argument("--graph", required=True,
                   help="graph file or gen:kind:n[:dist[:seed]]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--scheduler", choices=SCHEDULER_KINDS, default="all_enabled")
    p.add_argument("--corrupt", choices=("none",) + CORRUPTION_POLICIES,
                   default="none")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-rounds", type=int, default=DEFAULT_MAX_ROUNDS)
    p.add_argument("--out", default=None)
    p.add_argument("--trace", default=None,
                   help="also dump per-step JSON lines to this path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("fleet", help="run a fleet from a TOML or JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", action="store_true",
                   help="flatten results to CSV instead of JSON lines")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_fleet)

    p = sub.add_parser("verify", help="verify a dumped labeling against a graph")
    p.add_argument("--labels", required=True)
    p.add_argument("--graph", required=True)
    p.set_defaults(fn=cmd_verify)

    args = ap.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())

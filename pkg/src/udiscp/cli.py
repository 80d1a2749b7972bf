"""Command-line surface.

Subcommands: ``gen`` writes a random meeting-scheduling instance, ``solve``
runs one solver on one problem file, ``experiment`` sweeps a seeded grid
and emits CSV plus a rendered table, ``calibrate`` checks the tightness
formula against sampling, and ``replay`` re-audits a stored trace's
privacy accounting. ``UDISCP_OUT`` sets the default output directory.

Exit codes for ``solve``: 0 agreement, 1 no agreement (no-solution,
interrupted or budget-exhausted), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import model
from .engine import RunLimits, RunOutcome, run, solver_names
from .experiments import (
    config_from_dict, paired_comparison, BASELINE_OF, render_table,
    rows_to_csv, run_experiment,
)
from .gen import DmsParams, empirical_solvability, generate_dms, \
    tightness_for_solution_probability
from .model import CATEGORIES, parse, serialize


def _out_dir() -> Path:
    return Path(os.environ.get("UDISCP_OUT", "."))


# ---------------------------------------------------------------------------
# Trace files

def format_trace_file(outcome: RunOutcome, m: int,
                      problem_path: str | None = None) -> str:
    """Self-describing trace: metadata and final ledger totals up front,
    then one line per message (tick|sender|recipient|payload|ledger-delta)."""
    head = [
        f"# udiscp-trace solver={outcome.solver} seed={outcome.seed} "
        f"termination={outcome.termination} messages={outcome.message_count} "
        f"cycles={outcome.cycle_count}"
    ]
    if problem_path:
        head.append(f"# problem {problem_path}")
    for agent in range(1, m + 1):
        totals = outcome.privacy.per_agent[agent]
        cols = " ".join(f"{c}={totals[c]:g}" for c in CATEGORIES)
        head.append(f"# ledger agent={agent} {cols}")
    return "\n".join(head) + "\n" + outcome.render_trace()


_CATEGORY_BY_LETTER = {"d": "domain", "a": "assignment",
                       "c": "constraint", "g": "global"}


def _parse_delta(field: str):
    """One 'u_X[agent,item]=cost' piece -> (category, agent, item, cost)."""
    label, _, amount = field.partition("=")
    letter = label[2]
    inside = label[label.index("[") + 1:label.index("]")]
    agent_s, item_s = inside.split(",")
    return (_CATEGORY_BY_LETTER[letter], int(agent_s), int(item_s),
            float(amount))


def replay_trace(text: str, problem: model.Problem | None = None):
    """Recompute ledger totals from the trace's deltas and check them
    against the stored header totals (and, with the problem at hand, each
    delta against its cost matrix and the once-per-item rule).

    Returns (stored, recomputed, first_bad_tick); ticks are None when all
    checks pass.
    """
    stored: dict[int, dict[str, float]] = {}
    recomputed: dict[int, dict[str, float]] = {}
    seen: set[tuple] = set()
    first_bad_tick = None
    for line in text.splitlines():
        if line.startswith("# ledger"):
            parts = line.split()
            agent = int(parts[2].split("=")[1])
            stored[agent] = {p.split("=")[0]: float(p.split("=")[1])
                             for p in parts[3:]}
            continue
        if line.startswith("#") or not line.strip():
            continue
        tick_s, _sender, _rcpt, _payload, delta = line.split("|")
        if not delta:
            continue
        for piece in delta.split(";"):
            category, agent, item, cost = _parse_delta(piece)
            bad = False
            if (agent, category, item) in seen:
                bad = True  # an item is ledgered at most once per run
            seen.add((agent, category, item))
            if problem is not None:
                expected = problem.privacy_cost(category, agent, item)
                bad = bad or expected != cost
            if bad and first_bad_tick is None:
                first_bad_tick = int(tick_s)
            recomputed.setdefault(agent, {c: 0.0 for c in CATEGORIES})
            recomputed[agent][category] += cost
    if first_bad_tick is None and stored:
        for agent, totals in stored.items():
            got = recomputed.get(agent, {c: 0.0 for c in CATEGORIES})
            if any(abs(got[c] - totals[c]) > 1e-9 for c in CATEGORIES):
                first_bad_tick = -1  # totals off without a tagged line
    return stored, recomputed, first_bad_tick


# ---------------------------------------------------------------------------
# Subcommands

def cmd_gen(args) -> int:
    if args.solvability is not None:
        t = tightness_for_solution_probability(
            args.solvability, args.agents, args.domain)
    else:
        t = args.tightness
    if t is None:
        print("gen: need --tightness or --solvability", file=sys.stderr)
        return 2
    params = DmsParams(m=args.agents, d=args.domain, t=t, kind=args.kind,
                       privacy_cost_max=args.privacy_max,
                       reward=args.reward, seed=args.seed)
    problem = generate_dms(params)
    text = serialize(problem)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} (m={args.agents}, d={args.domain}, t={t:.4f})")
    else:
        sys.stdout.write(text)
    return 0


def _load_problem(path: str) -> model.Problem:
    return parse(Path(path).read_text())


def cmd_solve(args) -> int:
    try:
        problem = _load_problem(args.problem)
    except FileNotFoundError:
        print(f"solve: no such file: {args.problem}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"solve: {e}", file=sys.stderr)
        return 2
    params = json.loads(args.params) if args.params else {}
    limits = RunLimits(max_privacy_loss=args.max_privacy_loss,
                       max_cycles=args.max_cycles,
                       max_messages=args.max_messages)
    try:
        outcome = run(problem, args.solver, params=params, seed=args.seed,
                      limits=limits, policy=args.policy)
    except ValueError as e:
        print(f"solve: {e}", file=sys.stderr)
        return 2
    summary = {
        "solver": outcome.solver,
        "seed": outcome.seed,
        "termination": outcome.termination,
        "assignment": outcome.assignment,
        "cost": None if outcome.cost is None else (
            "inf" if outcome.cost == model.INF else outcome.cost),
        "avg_privacy_loss": outcome.privacy.average,
        "privacy_by_category": outcome.privacy.by_category,
        "messages": outcome.message_count,
        "cycles": outcome.cycle_count,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"termination: {outcome.termination}")
        if outcome.assignment is not None:
            print(f"assignment: {outcome.assignment} (cost {summary['cost']})")
        print(f"avg privacy loss: {outcome.privacy.average:g}")
        print(f"messages: {outcome.message_count}, cycles: {outcome.cycle_count}")
    if args.trace:
        Path(args.trace).write_text(
            format_trace_file(outcome, problem.m, args.problem))
    return 0 if outcome.termination == "agreement" else 1


def cmd_experiment(args) -> int:
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    config = config_from_dict(doc)
    if args.workers:
        config = config_from_dict({**doc, "workers": args.workers})
    rows = run_experiment(config)
    out_csv = Path(args.out_csv) if args.out_csv else _out_dir() / "experiment.csv"
    out_csv.write_text(rows_to_csv(rows))
    table = render_table(rows, ceiling=config.limits.max_privacy_loss)
    out_table = (Path(args.out_table) if args.out_table
                 else _out_dir() / "experiment_table.txt")
    out_table.write_text(table)
    print(table)
    for twin, base in sorted(BASELINE_OF.items()):
        if twin in config.solvers and base in config.solvers:
            cmp = paired_comparison(rows, base, twin)
            print(f"{base} -> {twin}: mean {cmp.mean_baseline:.3f} -> "
                  f"{cmp.mean_twin:.3f} (paired diff {cmp.mean_diff:+.3f} "
                  f"+- {cmp.diff_se:.3f}, n={cmp.n})")
    print(f"wrote {out_csv} and {out_table}")
    return 0


def cmd_calibrate(args) -> int:
    t = tightness_for_solution_probability(args.solvability, args.agents,
                                           args.domain)
    measured = empirical_solvability(args.agents, args.domain, t,
                                     args.samples, seed=args.seed)
    print(f"theoretical tightness: {t:.4f}")
    print(f"measured solvability over {args.samples} samples: {measured:.3f} "
          f"(target {args.solvability})")
    return 0


def cmd_replay(args) -> int:
    text = Path(args.trace).read_text()
    problem = None
    if args.problem:
        problem = _load_problem(args.problem)
    else:
        for line in text.splitlines():
            if line.startswith("# problem "):
                candidate = line.split(" ", 2)[2].strip()
                if Path(candidate).exists():
                    problem = _load_problem(candidate)
                break
    stored, recomputed, bad_tick = replay_trace(text, problem)
    for agent in sorted(recomputed):
        cols = " ".join(f"{c}={recomputed[agent][c]:g}" for c in CATEGORIES)
        print(f"agent {agent}: {cols}")
    if bad_tick is not None:
        where = "stored totals" if bad_tick == -1 else f"tick {bad_tick}"
        print(f"replay: divergence at {where}", file=sys.stderr)
        return 1
    print("replay: ledger consistent with trace")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udiscp",
        description="distributed constraint solving with privacy-aware agents")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a meeting-scheduling instance")
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--domain", type=int, required=True)
    g.add_argument("--tightness", type=float)
    g.add_argument("--solvability", type=float)
    g.add_argument("--kind", default="UDisCSP",
                   choices=["DisCSP", "DCOP", "UDisCSP", "UDCOP"])
    g.add_argument("--privacy-max", type=int, default=9)
    g.add_argument("--reward", type=float, default=10.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one solver on a problem file")
    s.add_argument("problem")
    s.add_argument("--solver", required=True, choices=solver_names())
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--policy",
                   choices=["synchronous-rounds", "random-interleave"])
    s.add_argument("--params", help="solver parameters as a JSON object")
    s.add_argument("--max-privacy-loss", type=float, default=20.0)
    s.add_argument("--max-cycles", type=int, default=10_000)
    s.add_argument("--max-messages", type=int, default=1_000_000)
    s.add_argument("--trace", help="write the message trace to this file")
    s.add_argument("--json", action="store_true",
                   help="print a machine-readable summary")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("experiment", help="run a seeded benchmark grid")
    e.add_argument("--config", help="JSON config file")
    e.add_argument("--out-csv")
    e.add_argument("--out-table")
    e.add_argument("--workers", type=int)
    e.set_defaults(func=cmd_experiment)

    c = sub.add_parser("calibrate",
                       help="tightness for a target solvability, with a check")
    c.add_argument("--agents", type=int, required=True)
    c.add_argument("--domain", type=int, required=True)
    c.add_argument("--solvability", type=float, default=0.5)
    c.add_argument("--samples", type=int, default=400)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_calibrate)

    r = sub.add_parser("replay", help="re-audit a stored trace's ledger")
    r.add_argument("trace")
    r.add_argument("--problem", help="problem file for per-line validation")
    r.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"{args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

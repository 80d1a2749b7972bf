"""Seeded experiment batches over a (agents, domain, tightness) grid.

Every solver in a cell sees the same generated instances and run seeds,
so privacy-loss comparisons between a baseline and its utilitarian twin
are paired. Results arrive as flat rows (one per run) plus per-cell means,
and render to both CSV and a text table that blanks means below 0.1,
bolds means of 10.0 and up, and caps the display at the run ceiling.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .csp_solvers import AgreementStats, merge_stats, stats_from_run
from .engine import RunLimits, mix_seed, run
from .gen import DmsParams, generate_dms
#: baseline solver behind each utilitarian twin
BASELINE_OF = {"syncbtu": "syncbt", "abtu": "abt", "adoptu": "adopt",
               "dsau": "dsa", "dbou": "dbo"}

CSP_SOLVERS = ("syncbt", "syncbtu", "abt", "abtu")

CSV_COLUMNS = ("run_id", "solver", "m", "d", "tightness_pct", "seed",
               "termination", "avg_privacy_loss", "total_domain",
               "total_assignment", "total_constraint", "total_global",
               "messages", "cycles")


@dataclass(frozen=True)
class ExperimentConfig:
    agents: tuple[int, ...] = (10, 20, 40)
    domains: tuple[int, ...] = (10, 20, 30, 40)
    tightness_pcts: tuple[int, ...] = (10, 20, 30, 40, 50)
    solvers: tuple[str, ...] = ("syncbt", "syncbtu", "abt", "abtu",
                                "dbo", "dbou", "dsa", "dsau",
                                "adopt", "adoptu")
    instances: int = 50
    base_seed: int = 0
    limits: RunLimits = field(default_factory=lambda: RunLimits(
        max_privacy_loss=20.0, max_cycles=200, max_messages=20_000))
    learning: str = "offline"   # off | offline
    privacy_cost_max: int = 9
    reward: float = 10.0
    workers: int = 1

    def cells(self):
        for m in self.agents:
            for d in self.domains:
                for t in self.tightness_pcts:
                    yield (m, d, t)


def config_from_dict(doc: dict) -> ExperimentConfig:
    """Build a config from the documented JSON schema (all keys optional)."""
    kwargs: dict = {}
    for key in ("agents", "domains", "tightness_pcts", "solvers"):
        if key in doc:
            kwargs[key] = tuple(doc[key])
    for key in ("instances", "base_seed", "privacy_cost_max", "workers"):
        if key in doc:
            kwargs[key] = int(doc[key])
    for key in ("reward",):
        if key in doc:
            kwargs[key] = float(doc[key])
    if "learning" in doc:
        kwargs["learning"] = doc["learning"]
    if "limits" in doc:
        lim = doc["limits"]
        kwargs["limits"] = RunLimits(
            max_privacy_loss=float(lim.get("max_privacy_loss", 20.0)),
            max_cycles=int(lim.get("max_cycles", 200)),
            max_messages=int(lim.get("max_messages", 20_000)))
    return ExperimentConfig(**kwargs)


def problem_kind_for(solver: str) -> str:
    return "UDisCSP" if solver in CSP_SOLVERS else "UDCOP"


def instance_seed(base: int, m: int, d: int, t_pct: int, k: int) -> int:
    return mix_seed(base, "inst", m, d, t_pct, k)


def run_seed(base: int, m: int, d: int, t_pct: int, k: int) -> int:
    return mix_seed(base, "run", m, d, t_pct, k)


def _run_cell_solver(config: ExperimentConfig, m: int, d: int, t_pct: int,
                     solver: str) -> list[dict]:
    """All instances of one cell for one solver, offline stats threading."""
    rows = []
    stats: dict[int, AgreementStats] = {}
    for k in range(config.instances):
        params = DmsParams(m=m, d=d, t=t_pct / 100.0,
                           kind=problem_kind_for(solver),
                           privacy_cost_max=config.privacy_cost_max,
                           reward=config.reward,
                           seed=instance_seed(config.base_seed, m, d, t_pct, k))
        problem = generate_dms(params)
        solver_params: dict = {}
        if config.learning == "offline" and stats:
            solver_params["agreement_stats"] = dict(stats)
        try:
            outcome = run(problem, solver, params=solver_params,
                          seed=run_seed(config.base_seed, m, d, t_pct, k),
                          limits=config.limits)
        except Exception as e:  # record the failure, keep the batch going
            rows.append({
                "run_id": f"{solver}-m{m}-d{d}-t{t_pct}-{k}",
                "solver": solver, "m": m, "d": d, "tightness_pct": t_pct,
                "seed": run_seed(config.base_seed, m, d, t_pct, k),
                "termination": f"error: {e}", "avg_privacy_loss": 0.0,
                "total_domain": 0.0, "total_assignment": 0.0,
                "total_constraint": 0.0, "total_global": 0.0,
                "messages": 0, "cycles": 0,
            })
            continue
        if config.learning == "offline" and solver in CSP_SOLVERS:
            for agent in problem.agents:
                fresh = stats_from_run(outcome, agent)
                stats[agent] = merge_stats(stats.get(agent, AgreementStats()),
                                           fresh)
        report = outcome.privacy
        rows.append({
            "run_id": f"{solver}-m{m}-d{d}-t{t_pct}-{k}",
            "solver": solver, "m": m, "d": d, "tightness_pct": t_pct,
            "seed": outcome.seed, "termination": outcome.termination,
            "avg_privacy_loss": report.average,
            "total_domain": report.by_category["domain"],
            "total_assignment": report.by_category["assignment"],
            "total_constraint": report.by_category["constraint"],
            "total_global": report.by_category["global"],
            "messages": outcome.message_count,
            "cycles": outcome.cycle_count,
        })
    return rows


def run_experiment(config: ExperimentConfig) -> list[dict]:
    """Run the whole grid; rows come back in a canonical order regardless
    of how many worker threads executed the cells."""
    tasks = [(m, d, t, solver)
             for (m, d, t) in config.cells() for solver in config.solvers]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(
                lambda args: _run_cell_solver(config, *args), tasks))
    else:
        chunks = [_run_cell_solver(config, *task) for task in tasks]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r["m"], r["d"], r["tightness_pct"],
                             r["solver"], r["run_id"]))
    return rows


def _fmt_num(x) -> str:
    if isinstance(x, float):
        return format(x, ".6g")
    return str(x)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt_num(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def cell_means(rows: list[dict]) -> dict:
    """Mean privacy loss per (m, d, tightness, solver) cell."""
    sums: dict[tuple, list[float]] = {}
    for r in rows:
        key = (r["m"], r["d"], r["tightness_pct"], r["solver"])
        sums.setdefault(key, []).append(r["avg_privacy_loss"])
    return {key: float(np.mean(vals)) for key, vals in sums.items()}


def render_cell(mean: float, ceiling: float = 20.0) -> str:
    """Table conventions: blank below 0.1, bold from 10.0, capped display."""
    if mean < 0.1:
        return ""
    shown = min(mean, ceiling)
    text = f"{shown:.1f}"
    return f"**{text}**" if shown >= 10.0 else text


def render_table(rows: list[dict], ceiling: float = 20.0) -> str:
    """Text table in the Tables layout: one block per agent count, solver
    rows against (domain x tightness) columns."""
    means = cell_means(rows)
    ms = sorted({r["m"] for r in rows})
    ds = sorted({r["d"] for r in rows})
    ts = sorted({r["tightness_pct"] for r in rows})
    solvers = sorted({r["solver"] for r in rows})
    lines = []
    for m in ms:
        lines.append(f"agents = {m}")
        header = ["solver"] + [f"d{d}/t{t}%" for d in ds for t in ts]
        lines.append(" | ".join(header))
        lines.append(" | ".join("-" * len(h) for h in header))
        for solver in solvers:
            cells = []
            for d in ds:
                for t in ts:
                    mean = means.get((m, d, t, solver))
                    cells.append("" if mean is None else render_cell(mean, ceiling))
            lines.append(" | ".join([solver] + cells))
        lines.append("")
    return "\n".join(lines)


@dataclass(frozen=True)
class PairedComparison:
    baseline: str
    twin: str
    n: int
    mean_baseline: float
    mean_twin: float
    mean_diff: float          # baseline minus twin; positive = twin reveals less
    diff_se: float
    diff_ci_low: float        # one-sided 95% lower bound on the mean difference

    @property
    def twin_not_worse(self) -> bool:
        """Twin's mean loss does not exceed the baseline's, and the paired
        difference is not significantly negative at the 95% level."""
        return (self.mean_twin <= self.mean_baseline + 1e-9
                and self.mean_diff + 1.645 * self.diff_se >= 0)


def paired_comparison(rows: list[dict], baseline: str, twin: str,
                      cell: tuple[int, int, int] | None = None) -> PairedComparison:
    """Paired privacy-loss difference between a baseline and its twin.

    Rows are matched by (cell, instance); both members of a pair ran on the
    same generated instance with the same run seed.
    """
    def key(r):
        return (r["m"], r["d"], r["tightness_pct"], r["run_id"].rsplit("-", 1)[1])

    def select(solver):
        out = {}
        for r in rows:
            if r["solver"] != solver:
                continue
            if cell and (r["m"], r["d"], r["tightness_pct"]) != cell:
                continue
            out[key(r)] = r["avg_privacy_loss"]
        return out

    base = select(baseline)
    tw = select(twin)
    shared = sorted(set(base) & set(tw))
    if not shared:
        raise ValueError(f"no paired rows for {baseline}/{twin}")
    diffs = np.array([base[k] - tw[k] for k in shared], dtype=float)
    se = float(diffs.std(ddof=1) / np.sqrt(len(diffs))) if len(diffs) > 1 else 0.0
    mean_diff = float(diffs.mean())
    return PairedComparison(
        baseline=baseline, twin=twin, n=len(diffs),
        mean_baseline=float(np.mean([base[k] for k in shared])),
        mean_twin=float(np.mean([tw[k] for k in shared])),
        mean_diff=mean_diff, diff_se=se,
        diff_ci_low=mean_diff - 1.645 * se,
    )

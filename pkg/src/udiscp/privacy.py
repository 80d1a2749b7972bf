"""Revelation ledger and privacy-loss reporting.

Every fact an agent discloses during a run is appended to a ledger entry
priced by the matching cost matrix. An item is charged at most once per
run and per (agent, category): re-proposing an already revealed value
costs nothing new.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import CATEGORIES, Problem


@dataclass(frozen=True)
class Revelation:
    agent: int
    category: str       # domain | assignment | constraint | global
    item: int           # value id, or constraint id (== priced value id)
    cost: float
    tick: int

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown privacy category: {self.category!r}")
        if self.cost < 0:
            raise ValueError("revelation cost must be >= 0")


class RevelationLedger:
    """Append-only, deduplicated record of what each agent disclosed."""

    def __init__(self, problem: Problem):
        self._problem = problem
        self.entries: list[Revelation] = []
        self._seen: set[tuple[int, str, int]] = set()

    def record(self, rev: Revelation) -> bool:
        """Append a revelation; duplicate (agent, category, item) is a no-op.

        Returns True when the entry was actually added.
        """
        if rev.item not in self._problem.domain(rev.agent):
            raise ValueError(
                f"unknown item id {rev.item} for agent {rev.agent}")
        key = (rev.agent, rev.category, rev.item)
        if key in self._seen:
            return False
        expected = self._problem.privacy_cost(rev.category, rev.agent, rev.item)
        if rev.cost != expected:
            raise ValueError(
                f"revelation cost {rev.cost} does not match the "
                f"{rev.category} matrix entry {expected}")
        self._seen.add(key)
        self.entries.append(rev)
        return True

    def total(self, agent: int | None = None, category: str | None = None) -> float:
        return sum(e.cost for e in self.entries
                   if (agent is None or e.agent == agent)
                   and (category is None or e.category == category))


@dataclass
class PrivacyReport:
    """Per-agent and aggregate privacy-loss totals for one run."""

    per_agent: dict[int, dict[str, float]]
    aggregate: float
    average: float
    by_category: dict[str, float] = field(default_factory=dict)

    def agent_total(self, agent: int) -> float:
        return sum(self.per_agent[agent].values())


def report(ledger: RevelationLedger, m: int) -> PrivacyReport:
    """Summarize a completed run's ledger.

    Averages are raw (aggregate / m); any presentation ceiling is applied
    by table rendering only, never here.
    """
    per_agent = {a: {c: 0.0 for c in CATEGORIES} for a in range(1, m + 1)}
    by_category = {c: 0.0 for c in CATEGORIES}
    for e in ledger.entries:
        per_agent[e.agent][e.category] += e.cost
        by_category[e.category] += e.cost
    aggregate = sum(by_category.values())
    return PrivacyReport(
        per_agent=per_agent,
        aggregate=aggregate,
        average=aggregate / m,
        by_category=by_category,
    )

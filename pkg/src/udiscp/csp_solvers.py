"""Backtracking solvers for distributed satisfaction problems.

Two protocols are provided: token-passing synchronous backtracking and
fully asynchronous backtracking with nogood learning. Each has a
utilitarian twin (``syncbtu`` / ``abtu``) whose agents weigh the expected
cumulative cost of revealing more of their availability against the reward
of reaching an agreement, and interrupt the search when the expectation is
no longer worth it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import engine
from .engine import (
    AddLink, AgentSnapshot, BROADCAST, Interrupt, Message, Nogood,
    Ok, ProtocolError, SolverSpec, Stop, register,
)
from .model import CSP_KINDS, INF, Problem


# ---------------------------------------------------------------------------
# Agreement-probability learning

@dataclass(frozen=True)
class AgreementStats:
    """Running record of how often a sent proposal ended a run in agreement."""

    count: int = 0
    agreement_count: int = 0

    def __post_init__(self):
        if self.count < 0 or not 0 <= self.agreement_count <= max(self.count, 0):
            raise ValueError("agreement_count must lie in [0, count]")

    @property
    def agreement_prob(self) -> float:
        if self.count == 0:
            return 0.5
        return self.agreement_count / self.count


def learn_agreement_prob(stats: AgreementStats, event: str) -> AgreementStats:
    """Fold one learning event into the stats.

    ``message-sent`` counts an ok?/nogood emission; a later
    ``run-terminated-by-this-message`` marks the already-counted message as
    the one that closed the run in agreement.
    """
    if event == "message-sent":
        return replace(stats, count=stats.count + 1)
    if event == "run-terminated-by-this-message":
        return replace(stats, agreement_count=stats.agreement_count + 1)
    raise ValueError(f"unknown learning event: {event!r}")


def stats_from_run(outcome, agent: int) -> AgreementStats:
    """Offline learning: replay one finished run's trace for one agent."""
    stats = AgreementStats()
    last_proposal = None
    for line in outcome.trace:
        if isinstance(line.payload, (Ok, Nogood)):
            if line.sender == agent:
                stats = learn_agreement_prob(stats, "message-sent")
            last_proposal = line.sender
    if outcome.termination == engine.AGREEMENT and last_proposal == agent:
        stats = learn_agreement_prob(stats, "run-terminated-by-this-message")
    return stats


def merge_stats(a: AgreementStats, b: AgreementStats) -> AgreementStats:
    return AgreementStats(a.count + b.count,
                          a.agreement_count + b.agreement_count)


# ---------------------------------------------------------------------------
# Expected revelation-cost estimator

def estimate_cost_discsp(agreement_prob: float, scenario, prob_d: float,
                         u_d_row, revealed_prefix_order) -> float:
    """Expected cumulative domain-revelation cost of pursuing the search.

    ``scenario`` lists the values that may still have to be revealed, in the
    order they would be disclosed; ``revealed_prefix_order`` is the full
    disclosure order (values already revealed first, then the scenario).
    Each proposal either ends the run (probability ``agreement_prob``),
    freezing the disclosure at the values revealed so far, or forces the
    next value out. The returned figure therefore includes already-paid
    revelations through the prefix sums.
    """
    if not 0 <= agreement_prob <= 1:
        raise ValueError("agreement_prob must lie in [0, 1]")
    if not 0 <= prob_d <= 1:
        raise ValueError("prob_d must lie in [0, 1]")
    if prob_d == 0:
        return 0.0  # dead branch of the recursion (certain acceptance)
    scenario = list(scenario)
    prefix = list(revealed_prefix_order)
    if not scenario:
        raise ValueError("scenario must name at least one value")
    if any(v not in prefix for v in scenario):
        raise ValueError("scenario values must appear in the prefix order")

    def prefix_sum(value) -> float:
        stop = prefix.index(value) + 1
        return sum(u_d_row[v] for v in prefix[:stop])

    if len(scenario) == 1:
        return prefix_sum(scenario[0]) * prob_d
    head, rest = scenario[0], scenario[1:]
    cost_round = prefix_sum(head) * (agreement_prob * prob_d)
    cost_temp = estimate_cost_discsp(
        agreement_prob, rest, (1 - agreement_prob) * prob_d, u_d_row, prefix)
    return cost_round + cost_temp


def estimate_cost_paths(agreement_prob: float, scenario, prob_d: float,
                        u_d_row, revealed_prefix_order) -> float:
    """Independent oracle for the estimator.

    Enumerates all 2^(k-1) accept/reject outcomes of a k-value scenario;
    disclosure stops at the first accepted proposal (or covers everything
    when every proposal is rejected). Used by tests; kept separate from the
    recursive form on purpose.
    """
    scenario = list(scenario)
    prefix = list(revealed_prefix_order)
    k = len(scenario)

    def prefix_sum(value):
        stop = prefix.index(value) + 1
        return sum(u_d_row[v] for v in prefix[:stop])

    if k == 1:
        return prefix_sum(scenario[0]) * prob_d
    total = 0.0
    for bits in range(2 ** (k - 1)):
        # full product over all k-1 accept/reject decisions; the outcome only
        # depends on the first accept, but weighting complete paths keeps the
        # enumeration a true probability distribution over 2^(k-1) events
        p = prob_d
        for i in range(k - 1):
            p *= agreement_prob if (bits >> i) & 1 else (1 - agreement_prob)
        stop_at = k - 1  # all rejected: everything gets revealed
        for i in range(k - 1):
            if (bits >> i) & 1:
                stop_at = i
                break
        total += p * prefix_sum(scenario[stop_at])
    return total


def should_interrupt(agreement_prob: float, scenario, u_d_row,
                     revealed_prefix_order, reward: float) -> bool:
    """Abandon the search when expected revelation cost reaches the reward."""
    if reward == INF:
        return False
    if not scenario:
        past = sum(u_d_row[v] for v in revealed_prefix_order)
        return past >= reward
    est = estimate_cost_discsp(agreement_prob, scenario, 1.0,
                               u_d_row, revealed_prefix_order)
    return est >= reward


# ---------------------------------------------------------------------------
# Shared agent machinery

class _CspAgent:
    utilitarian = False

    def __init__(self, problem: Problem, agent_id: int, params: dict, seed: int):
        self.problem = problem
        self.id = agent_id
        self.params = params
        self.rng = random.Random(seed)
        self.priority = list(params.get("priority_order") or problem.agents)
        if sorted(self.priority) != list(problem.agents):
            raise ValueError("priority_order must be a permutation of the agents")
        self.rank = self.priority.index(agent_id)
        order = list(problem.domain(agent_id))
        if params.get("value_order") == "random":
            self.rng.shuffle(order)
        self.order = order
        self.forbidden = problem.forbidden_values(agent_id)
        self.reward = problem.reward(agent_id)
        self.u_d_row = {v: problem.privacy_cost("domain", agent_id, v)
                        for v in order}
        self.revealed: list[int] = []  # own values, in disclosure order
        self.halted = False
        self._stats = AgreementStats()
        self._online = params.get("learning") == "online"
        eq: set[int] = set()
        linked: set[int] = set()
        for c in problem.constraints:
            if agent_id in c.scope and len(c.scope) > 1:
                others = [v for v in c.scope if v != agent_id]
                linked.update(others)
                if c.kind == "all-equal":
                    eq.update(others)
        self._eq_neighbors = frozenset(eq)
        self._linked = frozenset(linked)

    def conflicts_with(self, value: int, other: int, other_value: int) -> bool:
        """Entailed pairwise conflict: an all-equal forces equality."""
        return other in self._eq_neighbors and value != other_value

    # -- priorities ---------------------------------------------------------
    def outranks(self, other: int) -> bool:
        return self.priority.index(other) < self.rank

    def lowest_priority(self, variables) -> int:
        return max(variables, key=self.priority.index)

    # -- privacy ------------------------------------------------------------
    def reveal(self, value: int) -> tuple[tuple[str, int], ...]:
        if value not in self.revealed:
            self.revealed.append(value)
        return (("domain", value),)

    def agreement_prob(self) -> float:
        override = self.params.get("agreement_prob")
        if override is not None:
            return float(override)
        stats = self.params.get("agreement_stats")
        if isinstance(stats, dict):
            stats = stats.get(self.id)
        if self._online:
            merged = merge_stats(stats, self._stats) if stats else self._stats
            return merged.agreement_prob
        return stats.agreement_prob if stats else 0.5

    def note_sent_proposal(self):
        if self._online:
            self._stats = learn_agreement_prob(self._stats, "message-sent")

    def scenario_for(self, candidate: int | None):
        """Disclosure order if the search continues from here.

        The candidate (when fresh) is revealed first, then every other
        still-undisclosed value in proposal order; values whose feasibility
        is already public cost nothing again and stay in the prefix.
        """
        rest = [v for v in self.order
                if v not in self.revealed and v != candidate]
        scenario = list(rest)
        if candidate is not None and candidate not in self.revealed:
            scenario = [candidate] + scenario
        return scenario

    def gate_interrupt(self, candidate: int | None) -> bool:
        """True when a utilitarian agent should stop rather than continue."""
        if not self.utilitarian:
            return False
        if all(c == 0 for c in self.u_d_row.values()):
            return False  # nothing at stake, behave like the baseline
        scenario = self.scenario_for(candidate)
        prefix = self.revealed + scenario
        return should_interrupt(self.agreement_prob(), scenario,
                                self.u_d_row, prefix, self.reward)

    def interrupt(self) -> list[Message]:
        self.halted = True
        return [Message(self.id, BROADCAST, Interrupt())]

    # engine hooks ----------------------------------------------------------
    def snapshot(self) -> AgentSnapshot:
        return AgentSnapshot(value=getattr(self, "value", None),
                             satisfied=not self.halted)


# ---------------------------------------------------------------------------
# Synchronous backtracking

class SyncBtAgent(_CspAgent):
    """Chain token protocol: each agent extends the partial assignment it
    receives or asks its predecessor to move on."""

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.cpa: dict[int, int] = {}
        self.value: int | None = None
        self.last_index = -1

    def _predecessor(self):
        return self.priority[self.rank - 1] if self.rank > 0 else None

    def _successor(self):
        return (self.priority[self.rank + 1]
                if self.rank + 1 < len(self.priority) else None)

    def start(self) -> list[Message]:
        if self.rank != 0:
            return []
        return self._try_from(0)

    def handle(self, batch) -> list[Message]:
        out: list[Message] = []
        for msg in batch:
            if isinstance(msg.payload, Ok):
                self.cpa = dict(msg.payload.assignment)
                self.cpa.pop(self.id, None)
                out.extend(self._try_from(0))
            elif isinstance(msg.payload, Nogood):
                out.extend(self._try_from(self.last_index + 1))
            elif isinstance(msg.payload, (Stop, Interrupt)):
                self.halted = True
            else:
                raise ProtocolError(
                    f"unexpected payload for syncbt: {msg.payload!r}")
        return out

    def _consistent(self, value: int) -> bool:
        if value in self.forbidden:
            return False
        return not any(self.conflicts_with(value, var, val)
                       for var, val in self.cpa.items())

    def _try_from(self, start_idx: int) -> list[Message]:
        for idx in range(start_idx, len(self.order)):
            v = self.order[idx]
            if not self._consistent(v):
                continue
            if self.gate_interrupt(v):
                return self.interrupt()
            self.value = v
            self.last_index = idx
            extended = dict(self.cpa)
            extended[self.id] = v
            reveals = self.reveal(v)
            self.note_sent_proposal()
            nxt = self._successor()
            if nxt is None:
                self.halted = True
                return [Message(self.id, BROADCAST,
                                Stop("agreement", tuple(sorted(extended.items()))),
                                reveals)]
            return [Message(self.id, nxt, Ok(tuple(sorted(extended.items()))),
                            reveals)]
        # domain exhausted for this partial assignment
        self.value = None
        self.last_index = len(self.order)
        prev = self._predecessor()
        if prev is None:
            self.halted = True
            return [Message(self.id, BROADCAST, Stop("no-solution"))]
        if self.gate_interrupt(None):
            return self.interrupt()
        self.note_sent_proposal()
        return [Message(self.id, prev, Nogood(tuple(sorted(self.cpa.items()))))]


class SyncBtuAgent(SyncBtAgent):
    utilitarian = True


# ---------------------------------------------------------------------------
# Asynchronous backtracking

class AbtAgent(_CspAgent):
    """Asynchronous backtracking with minimal-explanation nogoods.

    An agent keeps the assignments of higher-priority agents in its view,
    eliminates values through unary constraints, entailed pairwise
    conflicts and stored nogoods, and resolves a new nogood from one
    explanation per eliminated value when its domain wipes out.
    """

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.view: dict[int, int] = {}
        self.nogoods: list[dict[int, int]] = []
        self.extra_links: set[int] = set()
        self.value: int | None = None

    def _lower_neighbors(self) -> list[int]:
        linked = self._linked | self.extra_links
        return sorted((a for a in linked if self.priority.index(a) > self.rank),
                      key=self.priority.index)

    def start(self) -> list[Message]:
        return self._check_view()

    def handle(self, batch) -> list[Message]:
        out: list[Message] = []
        for msg in batch:
            p = msg.payload
            if isinstance(p, Ok):
                if not p.assignment:
                    raise ProtocolError("empty ok? payload")
                for var, val in p.assignment:
                    if self.outranks(var):
                        self.view[var] = val
            elif isinstance(p, Nogood):
                ng = dict(p.assignment)
                if self.id not in ng:
                    raise ProtocolError("nogood does not mention the receiver")
                if ng not in self.nogoods:
                    self.nogoods.append(ng)
                for var, val in ng.items():
                    if var != self.id and self.outranks(var) and var not in self.view:
                        self.view[var] = val
                        out.append(Message(self.id, var, AddLink(self.id)))
            elif isinstance(p, AddLink):
                self.extra_links.add(msg.sender)
                if self.value is not None:
                    out.append(Message(self.id, msg.sender,
                                       Ok(((self.id, self.value),)),
                                       self.reveal(self.value)))
            elif isinstance(p, (Stop, Interrupt)):
                self.halted = True
                return out
            else:
                raise ProtocolError(f"unexpected payload for abt: {p!r}")
        out.extend(self._check_view())
        return out

    # -- consistency bookkeeping -------------------------------------------
    def _explanation(self, value: int) -> dict[int, int] | None:
        """Why `value` is unusable right now; None when it is fine.

        Candidate explanations are ranked by context size so the resolved
        nogood stays small; pairwise conflicts blame the lowest-priority
        conflicting assignment to keep backtracking near.
        """
        candidates = []
        if value in self.forbidden:
            candidates.append({})
        for ng in self.nogoods:
            if ng.get(self.id) != value:
                continue
            context = {var: val for var, val in ng.items() if var != self.id}
            if all(self.view.get(var) == val for var, val in context.items()):
                candidates.append(context)
        conflicts = [var for var, val in self.view.items()
                     if self.conflicts_with(value, var, val)]
        if conflicts:
            low = self.lowest_priority(conflicts)
            candidates.append({low: self.view[low]})
        if not candidates:
            return None
        return min(candidates,
                   key=lambda c: (len(c), sorted(self.priority.index(v) for v in c)))

    def _check_view(self) -> list[Message]:
        out: list[Message] = []
        while True:
            explanations = {v: self._explanation(v) for v in self.order}
            if self.value is not None and explanations[self.value] is None:
                return out
            candidates = [v for v in self.order if explanations[v] is None]
            if candidates:
                d = candidates[0]
                if self.gate_interrupt(d):
                    out.extend(self.interrupt())
                    return out
                self.value = d
                lowers = self._lower_neighbors()
                for target in lowers:
                    out.append(Message(self.id, target,
                                       Ok(((self.id, d),)),
                                       self.reveal(d)))
                if lowers:
                    self.note_sent_proposal()
                return out
            # wipeout: resolve a nogood
            nogood: dict[int, int] = {}
            for v in self.order:
                nogood.update(explanations[v])
            if not nogood:
                self.halted = True
                out.append(Message(self.id, BROADCAST, Stop("no-solution")))
                return out
            if self.gate_interrupt(None):
                out.extend(self.interrupt())
                return out
            target = self.lowest_priority(nogood)
            payload = dict(nogood)
            out.append(Message(self.id, target,
                               Nogood(tuple(sorted(payload.items())))))
            self.note_sent_proposal()
            del self.view[target]
            # re-evaluate with the shortened view (may cascade)


class AbtuAgent(AbtAgent):
    utilitarian = True


def _factory(cls):
    def make(problem, agent_id, params, seed):
        return cls(problem, agent_id, params, seed)
    return make


register(SolverSpec("syncbt", _factory(SyncBtAgent), CSP_KINDS,
                    "synchronous-rounds", "csp-sync"))
register(SolverSpec("syncbtu", _factory(SyncBtuAgent), CSP_KINDS,
                    "synchronous-rounds", "csp-sync"))
register(SolverSpec("abt", _factory(AbtAgent), CSP_KINDS,
                    "random-interleave", "csp-async"))
register(SolverSpec("abtu", _factory(AbtuAgent), CSP_KINDS,
                    "random-interleave", "csp-async"))

"""Optimization solvers: a complete tree search and two local searches.

Each baseline ships with a utilitarian twin that estimates what a value
change costs in expected solution quality plus revelation privacy, and
changes value only when that estimate strictly drops. With all-zero
privacy matrices nothing is at stake and every twin falls back to its
baseline decision rule, reproducing it message for message.

A lexicographic variant of the stochastic search (``dsa-lex``) evaluates
candidate moves as (privacy, solution) pairs with privacy prevailing but
prices only the candidate's own revelation, demonstrating how myopic
multi-objective accounting understates cumulative privacy loss.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import (
    AgentSnapshot, Improve, Message, ProtocolError, SolverSpec,
    Terminate, Value, ViewCost, register,
)
from .model import DCOP_KINDS, INF, Problem


# ---------------------------------------------------------------------------
# Cost estimation

def estimate_cost_dcop(utilities, domain, revealed, local_constraints,
                       mode: str = "averaged") -> float:
    """Believed cost of a state given what has been revealed so far.

    ``utilities`` maps each value to its revelation price (assignment or
    constraint privacy row); ``local_constraints`` maps each value to the
    finite weight of the unary constraint pricing it. The solution term
    treats every revealed value as equally likely to end up final, so it
    averages their weights; ``mode="raw-sum"`` keeps the plain sum instead
    (kept for study, it never lets a change look worthwhile).
    """
    if mode not in ("averaged", "raw-sum"):
        raise ValueError(f"unknown estimator mode: {mode!r}")
    seen: list = []
    for item in revealed:
        if item not in domain:
            raise ValueError(f"revealed item {item} outside the domain")
        if item not in seen:
            seen.append(item)
    if not seen:
        return 0.0
    privacy = sum(utilities[v] for v in seen)
    weights = [local_constraints.get(v, 0.0) for v in seen]
    solution = sum(weights) / len(weights) if mode == "averaged" else sum(weights)
    return solution + privacy


@dataclass(frozen=True)
class CostPair:
    """(solution, privacy) evaluation of a state; compared privacy first."""

    solution_cost: float
    privacy_cost: float

    def key(self):
        return (self.privacy_cost, self.solution_cost)


def lex_less(a: CostPair, b: CostPair) -> bool:
    """Strict lexicographic order with the privacy criterion prevailing."""
    return a.key() < b.key()


# ---------------------------------------------------------------------------
# Shared machinery

class _DcopAgent:
    utilitarian = False
    privacy_category = "constraint"

    def __init__(self, problem: Problem, agent_id: int, params: dict, seed: int):
        self.problem = problem
        self.id = agent_id
        self.params = params
        self.rng = random.Random(seed)
        self.domain = list(problem.domain(agent_id))
        self.category = params.get("privacy_kind", self.privacy_category)
        if self.category not in ("assignment", "constraint"):
            raise ValueError(f"unknown privacy kind: {self.category!r}")
        self.u_row = {v: problem.privacy_cost(self.category, agent_id, v)
                      for v in self.domain}
        self.weights_table = problem.unary_weight_table(agent_id)
        self.forbidden = problem.forbidden_values(agent_id)
        self.estimator_mode = params.get("estimator", "averaged")
        self.revealed: list[int] = []
        self.halted = False
        self.value: int | None = None
        forced = params.get("forced_candidates") or {}
        self._forced = list(forced.get(agent_id, []))
        linked: set[int] = set()
        eq: set[int] = set()
        for c in problem.constraints:
            if agent_id in c.scope and len(c.scope) > 1:
                others = [v for v in c.scope if v != agent_id]
                linked.update(others)
                if c.kind == "all-equal":
                    eq.update(others)
        self._neighbors = sorted(linked)
        self._eq_neighbors = frozenset(eq)

    def neighbors(self) -> list[int]:
        return self._neighbors

    def equality_coupled(self, other: int) -> bool:
        return other in self._eq_neighbors

    def _ingest_values(self, batch) -> bool:
        changed = False
        for msg in batch:
            if isinstance(msg.payload, Value):
                if self.view.get(msg.sender) != msg.payload.value:
                    self.view[msg.sender] = msg.payload.value
                    changed = True
            else:
                raise ProtocolError(
                    f"unexpected payload for {type(self).__name__}: {msg.payload!r}")
        return changed

    def initial_value(self) -> int:
        injected = (self.params.get("initial_values") or {}).get(self.id)
        if injected is not None:
            return injected
        return self.rng.choice(self.domain)

    def draw_candidate(self) -> int:
        if self._forced:
            return self._forced.pop(0)
        return self.rng.choice(self.domain)

    def reveal(self, value: int) -> tuple[tuple[str, int], ...]:
        if value not in self.revealed:
            self.revealed.append(value)
        return ((self.category, value),)

    def estimate(self, revealed) -> float:
        return estimate_cost_dcop(self.u_row, self.domain, revealed,
                                  self.weights_table, self.estimator_mode)

    def privacy_at_stake(self) -> bool:
        return any(c != 0 for c in self.u_row.values())

    def gate_allows(self, candidate: int, baseline_improves: bool) -> bool:
        """Utilitarian change rule with the zero-privacy fallback.

        With no revelation prices the twin has nothing to trade and takes
        the baseline decision; otherwise a change must strictly decrease
        the believed total cost.
        """
        if not self.privacy_at_stake():
            return baseline_improves
        before = self.estimate(self.revealed)
        after = self.estimate(self.revealed + [candidate])
        return after < before

    def local_eval(self, value: int, view: dict[int, int]):
        """(hard violations, soft cost) of holding `value` under `view`."""
        hard = 1 if value in self.forbidden else 0
        for var, val in view.items():
            if self.equality_coupled(var) and val != value:
                hard += 1
        soft = self.problem.unary_cost(self.id, value)
        if soft == INF:
            soft = 0.0  # already counted as a hard violation
        return (hard, soft)

    def snapshot(self) -> AgentSnapshot:
        return AgentSnapshot(value=self.value, satisfied=not self.halted,
                             done=getattr(self, "done", False))


# ---------------------------------------------------------------------------
# Stochastic local search

class DsaAgent(_DcopAgent):
    """Baseline stochastic search.

    ``dsa_mode="best-response"`` (default) flips an activation coin with
    probability ``dsa_p`` each round and moves to the best local response
    when it strictly improves. ``dsa_mode="random-candidate"`` instead
    draws one uniform candidate whenever the view changed and takes it on
    strict improvement; it consumes randomness exactly like the
    utilitarian twin, which is what paired-trace comparisons need.
    """

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.view: dict[int, int] = {}
        self.mode = params.get("dsa_mode", "best-response")
        if self.mode not in ("best-response", "random-candidate"):
            raise ValueError(f"unknown dsa_mode: {self.mode!r}")
        self.p = float(params.get("dsa_p", 0.6))

    def start(self) -> list[Message]:
        self.value = self.initial_value()
        return self.announce()

    def announce(self) -> list[Message]:
        return [Message(self.id, n, Value(self.value), self.reveal(self.value))
                for n in self.neighbors()]

    def handle(self, batch) -> list[Message]:
        changed = self._ingest_values(batch)
        if self.mode == "best-response":
            if self.rng.random() >= self.p:
                return []
            candidate = min(self.domain,
                            key=lambda d: (self.local_eval(d, self.view), d))
        else:
            if not changed:
                return []
            candidate = self.draw_candidate()
        if candidate == self.value:
            return []
        if self.local_eval(candidate, self.view) < self.local_eval(self.value, self.view):
            self.value = candidate
            return self.announce()
        return []


class DsauAgent(_DcopAgent):
    """Utilitarian stochastic search: one uniform candidate per view change,
    adopted only when the believed (solution, privacy) total strictly drops."""

    utilitarian = True

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.view: dict[int, int] = {}

    def start(self) -> list[Message]:
        self.value = self.initial_value()
        return self.announce()

    def announce(self) -> list[Message]:
        return [Message(self.id, n, Value(self.value), self.reveal(self.value))
                for n in self.neighbors()]

    def handle(self, batch) -> list[Message]:
        changed = self._ingest_values(batch)
        if not changed:
            return []
        candidate = self.draw_candidate()
        if candidate == self.value:
            return []
        baseline = (self.local_eval(candidate, self.view)
                    < self.local_eval(self.value, self.view))
        if self.gate_allows(candidate, baseline):
            self.value = candidate
            return self.announce()
        return []


class DsaLexAgent(_DcopAgent):
    """Multi-objective comparison variant: moves when the candidate's
    (privacy, solution) pair beats the current one lexicographically,
    pricing only the candidate's own revelation (myopic accounting)."""

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.view: dict[int, int] = {}

    def start(self) -> list[Message]:
        self.value = self.initial_value()
        return self.announce()

    def announce(self) -> list[Message]:
        return [Message(self.id, n, Value(self.value), self.reveal(self.value))
                for n in self.neighbors()]

    def current_pair(self) -> CostPair:
        return CostPair(solution_cost=self.weights_table.get(self.value, 0.0),
                        privacy_cost=sum(self.u_row[v] for v in self.revealed))

    def believed_pair(self, candidate: int) -> CostPair:
        price = 0.0 if candidate in self.revealed else self.u_row[candidate]
        return CostPair(solution_cost=self.weights_table.get(candidate, 0.0),
                        privacy_cost=price)

    def handle(self, batch) -> list[Message]:
        changed = self._ingest_values(batch)
        if not changed:
            return []
        candidate = self.draw_candidate()
        if candidate == self.value:
            return []
        if lex_less(self.believed_pair(candidate), self.current_pair()):
            self.value = candidate
            return self.announce()
        return []


# ---------------------------------------------------------------------------
# Distributed breakout

class DboAgent(_DcopAgent):
    """Weighted-violation hill climbing with breakout.

    Rounds alternate between a value phase (everyone announces its value)
    and an improve phase (everyone announces how much it could improve);
    the unique regional winner moves, and a quasi-local-minimum raises the
    weights of the violated constraints so the search can escape it.
    """

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        self.view: dict[int, int] = {}
        self.pair_weights = {n: 1.0 for n in self.neighbors()}
        self.unary_weights = {v: 1.0 for v in self.forbidden}
        self.pending: int | None = None
        self.my_improve = 0.0
        self.tc = 0
        self.max_distance = int(params.get("dbo_max_distance", problem.m))

    def start(self) -> list[Message]:
        self.value = self.initial_value()
        return self.announce()

    def announce(self) -> list[Message]:
        return [Message(self.id, n, Value(self.value), self.reveal(self.value))
                for n in self.neighbors()]

    def weighted_eval(self, value: int) -> float:
        if value in self.forbidden:
            total = self.unary_weights.get(value, 1.0)
        else:
            total = self.weights_table.get(value, 0.0)
        for var, val in self.view.items():
            if self.equality_coupled(var) and val != value:
                total += self.pair_weights[var]
        return total

    def handle(self, batch) -> list[Message]:
        values = [m for m in batch if isinstance(m.payload, Value)]
        improves = [m for m in batch if isinstance(m.payload, Improve)]
        if values and improves:
            raise ProtocolError("mixed value/improve phases")
        if values:
            for m in values:
                self.view[m.sender] = m.payload.value
            return self._send_improve()
        if improves:
            return self._resolve_improves(improves)
        return []

    def _send_improve(self) -> list[Message]:
        eval_now = self.weighted_eval(self.value)
        candidate = min(self.domain, key=lambda d: (self.weighted_eval(d), d))
        improve = eval_now - self.weighted_eval(candidate)
        if improve > 0:
            baseline_improves = True
            if self.utilitarian and not self.gate_allows(candidate, baseline_improves):
                improve = 0.0
                candidate = self.value
        else:
            improve = 0.0
            candidate = self.value
        self.my_improve = improve
        self.pending = candidate
        self.tc = self.tc + 1 if eval_now == 0 else 0
        return [Message(self.id, n,
                        Improve(self.value, improve, eval_now, self.tc))
                for n in self.neighbors()]

    def _resolve_improves(self, improves) -> list[Message]:
        theirs = {m.sender: m.payload.improve for m in improves}
        if self.my_improve > 0 and all(
                self.my_improve > imp or (self.my_improve == imp and self.id < a)
                for a, imp in theirs.items()):
            self.value = self.pending
        elif self.my_improve <= 0 and all(imp <= 0 for imp in theirs.values()):
            # quasi-local minimum: raise the weights of violated constraints
            if self.weighted_eval(self.value) > 0:
                if self.value in self.forbidden:
                    self.unary_weights[self.value] = (
                        self.unary_weights.get(self.value, 1.0) + 1.0)
                for var, val in self.view.items():
                    if self.equality_coupled(var) and val != self.value:
                        self.pair_weights[var] += 1.0
        return self.announce()


class DbouAgent(DboAgent):
    utilitarian = True


# ---------------------------------------------------------------------------
# Tree-based optimal search

class AdoptAgent(_DcopAgent):
    """Complete search over a priority chain used as the pseudo-tree.

    Each agent holds per-value lower/upper bounds reported by its single
    chain child, keeps the value with the best optimistic bound, and
    reports its subtree bounds upward. When the root's bounds meet, the
    optimum is found and a shutdown cascade fixes the assignment.
    """

    privacy_category = "assignment"

    def __init__(self, problem, agent_id, params, seed):
        super().__init__(problem, agent_id, params, seed)
        tree = params.get("adopt_tree", "chain")
        if tree not in ("chain", "dfs"):
            raise ValueError(f"unknown adopt_tree: {tree!r}")
        # the benchmark family couples every pair of variables, for which a
        # depth-first traversal of the constraint graph in priority order IS
        # the chain; both spellings build the same structure
        chain = list(params.get("priority_order") or problem.agents)
        if sorted(chain) != list(problem.agents):
            raise ValueError("priority_order must be a permutation of the agents")
        self.chain = chain
        self.rank = chain.index(agent_id)
        self.parent = chain[self.rank - 1] if self.rank > 0 else None
        self.child = chain[self.rank + 1] if self.rank + 1 < len(chain) else None
        self.descendants = chain[self.rank + 1:]
        self.context: dict[int, int] = {}
        self.lb = {d: 0.0 for d in self.domain}
        self.ub = {d: INF for d in self.domain}
        self.child_ctx: dict[int, dict | None] = {d: None for d in self.domain}
        self.done = False
        self.terminating = False

    # -- bounds ---------------------------------------------------------
    def delta(self, d: int) -> float:
        cost = self.problem.unary_cost(self.id, d)
        for var, val in self.context.items():
            if self.equality_coupled(var) and val != d:
                return INF
        return cost

    def LB(self, d: int) -> float:
        base = self.delta(d)
        return base if self.child is None else base + self.lb[d]

    def UB(self, d: int) -> float:
        base = self.delta(d)
        return base if self.child is None else base + self.ub[d]

    def best_value(self) -> int:
        return min(self.domain, key=lambda d: (self.LB(d), self.UB(d),
                                               self.domain.index(d)))

    def _invalidate(self) -> bool:
        dropped = False
        for d in self.domain:
            stored = self.child_ctx[d]
            if stored is None:
                continue
            if any(self.context.get(k) is not None and self.context[k] != v
                   for k, v in stored.items()):
                self.lb[d] = 0.0
                self.ub[d] = INF
                self.child_ctx[d] = None
                dropped = True
        return dropped

    # -- protocol ---------------------------------------------------------
    def start(self) -> list[Message]:
        self.value = (self.params.get("initial_values") or {}).get(self.id)
        if self.value is None:
            self.value = self.best_value()
        out = self._announce_value()
        out.extend(self._report_cost())
        out.extend(self._check_done())
        return out

    def _announce_value(self) -> list[Message]:
        return [Message(self.id, n, Value(self.value), self.reveal(self.value))
                for n in self.descendants]

    def _report_cost(self) -> list[Message]:
        # reported after every activation: receivers may have dropped their
        # stored copy on a context change and need the repeat
        if self.parent is None or self.done:
            return []
        lb = min(self.LB(d) for d in self.domain)
        ub = min(self.UB(d) for d in self.domain)
        ctx = tuple(sorted(self.context.items()))
        return [Message(self.id, self.parent, ViewCost(ctx, lb, ub))]

    def handle(self, batch) -> list[Message]:
        out: list[Message] = []
        poke = False
        for msg in batch:
            p = msg.payload
            if isinstance(p, Value):
                if msg.sender not in self.chain[:self.rank]:
                    raise ProtocolError("value message from a lower agent")
                if self.context.get(msg.sender) != p.value:
                    self.context[msg.sender] = p.value
                    self._invalidate()
                    # any context change warrants a prod: a report sent
                    # under the old context may have just been discarded
                    poke = True
            elif isinstance(p, ViewCost):
                poke |= self._ingest_cost(p)
            elif isinstance(p, Terminate):
                ctx = dict(p.context)
                ctx.pop(self.id, None)
                self.context.update(
                    {k: v for k, v in ctx.items() if k in self.chain[:self.rank]})
                self._invalidate()
                self.terminating = True
                poke = True
            else:
                raise ProtocolError(f"unexpected payload for adopt: {p!r}")
        if self.done:
            return out
        changed = self._maybe_change()
        if changed or poke:
            # re-announcing after dropping stored bounds prods the child
            # into a fresh report; the protocol has no other pull
            out.extend(self._announce_value())
        out.extend(self._report_cost())
        out.extend(self._check_done())
        return out

    def _ingest_cost(self, p: ViewCost) -> bool:
        """Store a child's bound report; returns True when stored data had
        to be dropped and the child needs a fresh prod."""
        ctx = dict(p.context)
        if self.id not in ctx:
            return False  # cannot attribute the report to one of our values
        d = ctx.pop(self.id)
        if d not in self.domain:
            raise ProtocolError(f"cost report for foreign value {d}")
        # adopt piggybacked ancestor values we have not heard directly yet,
        # so stored bounds are never conditioned on context we ignore
        adopted = False
        for k, v in ctx.items():
            if k in self.chain[:self.rank] and k not in self.context:
                self.context[k] = v
                adopted = True
        if adopted:
            self._invalidate()
        if any(self.context.get(k) is not None and self.context[k] != v
               for k, v in ctx.items()):
            return adopted  # stale report
        self.lb[d] = p.lb
        self.ub[d] = p.ub
        self.child_ctx[d] = ctx
        return adopted

    def _maybe_change(self) -> bool:
        nv = self.best_value()
        if nv == self.value:
            return False
        # once the shutdown cascade is running the outcome is decided and
        # exploration must finish so bounds can close; no more gating
        if self.utilitarian and not self.terminating:
            if not self.gate_allows(nv, baseline_improves=True):
                return False
        self.value = nv
        return True

    def _check_done(self) -> list[Message]:
        at_root = self.parent is None
        if not (at_root or self.terminating) or self.done:
            return []
        lb = min(self.LB(d) for d in self.domain)
        ub = min(self.UB(d) for d in self.domain)
        if lb != ub:
            return []
        final = min(self.domain, key=lambda d: (self.UB(d), self.domain.index(d)))
        self.value = final
        self.done = True
        if self.child is None:
            return []
        ctx = dict(self.context)
        ctx[self.id] = final
        return [Message(self.id, self.child,
                        Terminate(tuple(sorted(ctx.items()))))]


class AdoptuAgent(AdoptAgent):
    utilitarian = True


def _factory(cls):
    def make(problem, agent_id, params, seed):
        return cls(problem, agent_id, params, seed)
    return make


register(SolverSpec("dsa", _factory(DsaAgent), DCOP_KINDS,
                    "synchronous-rounds", "local-search"))
register(SolverSpec("dsau", _factory(DsauAgent), DCOP_KINDS,
                    "synchronous-rounds", "local-search"))
register(SolverSpec("dsa-lex", _factory(DsaLexAgent), DCOP_KINDS,
                    "synchronous-rounds", "local-search"))
register(SolverSpec("dbo", _factory(DboAgent), DCOP_KINDS,
                    "synchronous-rounds", "local-search"))
register(SolverSpec("dbou", _factory(DbouAgent), DCOP_KINDS,
                    "synchronous-rounds", "local-search"))
register(SolverSpec("adopt", _factory(AdoptAgent), DCOP_KINDS,
                    "random-interleave", "tree"))
register(SolverSpec("adoptu", _factory(AdoptuAgent), DCOP_KINDS,
                    "random-interleave", "tree"))

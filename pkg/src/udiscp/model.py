"""Problem model for distributed constraint solving with privacy costs.

A problem couples one variable per agent (ids 1..m) with unary and global
constraints, four matrices of revelation costs (domain, assignment,
global-solution and constraint privacy) and a per-agent agreement reward.
Plain satisfaction problems (DisCSP) and optimization problems (DCOP) are
the zero-privacy special cases of their utilitarian extensions (UDisCSP,
UDCOP).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

INF = math.inf

KINDS = ("DisCSP", "DCOP", "UDisCSP", "UDCOP")
CSP_KINDS = ("DisCSP", "UDisCSP")
DCOP_KINDS = ("DCOP", "UDCOP")

#: privacy categories, in ledger/report order
CATEGORIES = ("domain", "assignment", "constraint", "global")


@dataclass(frozen=True)
class Constraint:
    """A single constraint.

    kind is one of:
      * ``unary-forbid``: scope (v,), ``value`` may not be assigned; violation
        cost is infinite.
      * ``unary-valued``: scope (v,), ``table`` maps value -> finite cost paid
        when the value is assigned.
      * ``all-equal``: spans every variable; infinite cost unless all agree.
    """

    scope: tuple[int, ...]
    kind: str
    value: int | None = None
    table: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(int(v) for v in self.scope))
        if self.kind == "unary-forbid":
            if len(self.scope) != 1 or self.value is None:
                raise ValueError("unary-forbid needs a single variable and a value")
        elif self.kind == "unary-valued":
            if len(self.scope) != 1 or not self.table:
                raise ValueError("unary-valued needs a single variable and a table")
            if any(c < 0 for _, c in self.table):
                raise ValueError("constraint costs must be >= 0")
            object.__setattr__(
                self, "table",
                tuple(sorted((int(v), float(c)) for v, c in self.table)))
        elif self.kind == "all-equal":
            if len(self.scope) < 2:
                raise ValueError("all-equal must span at least two variables")
        else:
            raise ValueError(f"unknown constraint kind: {self.kind!r}")

    def cost_table(self) -> dict[int, float]:
        assert self.kind == "unary-valued"
        return dict(self.table)


def unary_valued(var: int, table: dict[int, float]) -> Constraint:
    return Constraint((var,), "unary-valued", table=tuple(sorted(table.items())))


def unary_forbid(var: int, value: int) -> Constraint:
    return Constraint((var,), "unary-forbid", value=value)


def all_equal(n_vars: int) -> Constraint:
    return Constraint(tuple(range(1, n_vars + 1)), "all-equal")


@dataclass(frozen=True)
class PrivacyCosts:
    """Revelation cost matrices, one row per agent.

    u_d, u_a, u_g are indexed by domain position (cost of revealing whether /
    that a value is used); u_c by local constraint id, which for this model's
    unary constraint tables coincides with the domain position of the value
    the constraint prices.
    """

    u_d: tuple[tuple[float, ...], ...]
    u_a: tuple[tuple[float, ...], ...]
    u_g: tuple[tuple[float, ...], ...]
    u_c: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for name in ("u_d", "u_a", "u_g", "u_c"):
            mat = getattr(self, name)
            object.__setattr__(
                self, name, tuple(tuple(float(x) for x in row) for row in mat))

    def matrix(self, category: str) -> tuple[tuple[float, ...], ...]:
        return {"domain": self.u_d, "assignment": self.u_a,
                "global": self.u_g, "constraint": self.u_c}[category]

    def is_zero(self) -> bool:
        return all(x == 0 for m in (self.u_d, self.u_a, self.u_g, self.u_c)
                   for row in m for x in row)


def zero_privacy(m: int, d: int) -> PrivacyCosts:
    row = tuple(tuple(0.0 for _ in range(d)) for _ in range(m))
    return PrivacyCosts(row, row, row, row)


@dataclass(frozen=True)
class Problem:
    kind: str
    domains: tuple[tuple[int, ...], ...]
    constraints: tuple[Constraint, ...]
    privacy: PrivacyCosts
    rewards: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "domains", tuple(tuple(int(v) for v in d) for d in self.domains))
        object.__setattr__(self, "rewards", tuple(float(r) for r in self.rewards))
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind: {self.kind!r}")
        m = self.m
        if m == 0:
            raise ValueError("a problem needs at least one agent")
        for dom in self.domains:
            if not dom or len(set(dom)) != len(dom):
                raise ValueError("domains must be non-empty without duplicates")
        for c in self.constraints:
            if any(not 1 <= v <= m for v in c.scope):
                raise ValueError(f"constraint scope {c.scope} references unknown variables")
        if len(self.rewards) != m or any(r < 0 for r in self.rewards):
            raise ValueError("rewards must be one non-negative entry per agent")
        for cat in CATEGORIES:
            mat = self.privacy.matrix(cat)
            if len(mat) != m:
                raise ValueError(f"privacy matrix {cat}: expected {m} rows")
            for i, row in enumerate(mat):
                if len(row) != len(self.domains[i]):
                    raise ValueError(f"privacy matrix {cat}: row {i + 1} has wrong width")
                if any(x < 0 for x in row):
                    raise ValueError("privacy costs must be >= 0")
        if self.kind in ("DisCSP", "DCOP") and not self.privacy.is_zero():
            raise ValueError(f"kind {self.kind} requires all-zero privacy costs")

    @property
    def m(self) -> int:
        return len(self.domains)

    @property
    def agents(self) -> range:
        return range(1, self.m + 1)

    def domain(self, agent: int) -> tuple[int, ...]:
        return self.domains[agent - 1]

    def reward(self, agent: int) -> float:
        return self.rewards[agent - 1]

    def privacy_cost(self, category: str, agent: int, value: int) -> float:
        """Cost for `agent` to reveal `value` under the given category."""
        pos = self.domain(agent).index(value)
        return self.privacy.matrix(category)[agent - 1][pos]

    def local_constraints(self, agent: int) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if agent in c.scope)

    def forbidden_values(self, agent: int) -> frozenset[int]:
        return frozenset(c.value for c in self.constraints
                         if c.kind == "unary-forbid" and c.scope == (agent,))

    def unary_cost(self, agent: int, value: int) -> float:
        """Sum of this agent's unary constraint costs if it assigns `value`."""
        total = 0.0
        for c in self.constraints:
            if c.scope != (agent,):
                continue
            if c.kind == "unary-forbid" and c.value == value:
                return INF
            if c.kind == "unary-valued":
                total += c.cost_table().get(value, 0.0)
        return total

    def unary_weight_table(self, agent: int) -> dict[int, float]:
        """Finite per-value weight of the agent's unary constraints.

        Valued constraints contribute their cost; a hard forbid contributes
        weight 1 (the violation-count currency local search uses). Values
        with no unary constraint weigh 0.
        """
        table: dict[int, float] = {v: 0.0 for v in self.domain(agent)}
        for c in self.constraints:
            if c.scope != (agent,):
                continue
            if c.kind == "unary-forbid":
                table[c.value] = table.get(c.value, 0.0) + 1.0
            elif c.kind == "unary-valued":
                for v, cost in c.table:
                    table[v] = table.get(v, 0.0) + cost
        return table


Assignment = dict  # variable id -> value id, possibly partial


def utility(rewards_earned, costs_paid) -> float:
    """Net utility of a state: total rewards minus total costs paid."""
    rewards = list(rewards_earned)
    costs = list(costs_paid)
    if any(r < 0 for r in rewards) or any(c < 0 for c in costs):
        raise ValueError("rewards and costs must be >= 0")
    return sum(rewards) - sum(costs)


def _constraint_cost(c: Constraint, a: Assignment) -> float:
    if c.kind == "unary-forbid":
        return INF if a[c.scope[0]] == c.value else 0.0
    if c.kind == "unary-valued":
        return c.cost_table().get(a[c.scope[0]], 0.0)
    first = a[c.scope[0]]
    return 0.0 if all(a[v] == first for v in c.scope) else INF


def evaluate_assignment(problem: Problem, a: Assignment) -> float:
    """Total constraint cost of a total assignment (inf on hard violation)."""
    missing = [v for v in problem.agents if v not in a]
    if missing:
        raise ValueError(f"incomplete assignment: variables {missing} unassigned")
    for var, val in a.items():
        if val not in problem.domain(var):
            raise ValueError(f"value {val} outside the domain of variable {var}")
    return sum(_constraint_cost(c, a) for c in problem.constraints)


def is_consistent(problem: Problem, a: Assignment) -> bool:
    """True iff no constraint fully instantiated by `a` has infinite cost.

    Partially instantiated constraints are not judged; {x1=2, x2=1} does not
    yet violate an all-equal over three variables.
    """
    for c in problem.constraints:
        if all(v in a for v in c.scope) and _constraint_cost(c, a) == INF:
            return False
    return True


def brute_force_solve(problem: Problem, bound: int = 10 ** 7):
    """Exhaustive search oracle.

    Returns (assignment, cost) for the minimum-cost total assignment, or
    None when every total assignment violates a hard constraint. For
    satisfaction kinds the first finite-cost assignment (in domain order)
    is returned. Raises when the search space exceeds `bound`.
    """
    space = 1
    for dom in problem.domains:
        space *= len(dom)
    if space > bound:
        raise ValueError(f"oracle bound exceeded: {space} > {bound}")
    variables = list(problem.agents)
    best = None
    best_cost = INF
    for combo in itertools.product(*problem.domains):
        a = dict(zip(variables, combo))
        cost = evaluate_assignment(problem, a)
        if cost == INF:
            continue
        if problem.kind in CSP_KINDS:
            return a, cost
        if cost < best_cost:
            best, best_cost = a, cost
    if best is None:
        return None
    return best, best_cost


# ---------------------------------------------------------------------------
# File format: JSON with canonical key order, bit-exact round-trip.

def _constraint_to_json(c: Constraint) -> dict:
    out: dict = {"scope": list(c.scope), "kind": c.kind}
    if c.kind == "unary-forbid":
        out["value"] = c.value
    elif c.kind == "unary-valued":
        out["table"] = {str(v): cost for v, cost in c.table}
    return out


def _constraint_from_json(obj: dict) -> Constraint:
    kind = obj.get("kind")
    scope = obj.get("scope")
    if not isinstance(scope, list) or not scope:
        raise ValueError("constraint needs a non-empty scope list")
    if kind == "unary-forbid":
        return unary_forbid(scope[0], obj["value"])
    if kind == "unary-valued":
        table = {int(k): float(v) for k, v in obj["table"].items()}
        return unary_valued(scope[0], table)
    if kind == "all-equal":
        return Constraint(tuple(scope), "all-equal")
    raise ValueError(f"unknown constraint kind: {kind!r}")


def serialize(problem: Problem) -> str:
    """Canonical JSON text for a problem; parse(serialize(p)) == p."""
    mats = {}
    for key, cat in (("u_d", "domain"), ("u_a", "assignment"),
                     ("u_g", "global"), ("u_c", "constraint")):
        mat = problem.privacy.matrix(cat)
        if any(x != 0 for row in mat for x in row):
            mats[key] = [list(row) for row in mat]
    doc = {
        "kind": problem.kind,
        "agents": problem.m,
        "domains": [list(d) for d in problem.domains],
        "constraints": [_constraint_to_json(c) for c in problem.constraints],
        "privacy": mats,
        "rewards": list(problem.rewards),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse(text: str) -> Problem:
    """Parse the JSON problem format, validating all model invariants."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"problem file is not valid JSON: line {e.lineno} column {e.colno}") from e
    if not isinstance(doc, dict):
        raise ValueError("problem file must hold a JSON object")
    try:
        m = int(doc["agents"])
        domains = tuple(tuple(int(v) for v in dom) for dom in doc["domains"])
        constraints = tuple(_constraint_from_json(c) for c in doc["constraints"])
    except KeyError as e:
        raise ValueError(f"problem file is missing key {e}") from e
    if len(domains) != m:
        raise ValueError(f"expected {m} domains, found {len(domains)}")
    priv = doc.get("privacy") or {}
    mats = {}
    for key in ("u_d", "u_a", "u_g", "u_c"):
        if key in priv:
            mats[key] = tuple(tuple(float(x) for x in row) for row in priv[key])
        else:
            mats[key] = tuple(tuple(0.0 for _ in dom) for dom in domains)
    rewards = doc.get("rewards")
    if rewards is None:
        rewards = [0.0] * m
    return Problem(
        kind=doc.get("kind", "DisCSP"),
        domains=domains,
        constraints=constraints,
        privacy=PrivacyCosts(**mats),
        rewards=tuple(float(r) for r in rewards),
    )

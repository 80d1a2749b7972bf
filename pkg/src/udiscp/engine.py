"""Deterministic in-process simulation of message-passing agents.

A run owns one problem, one agent automaton per variable, a seeded
scheduler and a revelation ledger. Two delivery policies exist:

* ``synchronous-rounds``: every message sent in round k is delivered at
  the start of round k+1; agents are activated in id order and process
  their whole inbox at once.
* ``random-interleave``: a seeded scheduler repeatedly picks one pending
  message uniformly at random and delivers it, simulating asynchrony.

Given equal (problem, solver, params, seed, limits, policy) two runs
produce byte-identical traces.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from typing import Callable

from .model import Problem, evaluate_assignment, is_consistent
from .privacy import PrivacyReport, Revelation, RevelationLedger, report

BROADCAST = 0


# ---------------------------------------------------------------------------
# Message payloads

@dataclass(frozen=True)
class Ok:
    """Assignment announcement; a single entry for asynchronous solvers,
    the whole current partial assignment for synchronous backtracking."""
    assignment: tuple[tuple[int, int], ...]

    def render(self) -> str:
        body = ",".join(f"x{v}={val}" for v, val in sorted(self.assignment))
        return "ok?{%s}" % body


@dataclass(frozen=True)
class Nogood:
    """A partial assignment proven infeasible."""
    assignment: tuple[tuple[int, int], ...]

    def render(self) -> str:
        body = ",".join(f"x{v}={val}" for v, val in sorted(self.assignment))
        return "nogood{%s}" % body


@dataclass(frozen=True)
class AddLink:
    variable: int

    def render(self) -> str:
        return f"addlink(x{self.variable})"


@dataclass(frozen=True)
class Value:
    value: int

    def render(self) -> str:
        return f"value({self.value})"


@dataclass(frozen=True)
class ViewCost:
    """Bound report sent towards the tree root: context plus lower and
    upper bound on the best cost of the sender's subtree."""
    context: tuple[tuple[int, int], ...]
    lb: float
    ub: float

    def render(self) -> str:
        body = ",".join(f"x{v}={val}" for v, val in sorted(self.context))
        return "cost{%s}lb=%s,ub=%s" % (body, _fmt(self.lb), _fmt(self.ub))


@dataclass(frozen=True)
class Improve:
    value: int
    improve: float
    eval: float
    termination_counter: int

    def render(self) -> str:
        return "improve(value=%s,improve=%s,eval=%s,tc=%d)" % (
            self.value, _fmt(self.improve), _fmt(self.eval),
            self.termination_counter)


@dataclass(frozen=True)
class Terminate:
    """Tree-solver shutdown cascade carrying the fixed ancestor context."""
    context: tuple[tuple[int, int], ...]

    def render(self) -> str:
        body = ",".join(f"x{v}={val}" for v, val in sorted(self.context))
        return "terminate{%s}" % body


@dataclass(frozen=True)
class Interrupt:
    def render(self) -> str:
        return "interrupt"


class ProtocolError(Exception):
    """Raised by an agent on a malformed payload; recorded in the trace."""


@dataclass(frozen=True)
class ProtocolNote:
    text: str

    def render(self) -> str:
        return f"protocol-error({self.text})"


@dataclass(frozen=True)
class Stop:
    reason: str  # agreement | no-solution
    assignment: tuple[tuple[int, int], ...] | None = None

    def render(self) -> str:
        return f"stop({self.reason})"


def _fmt(x: float) -> str:
    if x == math.inf:
        return "inf"
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


@dataclass(frozen=True)
class Message:
    sender: int
    recipient: int  # BROADCAST for everyone else
    payload: object
    reveals: tuple[tuple[str, int], ...] = ()  # (category, item) pairs


# ---------------------------------------------------------------------------
# Run configuration and outcome

@dataclass(frozen=True)
class RunLimits:
    max_privacy_loss: float = 20.0
    max_cycles: int = 10_000
    max_messages: int = 1_000_000

    def __post_init__(self):
        if self.max_privacy_loss <= 0 or self.max_cycles <= 0 or self.max_messages <= 0:
            raise ValueError("all run limits must be positive")


@dataclass(frozen=True)
class TraceLine:
    tick: int
    sender: int
    recipient: int
    payload: object
    delta: tuple[Revelation, ...] = ()

    def render(self) -> str:
        rcpt = "*" if self.recipient == BROADCAST else str(self.recipient)
        delta = ";".join(
            "u_%s[%d,%d]=%s" % (r.category[0] if r.category != "global" else "g",
                                r.agent, r.item, _fmt(r.cost))
            for r in self.delta)
        return f"{self.tick}|{self.sender}|{rcpt}|{self.payload.render()}|{delta}"


AGREEMENT = "agreement"
NO_SOLUTION = "no-solution"
INTERRUPTED = "interrupted"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class RunOutcome:
    termination: str
    assignment: dict | None
    privacy: PrivacyReport
    message_count: int
    cycle_count: int
    trace: list[TraceLine]
    solver: str
    seed: int
    cost: float | None = None

    def render_trace(self) -> str:
        return "\n".join(line.render() for line in self.trace) + "\n"


@dataclass
class AgentSnapshot:
    value: int | None
    satisfied: bool
    done: bool = False


# ---------------------------------------------------------------------------
# Solver registry

@dataclass(frozen=True)
class SolverSpec:
    name: str
    factory: Callable  # (problem, agent_id, params, seed) -> agent
    kinds: tuple[str, ...]
    default_policy: str             # synchronous-rounds | random-interleave
    family: str                     # csp-sync | csp-async | tree | local-search

REGISTRY: dict[str, SolverSpec] = {}


def register(spec: SolverSpec) -> None:
    REGISTRY[spec.name] = spec


def solver_names() -> list[str]:
    return sorted(REGISTRY)


def mix_seed(*parts) -> int:
    """Stable cross-platform seed derivation from arbitrary labels."""
    text = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def step(agent, messages):
    """Drive one agent transition: returns (agent, outgoing messages).

    The transition is pure in the sense that all state lives on the agent
    and all randomness comes from its seeded generator.
    """
    for msg in messages:
        if msg.recipient not in (BROADCAST, agent.id):
            raise ValueError(
                f"message for agent {msg.recipient} delivered to {agent.id}")
    return agent, agent.handle(list(messages))


def detect_termination(trace, quiescent_consistent: bool | None = None) -> str:
    """Classify how a run ended from its trace.

    Explicit signals win: any Interrupt means interrupted, an explicit Stop
    carries its own reason. Otherwise the caller states whether the engine
    went quiescent on a consistent stable assignment.
    """
    for line in trace:
        if isinstance(line.payload, Interrupt):
            return INTERRUPTED
    for line in trace:
        if isinstance(line.payload, Stop):
            return AGREEMENT if line.payload.reason == AGREEMENT else NO_SOLUTION
    if quiescent_consistent:
        return AGREEMENT
    return BUDGET_EXHAUSTED


# ---------------------------------------------------------------------------
# The run loop

class _Run:
    def __init__(self, problem, spec, params, seed, limits, policy):
        self.problem = problem
        self.spec = spec
        self.params = dict(params or {})
        self.seed = seed
        self.limits = limits
        self.policy = policy
        self.ledger = RevelationLedger(problem)
        self.trace: list[TraceLine] = []
        self.tick = 0
        self.cycles = 0
        self.termination: str | None = None
        self.stop_assignment: dict | None = None
        self.best: tuple[float, dict] | None = None
        self.agents = {
            a: spec.factory(problem, a, self.params,
                            mix_seed(seed, "agent", a))
            for a in problem.agents
        }

    def halted(self, agent_id: int) -> bool:
        return getattr(self.agents[agent_id], "halted", False)

    def activate(self, agent_id: int, batch: list[Message]) -> list[Message]:
        try:
            return self.agents[agent_id].handle(batch)
        except ProtocolError as e:
            self.trace.append(TraceLine(
                self.tick, agent_id, agent_id, ProtocolNote(str(e)), ()))
            return []

    def record_sends(self, outgoing: list[Message]) -> bool:
        """Trace and price a batch of sends; returns False once the run
        must stop (interrupt or explicit stop observed)."""
        keep_going = True
        capped: list[int] = []
        for msg in outgoing:
            delta = []
            for category, item in msg.reveals:
                cost = self.problem.privacy_cost(category, msg.sender, item)
                rev = Revelation(msg.sender, category, item, cost, self.tick)
                if self.ledger.record(rev):
                    delta.append(rev)
            self.trace.append(TraceLine(
                self.tick, msg.sender, msg.recipient, msg.payload, tuple(delta)))
            if isinstance(msg.payload, Interrupt):
                self.termination = INTERRUPTED
                keep_going = False
            elif isinstance(msg.payload, Stop):
                self.termination = (AGREEMENT if msg.payload.reason == AGREEMENT
                                    else NO_SOLUTION)
                if msg.payload.assignment is not None:
                    self.stop_assignment = dict(msg.payload.assignment)
                keep_going = False
            if (delta and msg.sender not in capped
                    and self.ledger.total(agent=msg.sender)
                    >= self.limits.max_privacy_loss):
                capped.append(msg.sender)
        # privacy ceiling: a capped agent behaves as if it had interrupted,
        # after the batch it was emitting is out the door
        if capped and self.termination is None:
            sender = capped[0]
            self.agents[sender].halted = True
            self.trace.append(TraceLine(
                self.tick, sender, BROADCAST, Interrupt(), ()))
            self.termination = INTERRUPTED
            keep_going = False
        if len(self.trace) > self.limits.max_messages and self.termination is None:
            self.termination = BUDGET_EXHAUSTED
            keep_going = False
        return keep_going

    def snapshot_assignment(self) -> dict | None:
        a = {}
        for i, agent in self.agents.items():
            snap = agent.snapshot()
            if snap.value is None:
                return None
            a[i] = snap.value
        return a

    def track_best(self):
        a = self.snapshot_assignment()
        if a is None:
            return
        cost = evaluate_assignment(self.problem, a)
        if self.best is None or cost < self.best[0]:
            self.best = (cost, dict(a))

    def run_sync(self):
        local_search = self.spec.family == "local-search"
        stall_limit = int(self.params.get("stall_rounds", 50))
        stall = 0
        queue: list[Message] = []
        for a in self.problem.agents:
            out = self.agents[a].start()
            if not self.record_sends(out):
                return
            queue.extend(out)
        self.track_best()
        while True:
            if not queue and not local_search:
                return  # quiescent
            if local_search and (stall >= stall_limit or all(
                    self.halted(a) for a in self.problem.agents)):
                return
            if self.cycles >= self.limits.max_cycles:
                self.termination = BUDGET_EXHAUSTED
                return
            self.cycles += 1
            self.tick = self.cycles
            inboxes: dict[int, list[Message]] = {a: [] for a in self.problem.agents}
            for msg in queue:
                if msg.recipient == BROADCAST:
                    for a in self.problem.agents:
                        if a != msg.sender:
                            inboxes[a].append(msg)
                else:
                    inboxes[msg.recipient].append(msg)
            queue = []
            before = {a: self.agents[a].snapshot().value for a in self.problem.agents}
            for a in self.problem.agents:
                if self.halted(a):
                    continue
                if not inboxes[a] and not local_search:
                    continue
                out = self.activate(a, inboxes[a])
                if not self.record_sends(out):
                    return
                queue.extend(out)
            self.track_best()
            if local_search:
                after = {a: self.agents[a].snapshot().value
                         for a in self.problem.agents}
                stall = stall + 1 if after == before else 0
                current = self.snapshot_assignment()
                if current is not None and evaluate_assignment(
                        self.problem, current) == 0:
                    self.termination = AGREEMENT
                    self.stop_assignment = dict(current)
                    return

    def run_interleave(self):
        # Delivery picks a random pending channel, but each channel stays
        # FIFO: asynchronous solvers rely on in-order links.
        rng = random.Random(mix_seed(self.seed, "sched"))
        channels: dict[tuple[int, int], list[Message]] = {}

        def enqueue(msgs):
            for m in msgs:
                channels.setdefault((m.sender, m.recipient), []).append(m)

        for a in self.problem.agents:
            out = self.agents[a].start()
            if not self.record_sends(out):
                return
            enqueue(out)
        while True:
            pending = sorted(k for k, q in channels.items() if q)
            if not pending:
                return  # quiescent
            if self.cycles >= self.limits.max_cycles:
                self.termination = BUDGET_EXHAUSTED
                return
            key = pending[rng.randrange(len(pending))]
            msg = channels[key].pop(0)
            self.cycles += 1
            self.tick = self.cycles
            targets = ([a for a in self.problem.agents if a != msg.sender]
                       if msg.recipient == BROADCAST else [msg.recipient])
            for a in targets:
                if self.halted(a):
                    continue
                out = self.activate(a, [msg])
                if not self.record_sends(out):
                    return
                enqueue(out)

    def finish(self) -> RunOutcome:
        assignment = self.stop_assignment
        termination = self.termination
        if termination is None:
            # queue drained without an explicit signal
            if self.spec.family == "local-search":
                if self.best and self.best[0] == 0:
                    termination = AGREEMENT
                    assignment = dict(self.best[1])
                else:
                    termination = BUDGET_EXHAUSTED
            elif self.spec.family == "tree" and not all(
                    self.agents[a].snapshot().done for a in self.problem.agents):
                termination = BUDGET_EXHAUSTED  # protocol stalled mid-search
            else:
                a = self.snapshot_assignment()
                if a is not None and is_consistent(self.problem, a):
                    termination = AGREEMENT
                    assignment = a
                else:
                    termination = NO_SOLUTION
        if termination == AGREEMENT and assignment is None:
            assignment = self.snapshot_assignment()
        elif termination == BUDGET_EXHAUSTED:
            if self.best is not None:
                assignment = dict(self.best[1])
        else:
            if termination in (INTERRUPTED, NO_SOLUTION):
                assignment = None
        cost = None
        if assignment is not None and len(assignment) == self.problem.m:
            cost = evaluate_assignment(self.problem, assignment)
        return RunOutcome(
            termination=termination,
            assignment=assignment,
            privacy=report(self.ledger, self.problem.m),
            message_count=len(self.trace),
            cycle_count=self.cycles,
            trace=self.trace,
            solver=self.spec.name,
            seed=self.seed,
            cost=cost,
        )


def run(problem: Problem, solver: str, params: dict | None = None,
        seed: int = 0, limits: RunLimits | None = None,
        policy: str | None = None) -> RunOutcome:
    """Execute one solver on one problem to quiescence or a limit."""
    if solver not in REGISTRY:
        raise ValueError(f"unknown solver {solver!r}; known: {solver_names()}")
    spec = REGISTRY[solver]
    if problem.kind not in spec.kinds:
        raise ValueError(
            f"solver {solver} expects problem kinds {spec.kinds}, got {problem.kind}")
    limits = limits or RunLimits()
    policy = policy or spec.default_policy
    if policy not in ("synchronous-rounds", "random-interleave"):
        raise ValueError(f"unknown scheduling policy {policy!r}")
    r = _Run(problem, spec, params, seed, limits, policy)
    if policy == "synchronous-rounds":
        r.run_sync()
    else:
        r.run_interleave()
    return r.finish()

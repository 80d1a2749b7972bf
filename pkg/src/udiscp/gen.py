"""Random meeting-scheduling instance generation and tightness calibration.

A generated instance has one variable per participant over the slots
{1..d}, a global all-equal constraint, and per-(participant, slot)
unavailability drawn independently with probability t (the tightness).
Under that model a slot survives all m participants with probability
(1-t)^m, so the chance that at least one common slot exists is
1 - (1 - (1-t)^m)^d, which inverts to a closed form for the tightness
hitting a target solvability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import mix_seed
from .model import (
    KINDS, PrivacyCosts, Problem, all_equal, unary_forbid, zero_privacy,
)


@dataclass(frozen=True)
class DmsParams:
    m: int
    d: int
    t: float
    kind: str = "UDisCSP"
    privacy_cost_max: int = 9
    reward: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 2 or self.d < 1 or not 0 <= self.t < 1:
            raise ValueError("need m >= 2, d >= 1 and 0 <= t < 1")
        if self.kind not in KINDS:
            raise ValueError(f"unknown problem kind: {self.kind!r}")


def tightness_for_solution_probability(s: float, m: int, d: int) -> float:
    """Tightness giving probability `s` of at least one common slot."""
    if not 0 < s < 1:
        raise ValueError("target solvability must lie strictly between 0 and 1")
    return 1.0 - (1.0 - (1.0 - s) ** (1.0 / d)) ** (1.0 / m)


def _forbid_row(rng: random.Random, d: int, t: float) -> list[int]:
    """Draw one participant's unavailable slots; never everything at once.

    A full wipe-out would leave the agent without any proposable value, so
    such rows are re-drawn (rare for sane t) and the re-draw count is kept
    implicit in the stream of the seeded generator.
    """
    while True:
        row = [v for v in range(1, d + 1) if rng.random() < t]
        if len(row) < d:
            return row


def generate_dms(params: DmsParams) -> Problem:
    """Generate one instance; identical params produce an identical problem."""
    rng = random.Random(mix_seed(params.seed, "dms", params.m, params.d,
                                 round(params.t, 9), params.kind))
    constraints = [all_equal(params.m)]
    for agent in range(1, params.m + 1):
        for value in _forbid_row(rng, params.d, params.t):
            constraints.append(unary_forbid(agent, value))
    if params.kind in ("DisCSP", "DCOP"):
        privacy = zero_privacy(params.m, params.d)
    else:
        def matrix():
            return tuple(
                tuple(float(rng.randint(0, params.privacy_cost_max))
                      for _ in range(params.d))
                for _ in range(params.m))
        privacy = PrivacyCosts(u_d=matrix(), u_a=matrix(),
                               u_g=matrix(), u_c=matrix())
    return Problem(
        kind=params.kind,
        domains=tuple(tuple(range(1, params.d + 1)) for _ in range(params.m)),
        constraints=tuple(constraints),
        privacy=privacy,
        rewards=tuple(params.reward for _ in range(params.m)),
    )


def has_common_slot(problem: Problem) -> bool:
    """Satisfiability of an all-equal instance: some value nobody forbids."""
    m = problem.m
    for value in problem.domain(1):
        if all(value not in problem.forbidden_values(a) for a in problem.agents):
            return True
    return False


def empirical_solvability(m: int, d: int, t: float, n_samples: int,
                          seed: int = 0) -> float:
    """Fraction of sampled instances with at least one common slot."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    hits = 0
    for k in range(n_samples):
        rng = random.Random(mix_seed(seed, "solvability", m, d, k))
        for value in range(d):
            if all(rng.random() >= t for _ in range(m)):
                hits += 1
                break
    return hits / n_samples

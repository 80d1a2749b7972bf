import random

import pytest
from hypothesis import given, settings, strategies as st

from udiscp.csp_solvers import (
    AgreementStats, estimate_cost_discsp, estimate_cost_paths,
    learn_agreement_prob, merge_stats, should_interrupt,
)

SLOT_COSTS = {1: 1, 2: 2, 3: 4}


def test_fresh_start_scenario():
    # first decision over the whole domain: 0.5 + 0.75 + 1.75
    est = estimate_cost_discsp(0.5, (1, 2, 3), 1.0, SLOT_COSTS, (1, 2, 3))
    assert est == pytest.approx(3.0)


def test_singleton_base_case():
    assert estimate_cost_discsp(0.5, (2,), 1.0, SLOT_COSTS, (2,)) == 2.0
    assert estimate_cost_discsp(0.9, (3,), 1.0, SLOT_COSTS, (1, 2, 3)) == 7.0


def test_mid_run_scenario_with_prefix():
    # value 1 already revealed; about to offer 3, then 2 would follow:
    # (1+4)/2 + (1+4+2)/2 = 6
    est = estimate_cost_discsp(0.5, (3, 2), 1.0, SLOT_COSTS, (1, 3, 2))
    assert est == pytest.approx(6.0)


def test_validation_errors():
    with pytest.raises(ValueError, match="at least one"):
        estimate_cost_discsp(0.5, (), 1.0, SLOT_COSTS, (1,))
    with pytest.raises(ValueError, match="agreement_prob"):
        estimate_cost_discsp(1.5, (1,), 1.0, SLOT_COSTS, (1,))
    with pytest.raises(ValueError, match="prob_d"):
        estimate_cost_discsp(0.5, (1,), 1.2, SLOT_COSTS, (1,))
    with pytest.raises(ValueError, match="prob_d"):
        estimate_cost_discsp(0.5, (1,), -0.1, SLOT_COSTS, (1,))
    with pytest.raises(ValueError, match="prefix"):
        estimate_cost_discsp(0.5, (9,), 1.0, SLOT_COSTS, (1, 2, 3))


def _random_case(rng):
    k = rng.randint(1, 10)
    already = rng.randint(0, 3)
    values = list(range(1, k + already + 1))
    rng.shuffle(values)
    prefix = values[:]
    scenario = values[already:]
    costs = {v: rng.uniform(0, 9) for v in values}
    ap = rng.random()
    pd = rng.uniform(0.05, 1.0)
    return ap, scenario, pd, costs, prefix


def test_matches_exhaustive_path_enumeration():
    rng = random.Random(20240811)
    for _ in range(1000):
        ap, scenario, pd, costs, prefix = _random_case(rng)
        fast = estimate_cost_discsp(ap, scenario, pd, costs, prefix)
        slow = estimate_cost_paths(ap, scenario, pd, costs, prefix)
        assert abs(fast - slow) <= 1e-9


def test_path_weights_conserve_probability():
    rng = random.Random(7)
    for _ in range(50):
        ap, scenario, pd, costs, prefix = _random_case(rng)
        unit = {v: 0.0 for v in prefix}
        # with all-zero costs the expectation is zero regardless of paths;
        # with unit cost on the first prefix value every branch pays it, so
        # the expectation equals the total branch probability = prob_d
        unit[prefix[0]] = 1.0
        assert estimate_cost_discsp(ap, scenario, pd, unit, prefix) == \
            pytest.approx(pd)


@settings(max_examples=60)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_monotone_in_agreement_prob(ap1, ap2):
    lo, hi = sorted((ap1, ap2))
    rng = random.Random(int(1000 * (lo + hi)) + 3)
    _, scenario, pd, costs, prefix = _random_case(rng)
    higher_acceptance = estimate_cost_discsp(hi, scenario, pd, costs, prefix)
    lower_acceptance = estimate_cost_discsp(lo, scenario, pd, costs, prefix)
    assert higher_acceptance <= lower_acceptance + 1e-12


def test_should_interrupt_threshold():
    # start of the search: cost 3 < reward 4, keep going
    assert not should_interrupt(0.5, (1, 2, 3), SLOT_COSTS, (1, 2, 3), 4)
    # mid-run: cost 6 >= reward 5, stop (the comparison is >=)
    assert should_interrupt(0.5, (3, 2), SLOT_COSTS, (1, 3, 2), 5)
    assert should_interrupt(0.5, (3, 2), SLOT_COSTS, (1, 3, 2), 6.0)
    # infinite reward disables the extension
    assert not should_interrupt(0.5, (3, 2), SLOT_COSTS, (1, 3, 2), float("inf"))


def test_should_interrupt_exhausted_scenario():
    # nothing left to reveal: only sunk cost against the reward
    assert should_interrupt(0.5, (), SLOT_COSTS, (1, 2, 3), 7)
    assert not should_interrupt(0.5, (), SLOT_COSTS, (1,), 7)


def test_agreement_stats_defaults_and_ratio():
    assert AgreementStats().agreement_prob == 0.5
    assert AgreementStats(10, 5).agreement_prob == 0.5
    assert AgreementStats(8, 2).agreement_prob == 0.25


def test_agreement_stats_validation():
    with pytest.raises(ValueError):
        AgreementStats(2, 3)


def test_learn_agreement_prob_events():
    stats = AgreementStats()
    for _ in range(10):
        stats = learn_agreement_prob(stats, "message-sent")
    for _ in range(5):
        stats = learn_agreement_prob(stats, "run-terminated-by-this-message")
    assert stats.count == 10 and stats.agreement_count == 5
    assert stats.agreement_prob == 0.5
    with pytest.raises(ValueError, match="event"):
        learn_agreement_prob(stats, "lost-the-plot")


def test_merge_stats():
    merged = merge_stats(AgreementStats(4, 1), AgreementStats(4, 1))
    assert merged == AgreementStats(8, 2)
    assert merged.agreement_prob == 0.25

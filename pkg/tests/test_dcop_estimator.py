import random

import pytest
from hypothesis import given, strategies as st

from udiscp.dcop_solvers import CostPair, estimate_cost_dcop, lex_less

# the meeting-place scenario, first participant: travel costs and the
# prices on revealing each cost entry
WEIGHTS_1 = {1: 70.0, 2: 230.0, 3: 270.0}
PRICES_1 = {1: 80.0, 2: 20.0, 3: 40.0}
DOMAIN = (1, 2, 3)


def test_single_revealed_value():
    assert estimate_cost_dcop(PRICES_1, DOMAIN, [1], WEIGHTS_1) == 150.0


def test_two_revealed_values_average_solution_cost():
    est = estimate_cost_dcop(PRICES_1, DOMAIN, [1, 2], WEIGHTS_1)
    assert est == pytest.approx((70 + 230) / 2 + 80 + 20)  # 250


def test_empty_revealed_set():
    assert estimate_cost_dcop(PRICES_1, DOMAIN, [], WEIGHTS_1) == 0.0


def test_duplicates_ignored():
    once = estimate_cost_dcop(PRICES_1, DOMAIN, [1, 2], WEIGHTS_1)
    twice = estimate_cost_dcop(PRICES_1, DOMAIN, [1, 2, 1, 2, 2], WEIGHTS_1)
    assert once == twice


def test_unknown_item_rejected():
    with pytest.raises(ValueError, match="domain"):
        estimate_cost_dcop(PRICES_1, DOMAIN, [7], WEIGHTS_1)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError, match="mode"):
        estimate_cost_dcop(PRICES_1, DOMAIN, [1], WEIGHTS_1, mode="vibes")


def test_raw_sum_mode_never_shrinks():
    # the plain-sum reading of the believed cost cannot decrease when a
    # value is added, which is what makes it useless as a change rule
    rng = random.Random(5)
    for _ in range(50):
        revealed = [v for v in DOMAIN if rng.random() < 0.5]
        extra = rng.choice(DOMAIN)
        base = estimate_cost_dcop(PRICES_1, DOMAIN, revealed, WEIGHTS_1,
                                  mode="raw-sum")
        more = estimate_cost_dcop(PRICES_1, DOMAIN, revealed + [extra],
                                  WEIGHTS_1, mode="raw-sum")
        assert more >= base


def test_privacy_additivity():
    # one more revealed item with no unary weight raises the estimate by
    # exactly its price
    weights = {1: 0.0, 2: 0.0, 3: 0.0}
    rng = random.Random(9)
    for _ in range(50):
        prices = {v: rng.uniform(0, 9) for v in DOMAIN}
        base = estimate_cost_dcop(prices, DOMAIN, [1], weights)
        more = estimate_cost_dcop(prices, DOMAIN, [1, 3], weights)
        assert more - base == pytest.approx(prices[3])


@given(st.floats(0, 100), st.floats(0, 100), st.floats(0, 100),
       st.floats(0, 100), st.floats(0, 100), st.floats(0, 100))
def test_lex_order_is_total_and_transitive(p1, s1, p2, s2, p3, s3):
    a, b, c = CostPair(s1, p1), CostPair(s2, p2), CostPair(s3, p3)
    # antisymmetric
    assert not (lex_less(a, b) and lex_less(b, a))
    # total: one of <, >, == holds
    assert lex_less(a, b) or lex_less(b, a) or a.key() == b.key()
    # transitive
    if lex_less(a, b) and lex_less(b, c):
        assert lex_less(a, c)


def test_lex_privacy_prevails():
    assert lex_less(CostPair(solution_cost=230, privacy_cost=20),
                    CostPair(solution_cost=70, privacy_cost=80))
    assert not lex_less(CostPair(solution_cost=40, privacy_cost=80),
                        CostPair(solution_cost=230, privacy_cost=10))

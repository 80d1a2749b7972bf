import pytest
from hypothesis import given, strategies as st

from udiscp.model import (
    INF, Problem, PrivacyCosts, all_equal, brute_force_solve,
    evaluate_assignment, is_consistent, parse, serialize, unary_forbid,
    unary_valued, utility, zero_privacy,
)
from udiscp.problems import meeting_slot_udiscsp


def test_utility_direct_sums():
    assert utility([5], [1, 4]) == 0
    assert utility([5], [6]) == -1
    assert utility([], []) == 0


def test_utility_rejects_negative_inputs():
    with pytest.raises(ValueError):
        utility([-1], [])
    with pytest.raises(ValueError):
        utility([], [-2])


@given(st.lists(st.floats(0, 100), max_size=6),
       st.lists(st.floats(0, 100), max_size=6),
       st.lists(st.floats(0, 100), max_size=6))
def test_utility_linear_in_costs(rewards, costs, extra):
    base = utility(rewards, costs)
    assert utility(rewards, costs + extra) == pytest.approx(base - sum(extra))


def test_evaluate_assignment_sums_travel_costs(place_dcop):
    assert evaluate_assignment(place_dcop, {1: 1, 2: 1, 3: 1}) == 230
    assert evaluate_assignment(place_dcop, {1: 2, 2: 2, 3: 2}) == 910
    assert evaluate_assignment(place_dcop, {1: 3, 2: 3, 3: 3}) == 690


def test_evaluate_assignment_hard_violations(place_dcop, slot_discsp):
    assert evaluate_assignment(place_dcop, {1: 1, 2: 2, 3: 3}) == INF
    assert evaluate_assignment(slot_discsp, {1: 2, 2: 2, 3: 2}) == INF


def test_evaluate_assignment_requires_total(place_dcop):
    with pytest.raises(ValueError, match="incomplete"):
        evaluate_assignment(place_dcop, {1: 1})


def test_is_consistent_partial_semantics(slot_discsp):
    # only fully instantiated constraints are judged
    assert is_consistent(slot_discsp, {1: 1})
    assert not is_consistent(slot_discsp, {3: 1})
    assert is_consistent(slot_discsp, {1: 2, 2: 1})


def test_consistency_matches_finite_cost_on_total(slot_discsp, place_dcop):
    for problem in (slot_discsp, place_dcop):
        for v1 in (1, 2, 3):
            for v2 in (1, 2, 3):
                for v3 in (1, 2, 3):
                    a = {1: v1, 2: v2, 3: v3}
                    cost = evaluate_assignment(problem, a)
                    assert cost >= 0
                    assert (cost == INF) == (not is_consistent(problem, a))


def test_brute_force_optimum(place_dcop):
    assignment, cost = brute_force_solve(place_dcop)
    assert assignment == {1: 1, 2: 1, 3: 1}
    assert cost == 230


def test_brute_force_unsatisfiable(slot_discsp):
    assert brute_force_solve(slot_discsp) is None


def test_brute_force_trivial_problem():
    p = Problem("DisCSP", ((1, 2), (1, 2)), (all_equal(2),),
                zero_privacy(2, 2), (0, 0))
    assignment, cost = brute_force_solve(p)
    assert assignment == {1: 1, 2: 1}
    assert cost == 0


def test_brute_force_no_constraints_returns_first_assignment():
    p = Problem("DisCSP", ((4, 7), (2, 9)), (), zero_privacy(2, 2), (0, 0))
    assignment, cost = brute_force_solve(p)
    assert assignment == {1: 4, 2: 2}
    assert cost == 0


def test_brute_force_bound():
    p = Problem("DisCSP", ((1, 2),) * 4, (all_equal(4),),
                zero_privacy(4, 2), (0,) * 4)
    with pytest.raises(ValueError, match="oracle bound"):
        brute_force_solve(p, bound=10)


def test_roundtrip_is_exact(slot_discsp, place_dcop, place_udcop_c):
    for p in (slot_discsp, place_dcop, place_udcop_c, meeting_slot_udiscsp()):
        assert parse(serialize(p)) == p
        # serializing again is byte-identical
        assert serialize(parse(serialize(p))) == serialize(p)


def test_parse_rejects_bad_json():
    with pytest.raises(ValueError, match="line"):
        parse("{not json")


def test_parse_rejects_missing_keys():
    with pytest.raises(ValueError):
        parse("{}")


def test_kind_invariant_rejects_nonzero_privacy():
    u = ((1.0, 0.0),) * 2
    with pytest.raises(ValueError, match="all-zero"):
        Problem("DisCSP", ((1, 2), (1, 2)), (all_equal(2),),
                PrivacyCosts(u, u, u, u), (0, 0))


def test_constraint_validation():
    with pytest.raises(ValueError):
        unary_valued(1, {})
    with pytest.raises(ValueError):
        unary_valued(1, {1: -5})
    with pytest.raises(ValueError):
        all_equal(1)
    c = unary_forbid(2, 3)
    assert c.scope == (2,) and c.value == 3


def test_domain_validation():
    with pytest.raises(ValueError, match="duplicates"):
        Problem("DisCSP", ((1, 1),), (), zero_privacy(1, 2), (0,))


def test_privacy_cost_indexed_by_domain_position():
    p = meeting_slot_udiscsp()
    assert p.privacy_cost("domain", 2, 1) == 1
    assert p.privacy_cost("domain", 2, 2) == 2
    assert p.privacy_cost("domain", 2, 3) == 4


def test_unary_weight_table(place_dcop, slot_discsp):
    assert place_dcop.unary_weight_table(1) == {1: 70.0, 2: 230.0, 3: 270.0}
    # hard forbids weigh 1 in the finite table
    assert slot_discsp.unary_weight_table(3) == {1: 1.0, 2: 0.0, 3: 0.0}

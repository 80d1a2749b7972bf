import pytest

from udiscp.privacy import Revelation, RevelationLedger, report
from udiscp.problems import meeting_slot_udiscsp


@pytest.fixture
def ledger():
    return RevelationLedger(meeting_slot_udiscsp())


def test_record_and_totals(ledger):
    assert ledger.record(Revelation(2, "domain", 1, 1.0, 0))
    assert ledger.record(Revelation(2, "domain", 3, 4.0, 2))
    assert ledger.total(agent=2) == 5.0
    assert ledger.total(agent=2, category="domain") == 5.0
    assert ledger.total(agent=1) == 0.0


def test_duplicate_revelation_is_noop(ledger):
    assert ledger.record(Revelation(2, "domain", 1, 1.0, 0))
    assert not ledger.record(Revelation(2, "domain", 1, 1.0, 5))
    assert ledger.total() == 1.0
    assert len(ledger.entries) == 1


def test_same_item_other_category_is_separate(ledger):
    # the slot scenario prices only availability; craft a zero-cost
    # assignment revelation for the same value
    ledger.record(Revelation(2, "domain", 1, 1.0, 0))
    assert ledger.record(Revelation(2, "assignment", 1, 0.0, 1))
    assert ledger.total(agent=2) == 1.0


def test_unknown_item_rejected(ledger):
    with pytest.raises(ValueError, match="unknown item"):
        ledger.record(Revelation(1, "domain", 9, 0.0, 0))


def test_cost_must_match_matrix(ledger):
    with pytest.raises(ValueError, match="does not match"):
        ledger.record(Revelation(2, "domain", 1, 3.0, 0))


def test_bad_category():
    with pytest.raises(ValueError, match="category"):
        Revelation(1, "secrets", 1, 0.0, 0)


def test_report_totals_and_average(ledger):
    ledger.record(Revelation(1, "domain", 1, 1.0, 0))
    ledger.record(Revelation(1, "domain", 2, 2.0, 1))
    ledger.record(Revelation(2, "domain", 1, 1.0, 1))
    ledger.record(Revelation(2, "domain", 3, 4.0, 3))
    ledger.record(Revelation(3, "domain", 1, 1.0, 4))
    rep = report(ledger, 3)
    assert rep.agent_total(1) == 3.0
    assert rep.agent_total(2) == 5.0
    assert rep.agent_total(3) == 1.0
    assert rep.aggregate == 9.0
    assert rep.average == 3.0
    assert rep.by_category["domain"] == 9.0
    assert rep.by_category["constraint"] == 0.0


def test_empty_report(ledger):
    rep = report(ledger, 3)
    assert rep.aggregate == 0.0
    assert rep.average == 0.0
    assert all(rep.agent_total(a) == 0.0 for a in (1, 2, 3))


def test_total_independent_of_duplicate_attempts(ledger):
    for _ in range(4):
        ledger.record(Revelation(2, "domain", 1, 1.0, 0))
        ledger.record(Revelation(2, "domain", 3, 4.0, 1))
    assert ledger.total(agent=2) == 5.0

import pytest

from udiscp.problems import (
    meeting_place_dcop, meeting_place_udcop_assignment,
    meeting_place_udcop_constraint, meeting_slot_discsp, meeting_slot_udiscsp,
)


@pytest.fixture
def slot_discsp():
    return meeting_slot_discsp()


@pytest.fixture
def slot_udiscsp():
    return meeting_slot_udiscsp()


@pytest.fixture
def place_dcop():
    return meeting_place_dcop()


@pytest.fixture
def place_udcop_a():
    return meeting_place_udcop_assignment()


@pytest.fixture
def place_udcop_c():
    return meeting_place_udcop_constraint()

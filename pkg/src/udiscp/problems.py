"""Small ready-made meeting scheduling problems.

Two base scenarios recur throughout the tests and demos:

* A time-slot meeting between a professor and two students (values 1, 2, 3
  for 8am, 10am, 2pm), each unavailable at one slot. No common slot exists,
  so the satisfaction variant has no solution.
* A meeting-place choice (values 1, 2, 3 for London, Madrid, Rome) where
  each participant pays a travel cost per city, plus privacy prices on
  revealing those costs or choices.
"""

from .model import (
    Problem, PrivacyCosts, all_equal, unary_forbid, unary_valued, zero_privacy,
)

#: travel cost per agent per city in the meeting-place scenario
TRAVEL_COSTS = (
    {1: 70, 2: 230, 3: 270},
    {1: 120, 2: 400, 3: 190},
    {1: 40, 2: 280, 3: 230},
)


def meeting_slot_discsp() -> Problem:
    """Three agents pick a common time slot; every slot is blocked for someone."""
    return Problem(
        kind="DisCSP",
        domains=((1, 2, 3),) * 3,
        constraints=(
            all_equal(3),
            unary_forbid(1, 3),   # professor busy at 2pm
            unary_forbid(2, 2),   # first student busy at 10am
            unary_forbid(3, 1),   # second student busy at 8am
        ),
        privacy=zero_privacy(3, 3),
        rewards=(0, 0, 0),
    )


def meeting_slot_udiscsp() -> Problem:
    """The time-slot scenario with availability-revelation prices and rewards."""
    base = meeting_slot_discsp()
    u_d = ((1, 2, 4),) * 3
    zeros = ((0, 0, 0),) * 3
    return Problem(
        kind="UDisCSP",
        domains=base.domains,
        constraints=base.constraints,
        privacy=PrivacyCosts(u_d=u_d, u_a=zeros, u_g=zeros, u_c=zeros),
        rewards=(4, 5, 5),
    )


def meeting_place_dcop() -> Problem:
    """Three agents pick a common city minimizing total travel cost."""
    constraints = tuple(unary_valued(i + 1, t) for i, t in enumerate(TRAVEL_COSTS))
    return Problem(
        kind="DCOP",
        domains=((1, 2, 3),) * 3,
        constraints=constraints + (all_equal(3),),
        privacy=zero_privacy(3, 3),
        rewards=(0, 0, 0),
    )


def meeting_place_udcop_assignment() -> Problem:
    """Meeting-place scenario pricing the revelation of proposed assignments."""
    base = meeting_place_dcop()
    u_a = ((80, 20, 40), (130, 30, 10), (80, 30, 10))
    zeros = ((0, 0, 0),) * 3
    return Problem(
        kind="UDCOP",
        domains=base.domains,
        constraints=base.constraints,
        privacy=PrivacyCosts(u_d=zeros, u_a=u_a, u_g=zeros, u_c=zeros),
        rewards=(1000, 1000, 1000),
    )


def meeting_place_udcop_constraint() -> Problem:
    """Meeting-place scenario pricing the revelation of travel-cost entries."""
    base = meeting_place_dcop()
    u_c = ((80, 20, 40), (100, 30, 10), (80, 30, 10))
    zeros = ((0, 0, 0),) * 3
    return Problem(
        kind="UDCOP",
        domains=base.domains,
        constraints=base.constraints,
        privacy=PrivacyCosts(u_d=zeros, u_a=zeros, u_g=zeros, u_c=u_c),
        rewards=(1000, 1000, 1000),
    )

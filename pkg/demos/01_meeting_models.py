"""Modeling two small meeting-scheduling problems.

Three participants pick a common time slot (satisfaction: every slot is
blocked for someone) or a common city (optimization: travel costs differ).
The utilitarian variants add two ingredients: a price on each fact an
agent might reveal, and a reward for reaching an agreement.
"""

from udiscp.model import brute_force_solve, evaluate_assignment, is_consistent, \
    parse, serialize, utility
from udiscp.problems import meeting_place_dcop, meeting_slot_discsp, \
    meeting_slot_udiscsp

slot = meeting_slot_discsp()
print("time-slot problem:", slot.kind, f"{slot.m} agents, domains {slot.domain(1)}")
print("  blocked slots per agent:",
      {a: sorted(slot.forbidden_values(a)) for a in slot.agents})
print("  is {x1=1} consistent so far?", is_consistent(slot, {1: 1}))
print("  is {x3=1} consistent?", is_consistent(slot, {3: 1}), "(slot 1 is blocked)")
print("  exhaustive search:", brute_force_solve(slot), "-> no common slot exists")
print()

place = meeting_place_dcop()
print("meeting-place problem:", place.kind)
for v, city in ((1, "first"), (2, "second"), (3, "third")):
    a = {1: v, 2: v, 3: v}
    print(f"  everyone at city {v}: total travel cost "
          f"{evaluate_assignment(place, a):g}")
best = brute_force_solve(place)
print("  optimum:", best[0], "cost", best[1])
print()

udiscsp = meeting_slot_udiscsp()
print("utilitarian slot problem adds revelation prices and rewards:")
print("  price of disclosing availability per slot:", udiscsp.privacy.u_d[1])
print("  agreement rewards:", udiscsp.rewards)
print("  a state's utility is rewards minus costs paid, e.g.",
      "utility([5], [6]) =", utility([5], [6]))
print()

text = serialize(udiscsp)
print("problems serialize to JSON and round-trip exactly:",
      parse(text) == udiscsp)
print(text[:260] + "  ...")

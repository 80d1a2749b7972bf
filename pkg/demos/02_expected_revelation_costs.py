"""How an agent prices the decision to keep searching.

A utilitarian agent about to propose a value asks: if I keep pursuing an
agreement, which of my values will end up disclosed, and what will that
cost me in expectation? Each proposal either ends the run (with the
learned agreement probability) or forces the next value out.
"""

from udiscp.csp_solvers import estimate_cost_discsp, should_interrupt
from udiscp.dcop_solvers import estimate_cost_dcop

prices = {1: 1, 2: 2, 3: 4}   # disclosure price per slot

print("at the start (nothing revealed, agreement probability 0.5):")
print("  scenario (1,2,3) in proposal order")
est = estimate_cost_discsp(0.5, (1, 2, 3), 1.0, prices, (1, 2, 3))
print(f"  expected cumulative disclosure cost = {est}")
print(f"  against a reward of 4 the utility is {4 - est:+g}, so propose")
print("  interrupt?", should_interrupt(0.5, (1, 2, 3), prices, (1, 2, 3), 4))
print()

print("mid-run: slot 1 already disclosed, about to offer slot 3,")
print("and slot 2 would follow if that gets rejected:")
est = estimate_cost_discsp(0.5, (3, 2), 1.0, prices, (1, 3, 2))
print(f"  expected cumulative cost = {est}  ((1+4)/2 + (1+4+2)/2)")
print(f"  against a reward of 5 the utility is {5 - est:+g}, so stop")
print("  interrupt?", should_interrupt(0.5, (3, 2), prices, (1, 3, 2), 5))
print()

print("the optimization-side belief works from what is already revealed:")
travel = {1: 70.0, 2: 230.0, 3: 270.0}   # own constraint weights
u_c = {1: 80.0, 2: 20.0, 3: 40.0}        # price of revealing each weight
one = estimate_cost_dcop(u_c, (1, 2, 3), [1], travel)
two = estimate_cost_dcop(u_c, (1, 2, 3), [1, 2], travel)
print(f"  revealed {{1}}: believed total {one:g}  (70 + 80)")
print(f"  revealed {{1,2}}: believed total {two:g}  ((70+230)/2 + 80 + 20)")
print("  a change to value 2 would raise the believed total, so keep value 1")

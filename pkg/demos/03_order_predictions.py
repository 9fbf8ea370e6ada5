#!/usr/bin/env python3
"""The closed-form decoupling-order predictor across parity regimes.

All-even orders act independently; an odd outer layer boosts addressed
inner layers by one order; a small odd inner layer caps everything nested
outside it.  The naive column assumes independent layers.
"""

from nuddlab import NuddSpec, naive_order, predict_order, predict_overall, suppression_orders
from nuddlab.cli import predict_table_markdown

CASES = [
    ((2, 4, 6, 8), "all even: layers do not interfere"),
    ((2, 4, 6, 3), "odd outer layer: +1 boost on addressed errors"),
    ((7, 5, 3, 1), "all odd, decreasing: boosts accumulate"),
    ((2, 4, 1, 6), "small odd inner layer hinders the outer layer"),
    ((1, 3, 5, 7), "all odd, increasing: heavy interference"),
]

for orders, story in CASES:
    spec = NuddSpec(orders)
    print(f"orders {orders}  ({story})")
    print(f"  per-layer suppression orders: {suppression_orders(spec)}")
    print(f"  overall decoupling order: {predict_overall(spec)}")
    print(predict_table_markdown(orders))

# where prediction and naive differ, interference is at work
spec = NuddSpec((2, 4, 1, 6))
diffs = [
    (r, predict_order(spec, r), naive_order(spec, r))
    for r in [(0, 0, 0, 1), (1, 0, 0, 1), (0, 0, 1, 1)]
]
print("interference examples for (2,4,1,6): (r, predicted, naive)")
for row in diffs:
    print(" ", row)

#!/usr/bin/env python3
"""Suppression coefficients: exact values, vanishing audit, cross-checks.

The nested integrals are evaluated exactly by piecewise-polynomial
propagation; a trapezoid-grid oracle and the outer-layer decomposition
identity confirm them independently.
"""

import random

from nuddlab import NuddSpec, coefficient, oracle_coefficient, outer_decomposition
from nuddlab.coefficients import vanishing_order, words_of_type
from nuddlab.mpcore import set_precision
from nuddlab.coefficients import predict_order

set_precision(60)

spec = NuddSpec((2,))
print("order-2 UDD, third-order words of the nontrivial type:")
for word in words_of_type(1, (1,), 3):
    v = coefficient(spec, word)
    print(f"  word {word}: F = {float(v):+.6f}")
print("(the repeated word vanishes identically; mixed words survive,")
print(" so order-2 UDD decouples to exactly order 2)")

print("\nvanishing audit for the two-layer schedule (3, 2):")
spec = NuddSpec((3, 2))
for r in [(1, 0), (0, 1), (1, 1)]:
    predicted = predict_order(spec, r)
    got = vanishing_order(spec, r, predicted + 1)
    print(f"  r={r}: every word up to n={got} vanishes "
          f"(predicted lower bound {predicted})")

print("\ntrapezoid oracle converges O(h^2) to the exact value:")
spec = NuddSpec((2,))
word = ((0,), (0,), (1,))
exact = coefficient(spec, word)
for grid in (8, 16, 32, 64):
    err = abs(oracle_coefficient(spec, word, grid) - exact)
    print(f"  grid {grid:3d} per interval: |error| = {float(err):.3e}")

print("\nouter-layer decomposition identity on random words:")
rng = random.Random(4)
spec = NuddSpec((2, 3))
for _ in range(4):
    n = rng.randint(1, 4)
    word = tuple(tuple(rng.randint(0, 1) for _ in range(2)) for _ in range(n))
    a = coefficient(spec, word)
    b = outer_decomposition(spec, word)
    print(f"  n={n}: F = {float(a):+.6e}, decomposition - direct = "
          f"{float(abs(a - b)):.1e}")

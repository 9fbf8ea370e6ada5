#!/usr/bin/env python3
"""Walk through nested-UDD pulse schedules.

Shows the sin^2 single-layer timings, how nesting multiplies interval
structure, the parity-fixing extra pulse on odd layers, and the minimum
pulse interval that sets the experimental timescale.
"""

from nuddlab import NuddSpec, set_precision
from nuddlab.schedule import (
    build_timeline,
    min_pulse_interval,
    timeline_to_csv,
    udd_fractions,
    udd_intervals,
)

set_precision(40)

print("single-layer UDD timings (normalized):")
for N in (1, 2, 3, 4):
    fracs = ", ".join(f"{float(t):.6f}" for t in udd_fractions(N))
    print(f"  N={N}: pulses at {fracs}")

print("\ninterval lengths are time-symmetric and sum to 1:")
print("  N=3:", [round(float(s), 6) for s in udd_intervals(3)])

spec = NuddSpec((1, 1))
print("\ntwo nested order-1 layers (the smallest QDD):")
for t, layers in build_timeline(spec).events:
    names = ",".join(f"layer{i}" for i in layers)
    print(f"  t={float(t):.2f}: {names}")
print("note the extra end-of-cycle pulses: odd layers fire an even count.")

spec = NuddSpec((2, 4, 1, 6))
tl = build_timeline(spec)
print(f"\norders (2,4,1,6): {len(tl.intervals)} atomic intervals "
      f"(= 3*5*2*7), {len(tl.events)} pulse events")
print(f"minimum pulse interval tau/T = {float(min_pulse_interval(spec)):.6e}")

print("\nfirst CSV rows of the exported timeline:")
for line in timeline_to_csv(tl, sig=8).splitlines()[:6]:
    print(" ", line)

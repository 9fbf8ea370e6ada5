#!/usr/bin/env python3
"""Error-type algebra: MOOS validation, partition, generator tables.

Builds the two 4-layer control sets used in the simulations, splits a
single-qubit Hamiltonian into its four error types, and renders the full
16-entry generator tables.
"""

from gmpy2 import mpfr

from nuddlab import classify, partition, pauli, pauli_string, set_precision, validate_moos
from nuddlab.errortypes import generator_table, generator_table_markdown, pauli_label
from nuddlab.mpcore import identity

set_precision(40)

print("single-qubit general decoherence against the MOOS {Z, X}:")
moos = validate_moos([pauli("z"), pauli("x")])
h = (mpfr("0.3") * identity(2) + mpfr("0.5") * pauli("x")
     + mpfr("0.7") * pauli("y") + mpfr("0.11") * pauli("z"))
for r, part in partition(h, moos).parts.items():
    label = pauli_label(part) or "mix"
    print(f"  r={r}: |part| = {float(part.maxabs()):.3f}")

print("\nclassification is multiplicative (a Z2^ell group):")
print("  Y classifies to", classify(pauli("y"), moos), "= XOR of X and Z types")

for name, strings, gens in [
    ("single-qubit operators",
     ("iz", "ix", "zi", "xi"),
     {(1, 0, 0, 0): "ix", (0, 1, 0, 0): "iz",
      (0, 0, 1, 0): "xi", (0, 0, 0, 1): "zi"}),
    ("with a two-body operator",
     ("zz", "ix", "zi", "xi"),
     {(1, 0, 0, 0): "ix", (0, 1, 0, 0): "iz",
      (0, 0, 1, 0): "xx", (0, 0, 0, 1): "zi"}),
]:
    moos4 = validate_moos([pauli_string(s) for s in strings])
    table = generator_table(
        moos4, {r: pauli_string(s) for r, s in gens.items()}
    )
    print(f"\n4-layer MOOS ({name}): generator table")
    print(generator_table_markdown(table))

#!/usr/bin/env python3
"""Harmonic structure of the modulation functions after the angle map.

Mapping the outer layer to equally spaced pulses puts every modulation
function into a rigid harmonic class: the outer layer is a pure sine
series at odd multiples of N_out+1, even inner layers are pure cosine
series at even multiples, odd inner layers pure sine at even multiples,
and the Jacobian sits on the even multiples +-1.
"""

from nuddlab import NuddSpec, fourier_profile
from nuddlab.mpcore import set_precision

set_precision(40)

for orders in [(2,), (2, 3), (3, 3), (2, 2, 3)]:
    spec = NuddSpec(orders)
    print(f"orders {orders} (outer period unit {orders[-1] + 1}):")
    for sel in list(range(1, spec.ell + 1)) + ["G1"]:
        rep = fourier_profile(spec, sel)
        mags = rep.sin_mag if rep.kind == "sin" else rep.cos_mag
        populated = [m for m in range(rep.m_max + 1)
                     if float(mags[m]) > 1e-12]
        print(f"  {rep.selector:>3} -> {rep.kind} series at {populated}, "
              f"forbidden weight {float(rep.forbidden_weight):.1e}")
    print()

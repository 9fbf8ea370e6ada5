"""Nested-UDD pulse schedules: timings, intervals, modulation functions.

A single UDD layer of sequence order N places pulses at the sin^2 fractions
of its cycle; nesting puts a full copy of the layer-(i-1) cycle inside every
layer-i interval.  Everything here is normalized to total duration 1; the
physical schedule is obtained by scaling with T.

Conventions:
  * layers are numbered 1..ell with layer 1 innermost;
  * a multi-index is written outermost-first, (j_ell, ..., j_1), matching
    the nested subscripts of the timing recursion;
  * a layer with odd order fires one extra pulse at the end of each of its
    cycles so that its pulse count per cycle is even.
"""

from __future__ import annotations

import csv
import io
from bisect import bisect_right
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import gmpy2
from gmpy2 import mpfr

from . import mpcore
from .mpcore import pi, real


@dataclass(frozen=True)
class NuddSpec:
    """Layer count, per-layer sequence orders, and MOOS labels.

    orders[0] is the innermost layer (N_1); labels default to Omega1..Omega_ell.
    """

    orders: tuple[int, ...]
    moos_labels: tuple[str, ...] = ()

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        if not orders:
            raise ValueError("at least one layer is required")
        if any(n < 1 for n in orders):
            raise ValueError(f"sequence orders must be >= 1, got {orders}")
        labels = tuple(self.moos_labels) or tuple(
            f"Omega{i + 1}" for i in range(len(orders))
        )
        if len(labels) != len(orders):
            raise ValueError("moos_labels length must match the layer count")
        object.__setattr__(self, "moos_labels", labels)

    @property
    def ell(self) -> int:
        return len(self.orders)


@dataclass(frozen=True)
class Timeline:
    """Flattened pulse schedule on [0, 1].

    events: (time, layers_fired) with layers_fired a sorted tuple of layer
    indices, only boundaries where at least one pulse fires.
    intervals: (start, length) for each atomic interval, in time order.
    multi_indices[k] is the outermost-first index tuple of interval k and
    signs[k][i-1] the layer-i modulation value on it.
    """

    events: tuple[tuple[mpfr, tuple[int, ...]], ...]
    intervals: tuple[tuple[mpfr, mpfr], ...]
    multi_indices: tuple[tuple[int, ...], ...]
    signs: tuple[tuple[int, ...], ...]
    fired: tuple[tuple[int, ...], ...]  # layers firing at each interval end

    @property
    def starts(self) -> list[mpfr]:
        return [s for s, _ in self.intervals]


def udd_fractions(N: int) -> list[mpfr]:
    """Interior UDD pulse fractions sin^2(j pi / (2(N+1))), j = 1..N."""
    if N < 1:
        raise ValueError(f"sequence order must be >= 1, got {N}")
    p = pi()
    out = []
    for j in range(1, N + 1):
        s = gmpy2.sin(j * p / (2 * (N + 1)))
        out.append(s * s)
    return out


def udd_intervals(N: int) -> list[mpfr]:
    """The N+1 pulse-interval lengths of a normalized order-N UDD cycle."""
    if N < 1:
        raise ValueError(f"sequence order must be >= 1, got {N}")
    p = pi()
    a = gmpy2.sin(p / (2 * (N + 1)))
    out = []
    for j in range(1, N + 2):
        out.append(a * gmpy2.sin((2 * j - 1) * p / (2 * (N + 1))))
    return out


def _fractions_with_ends(N: int) -> list[mpfr]:
    return [real(0)] + udd_fractions(N) + [real(1)]


def nudd_timing(spec: NuddSpec, idx: Sequence[int]) -> mpfr:
    """Normalized nested timing for the outermost-first multi-index idx.

    This is the end of the atomic interval idx; idx of all (N_i + 1) maps
    to 1 and a single-layer spec reduces to udd_fractions.
    """
    ell = spec.ell
    if len(idx) != ell:
        raise ValueError(f"index must have {ell} components, got {len(idx)}")
    for pos, j in enumerate(idx):
        N = spec.orders[ell - 1 - pos]  # idx is outermost-first
        if not 1 <= j <= N + 1:
            raise ValueError(
                f"index component {j} out of range 1..{N + 1} "
                f"for layer {ell - pos}"
            )
    fracs = {i: _fractions_with_ends(spec.orders[i - 1]) for i in range(1, ell + 1)}
    ints = {i: udd_intervals(spec.orders[i - 1]) for i in range(1, ell + 1)}
    t = real(0)
    block = real(1)
    # walk from the outermost layer inward; at each layer the enclosing
    # block shrinks by that layer's interval length
    for pos, j in enumerate(idx):
        layer = ell - pos
        if layer == 1:
            t += block * fracs[layer][j]
        else:
            t += block * fracs[layer][j - 1]
            block = block * ints[layer][j - 1]
    return t


_TIMELINE_CACHE: dict[tuple, Timeline] = {}


def build_timeline(spec: NuddSpec) -> Timeline:
    """All atomic intervals and pulse events of the nested schedule."""
    key = (spec.orders, gmpy2.get_context().precision)
    hit = _TIMELINE_CACHE.get(key)
    if hit is not None:
        return hit

    ell = spec.ell
    ints = [udd_intervals(N) for N in spec.orders]  # ints[i-1][j-1]
    ranges = [range(1, N + 2) for N in reversed(spec.orders)]  # outermost first

    intervals = []
    multi = []
    signs = []
    fired = []
    start = real(0)
    for idx in product(*ranges):
        length = real(1)
        for pos, j in enumerate(idx):
            layer = ell - pos
            length *= ints[layer - 1][j - 1]
        sgn = tuple(
            1 if (idx[ell - i] - 1) % 2 == 0 else -1 for i in range(1, ell + 1)
        )
        # layers firing at the END of this interval: the innermost layer
        # whose index is not maxed always fires; a maxed layer below it
        # fires only its parity-fixing extra pulse (odd order)
        fire = []
        for i in range(1, ell + 1):
            j = idx[ell - i]
            N = spec.orders[i - 1]
            if j <= N:
                fire.append(i)
                break
            if N % 2 == 1:  # j == N+1, odd order: extra pulse at cycle end
                fire.append(i)
        intervals.append((start, length))
        multi.append(tuple(idx))
        signs.append(sgn)
        fired.append(tuple(fire))
        start = start + length

    events = []
    t = real(0)
    for k, (s, length) in enumerate(intervals):
        t = s + length
        if fired[k]:
            events.append((t, fired[k]))

    tl = Timeline(
        events=tuple(events),
        intervals=tuple(intervals),
        multi_indices=tuple(multi),
        signs=tuple(signs),
        fired=tuple(fired),
    )
    _TIMELINE_CACHE[key] = tl
    return tl


def interval_index(timeline: Timeline, eta) -> int:
    """Index of the atomic interval containing eta, [start, next) convention."""
    eta = real(eta)
    if eta < 0 or eta >= 1:
        raise ValueError(f"eta must satisfy 0 <= eta < 1, got {eta}")
    starts = timeline.starts
    k = bisect_right(starts, eta) - 1
    return max(k, 0)


def modulation(spec: NuddSpec, layer: int, eta) -> int:
    """Value (+1 or -1) of the layer's modulation function at eta in [0,1)."""
    if not 1 <= layer <= spec.ell:
        raise ValueError(f"layer {layer} out of range 1..{spec.ell}")
    tl = build_timeline(spec)
    k = interval_index(tl, eta)
    return tl.signs[k][layer - 1]


def min_pulse_interval(spec: NuddSpec) -> mpfr:
    """Product of first-interval lengths over all layers (normalized tau/T)."""
    p = pi()
    out = real(1)
    for N in spec.orders:
        s = gmpy2.sin(p / (2 * (N + 1)))
        out *= s * s
    return out


def timeline_to_csv(timeline: Timeline, sig: int = 36) -> str:
    """CSV rows (time, layers_fired, interval_length), one per atomic interval."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", "layers_fired", "interval_length"])
    for k, (start, length) in enumerate(timeline.intervals):
        end = start + length
        layers = ";".join(str(i) for i in timeline.fired[k])
        w.writerow([mpcore.fmt(end, sig), layers, mpcore.fmt(length, sig)])
    return buf.getvalue()

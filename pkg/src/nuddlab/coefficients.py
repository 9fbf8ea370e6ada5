"""Nested-integral suppression coefficients and the decoupling-order theory.

The n-th order coefficient of an error word is the time-ordered nested
integral over [0,1] of the word's modulation-sign products.  Because every
integrand is +-1 on each atomic interval of the schedule, the nested
integral is evaluated exactly by depth-wise polynomial propagation
(O(K n^2) for K atomic intervals), with an independent trapezoid-grid
oracle for cross-checking.

The closed-form side lives here too: per-layer suppression orders, the
decoupling-order predictor and the overall-order rule, the naive (independent
layers) order, the outer-layer interval-decomposition identity, the
harmonic-class profile of the modulation functions after the piecewise
linear angle change, and randomized checks of the two order lemmas.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable

import gmpy2
from gmpy2 import mpfr

from .errortypes import ErrorVector, all_error_vectors, unit_vector, xor
from .mpcore import pi, real, tol
from .schedule import NuddSpec, build_timeline, udd_intervals

ErrorWord = tuple[ErrorVector, ...]


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the coefficient-evaluation budget."""

    def __init__(self, attempted: int, budget: int):
        super().__init__(
            f"word enumeration needs {attempted} coefficient evaluations, "
            f"budget is {budget}"
        )
        self.attempted = attempted
        self.budget = budget


def _check_word(spec: NuddSpec, word: ErrorWord) -> ErrorWord:
    word = tuple(tuple(int(b) for b in r) for r in word)
    for r in word:
        if len(r) != spec.ell:
            raise ValueError(
                f"word vector {r} has length {len(r)}, expected {spec.ell}"
            )
    return word


def word_type(word: ErrorWord) -> ErrorVector:
    """Resultant error vector of a word (componentwise XOR)."""
    out = word[0]
    for r in word[1:]:
        out = xor(out, r)
    return out


def _interval_signs(spec: NuddSpec, r: ErrorVector) -> tuple[int, ...]:
    tl = build_timeline(spec)
    out = []
    for sgn in tl.signs:
        v = 1
        for i, bit in enumerate(r):
            if bit:
                v *= sgn[i]
        out.append(v)
    return tuple(out)


def coefficient(spec: NuddSpec, word: ErrorWord) -> mpfr:
    """Exact n-fold nested integral of the word's modulation products.

    Depth-wise propagation: A_0 = 1 and A_p(eta) is the running integral of
    the p-th sign function times A_{p-1}, held as a piecewise polynomial on
    the atomic intervals; the coefficient is A_n(1).  An empty word returns
    1 (the zeroth-order term of the expansion).
    """
    word = _check_word(spec, word)
    if not word:
        return real(1)
    tl = build_timeline(spec)
    lengths = [l for _, l in tl.intervals]
    K = len(lengths)
    signs = [_interval_signs(spec, r) for r in word]

    one = real(1)
    # A_prev[k] holds the local-variable coefficients of A_{p-1} on interval k
    A_prev: list[list[mpfr]] = [[one] for _ in range(K)]
    running = real(0)
    for p in range(len(word)):
        sgn = signs[p]
        running = real(0)
        A_new: list[list[mpfr]] = []
        for k in range(K):
            c = A_prev[k]
            if sgn[k] > 0:
                d = [running] + [c[j] / (j + 1) for j in range(len(c))]
            else:
                d = [running] + [-c[j] / (j + 1) for j in range(len(c))]
            A_new.append(d)
            # Horner evaluation at the interval end
            x = lengths[k]
            acc = d[-1]
            for j in range(len(d) - 2, -1, -1):
                acc = acc * x + d[j]
            running = acc
        A_prev = A_new
    return running


def oracle_coefficient(
    spec: NuddSpec, word: ErrorWord, grid_per_interval: int
) -> mpfr:
    """Composite-trapezoid evaluation of the same nested integral.

    The grid is aligned with the atomic-interval breakpoints so every cell
    lies inside one interval; the estimate converges O(h^2) to
    coefficient().  Kept free of the polynomial machinery on purpose.
    """
    word = _check_word(spec, word)
    if grid_per_interval < 2:
        raise ValueError("grid_per_interval must be >= 2")
    if not word:
        return real(1)
    tl = build_timeline(spec)
    g = grid_per_interval
    K = len(tl.intervals)
    # cell widths, and the interval owning each cell
    widths: list[mpfr] = []
    owner: list[int] = []
    for k, (_, length) in enumerate(tl.intervals):
        h = length / g
        for _ in range(g):
            widths.append(h)
            owner.append(k)
    signs = [_interval_signs(spec, r) for r in word]

    npts = K * g + 1
    B = [real(1)] * npts
    half = real(1) / 2
    for p in range(len(word)):
        sgn = signs[p]
        nxt = [real(0)] * npts
        acc = real(0)
        for m in range(npts - 1):
            s = sgn[owner[m]]
            cell = widths[m] * (B[m] + B[m + 1]) * half
            acc = acc + (cell if s > 0 else -cell)
            nxt[m + 1] = acc
        B = nxt
    return B[-1]


def words_of_type(ell: int, r: ErrorVector, n: int) -> Iterable[ErrorWord]:
    """All words of length n over {0,1}^ell whose XOR is r."""
    vecs = all_error_vectors(ell)
    if n == 1:
        yield (tuple(r),)
        return
    for head in product(vecs, repeat=n - 1):
        last = tuple(r)
        for v in head:
            last = xor(last, v)
        yield head + (last,)


def vanishing_order(
    spec: NuddSpec,
    r: ErrorVector,
    n_max: int,
    budget: int = 10_000_000,
) -> int:
    """Largest order up to n_max with every order-<=n word of type r vanishing.

    Enumerates all (2^ell)^(n-1) words per length; a coefficient counts as
    zero when |F| <= 10**(-digits+15).  Raises BudgetExceeded before doing
    any work if the enumeration would be too large.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ell = spec.ell
    attempted = sum((2 ** ell) ** (n - 1) for n in range(1, n_max + 1))
    if attempted > budget:
        raise BudgetExceeded(attempted, budget)
    cut = tol(15)
    for n in range(1, n_max + 1):
        for word in words_of_type(ell, r, n):
            if abs(coefficient(spec, word)) > cut:
                return n - 1
    return n_max


def max_abs_coefficient(
    spec: NuddSpec, r: ErrorVector, n: int
) -> tuple[mpfr, int]:
    """(max |F| over all order-n words of type r, word count)."""
    best = real(0)
    count = 0
    for word in words_of_type(spec.ell, r, n):
        count += 1
        v = abs(coefficient(spec, word))
        if v > best:
            best = v
    return best, count


# -- outer-layer interval decomposition --------------------------------------


def _compositions(n: int, m: int) -> Iterable[tuple[int, ...]]:
    if m == 1:
        yield (n,)
        return
    for first in range(1, n - m + 2):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def outer_decomposition(spec: NuddSpec, word: ErrorWord) -> mpfr:
    """Evaluate a coefficient through the outer-layer decomposition identity.

    The word is split into every possible run of contiguous clusters; each
    cluster contributes an inner coefficient of the (ell-1)-layer schedule
    (for the cluster sub-word with the outer component dropped) and a
    nested, strictly ordered sum over outer-interval indices weighted by
    signed powers of the outer interval lengths.  Equal to coefficient()
    for every word; only defined for ell >= 2.
    """
    word = _check_word(spec, word)
    if spec.ell < 2:
        raise ValueError("outer decomposition requires at least two layers")
    n = len(word)
    inner_spec = NuddSpec(spec.orders[:-1])
    s_outer = udd_intervals(spec.orders[-1])
    n_out = len(s_outer)  # N_ell + 1

    total = real(0)
    for m in range(1, n + 1):
        for comp in _compositions(n, m):
            # contiguous clusters, earliest positions first
            inner = real(1)
            r_out: list[int] = []
            pos = 0
            for na in comp:
                cluster = word[pos:pos + na]
                pos += na
                sub = tuple(v[:-1] for v in cluster)
                inner *= coefficient(inner_spec, sub)
                rl = 0
                for v in cluster:
                    rl ^= v[-1]
                r_out.append(rl)
            if inner == 0:
                continue
            # F_a(jmax) = sum_{j=a}^{jmax} sign * s_j^{n_a} * F_{a-1}(j-1)
            F = [real(1)] * (n_out + 1)  # indexed by jmax = 0..N_ell+1
            for a in range(1, m + 1):
                na = comp[a - 1]
                rl = r_out[a - 1]
                new = [real(0)] * (n_out + 1)
                acc = real(0)
                for j in range(a, n_out + 1):
                    term = (s_outer[j - 1] ** na) * F[j - 1]
                    if rl and (j - 1) % 2 == 1:
                        acc = acc - term
                    else:
                        acc = acc + term
                    new[j] = acc
                F = new
            total += inner * F[n_out]
    return total


# -- Fourier structure of the modulation functions ----------------------------


@dataclass(frozen=True)
class FourierReport:
    """Harmonic-class occupancy of one modulation function (or the Jacobian).

    cos_mag[m] / sin_mag[m] are the half-range projection magnitudes onto
    cos(m theta) and sin(m theta) over [0, pi].  Each selector claims a
    kind (pure sine or pure cosine series) and a set of allowed
    frequencies; sine-sine and cosine-cosine families are orthogonal on
    [0, pi] for integer frequencies, so the forbidden weight is the largest
    same-kind magnitude outside the allowed set, relative to the largest
    allowed one.  (The opposite-kind series is the other half-range
    representation of the same function and carries no class information.)
    """

    selector: str
    kind: str  # "sin" or "cos"
    m_max: int
    cos_mag: tuple
    sin_mag: tuple
    allowed: tuple[int, ...]
    max_allowed: mpfr
    forbidden_weight: mpfr

    @property
    def passed(self) -> bool:
        return self.max_allowed > 0 and self.forbidden_weight < mpfr("1e-10")


def _theta_breakpoints(spec: NuddSpec):
    """Map atomic-interval boundaries through the piecewise linear angle map."""
    tl = build_timeline(spec)
    N_out = spec.orders[-1]
    s_out = udd_intervals(N_out)
    # outer-interval starts
    outer_starts = [real(0)]
    for s in s_out[:-1]:
        outer_starts.append(outer_starts[-1] + s)
    p = pi()
    unit = p / (N_out + 1)
    thetas = []  # (theta_start, theta_end, interval_index, outer_index)
    for k, (start, length) in enumerate(tl.intervals):
        j_out = tl.multi_indices[k][0]  # outermost-first
        t0 = unit * ((start - outer_starts[j_out - 1]) / s_out[j_out - 1]
                     + (j_out - 1))
        t1 = unit * ((start + length - outer_starts[j_out - 1]) / s_out[j_out - 1]
                     + (j_out - 1))
        thetas.append((t0, t1, k, j_out))
    return tl, thetas


def fourier_profile(spec: NuddSpec, selector, m_max: int = 0) -> FourierReport:
    """Project a modulation function (or the Jacobian 'G1') onto harmonics.

    selector: a layer index 1..ell, or the string "G1" for d eta / d theta.
    The projections are computed exactly (the functions are piecewise
    constant in theta).  Allowed classes, with P = N_ell + 1:
      layer ell            sin(m theta), m an odd multiple of P
      layer i < ell, even  cos(m theta), m an even multiple of P (incl. 0)
      layer i < ell, odd   sin(m theta), m a nonzero even multiple of P
      G1                   sin(m theta), m = even multiple of P, +-1
    """
    tl, thetas = _theta_breakpoints(spec)
    N_out = spec.orders[-1]
    P = N_out + 1
    if m_max <= 0:
        m_max = 4 * P + 2

    is_g1 = isinstance(selector, str)
    if is_g1:
        if selector.upper() != "G1":
            raise ValueError(f"unknown selector {selector!r}")
        s_out = udd_intervals(N_out)
        p = pi()
        values = [(P / p) * s_out[j_out - 1] for _, _, _, j_out in thetas]
        name = "G1"
    else:
        layer = int(selector)
        if not 1 <= layer <= spec.ell:
            raise ValueError(f"layer {layer} out of range 1..{spec.ell}")
        values = [real(tl.signs[k][layer - 1]) for _, _, k, _ in thetas]
        name = f"f{layer}"

    p = pi()
    cos_mag = []
    sin_mag = []
    for m in range(m_max + 1):
        ac = real(0)
        as_ = real(0)
        for (t0, t1, k, _), v in zip(thetas, values):
            if m == 0:
                ac += v * (t1 - t0)
            else:
                ac += v * (gmpy2.sin(m * t1) - gmpy2.sin(m * t0)) / m
                as_ += v * (gmpy2.cos(m * t0) - gmpy2.cos(m * t1)) / m
        scale = (1 if m == 0 else 2) / p
        cos_mag.append(abs(ac * scale))
        sin_mag.append(abs(as_ * scale))

    allowed: list[int] = []
    if is_g1:
        kind = "sin"
        for m in range(1, m_max + 1):
            if m % (2 * P) in (1, 2 * P - 1):
                allowed.append(m)
    elif int(selector) == spec.ell:
        kind = "sin"
        for m in range(1, m_max + 1):
            if m % (2 * P) == P:
                allowed.append(m)
    elif spec.orders[int(selector) - 1] % 2 == 0:
        kind = "cos"
        allowed.append(0)
        for m in range(2 * P, m_max + 1, 2 * P):
            allowed.append(m)
    else:
        kind = "sin"
        for m in range(2 * P, m_max + 1, 2 * P):
            allowed.append(m)

    allowed_set = set(allowed)
    mags = cos_mag if kind == "cos" else sin_mag
    max_allowed = real(0)
    worst = real(0)
    for m in range(m_max + 1):
        if kind == "sin" and m == 0:
            continue
        if m in allowed_set:
            if mags[m] > max_allowed:
                max_allowed = mags[m]
        elif mags[m] > worst:
            worst = mags[m]
    weight = worst / max_allowed if max_allowed > 0 else real("inf")
    return FourierReport(
        selector=name,
        kind=kind,
        m_max=m_max,
        cos_mag=tuple(cos_mag),
        sin_mag=tuple(sin_mag),
        allowed=tuple(allowed),
        max_allowed=max_allowed,
        forbidden_weight=weight,
    )


# -- closed-form order predictions --------------------------------------------


def suppression_orders(spec: NuddSpec) -> list[int]:
    """Effective per-layer suppression orders.

    A layer keeps its sequence order until the first odd-order layer; past
    that, it is capped at one more than the smallest odd order nested
    inside it.
    """
    orders = spec.orders
    first_odd = None
    for i, N in enumerate(orders):
        if N % 2 == 1:
            first_odd = i
            break
    out = []
    for i, N in enumerate(orders):
        if first_odd is None or i <= first_odd:
            out.append(N)
        else:
            min_odd = min(n for n in orders[:i] if n % 2 == 1)
            out.append(min(min_odd + 1, N))
    return out


def _parity(N: int) -> int:
    return N % 2


def _p_xor(spec: NuddSpec, r: ErrorVector, a: int, b: int) -> int:
    acc = 0
    for k in range(a, b + 1):
        acc ^= r[k - 1] * _parity(spec.orders[k - 1])
    return acc


def _p_sum(spec: NuddSpec, r: ErrorVector, a: int, b: int) -> int:
    return sum(r[k - 1] * _parity(spec.orders[k - 1]) for k in range(a, b + 1))


def predict_order(spec: NuddSpec, r: ErrorVector) -> int:
    """Closed-form lower bound on the decoupling order of error type r.

    max over layers i of r_i (p_xor(1,i-1) xor 1) Ntilde_i + p_sum(i+1,ell);
    0 for the trivial type.
    """
    r = tuple(int(b) for b in r)
    if len(r) != spec.ell:
        raise ValueError(f"error vector length {len(r)} != {spec.ell} layers")
    nt = suppression_orders(spec)
    best = 0
    for i in range(1, spec.ell + 1):
        gate = r[i - 1] * (_p_xor(spec, r, 1, i - 1) ^ 1)
        val = gate * nt[i - 1] + _p_sum(spec, r, i + 1, spec.ell)
        if val > best:
            best = val
    return best


def predict_overall(spec: NuddSpec) -> int:
    """Overall decoupling order: the minimum sequence order.

    Also equals the minimum of predict_order over the unit vectors, which
    is asserted here as a consistency check.
    """
    overall = min(spec.orders)
    via_units = min(
        predict_order(spec, unit_vector(spec.ell, i))
        for i in range(1, spec.ell + 1)
    )
    if via_units != overall:
        raise AssertionError(
            f"predictor inconsistency: min over unit vectors {via_units} "
            f"!= min order {overall}"
        )
    return overall


def naive_order(spec: NuddSpec, r: ErrorVector) -> int:
    """Order assuming independent layers: max over r_i N_i."""
    r = tuple(int(b) for b in r)
    if len(r) != spec.ell:
        raise ValueError(f"error vector length {len(r)} != {spec.ell} layers")
    return max((r[i] * spec.orders[i] for i in range(spec.ell)), default=0)


# -- lemma-level checks --------------------------------------------------------


@dataclass
class LemmaReport:
    subadditivity_trials: int = 0
    subadditivity_violations: list = field(default_factory=list)
    odd_minimum_status: str = "skipped"
    odd_minimum: int | None = None
    odd_minimum_expected: int | None = None

    @property
    def passed(self) -> bool:
        ok4 = self.odd_minimum_status == "skipped" or (
            self.odd_minimum == self.odd_minimum_expected
        )
        return not self.subadditivity_violations and ok4


def lemma_checks(spec: NuddSpec, trials: int, seed: int = 0) -> LemmaReport:
    """Randomized subadditivity check plus the odd-minimum identity.

    Subadditivity: for random cluster vectors, the predicted order of their
    XOR never exceeds the sum of the clusters' predicted orders.  Odd
    minimum: over all vectors anticommuting with an odd number of odd-order
    layers, the minimum predicted order equals the smallest odd sequence
    order (skipped when the spec has no odd layer).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    rep = LemmaReport(subadditivity_trials=trials)
    ell = spec.ell
    for _ in range(trials):
        m = rng.randint(2, 4)
        clusters = [
            tuple(rng.randint(0, 1) for _ in range(ell)) for _ in range(m)
        ]
        target = clusters[0]
        for v in clusters[1:]:
            target = xor(target, v)
        lhs = predict_order(spec, target)
        rhs = sum(predict_order(spec, v) for v in clusters)
        if lhs > rhs:
            rep.subadditivity_violations.append((target, clusters, lhs, rhs))

    odd = [N for N in spec.orders if N % 2 == 1]
    if odd:
        v1 = [
            r for r in all_error_vectors(ell)
            if _p_xor(spec, r, 1, ell) == 1
        ]
        rep.odd_minimum_status = "checked"
        rep.odd_minimum = min(predict_order(spec, r) for r in v1)
        rep.odd_minimum_expected = min(odd)
    return rep

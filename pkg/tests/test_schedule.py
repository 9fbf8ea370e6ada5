import math

import pytest
from gmpy2 import mpfr

from nuddlab.mpcore import precision, tol
from nuddlab.schedule import (
    NuddSpec,
    build_timeline,
    min_pulse_interval,
    modulation,
    nudd_timing,
    timeline_to_csv,
    udd_fractions,
    udd_intervals,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        NuddSpec(())
    with pytest.raises(ValueError):
        NuddSpec((2, 0))
    with pytest.raises(ValueError):
        NuddSpec((1, 1), moos_labels=("a",))
    assert NuddSpec((1, 2, 3)).ell == 3


def test_udd_fractions_small():
    assert float(udd_fractions(1)[0]) == pytest.approx(0.5, abs=1e-15)
    f2 = [float(x) for x in udd_fractions(2)]
    assert f2 == pytest.approx([0.25, 0.75], abs=1e-15)
    f3 = [float(x) for x in udd_fractions(3)]
    assert f3 == pytest.approx(
        [math.sin(math.pi / 8) ** 2, 0.5, math.sin(3 * math.pi / 8) ** 2],
        abs=1e-15,
    )
    assert all(a < b for a, b in zip(f3, f3[1:]))


def test_udd_fractions_rejects_bad_order():
    with pytest.raises(ValueError):
        udd_fractions(0)


def test_udd_intervals_small():
    assert [float(x) for x in udd_intervals(1)] == pytest.approx([0.5, 0.5])
    assert [float(x) for x in udd_intervals(2)] == pytest.approx([0.25, 0.5, 0.25])


@pytest.mark.parametrize("N", [1, 2, 3, 5, 8])
def test_udd_intervals_sum_and_symmetry(N):
    s = udd_intervals(N)
    total = mpfr(0)
    for x in s:
        total += x
    assert abs(total - 1) <= tol(8)
    for j in range(N + 1):
        assert abs(s[j] - s[N - j]) <= tol(8)
    # telescoping against the fractions
    fr = udd_fractions(N)
    acc = mpfr(0)
    for j, x in enumerate(s[:-1]):
        acc += x
        assert abs(acc - fr[j]) <= tol(8)


def test_nudd_timing_endpoint():
    spec = NuddSpec((2, 4, 1, 6))
    idx = tuple(reversed([N + 1 for N in spec.orders]))
    assert abs(nudd_timing(spec, idx) - 1) <= tol(8)


def test_nudd_timing_hand_value():
    spec = NuddSpec((1, 1))
    assert abs(nudd_timing(spec, (1, 1)) - mpfr("0.25")) <= tol(8)
    assert abs(nudd_timing(spec, (2, 1)) - mpfr("0.75")) <= tol(8)


def test_nudd_timing_single_layer_is_udd():
    spec = NuddSpec((4,))
    fr = udd_fractions(4)
    for j in range(1, 5):
        assert abs(nudd_timing(spec, (j,)) - fr[j - 1]) <= tol(8)


def test_nudd_timing_monotone_lexicographic():
    spec = NuddSpec((2, 3))
    prev = mpfr(-1)
    for j2 in range(1, 5):
        for j1 in range(1, 4):
            t = nudd_timing(spec, (j2, j1))
            assert t > prev
            prev = t


def test_nudd_timing_validates_index():
    spec = NuddSpec((2, 3))
    with pytest.raises(ValueError):
        nudd_timing(spec, (1,))
    with pytest.raises(ValueError):
        nudd_timing(spec, (5, 1))


def test_timeline_qdd11():
    tl = build_timeline(NuddSpec((1, 1)))
    times = [float(t) for t, _ in tl.events]
    fires = [f for _, f in tl.events]
    assert times == pytest.approx([0.25, 0.5, 0.75, 1.0])
    assert fires == [(1,), (1, 2), (1,), (1, 2)]
    assert [float(l) for _, l in tl.intervals] == pytest.approx([0.25] * 4)


def test_timeline_single_layer_even_no_endpoint_pulse():
    tl = build_timeline(NuddSpec((2,)))
    assert [float(t) for t, _ in tl.events] == pytest.approx([0.25, 0.75])


def test_timeline_single_layer_odd_endpoint_pulse():
    # a single odd layer is the interior fractions plus the parity pulse at 1
    for N in (1, 3):
        tl = build_timeline(NuddSpec((N,)))
        times = [float(t) for t, _ in tl.events]
        expected = [float(x) for x in udd_fractions(N)] + [1.0]
        assert times == pytest.approx(expected)


def test_timeline_interval_count():
    tl = build_timeline(NuddSpec((2, 4, 1, 6)))
    assert len(tl.intervals) == 3 * 5 * 2 * 7
    total = mpfr(0)
    for _, l in tl.intervals:
        total += l
    assert abs(total - 1) <= tol(8)


def test_timeline_times_strictly_increasing():
    tl = build_timeline(NuddSpec((3, 2)))
    times = [t for t, _ in tl.events]
    assert all(a < b for a, b in zip(times, times[1:]))


def test_timeline_pulse_counts_per_layer():
    # layer i fires Nbar_i per enclosing cycle, Nbar = N + (N odd)
    spec = NuddSpec((2, 3, 1))
    tl = build_timeline(spec)
    for i, N in enumerate(spec.orders, start=1):
        nbar = N if N % 2 == 0 else N + 1
        outer_cycles = 1
        for k in range(i, spec.ell):
            outer_cycles *= spec.orders[k] + 1
        count = sum(1 for _, f in tl.events if i in f)
        assert count == nbar * outer_cycles


def test_modulation_signs_qdd11():
    spec = NuddSpec((1, 1))
    quarters = [0.1, 0.3, 0.6, 0.9]
    assert [modulation(spec, 1, q) for q in quarters] == [1, -1, 1, -1]
    assert [modulation(spec, 2, q) for q in quarters] == [1, 1, -1, -1]


def test_modulation_first_interval_positive():
    for orders in [(2,), (1, 3), (2, 2, 2)]:
        assert modulation(NuddSpec(orders), 1, 0) == 1


def test_modulation_single_layer():
    assert modulation(NuddSpec((1,)), 1, 0.75) == -1


def test_modulation_range_check():
    spec = NuddSpec((1,))
    with pytest.raises(ValueError):
        modulation(spec, 1, 1.0)
    with pytest.raises(ValueError):
        modulation(spec, 1, -0.1)
    with pytest.raises(ValueError):
        modulation(spec, 2, 0.5)


def test_modulation_sign_flip_count():
    # layer i flips exactly Nbar_i * prod_{k>i}(N_k+1) times on [0,1)
    spec = NuddSpec((2, 1, 2))
    tl = build_timeline(spec)
    for i, N in enumerate(spec.orders, start=1):
        nbar = N if N % 2 == 0 else N + 1
        expected = nbar
        for k in range(i, spec.ell):
            expected *= spec.orders[k] + 1
        signs = [s[i - 1] for s in tl.signs]
        flips = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
        # the final flip back to +1 happens at eta=1, outside [0,1)
        closing = 1 if signs[-1] != signs[0] else 0
        assert flips + closing == expected
        # net pulse count per layer is even: the sign pattern closes at +1
        assert signs[0] == 1


def test_min_pulse_interval():
    assert float(min_pulse_interval(NuddSpec((1,)))) == pytest.approx(0.5)
    assert float(min_pulse_interval(NuddSpec((1, 1)))) == pytest.approx(0.25)
    expected = 1.0
    for N in (2, 4, 6, 8):
        expected *= math.sin(math.pi / (2 * (N + 1))) ** 2
    got = float(min_pulse_interval(NuddSpec((2, 4, 6, 8))))
    assert got == pytest.approx(expected, rel=1e-12)


def test_timeline_csv():
    text = timeline_to_csv(build_timeline(NuddSpec((1, 1))))
    lines = text.strip().splitlines()
    assert lines[0] == "time,layers_fired,interval_length"
    assert len(lines) == 5
    assert lines[1].split(",")[1] == "1"
    assert lines[2].split(",")[1] == "1;2"


def test_timeline_precision_consistency():
    # intervals accumulated at 50 digits agree with the timing recursion
    with precision(50):
        spec = NuddSpec((2, 3, 2))
        tl = build_timeline(spec)
        for k, idx in enumerate(tl.multi_indices):
            end = tl.intervals[k][0] + tl.intervals[k][1]
            assert abs(end - nudd_timing(spec, idx)) <= tol(8)

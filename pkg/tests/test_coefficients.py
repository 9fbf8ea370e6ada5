import random

import pytest
from gmpy2 import mpfr

from nuddlab.coefficients import (
    BudgetExceeded,
    coefficient,
    fourier_profile,
    lemma_checks,
    max_abs_coefficient,
    naive_order,
    oracle_coefficient,
    outer_decomposition,
    predict_order,
    predict_overall,
    suppression_orders,
    vanishing_order,
    word_type,
    words_of_type,
)
from nuddlab.mpcore import precision, tol
from nuddlab.schedule import NuddSpec


# -- exact coefficient values, frozen from an independent symbolic oracle -----
# (piecewise polynomial integration done in exact rational arithmetic with
# the sin^2 breakpoints; see the derivations in the test comments)


def test_single_layer_first_order_vanishes():
    # any UDD layer kills the first-order term
    for N in (1, 2, 3):
        assert abs(coefficient(NuddSpec((N,)), ((1,),))) <= tol(15)


def test_repeated_word_is_power_of_first_order():
    # identical integrands make the nested integral (F1)^n / n!, hence 0
    spec = NuddSpec((2,))
    assert abs(coefficient(spec, ((1,), (1,), (1,)))) <= tol(15)
    # and for the trivial vector, exactly 1/n!
    f3 = coefficient(spec, ((0,), (0,), (0,)))
    assert abs(f3 - mpfr(1) / 6) <= tol(15)


def test_frozen_values_udd2():
    spec = NuddSpec((2,))
    cases = {
        ((0,), (0,), (1,)): mpfr(1) / 32,
        ((1,), (0,), (1,)): mpfr(-1) / 48,
        ((1,), (1,), (0,)): mpfr(1) / 96,
        ((0,), (1,), (0,)): mpfr(-1) / 16,
    }
    for word, expected in cases.items():
        assert abs(coefficient(spec, word) - expected) <= tol(15)


def test_qdd11_single_vector_vanishes():
    # quarter signs (+,-,-,+) integrate to zero
    assert abs(coefficient(NuddSpec((1, 1)), ((1, 1),))) <= tol(15)


def test_empty_word_is_one():
    assert coefficient(NuddSpec((1,)), ()) == 1


def test_word_length_validation():
    with pytest.raises(ValueError):
        coefficient(NuddSpec((1, 1)), ((1,),))


def test_word_type():
    assert word_type(((1, 0), (0, 1), (1, 1))) == (0, 0)
    assert word_type(((1, 0),)) == (1, 0)


def test_words_of_type_counts():
    words = list(words_of_type(2, (1, 1), 3))
    assert len(words) == 16
    assert all(word_type(w) == (1, 1) for w in words)


def test_oracle_converges_quadratically():
    spec = NuddSpec((2,))
    word = ((0,), (0,), (1,))
    exact = coefficient(spec, word)
    e_prev = None
    for g in (8, 16, 32):
        err = abs(oracle_coefficient(spec, word, g) - exact)
        if e_prev is not None:
            assert 3.0 <= float(e_prev / err) <= 5.0
        e_prev = err


def test_oracle_zero_word():
    spec = NuddSpec((1, 1))
    word = ((1, 1),)
    got = oracle_coefficient(spec, word, 64)
    assert abs(got) <= mpfr("1e-4")


def test_oracle_first_order_is_exact():
    # n=1 integrands are piecewise constant: the aligned trapezoid is exact
    spec = NuddSpec((3,))
    for word in [((1,),), ((0,),)]:
        got = oracle_coefficient(spec, word, 10)
        assert abs(got - coefficient(spec, word)) <= tol(20)


def test_oracle_grid_validation():
    with pytest.raises(ValueError):
        oracle_coefficient(NuddSpec((1,)), ((1,),), 1)


def test_vanishing_order_udd3():
    # a single UDD layer decouples its error to exactly its sequence order
    assert vanishing_order(NuddSpec((3,)), (1,), 5) == 3


def test_vanishing_order_qdd11():
    spec = NuddSpec((1, 1))
    assert vanishing_order(spec, (1, 1), 3) >= 2


def test_vanishing_order_qdd22():
    spec = NuddSpec((2, 2))
    for r in [(1, 0), (0, 1), (1, 1)]:
        assert vanishing_order(spec, r, 3) == 2


def test_vanishing_order_budget():
    with pytest.raises(BudgetExceeded) as exc:
        vanishing_order(NuddSpec((1, 1, 1, 1)), (1, 0, 0, 0), 8, budget=1000)
    assert exc.value.attempted > 1000


def test_max_abs_coefficient_counts():
    best, count = max_abs_coefficient(NuddSpec((2,)), (1,), 3)
    assert count == 4
    assert abs(best - mpfr(1) / 16) <= tol(15)


# -- outer-layer decomposition -------------------------------------------------


def test_outer_decomposition_requires_two_layers():
    with pytest.raises(ValueError):
        outer_decomposition(NuddSpec((2,)), ((1,),))


def test_outer_decomposition_single_cluster_zero():
    spec = NuddSpec((1, 1))
    word = ((1, 1),)
    assert abs(outer_decomposition(spec, word)) <= tol(15)
    assert abs(coefficient(spec, word)) <= tol(15)


@pytest.mark.parametrize("orders,n_words", [((2, 3), 12), ((1, 2, 1), 8)])
def test_outer_decomposition_identity(orders, n_words):
    with precision(60):
        spec = NuddSpec(orders)
        rng = random.Random(11)
        for _ in range(n_words):
            n = rng.randint(1, 4)
            word = tuple(
                tuple(rng.randint(0, 1) for _ in range(spec.ell))
                for _ in range(n)
            )
            a = coefficient(spec, word)
            b = outer_decomposition(spec, word)
            assert abs(a - b) <= tol(15) * max(abs(a), mpfr(1))


# -- harmonic classes -----------------------------------------------------------


def test_fourier_outer_layer_single():
    rep = fourier_profile(NuddSpec((2,)), 1, m_max=16)
    assert rep.kind == "sin"
    assert rep.allowed == (3, 9, 15)
    assert rep.passed
    populated = [m for m in range(17) if rep.sin_mag[m] > mpfr("1e-20")]
    assert populated == [3, 9, 15]


def test_fourier_inner_even_layer():
    rep = fourier_profile(NuddSpec((2, 3)), 1, m_max=18)
    assert rep.kind == "cos"
    assert set(rep.allowed) == {0, 8, 16}
    assert rep.passed


def test_fourier_inner_odd_layer():
    rep = fourier_profile(NuddSpec((3, 3)), 1, m_max=18)
    assert rep.kind == "sin"
    assert set(rep.allowed) == {8, 16}
    assert rep.passed


def test_fourier_jacobian():
    rep = fourier_profile(NuddSpec((2, 3)), "G1", m_max=18)
    assert rep.kind == "sin"
    assert set(rep.allowed) == {1, 7, 9, 15, 17}
    assert rep.passed


def test_fourier_bad_selector():
    with pytest.raises(ValueError):
        fourier_profile(NuddSpec((2, 3)), "G2")
    with pytest.raises(ValueError):
        fourier_profile(NuddSpec((2, 3)), 3)


# -- closed-form predictions -----------------------------------------------------


def test_suppression_orders_examples():
    assert suppression_orders(NuddSpec((1, 3, 5, 7))) == [1, 2, 2, 2]
    assert suppression_orders(NuddSpec((2, 4, 1, 6))) == [2, 4, 1, 2]
    assert suppression_orders(NuddSpec((2, 4, 6, 8))) == [2, 4, 6, 8]


def test_predict_order_reference_values():
    assert predict_order(NuddSpec((2, 4, 6, 8)), (1, 0, 0, 0)) == 2
    assert predict_order(NuddSpec((2, 4, 6, 3)), (0, 1, 0, 1)) == 5
    assert predict_order(NuddSpec((7, 5, 3, 1)), (1, 1, 1, 1)) == 10
    assert predict_order(NuddSpec((2, 4, 1, 6)), (0, 0, 0, 1)) == 2
    assert predict_order(NuddSpec((3, 2)), (0, 0)) == 0


def test_predict_overall_examples():
    assert predict_overall(NuddSpec((2, 4, 1, 6))) == 1
    assert predict_overall(NuddSpec((2, 4, 6, 8))) == 2
    assert predict_overall(NuddSpec((7, 5, 3, 1))) == 1


def test_naive_order_examples():
    assert naive_order(NuddSpec((2, 4, 6, 3)), (0, 0, 1, 1)) == 6
    assert naive_order(NuddSpec((7, 5, 3, 1)), (1, 1, 1, 1)) == 7
    assert naive_order(NuddSpec((3, 3)), (0, 0)) == 0


def test_qdd_reduction():
    # two-layer predictor agrees with the explicit QDD formulas
    for n1 in range(1, 7):
        for n2 in range(1, 7):
            spec = NuddSpec((n1, n2))
            nt = suppression_orders(spec)
            assert predict_order(spec, (1, 0)) == n1
            assert predict_order(spec, (0, 1)) == nt[1]
            expected_11 = max(
                n1 + (n2 % 2), ((n1 % 2) ^ 1) * nt[1]
            )
            assert predict_order(spec, (1, 1)) == expected_11


def test_all_even_equals_naive():
    rng = random.Random(7)
    for _ in range(20):
        ell = rng.randint(1, 5)
        spec = NuddSpec(tuple(2 * rng.randint(1, 4) for _ in range(ell)))
        for _ in range(8):
            r = tuple(rng.randint(0, 1) for _ in range(ell))
            assert predict_order(spec, r) == naive_order(spec, r)


def test_odd_outer_boost():
    # all inner even, odd outer: the outer layer boosts every addressed
    # inner layer's term by one order, so the prediction is
    # max(best inner + 1, N_outer); it exceeds the naive order exactly
    # when an addressed inner layer matches or beats the outer order
    rng = random.Random(8)
    for _ in range(40):
        ell = rng.randint(2, 5)
        orders = tuple(2 * rng.randint(1, 4) for _ in range(ell - 1)) + (
            2 * rng.randint(1, 4) - 1,
        )
        spec = NuddSpec(orders)
        r = tuple(rng.randint(0, 1) for _ in range(ell - 1)) + (1,)
        if not any(r[:-1]):
            continue
        best_inner = max(r[i] * orders[i] for i in range(ell - 1))
        expected = max(best_inner + 1, orders[-1])
        assert predict_order(spec, r) == expected
        if best_inner >= orders[-1]:
            assert predict_order(spec, r) == naive_order(spec, r) + 1


def test_all_odd_decreasing():
    for orders in [(7, 5, 3, 1), (5, 3, 1), (9, 7, 5, 3, 1)]:
        spec = NuddSpec(orders)
        rng = random.Random(9)
        for _ in range(12):
            r = tuple(rng.randint(0, 1) for _ in range(len(orders)))
            if not any(r):
                continue
            m = r.index(1)
            expected = orders[m] + sum(r[m + 1:])
            assert predict_order(spec, r) == expected


def test_lemma_checks_even_spec():
    rep = lemma_checks(NuddSpec((2, 4, 6)), 1000, seed=1)
    assert rep.subadditivity_trials == 1000
    assert not rep.subadditivity_violations
    assert rep.odd_minimum_status == "skipped"
    assert rep.passed


def test_lemma_checks_odd_spec():
    rep = lemma_checks(NuddSpec((1, 3, 5)), 200, seed=2)
    assert rep.odd_minimum_status == "checked"
    assert rep.odd_minimum == rep.odd_minimum_expected == 1
    assert rep.passed


def test_lemma_checks_validation():
    with pytest.raises(ValueError):
        lemma_checks(NuddSpec((2,)), 0)


def test_precision_consistency_of_coefficient():
    word = ((1, 0), (0, 1), (1, 1))
    with precision(50):
        a = coefficient(NuddSpec((2, 3)), word)
    with precision(70):
        b = coefficient(NuddSpec((2, 3)), word)
    assert abs(a - b) < mpfr(10) ** (-45)

import random

import pytest
from gmpy2 import mpc, mpfr

from nuddlab.errortypes import (
    MIXED,
    MoosError,
    all_error_vectors,
    classify,
    embed_system,
    generator_table,
    generator_table_csv,
    generator_table_markdown,
    partition,
    pauli,
    pauli_label,
    pauli_string,
    unit_vector,
    validate_moos,
    xor,
)
from nuddlab.mpcore import CMatrix, identity, matmul, tol


@pytest.fixture
def moos_zx():
    return validate_moos([pauli("z"), pauli("x")])


@pytest.fixture
def moos54():
    # single-qubit operators on two qubits, innermost layer first
    return validate_moos(
        [pauli_string(s) for s in ("iz", "ix", "zi", "xi")]
    )


@pytest.fixture
def moos56():
    return validate_moos(
        [pauli_string(s) for s in ("zz", "ix", "zi", "xi")]
    )


def test_validate_single_qubit_pair(moos_zx):
    assert moos_zx.ell == 2
    assert moos_zx.relations[0][1] == -1
    assert moos_zx.relations[0][0] == 1


def test_validate_four_layer_sets(moos54, moos56):
    assert moos54.ell == 4
    assert moos56.ell == 4


def test_validate_rejects_duplicates():
    with pytest.raises(MoosError, match="independent"):
        validate_moos([pauli("z"), pauli("z")])


def test_validate_rejects_phase_dependent_product():
    # sigma_y = -i sigma_z sigma_x: dependent up to a phase
    with pytest.raises(MoosError, match="independent"):
        validate_moos([pauli("z"), pauli("x"), pauli("y")])


def test_validate_rejects_non_involution():
    bad = CMatrix([[1, 0], [0, 2]])
    with pytest.raises(MoosError, match="unitary"):
        validate_moos([bad])


def test_validate_rejects_non_hermitian():
    bad = CMatrix([[0, 1], [0, 0]])
    with pytest.raises(MoosError, match="Hermitian"):
        validate_moos([bad])


def test_validate_rejects_neither_commute_nor_anticommute():
    h = CMatrix([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    rot = CMatrix([[0, 0, 1], [0, 1, 0], [1, 0, 0]])
    with pytest.raises(MoosError, match="neither"):
        validate_moos([h, rot])


def test_partition_single_qubit_general_decoherence(moos_zx):
    jx, jy, jz, j0 = mpfr("0.5"), mpfr("0.7"), mpfr("0.11"), mpfr("0.3")
    h = (
        j0 * identity(2) + jx * pauli("x") + jy * pauli("y") + jz * pauli("z")
    )
    dec = partition(h, moos_zx)
    assert (dec[(1, 0)] - jx * pauli("x")).maxabs() <= tol(10)
    assert (dec[(0, 1)] - jz * pauli("z")).maxabs() <= tol(10)
    assert (dec[(1, 1)] - jy * pauli("y")).maxabs() <= tol(10)
    assert (dec[(0, 0)] - j0 * identity(2)).maxabs() <= tol(10)


def test_partition_commuting_hamiltonian(moos_zx):
    h = mpfr("0.8") * identity(2)
    dec = partition(h, moos_zx)
    for r, part in dec.parts.items():
        if r == (0, 0):
            assert (part - h).maxabs() <= tol(10)
        else:
            assert part.maxabs() <= tol(10)


def test_partition_two_qubit_generator(moos56):
    dec = partition(pauli_string("xx"), moos56)
    assert (dec[(0, 0, 1, 0)] - pauli_string("xx")).maxabs() <= tol(10)


def test_partition_completeness_and_idempotence(moos54):
    rng = random.Random(3)
    arr = [[mpc(rng.random() - 0.5, rng.random() - 0.5) for _ in range(4)]
           for _ in range(4)]
    h = CMatrix(arr)
    h = h + h.dagger()
    dec = partition(h, moos54)
    assert (dec.total() - h).maxabs() <= tol(10) * max(h.maxabs(), mpfr(1))
    # projecting a part again returns only itself
    for r in [(1, 0, 0, 0), (0, 1, 1, 0)]:
        sub = partition(dec[r], moos54)
        assert (sub[r] - dec[r]).maxabs() <= tol(10)
        for r2, p in sub.parts.items():
            if r2 != r:
                assert p.maxabs() <= tol(10)


def test_partition_relation_law(moos54):
    rng = random.Random(4)
    arr = [[mpc(rng.random() - 0.5, rng.random() - 0.5) for _ in range(4)]
           for _ in range(4)]
    h = CMatrix(arr)
    h = h + h.dagger()
    dec = partition(h, moos54)
    for r, part in dec.parts.items():
        for i, om in enumerate(moos54.operators):
            conj = matmul(om, matmul(part, om))
            sign = -1 if r[i] else 1
            assert (conj - sign * part).maxabs() <= tol(10)


def test_partition_dimension_mismatch(moos_zx):
    with pytest.raises(ValueError):
        partition(identity(4), moos_zx)


def test_classify_examples(moos54, moos_zx):
    assert classify(pauli_string("yi"), moos54) == (0, 0, 1, 1)
    assert classify(identity(4), moos54) == (0, 0, 0, 0)
    assert classify(pauli("x") + pauli("z"), moos_zx) is MIXED


def test_classify_product_property(moos54):
    rng = random.Random(5)
    pure = ["ix", "zy", "xz", "yy", "zi"]
    for _ in range(6):
        a, b = rng.choice(pure), rng.choice(pure)
        ca = classify(pauli_string(a), moos54)
        cb = classify(pauli_string(b), moos54)
        cab = classify(matmul(pauli_string(a), pauli_string(b)), moos54)
        assert cab == xor(ca, cb)


def test_xor():
    assert xor((1, 0, 1), (1, 0, 1)) == (0, 0, 0)
    assert xor((1, 0, 0, 0), (0, 0, 1, 0)) == (1, 0, 1, 0)
    with pytest.raises(ValueError):
        xor((1,), (1, 0))


def test_generator_table_single_qubit_moos():
    moos = validate_moos([pauli("z")])
    table = generator_table(moos, {(1,): pauli("x")})
    assert (table[(0,)] - identity(2)).maxabs() <= tol(10)
    assert (table[(1,)] - pauli("x")).maxabs() <= tol(10)


def test_generator_table_matches_moos54(moos54):
    gens = {
        (1, 0, 0, 0): pauli_string("ix"),
        (0, 1, 0, 0): pauli_string("iz"),
        (0, 0, 1, 0): pauli_string("xi"),
        (0, 0, 0, 1): pauli_string("zi"),
    }
    table = generator_table(moos54, gens)
    assert pauli_label(table[(1, 1, 0, 0)]) == "IY"
    assert pauli_label(table[(0, 0, 1, 1)]) == "YI"
    assert pauli_label(table[(1, 0, 1, 0)]) == "XX"
    assert len(table) == 16


def test_generator_table_matches_moos56(moos56):
    gens = {
        (1, 0, 0, 0): pauli_string("ix"),
        (0, 1, 0, 0): pauli_string("iz"),
        (0, 0, 1, 0): pauli_string("xx"),
        (0, 0, 0, 1): pauli_string("zi"),
    }
    table = generator_table(moos56, gens)
    assert pauli_label(table[(0, 1, 1, 0)]) == "XY"
    assert pauli_label(table[(1, 0, 1, 0)]) == "XI"


def test_generator_table_rejects_impure_generator(moos_zx):
    with pytest.raises(ValueError, match="classifies"):
        generator_table(
            moos_zx,
            {(1, 0): pauli("x") + pauli("y"), (0, 1): pauli("z")},
        )


def test_generator_table_group_law(moos54):
    gens = {
        (1, 0, 0, 0): pauli_string("ix"),
        (0, 1, 0, 0): pauli_string("iz"),
        (0, 0, 1, 0): pauli_string("xi"),
        (0, 0, 0, 1): pauli_string("zi"),
    }
    table = generator_table(moos54, gens)
    rng = random.Random(6)
    vecs = all_error_vectors(4)
    for _ in range(8):
        a, b = rng.choice(vecs), rng.choice(vecs)
        prod = matmul(table[a], table[b])
        target = table[xor(a, b)]
        # equal up to a phase
        matched = False
        for ph in (1, -1, 1j, -1j):
            if (prod - mpc(ph) * target).maxabs() <= tol(10):
                matched = True
        assert matched


def test_table_rendering(moos54):
    gens = {
        (1, 0, 0, 0): pauli_string("ix"),
        (0, 1, 0, 0): pauli_string("iz"),
        (0, 0, 1, 0): pauli_string("xi"),
        (0, 0, 0, 1): pauli_string("zi"),
    }
    table = generator_table(moos54, gens)
    md = generator_table_markdown(table)
    assert "I(x)Y" in md and md.count("|") > 20
    csv_text = generator_table_csv(table)
    assert "Y(x)I" in csv_text


def test_embed_system():
    em = embed_system(pauli("z"), 4)
    assert em.rows == 8
    assert classify(em, validate_moos([embed_system(pauli("x"), 4)])) == (1,)


def test_unit_vector():
    assert unit_vector(4, 2) == (0, 1, 0, 0)

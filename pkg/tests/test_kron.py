"""Symmetric group characters and Kronecker coefficients."""

from math import factorial

import pytest

from tinvar.kron import (
    DEGREE_CAP,
    centralizer_order,
    character_value,
    conjugate,
    kronecker_coefficient,
    normalize,
    partitions_of,
    rectangle,
    rectangle_coefficient,
    rectangle_symmetry_check,
    rectangular_triple_positive,
)


def _hook_length_dimension(lam):
    """Number of standard Young tableaux by the hook length formula."""
    lam = normalize(lam)
    conj = conjugate(lam)
    d = sum(lam)
    prod = 1
    for i, row in enumerate(lam):
        for j in range(row):
            prod *= (row - j) + (conj[j] - i) - 1
    return factorial(d) // prod


def test_partitions_of():
    assert list(partitions_of(0)) == [()]
    assert sorted(partitions_of(4)) == sorted(
        [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    )
    assert len(list(partitions_of(8))) == 22


def test_centralizer_orders_sum_to_group_order():
    for d in range(1, 8):
        assert sum(factorial(d) // centralizer_order(mu) for mu in partitions_of(d)) == factorial(d)


def test_character_identity_class_is_dimension():
    for d in range(1, 9):
        for lam in partitions_of(d):
            assert character_value(lam, (1,) * d) == _hook_length_dimension(lam)


def test_trivial_and_sign_characters():
    for d in range(1, 9):
        for mu in partitions_of(d):
            assert character_value((d,), mu) == 1
            expected = 1
            for part in mu:
                if part % 2 == 0:
                    expected = -expected
            assert character_value((1,) * d, mu) == expected


def test_character_orthogonality():
    """First orthogonality of the character table at small degrees."""
    for d in range(1, 7):
        parts = list(partitions_of(d))
        for lam in parts:
            for mu in parts:
                inner = sum(
                    (factorial(d) // centralizer_order(rho))
                    * character_value(lam, rho)
                    * character_value(mu, rho)
                    for rho in parts
                )
                assert inner == (factorial(d) if lam == mu else 0)


def test_kronecker_anchors():
    assert kronecker_coefficient(rectangle(3, 2), rectangle(3, 2), rectangle(3, 2)) == 1
    assert kronecker_coefficient(rectangle(2, 2), rectangle(2, 2), rectangle(2, 2)) == 1
    assert kronecker_coefficient(rectangle(2, 3), rectangle(2, 3), rectangle(2, 3)) == 0


def test_kronecker_with_trivial_factor():
    """Tensoring with the trivial representation is the identity: the
    coefficient is 1 exactly when the other two partitions agree."""
    for d in range(1, 7):
        for lam in partitions_of(d):
            for mu in partitions_of(d):
                expected = 1 if lam == mu else 0
                assert kronecker_coefficient((d,), lam, mu) == expected


def test_kronecker_with_sign_factor():
    """Tensoring with the sign representation conjugates."""
    for d in range(1, 7):
        for lam in partitions_of(d):
            for mu in partitions_of(d):
                expected = 1 if conjugate(lam) == mu else 0
                assert kronecker_coefficient((1,) * d, lam, mu) == expected


def test_rectangle_coefficients():
    assert rectangle_coefficient(0, 3) == 1
    assert rectangle_coefficient(1, 3) == 1  # single row (3),(3),(3)
    assert rectangle_coefficient(3, 2) == 1
    assert rectangle_coefficient(2, 3) == 0


def test_rectangle_symmetry():
    # k_{n^2-j}(n) = k_j(n) within the degree cap
    for j in (0, 1, 2, 3, 4):
        assert rectangle_symmetry_check(2, j)
    with pytest.raises(ValueError):
        rectangle_symmetry_check(2, 5)


def test_rectangular_triple_positive():
    coef, ok = rectangular_triple_positive(3, 3, 3, 2, 2, 2)
    assert coef == 1 and ok
    coef, ok = rectangular_triple_positive(2, 2, 2, 3, 3, 3)
    assert coef == 0 and ok
    with pytest.raises(ValueError):
        rectangular_triple_positive(2, 3, 2, 3, 2, 2)


def test_degree_cap_enforced():
    with pytest.raises(ValueError):
        kronecker_coefficient((DEGREE_CAP + 1,), (DEGREE_CAP + 1,), (DEGREE_CAP + 1,))
    with pytest.raises(ValueError):
        character_value((DEGREE_CAP + 1,), (DEGREE_CAP + 1,))


def test_size_mismatch_rejected():
    with pytest.raises(ValueError):
        kronecker_coefficient((2,), (2,), (3,))
    with pytest.raises(ValueError):
        character_value((2, 1), (2,))


def test_normalize_and_conjugate():
    assert normalize((0, 2, 1, 0)) == (2, 1)
    assert conjugate((3, 1)) == (2, 1, 1)
    assert conjugate(conjugate((4, 2, 1))) == (4, 2, 1)
    with pytest.raises(ValueError):
        normalize((-1, 2))

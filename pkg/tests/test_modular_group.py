import random
from itertools import product

import pytest

import oracles
from scgp.modular_group import (
    Mat2,
    check_modulus,
    coset_count,
    enumerate_group,
    euler_phi,
    group_order,
    mat_inverse,
    mat_mul,
    prime_factors,
    units,
)


def test_check_modulus_rejects_small_and_nonint():
    with pytest.raises(ValueError):
        check_modulus(1)
    with pytest.raises(ValueError):
        check_modulus(-3)
    with pytest.raises(TypeError):
        check_modulus(5.0)


def test_mat2_requires_reduced_entries_and_det_one():
    with pytest.raises(ValueError):
        Mat2(5, 0, 0, 1, 5)  # entry not in [0, n)
    with pytest.raises(ValueError):
        Mat2(2, 0, 0, 1, 5)  # det = 2
    assert Mat2.from_entries(-1, 0, 0, -1, 5) == Mat2(4, 0, 0, 4, 5)


def test_identity_is_two_sided_for_small_n():
    for n in (2, 3, 4, 5):
        identity = Mat2.identity(n)
        for m in enumerate_group(n):
            assert mat_mul(identity, m) == m
            assert mat_mul(m, identity) == m


def test_frozen_product_mod_5():
    shear = Mat2(1, 1, 0, 1, 5)
    assert mat_mul(shear, shear) == Mat2(1, 2, 0, 1, 5)


def test_modulus_mismatch_raises():
    with pytest.raises(ValueError, match="modulus mismatch"):
        mat_mul(Mat2.identity(5), Mat2.identity(7))


def test_det_preserved_under_mul_exhaustive_n3():
    group = enumerate_group(3)
    for x in group:
        for y in group:
            p = mat_mul(x, y)
            assert (p.a * p.d - p.b * p.c) % 3 == 1


def test_inverse_frozen_cases():
    for n in (2, 3, 5, 11):
        assert mat_inverse(Mat2.identity(n)) == Mat2.identity(n)
        assert mat_inverse(Mat2(1, 1, 0, 1, n)) == Mat2(1, n - 1, 0, 1, n)


def test_inverse_two_sided_exhaustive_small_n():
    for n in (2, 3, 4, 5):
        identity = Mat2.identity(n)
        for m in enumerate_group(n):
            assert mat_mul(m, mat_inverse(m)) == identity
            assert mat_mul(mat_inverse(m), m) == identity


def test_associativity_sampled():
    rng = random.Random(20260811)
    for n in range(2, 13):
        group = enumerate_group(n)
        for _ in range(40):
            x, y, z = (rng.choice(group) for _ in range(3))
            assert mat_mul(mat_mul(x, y), z) == mat_mul(x, mat_mul(y, z))


def test_group_order_frozen_values():
    assert group_order(5) == 120  # the worked example
    assert group_order(2) == 6
    assert group_order(6) == 144


def test_group_order_matches_bruteforce():
    for n in range(2, 13):
        assert group_order(n) == len(oracles.all_group_tuples(n))


def test_euler_phi_values():
    assert euler_phi(5) == 4
    assert euler_phi(2) == 1
    assert euler_phi(12) == 4
    for n in range(2, 31):
        assert euler_phi(n) == len(oracles.unit_list(n))


def test_units_are_sorted_and_coprime():
    for n in (2, 6, 12, 30):
        u = units(n)
        assert u == sorted(u)
        assert u == oracles.unit_list(n)


def test_coset_count_frozen_values():
    assert coset_count(5) == 30  # 120 / 4
    assert coset_count(3) == 12
    assert coset_count(11) == 132


def test_coset_count_matches_orbit_partition():
    for n in range(2, 13):
        assert coset_count(n) == len(oracles.coset_partition(n))


def test_counting_identity():
    for n in range(2, 13):
        assert coset_count(n) * euler_phi(n) == group_order(n)


def test_enumerate_group_order_and_first_element():
    for n in range(2, 13):
        group = enumerate_group(n)
        assert len(group) == group_order(n)
        assert group[0].entries() == (0, 1, n - 1, 0)
        entries = [m.entries() for m in group]
        assert entries == sorted(entries)


def test_enumerate_group_guard():
    with pytest.raises(ValueError, match="guard"):
        enumerate_group(13)
    assert len(enumerate_group(13, guard=13)) == group_order(13)


def test_prime_factors():
    assert prime_factors(12) == (2, 3)
    assert prime_factors(97) == (97,)
    assert prime_factors(360) == (2, 3, 5)

import itertools
import random

import pytest

from cyclosieve import build_extension, dlog_small_subgroup, element_of_order, exact_order, find_generator
from cyclosieve.finite_field import ExtField, _has_full_order, is_irreducible

from conftest import brute_order


def _has_root_or_factor(g, q):
    """Exhaustive reducibility oracle for degree <= 4: look for monic factors of degree <= f/2."""
    f = len(g) - 1
    for deg in range(1, f // 2 + 1):
        for tail in itertools.product(range(q), repeat=deg):
            h = list(tail) + [1]
            # long division of g by h over F_q
            rem = list(g)
            for i in range(len(rem) - len(h), -1, -1):
                c = rem[i + deg] % q
                for j, hj in enumerate(h):
                    rem[i + j] = (rem[i + j] - c * hj) % q
            if not any(rem[:deg]):
                return True
    return False


def _smallest_irreducible_exhaustive(q, f):
    for code in range(q**f):
        coeffs = [(code // q**i) % q for i in range(f)] + [1]
        if not _has_root_or_factor(coeffs, q):
            return tuple(coeffs)


def test_prime_field_convention():
    F = build_extension(11, 1)
    assert F.modulus == (0, 1)
    assert F.size == 11


@pytest.mark.parametrize("q,f", [(7, 4), (5, 2), (3, 4), (2, 3), (5, 3), (3, 2), (13, 2)])
def test_modulus_is_smallest_irreducible(q, f):
    assert build_extension(q, f).modulus == _smallest_irreducible_exhaustive(q, f)


def test_f25_modulus_quadratic_residue_oracle():
    # X^2 + c irreducible iff -c is a non-residue mod 5; squares mod 5 are {0, 1, 4}
    squares = {x * x % 5 for x in range(5)}
    first = next(c for c in range(1, 5) if (-c) % 5 not in squares)
    assert first == 2
    assert build_extension(5, 2).modulus == (2, 0, 1)


def test_quartic_over_f7():
    F = build_extension(7, 4)
    assert F.modulus == (1, 1, 0, 0, 1)
    assert F.card_minus_1 == 2400


def test_is_irreducible_exhaustive_degree_3():
    q = 3
    for tail in itertools.product(range(q), repeat=3):
        g = list(tail) + [1]
        assert is_irreducible(g, q) == (not _has_root_or_factor(g, q))


def test_reducible_modulus_rejected():
    with pytest.raises(ValueError, match="reducible"):
        ExtField(5, 2, (1, 0, 1))  # X^2 + 1 = (X - 2)(X + 2) over F_5
    with pytest.raises(ValueError):
        ExtField(6, 1, (0, 1))


def test_factorization_multiplies_back():
    F = build_extension(7, 4)
    prod = 1
    for ell, e in F.factorization.items():
        prod *= ell**e
    assert prod == F.card_minus_1


@pytest.mark.parametrize("q,f", [(11, 1), (5, 2), (7, 4), (3, 5), (101, 2)])
def test_field_axioms(q, f):
    F = build_extension(q, f)
    rng = random.Random(q * 100 + f)
    n = 10**4 if F.size < 10**5 else 2000
    one = F.one()
    for _ in range(n):
        a, b, c = (F.random_element(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        if a:
            assert a * a.inverse() == one
            assert (b / a) * a == b


@pytest.mark.parametrize("q,f", [(11, 1), (5, 2), (7, 4), (3, 6)])
def test_frobenius_fixes_everything(q, f):
    F = build_extension(q, f)
    rng = random.Random(7)
    for _ in range(200):
        x = F.random_element(rng)
        assert x ** (q**f) == x


def test_find_generator_examples():
    assert int(find_generator(build_extension(11, 1))) == 2
    assert int(find_generator(build_extension(31, 1))) == 3
    assert int(find_generator(build_extension(13, 1))) == 2
    assert brute_order(2, 11) == 10 and brute_order(3, 31) == 30 and brute_order(2, 13) == 12


def test_find_generator_is_smallest_in_code_order():
    for q, f in [(5, 2), (3, 3), (7, 2)]:
        F = build_extension(q, f)
        g = find_generator(F)
        assert exact_order(g) == F.card_minus_1
        for code in range(1, g.code):
            assert exact_order(F.from_code(code)) != F.card_minus_1


@pytest.mark.parametrize("q,f", [(7, 4), (11, 5), (13, 3), (3, 6), (43, 6), (31, 2), (2, 8)])
def test_batched_generator_matches_plain_scan(q, f):
    # the batched search prefilters on norms; the plain scan is the oracle
    F = build_extension(q, f)
    g = find_generator(F)
    first = next(c for c in range(q, F.size) if _has_full_order(F, F.from_code(c).coeffs))
    assert g.code == first


def test_exact_order_examples():
    F = build_extension(31, 1)
    assert exact_order(F(1)) == 1
    assert exact_order(F(16)) == 5 == brute_order(16, 31)
    assert exact_order(F(3)) == 30
    with pytest.raises(ValueError):
        exact_order(F(0))


def test_exact_order_brute_force_extension():
    F = build_extension(3, 3)
    for code in range(1, F.size):
        x = F.from_code(code)
        acc, e = x, 1
        while acc != 1:
            acc, e = acc * x, e + 1
        assert exact_order(x) == e


def test_element_of_order():
    F = build_extension(11, 1)
    assert element_of_order(F, 1) == 1
    x = element_of_order(F, 5)
    assert x**5 == 1 and x != 1
    assert pow(3, 5, 11) == 1  # 3 would also be admissible
    F = build_extension(7, 4)
    z = element_of_order(F, 5)
    assert z**5 == 1 and z != 1
    assert z == find_generator(F) ** (2400 // 5)
    with pytest.raises(ValueError):
        element_of_order(F, 7)


@pytest.mark.parametrize("q,f,m", [(31, 1, 6), (7, 4, 48), (5, 2, 12), (101, 1, 100)])
def test_element_of_order_exact(q, f, m):
    F = build_extension(q, f)
    x = element_of_order(F, m)
    assert x**m == 1
    for ell in (2, 3, 5, 7):
        if m % ell == 0:
            assert x ** (m // ell) != 1


def test_dlog_small_subgroup():
    F = build_extension(11, 1)
    z = F(3)
    assert dlog_small_subgroup(F(1), z, 5) == 0
    assert dlog_small_subgroup(F(4), z, 5) == 4
    assert dlog_small_subgroup(z, z, 5) == 1
    with pytest.raises(ValueError, match="not in mu_p"):
        dlog_small_subgroup(F(2), z, 5)
    with pytest.raises(ValueError):
        dlog_small_subgroup(F(1), F(2), 5)
    F = build_extension(7, 4)
    z = element_of_order(F, 5)
    for k in range(5):
        assert dlog_small_subgroup(z**k, z, 5) == k


def test_element_arithmetic_details():
    F = build_extension(5, 2)
    x = F([0, 1])
    assert x * x == F(-2)
    assert x**-1 * x == 1
    assert F(7) == 2 and F.lift(7) == F(2)
    assert int(F(3)) == 3
    with pytest.raises(ZeroDivisionError):
        F(0).inverse()
    with pytest.raises(ValueError):
        int(x)

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kxchain import codec
from kxchain.codec import (
    ElementaryMatrix,
    decode_list,
    encode_list,
    int_to_omega,
    matrix_decode,
    matrix_encode,
    nat_to_omega,
    omega_to_int,
    omega_to_nat,
    pair,
    rational_decode,
    rational_encode,
    str_decode,
    str_encode,
    unpair,
    zeta,
    zeta_inverse,
)


def test_pair_pinned_values():
    assert pair(1, 5) == 21
    assert pair(0, 0) == 0
    assert pair(3, 1) == 23


def test_unpair_pinned_values():
    assert unpair(21) == (1, 5)
    assert unpair(0) == (0, 0)
    assert unpair(46) == (0, 23)


@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_pair_round_trip(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.integers(0, 2**20 - 1))
def test_unpair_round_trip(z):
    x, y = unpair(z)
    assert pair(x, y) == z


def test_encode_list_pinned_values():
    assert encode_list([21, 46]) == 2**21 * 3**46 - 1
    assert encode_list([]) == 0
    assert encode_list([1, 0, 2]) == 49


def test_decode_list_pinned_values():
    assert decode_list(2**21 * 3**46 - 1) == [21, 46]
    assert decode_list(0) == []
    assert decode_list(49) == [1, 0, 2]


def test_decode_list_strips_trailing_zeros():
    assert decode_list(encode_list([5, 0, 0])) == [5]
    assert decode_list(encode_list([0, 0, 3, 0])) == [0, 0, 3]


def test_decode_list_refuses_huge_prime_factors():
    big_prime = 1_000_033  # above the default walk limit
    with pytest.raises(ValueError):
        decode_list(2 * big_prime - 1)


@given(st.lists(st.integers(0, 31), max_size=6))
def test_list_round_trip(xs):
    stripped = list(xs)
    while stripped and stripped[-1] == 0:
        stripped.pop()
    assert decode_list(encode_list(xs)) == stripped


def test_str_encode_pinned_values():
    assert str_encode("") == 0
    assert str_encode("0") == 1
    assert str_encode("1") == 2
    assert str_encode("01") == 5


def test_str_round_trip_exhaustive_short():
    # Every string of length <= 10 and every code below 2^11 - 1.
    seen = set()
    for length in range(11):
        for i in range(2**length):
            s = format(i, f"0{length}b") if length else ""
            n = str_encode(s)
            assert n not in seen
            seen.add(n)
            assert str_decode(n) == s
    assert seen == set(range(2**11 - 1))


@given(st.integers(0, 2**20 - 1))
def test_str_decode_round_trip(n):
    assert str_encode(str_decode(n)) == n


def test_rational_pinned_values():
    assert rational_encode(Fraction(0)) == 0
    assert rational_encode(Fraction(1, 1)) == 10
    assert rational_decode(0) == Fraction(0)
    assert rational_decode(10) == Fraction(1)


def test_rational_decode_rejects_non_image():
    # pair(0, pair(2, 4)) has p, q sharing a factor.
    assert rational_decode(pair(0, pair(2, 4))) is None
    # sign component outside {0, 1}
    assert rational_decode(pair(2, pair(1, 3))) is None
    # zero numerator with nonzero denominator
    assert rational_decode(pair(0, pair(0, 3))) is None


def test_rational_injective_on_many():
    rng = random.Random(7)
    values = set()
    codes = set()
    while len(values) < 1000:
        q = Fraction(rng.randint(-400, 400), rng.randint(1, 400))
        if q in values:
            continue
        values.add(q)
        codes.add(rational_encode(q))
    assert len(codes) == 1000
    for q in values:
        assert rational_decode(rational_encode(q)) == q


def test_matrix_pinned_values():
    zero = ElementaryMatrix.zero(1)
    assert matrix_encode(zero) == encode_list([1, 0, 0])
    eye = ElementaryMatrix.from_rows([[1, 0], [0, 1]])
    assert matrix_decode(matrix_encode(eye)) == eye
    assert matrix_decode(0) is None  # empty list, no dimension


def test_matrix_round_trip_random():
    rng = random.Random(11)

    def random_matrix(dim):
        rows = []
        for _ in range(dim):
            row = []
            for _ in range(dim):
                re = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                im = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
                row.append((re, im))
            rows.append(row)
        return ElementaryMatrix.from_rows(rows)

    for dim in (2, 4):
        for _ in range(10):
            m = random_matrix(dim)
            assert matrix_decode(matrix_encode(m)) == m


def test_matrix_decode_rejects_overlong_body():
    assert matrix_decode(encode_list([1, 0, 0, 0, 5])) is None


def test_omega_pinned_values():
    assert omega_to_nat(frozenset()) == 0
    assert omega_to_nat(frozenset({0})) == pair(0, 1)
    assert omega_to_nat(frozenset({0})) == 2


def test_omega_to_int_small_values():
    assert omega_to_int(frozenset()) == 0
    assert omega_to_int(frozenset({0})) == 1
    assert omega_to_int(frozenset({-1})) == -1
    assert omega_to_int(frozenset({-2})) == -2
    assert omega_to_int(frozenset({-1, 0})) == -3


# Negative sites feed the exponent side of the pairing, so eta blows up
# doubly exponentially in their depth; keep them shallow.
sites = st.frozensets(st.integers(-12, 40), max_size=12)


@given(sites)
def test_omega_nat_round_trip(i):
    assert nat_to_omega(omega_to_nat(i)) == i


@given(sites)
def test_omega_int_round_trip(i):
    assert int_to_omega(omega_to_int(i)) == i


def test_omega_maps_are_bijections_on_initial_segment():
    # eta hits every natural below 512 exactly once; nu hits [-256, 255].
    eta_seen = {omega_to_nat(nat_to_omega(n)) for n in range(512)}
    assert eta_seen == set(range(512))
    nu_seen = {omega_to_int(int_to_omega(m)) for m in range(-256, 256)}
    assert nu_seen == set(range(-256, 256))


# zeta re-packs eta values into pairing exponents, so its output size is
# doubly exponential in the support; keep these supports very small.
tiny_sites = st.frozensets(st.integers(-3, 8), max_size=8)


@settings(max_examples=60)
@given(tiny_sites, tiny_sites)
def test_zeta_round_trip(i, j):
    merged = zeta(i, j)
    assert zeta_inverse(merged) == (i, j)


def test_zeta_round_trip_sampled():
    rng = random.Random(21)
    for _ in range(50):
        i = frozenset(rng.sample(range(-3, 9), rng.randint(0, 6)))
        j = frozenset(rng.sample(range(-3, 9), rng.randint(0, 6)))
        assert zeta_inverse(zeta(i, j)) == (i, j)


def test_zeta_empty_cases():
    empty = frozenset()
    one = frozenset({0})
    assert zeta(empty, empty) == empty
    assert zeta_inverse(zeta(empty, one)) == (empty, one)
    assert zeta_inverse(zeta(one, empty)) == (one, empty)


def test_omega_injectivity_bulk():
    rng = random.Random(3)
    elems = set()
    while len(elems) < 1000:
        elems.add(frozenset(rng.sample(range(-12, 50), rng.randint(0, 10))))
    nats = {omega_to_nat(e) for e in elems}
    ints = {omega_to_int(e) for e in elems}
    assert len(nats) == 1000
    assert len(ints) == 1000

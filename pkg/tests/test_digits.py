from math import comb

import pytest
from hypothesis import given, strategies as st

from hsleaps.digits import (BasePDigits, binom_mod_p, cset_max, fermat_system, is_power_of,
                            lowest_digit_index, min_nonzero_binom, s_p, t_p)
from hsleaps.errors import BadExponent, EmptySet


def brute_cset_max(m, e, s, p):
    return max(j for j in range(64) if m * p ** j < e * p ** s)


@pytest.mark.parametrize("n,p,want", [(6, 2, 2), (6, 3, 2), (0, 5, 0)])
def test_digit_sum_examples(n, p, want):
    assert s_p(n, p) == want


@pytest.mark.parametrize("n,p,want", [(6, 2, 1), (6, 3, 2), (24, 5, 4)])
def test_tp_examples(n, p, want):
    assert t_p(n, p) == want


def test_binomial_examples():
    assert binom_mod_p(6, 2, 2).value == 1
    assert binom_mod_p(6, 1, 2).value == 0
    assert all(binom_mod_p(n, 0, p).value == 1 for n in range(30) for p in (2, 3, 5))
    assert binom_mod_p(3, 5, 7).value == 0


@given(st.integers(0, 300), st.integers(0, 300), st.sampled_from([2, 3, 5, 7, 11]))
def test_binomial_matches_integer_binomial(n, m, p):
    assert binom_mod_p(n, m, p).value == comb(n, m) % p


@pytest.mark.parametrize("n,p,want", [(6, 2, 2), (4, 2, 4), (45, 3, 9)])
def test_min_nonzero_binom_examples(n, p, want):
    assert min_nonzero_binom(n, p) == want


def test_cset_examples():
    assert cset_max(5, 2, 3, 2) == 1
    assert cset_max(7, 3, 2, 5) == brute_cset_max(7, 3, 2, 5) == 1
    for p in (2, 3, 5):
        for e in (1, 2, 3, 4):
            for s in (1, 2, 3):
                assert cset_max(e, e, s, p) == s - 1


def test_cset_empty_raises():
    with pytest.raises(EmptySet):
        cset_max(16, 2, 3, 2)
    with pytest.raises(EmptySet):
        cset_max(0, 2, 3, 2)


@given(st.integers(1, 40), st.integers(1, 10), st.integers(1, 4), st.sampled_from([2, 3, 5]))
def test_cset_matches_enumeration(m, e, s, p):
    if m >= e * p ** s:
        return
    assert cset_max(m, e, s, p) == brute_cset_max(m, e, s, p)


def test_fermat_examples():
    assert [a.value for a in fermat_system(2, 3)] == [2, 1, 1]
    assert [a.value for a in fermat_system(3, 5)] == [3, 4, 4]
    with pytest.raises(BadExponent):
        fermat_system(1, 5)
    with pytest.raises(BadExponent):
        fermat_system(5, 5)


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5, 7, 13]))
def test_base_p_digits_round_trip(n, p):
    d = BasePDigits.of(n, p)
    assert d.value == n
    assert all(0 <= x < p for x in d.digits)
    assert sum(d.digits) == s_p(n, p)
    if n:
        assert d.lowest_nonzero_index == lowest_digit_index(n, p)
        assert p ** d.highest_index <= n < p ** (d.highest_index + 1)


@given(st.integers(0, 50), st.sampled_from([2, 3, 5, 7]))
def test_digit_sum_fixed_below_p(n, p):
    assert (s_p(n, p) == n) == (n <= p - 1)


def test_is_power_of():
    assert [n for n in range(1, 70) if is_power_of(n, 2)] == [1, 2, 4, 8, 16, 32, 64]
    assert [n for n in range(1, 90) if is_power_of(n, 3)] == [1, 3, 9, 27, 81]

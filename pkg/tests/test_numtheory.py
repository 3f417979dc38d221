from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weakseq.errors import InvalidModulusError, ScheduleTooLongError, ValidationError
from weakseq.numtheory import (
    OffsetSchedule,
    PrimeSchedule,
    build_offset_schedule,
    build_prime_schedule,
    is_prime,
    mod_residue_power,
    next_prime,
)


def sieve(n):
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(flags[i * i :: i]))
    return flags


def trial_division(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_primality_matches_sieve_to_a_million():
    flags = sieve(10**6)
    bad = [n for n in range(10**6 + 1) if is_prime(n) != bool(flags[n])]
    assert bad == []


@pytest.mark.parametrize(
    "n,expected",
    [
        (2**61 - 1, True),
        (2**64 - 59, True),
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to the first nine prime bases
        (2**64 - 1, False),
    ],
)
def test_primality_hard_cases(n, expected):
    assert is_prime(n) is expected


@given(st.integers(min_value=0, max_value=200_000))
def test_next_prime_oracle(n):
    q = next_prime(n)
    assert q >= n and trial_division(q)
    assert not any(trial_division(k) for k in range(n, q))


@pytest.mark.parametrize("args,expected", [((2, 2, 3), 1), ((4, 2, 5), 1), ((2, 3, 3), 2)])
def test_mod_residue_power_examples(args, expected):
    assert mod_residue_power(*args) == expected


def test_primality_range_guard():
    with pytest.raises(ValueError):
        is_prime(2**64)


def test_mod_residue_power_zero_exponent_and_bad_modulus():
    assert mod_residue_power(123, 0, 7) == 1
    with pytest.raises(InvalidModulusError):
        mod_residue_power(2, 2, 9)


@given(st.integers(min_value=-10**30, max_value=10**30), st.integers(1, 64), st.sampled_from([3, 5, 7, 101, 2**61 - 1]))
def test_mod_residue_power_periodic_and_exact(j, r, p):
    v = mod_residue_power(j, r, p)
    assert 0 <= v < p
    assert v == mod_residue_power(j % p, r, p) == pow(j, r, p)


@pytest.mark.parametrize(
    "args,primes",
    [((5, 6, 2), (5, 11, 23, 47, 97, 197)), ((5, 1, 2), (5,)), ((7, 2, 3), (7, 23))],
)
def test_prime_schedule_examples(args, primes):
    s = build_prime_schedule(*args)
    assert s.primes == primes
    assert s.delta == args[2] - 1 and s.cap == 2 * args[2]


def test_prime_schedule_rejects():
    with pytest.raises(ValueError):
        build_prime_schedule(4, 3)
    with pytest.raises(ValueError):
        build_prime_schedule(3, 3)
    with pytest.raises(ValueError):
        build_prime_schedule(5, 3, 1)
    with pytest.raises(ScheduleTooLongError):
        build_prime_schedule(5, 61)


@given(st.sampled_from([5, 7, 11, 13, 101, 1009]), st.integers(1, 20), st.sampled_from([2, 3, Fraction(5, 2), Fraction(7, 3)]))
def test_prime_schedule_certificates(p0, count, ratio):
    s = build_prime_schedule(p0, count, ratio)
    s.validate()
    for a, b in zip(s.primes, s.primes[1:]):
        assert ratio * a <= b <= 2 * ratio * a


def test_prime_schedule_validation_catches_tampering():
    with pytest.raises(ValidationError):
        PrimeSchedule((5, 9), 1, 4).validate()
    with pytest.raises(ValidationError):
        PrimeSchedule((5, 7), 1, 4).validate()
    with pytest.raises(ValidationError):
        PrimeSchedule((5, 11), 1, 4).validate(m=5)


@pytest.mark.parametrize(
    "primes,m,offsets",
    [
        ((5, 11, 23, 47, 97, 197), 2, (25, 51, 173, 703, 2913, 12323)),
        ((5,), 2, (25,)),
        ((5, 11), 3, (125, 251)),
    ],
)
def test_offset_schedule_examples(primes, m, offsets):
    s = build_offset_schedule(PrimeSchedule(primes, 1, 4), m)
    assert s.offsets == offsets
    assert s.exponent == m


@given(st.sampled_from([5, 7, 11, 13]), st.integers(1, 12), st.integers(2, 4))
def test_offset_schedule_invariants(p0, count, m):
    sched = build_prime_schedule(p0, count, 2)
    off = build_offset_schedule(sched, m)
    off.validate(sched)
    for k, (a, p) in enumerate(zip(off.offsets, sched.primes)):
        assert a <= off.mass_cap * p**m
        if k + 1 < count:
            assert off.offsets[k + 1] > a + p**m
    assert off.mass_cap <= 3


def test_offset_validation_catches_overlap():
    sched = PrimeSchedule((5, 11), 1, 4)
    with pytest.raises(ValidationError):
        OffsetSchedule((25, 50), (2, 2), 3).validate(sched)

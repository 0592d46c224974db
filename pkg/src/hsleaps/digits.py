"""Base-p combinatorics: digit sums, the T_p fixed point, binomials mod p,
the C^p_{m,e,s} sets and the averaging system used by the T_p integrator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import BadExponent, EmptySet
from .zpfield import FpElem, check_prime, inv_mod, primitive_root_int


@dataclass(frozen=True)
class BasePDigits:
    """Base-p expansion ``n = sum(digits[i] * p**i)``, least significant first."""

    p: int
    digits: tuple

    @classmethod
    def of(cls, n: int, p: int) -> "BasePDigits":
        if n < 0:
            raise ValueError("n must be nonnegative")
        ds = []
        while n:
            n, r = divmod(n, p)
            ds.append(r)
        return cls(p, tuple(ds))

    @property
    def value(self) -> int:
        return sum(d * self.p ** i for i, d in enumerate(self.digits))

    @property
    def lowest_nonzero_index(self) -> int:
        for i, d in enumerate(self.digits):
            if d:
                return i
        raise ValueError("0 has no nonzero digit")

    @property
    def highest_index(self) -> int:
        if not self.digits:
            raise ValueError("0 has no nonzero digit")
        return len(self.digits) - 1


def s_p(n: int, p: int) -> int:
    """Digit sum of ``n`` in base ``p``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    total = 0
    while n:
        n, r = divmod(n, p)
        total += r
    return total


def t_p(n: int, p: int) -> int:
    """Fixed point of iterated base-p digit sums; lies in [1, p-1] for n >= 1."""
    if n < 1:
        raise ValueError("t_p needs n >= 1")
    cur = n
    while True:
        nxt = s_p(cur, p)
        if nxt == cur:
            return cur
        cur = nxt


def lowest_digit_index(n: int, p: int) -> int:
    return BasePDigits.of(n, p).lowest_nonzero_index


def is_power_of(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


@lru_cache(maxsize=4096)
def _small_binom(n: int, m: int, p: int) -> int:
    # n, m < p
    if m < 0 or m > n:
        return 0
    num = den = 1
    for i in range(m):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * inv_mod(den, p) % p


def binom_int(n: int, m: int, p: int) -> int:
    """C(n, m) mod p as an int, by Lucas' theorem."""
    if m < 0 or n < 0 or m > n:
        return 0
    out = 1
    while n or m:
        n, a = divmod(n, p)
        m, b = divmod(m, p)
        if b > a:
            return 0
        out = out * _small_binom(a, b, p) % p
    return out


def binom_mod_p(n: int, m: int, p: int) -> FpElem:
    check_prime(p)
    return FpElem(binom_int(n, m, p), p)


def min_nonzero_binom(n: int, p: int) -> int:
    """Smallest m >= 1 with C(n, m) nonzero mod p, namely p**t for the lowest
    nonzero base-p digit position t of n."""
    if n < 1:
        raise ValueError("n must be positive")
    return p ** lowest_digit_index(n, p)


def cset_max(m: int, e: int, s: int, p: int) -> int:
    """max {j >= 0 : m * p**j < e * p**s}, by direct enumeration.

    The set is nonempty exactly when ``m < e * p**s``; it is finite when
    ``m >= 1``.
    """
    if p < 2 or s < 0:
        raise EmptySet(f"need p >= 2 and s >= 0 (got p={p}, s={s})")
    bound = e * p ** s
    if m < 1 or m >= bound:
        raise EmptySet(f"no largest j with {m}*{p}^j < {e}*{p}^{s}")
    j = 0
    while m * p ** (j + 1) < bound:
        j += 1
    return j


def fermat_system_int(m: int, p: int) -> list[int]:
    if not 1 < m < p:
        raise BadExponent(f"need 1 < m < p, got m={m}, p={p}")
    g = primitive_root_int(p)
    h = pow(g, m, p)
    raw = [g] + [1] * (p - h)
    scale = inv_mod(g - h, p)
    return [a * scale % p for a in raw]


def fermat_system(m: int, p: int) -> list[FpElem]:
    """Units a_i with sum(a_i) = 1 and sum(a_i**m) = 0 in F_p.

    Built from the smallest primitive root g: with h = g**m, the list
    (g, 1, ..., 1) with p - h ones, each entry divided by g - h.
    """
    check_prime(p)
    return [FpElem(a, p) for a in fermat_system_int(m, p)]

"""Exact arithmetic in F_p and dense linear algebra over it.

The public value types are :class:`FpElem` and :class:`FpMatrix`.  The rest
of the package works with plain ``int`` residues for speed and calls the
``*_mod`` helpers directly; the typed API wraps the same code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import NonPrimeModulus, ZeroInverse

MAX_PRIME = 1 << 16


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p) or p >= MAX_PRIME:
        raise NonPrimeModulus(f"modulus {p!r} is not a prime below 2^16")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FpElem:
    value: int
    modulus: int

    def __post_init__(self):
        check_prime(self.modulus)
        object.__setattr__(self, "value", self.value % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FpElem(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.modulus)

    def __pow__(self, k: int):
        if k < 0:
            return inv(self) ** (-k)
        return FpElem(pow(self.value, k, self.modulus), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * inv(FpElem(o, self.modulus))

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} mod {self.modulus}"


def inv(a: FpElem) -> FpElem:
    """Multiplicative inverse; raises :class:`ZeroInverse` for 0."""
    return FpElem(inv_mod(a.value, a.modulus), a.modulus)


def _order_mod(g: int, p: int) -> int:
    k, x = 1, g % p
    while x != 1:
        x = x * g % p
        k += 1
    return k


@lru_cache(maxsize=None)
def primitive_root_int(p: int) -> int:
    check_prime(p)
    if p == 2:
        # F_2^* is trivial; 1 generates it.
        return 1
    for g in range(2, p):
        if _order_mod(g, p) == p - 1:
            return g
    raise AssertionError("unreachable for prime p")


def primitive_root(p: int) -> FpElem:
    """Smallest generator of F_p^*. Returns 1 for p = 2 by convention."""
    return FpElem(primitive_root_int(p), p)


@dataclass(frozen=True)
class FpMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows*cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int) -> "FpMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        flat = tuple(FpElem(int(v), p) for r in rows for v in r)
        return cls(nrows, ncols, flat)

    @property
    def modulus(self) -> Optional[int]:
        return self.entries[0].modulus if self.entries else None

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def int_rows(self) -> list[list[int]]:
        return [[e.value for e in self.row(i)] for i in range(self.rows)]

    def mul_vec(self, x: Sequence[FpElem]) -> list[FpElem]:
        p = self.modulus
        out = []
        for i in range(self.rows):
            s = sum(e.value * int(v) for e, v in zip(self.row(i), x))
            out.append(FpElem(s, p))
        return out


def solve_mod(rows: list[list[int]], rhs: list[int], ncols: int, p: int):
    """Solve ``rows @ x = rhs`` over F_p.

    Returns ``(particular, kernel)`` where ``particular`` is ``None`` when the
    system is inconsistent.  Free variables are set to 0 in the particular
    solution; the kernel basis is in reduced echelon form (one vector per free
    column, in increasing column order).  Pivoting: leftmost column first,
    smallest row index among candidates.
    """
    m = [[v % p for v in r] + [b % p] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        f = pow(row[c], p - 2, p)
        if f != 1:
            for k in range(c, ncols + 1):
                row[k] = row[k] * f % p
        for i in range(nrows):
            if i != r:
                a = m[i][c]
                if a:
                    other = m[i]
                    for k in range(c, ncols + 1):
                        if row[k]:
                            other[k] = (other[k] - a * row[k]) % p
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if m[i][ncols]:
            particular = None
            break
    else:
        particular = [0] * ncols
        for i, c in enumerate(pivots):
            particular[c] = m[i][ncols]
    pivset = set(pivots)
    kernel = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for i, c in enumerate(pivots):
            if m[i][f]:
                v[c] = (-m[i][f]) % p
        kernel.append(v)
    return particular, kernel


def solve_affine(M: FpMatrix, b: Sequence[FpElem]):
    """Typed wrapper around :func:`solve_mod`.

    >>> M = FpMatrix.from_rows([[1, 1], [0, 0]], 2)
    >>> x, ker = solve_affine(M, [FpElem(1, 2), FpElem(0, 2)])
    >>> [e.value for e in x], [[e.value for e in v] for v in ker]
    ([1, 0], [[1, 1]])
    """
    if len(b) != M.rows:
        raise ValueError("right-hand side length must equal the row count")
    p = M.modulus if M.entries else (b[0].modulus if b else None)
    if p is None:
        return [], []
    x, ker = solve_mod(M.int_rows(), [int(v) for v in b], M.cols, p)
    wrap = lambda vec: [FpElem(v, p) for v in vec]
    return (wrap(x) if x is not None else None), [wrap(v) for v in ker]


def rank_mod(rows: list[list[int]], ncols: int, p: int) -> int:
    _, ker = solve_mod(rows, [0] * len(rows), ncols, p)
    return ncols - len(ker)


def echelon_basis(vectors: list[list[int]], p: int) -> list[list[int]]:
    """Reduced row echelon basis of the span of ``vectors``."""
    if not vectors:
        return []
    n = len(vectors[0])
    m = [[v % p for v in vec] for vec in vectors]
    r = 0
    for c in range(n):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        f = pow(m[r][c], p - 2, p)
        m[r] = [x * f % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                a = m[i][c]
                m[i] = [(x - a * y) % p for x, y in zip(m[i], m[r])]
        r += 1
    return [row for row in m[:r]]

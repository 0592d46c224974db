"""Hasse-Schmidt derivations of a polynomial ring F_p[x_1..x_k].

A derivation of length m is stored through the images of the variables
under the algebra map x -> sum_n D_n(x) mu^n, truncated at mu^(m+1).  Each
component D_n is evaluated on demand from these images, so the Leibniz
rule holds by construction and two derivations are equal exactly when
their variable images agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import (BadE, BadLength, IndexBeyondLength, NotMultipleSupported,
                     ParseError, ShapeMismatch)
from .poly import IdealPresentation, Poly, mul_terms
from .zpfield import FpElem, check_prime

INF = math.inf


def _series_mul(a, b, upto, p):
    """Truncated product of two series given as lists of term dicts."""
    out = [dict() for _ in range(upto + 1)]
    for i, ai in enumerate(a[:upto + 1]):
        if not ai:
            continue
        for j in range(min(len(b), upto + 1 - i)):
            bj = b[j]
            if not bj:
                continue
            acc = out[i + j]
            for m, c in mul_terms(ai, bj, p).items():
                acc[m] = acc.get(m, 0) + c
    return [{m: c % p for m, c in d.items() if c % p} for d in out]


@dataclass(frozen=True)
class TruncSeries:
    """A truncated power series sum_n coeffs[n] mu^n modulo mu^(length+1)."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not self.coeffs:
            raise BadLength("a series needs at least the constant coefficient")

    @property
    def length(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def _check(self, other):
        if other.length != self.length:
            raise ShapeMismatch("series of different lengths")

    def __add__(self, other):
        self._check(other)
        return TruncSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._check(other)
        return TruncSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other):
        if isinstance(other, (int, FpElem, Poly)):
            return TruncSeries(tuple(c * other for c in self.coeffs))
        self._check(other)
        f = self.coeffs[0]
        prod = _series_mul([c.terms for c in self.coeffs], [c.terms for c in other.coeffs],
                           self.length, f.p)
        return TruncSeries(tuple(Poly(f.p, f.nvars, t, _clean=True) for t in prod))

    __rmul__ = __mul__

    def order(self):
        """Smallest index with a nonzero coefficient; infinity for 0."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return INF


class HSDeriv:
    """A Hasse-Schmidt derivation of F_p[x_1..x_k] of finite length.

    ``images[i][n]`` is D_n(x_i); ``images[i][0]`` is always x_i.
    """

    __slots__ = ("p", "nvars", "length", "images", "_cache")

    def __init__(self, p: int, nvars: int, length: int, images):
        if length < 0:
            raise BadLength("length must be nonnegative")
        self.p = p
        self.nvars = nvars
        self.length = length
        imgs = []
        for i in range(nvars):
            row = list(images[i]) if i < len(images) else []
            row = row[:length + 1]
            row += [Poly.zero(p, nvars)] * (length + 1 - len(row))
            row[0] = Poly.var(i, p, nvars)
            for c in row:
                if c.p != p or c.nvars != nvars:
                    raise ShapeMismatch("image coefficient lives in another ring")
            imgs.append(tuple(row))
        self.images = tuple(imgs)
        self._cache = None

    # construction --------------------------------------------------------
    @classmethod
    def identity(cls, p, nvars, length):
        return cls(p, nvars, length, [[] for _ in range(nvars)])

    @classmethod
    def from_components(cls, p, nvars, comps: Mapping[int, Sequence[Poly]], length):
        """Build from ``{n: (D_n(x_1), ..., D_n(x_k))}``."""
        rows = [[Poly.zero(p, nvars)] * (length + 1) for _ in range(nvars)]
        for n, vals in comps.items():
            if not 1 <= n <= length:
                raise IndexBeyondLength(f"component {n} outside 1..{length}")
            for i, v in enumerate(vals):
                rows[i][n] = v
        return cls(p, nvars, length, rows)

    def series(self, i: int) -> TruncSeries:
        return TruncSeries(self.images[i])

    def component(self, n: int) -> tuple:
        """Variable images of D_n."""
        return tuple(row[n] for row in self.images)

    def component_is_zero(self, n: int) -> bool:
        return all(not row[n] for row in self.images)

    def __eq__(self, other):
        if not isinstance(other, HSDeriv):
            return NotImplemented
        return (self.p, self.nvars, self.length, self.images) == (
            other.p, other.nvars, other.length, other.images)

    def __hash__(self):
        return hash((self.p, self.nvars, self.length, self.images))

    def __repr__(self):
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"HSDeriv(p={self.p}, length={self.length}, images={[[c.to_str(names) for c in r] for r in self.images]})"

    def is_identity(self) -> bool:
        return all(self.component_is_zero(n) for n in range(1, self.length + 1))

    # evaluation ----------------------------------------------------------
    def _mono_series(self, exp):
        """Series of the monomial x^exp under the algebra map, full length."""
        cache = self._cache
        if cache is None:
            cache = self._cache = {(0,) * self.nvars: [{(0,) * self.nvars: 1}] + [{}] * self.length}
        s = cache.get(exp)
        if s is not None:
            return s
        k = max(range(self.nvars), key=lambda i: exp[i])
        prev = list(exp)
        prev[k] -= 1
        base = self._mono_series(tuple(prev))
        img = [c.terms for c in self.images[k]]
        s = _series_mul(base, img, self.length, self.p)
        if len(cache) > 50000:
            cache.clear()
        cache[exp] = s
        return s

    def series_terms(self, f: Poly, upto: Optional[int] = None):
        """Coefficients (as term dicts) of f(phi(x)) up to mu^upto."""
        upto = self.length if upto is None else upto
        p = self.p
        out = [dict() for _ in range(upto + 1)]
        for exp, c in f.terms.items():
            s = self._mono_series(exp)
            for n in range(upto + 1):
                acc = out[n]
                for m, v in s[n].items():
                    acc[m] = acc.get(m, 0) + c * v
        return [{m: v % p for m, v in d.items() if v % p} for d in out]

    def eval_series(self, f: Poly, upto: Optional[int] = None) -> TruncSeries:
        return TruncSeries(tuple(Poly(self.p, self.nvars, t, _clean=True)
                                 for t in self.series_terms(f, upto)))


def apply(D: HSDeriv, n: int, f: Poly) -> Poly:
    """D_n(f): the mu^n coefficient of f(phi_D(x))."""
    if n < 0 or n > D.length:
        raise IndexBeyondLength(f"component {n} beyond length {D.length}")
    if f.p != D.p or f.nvars != D.nvars:
        raise ShapeMismatch("polynomial and derivation live in different rings")
    if n == 0:
        return f
    return Poly(D.p, D.nvars, D.series_terms(f, n)[n], _clean=True)


def _same_shape(D, E):
    if (D.p, D.nvars, D.length) != (E.p, E.nvars, E.length):
        raise ShapeMismatch(
            f"shapes differ: (p={D.p}, k={D.nvars}, m={D.length}) vs (p={E.p}, k={E.nvars}, m={E.length})")


def compose(D: HSDeriv, E: HSDeriv) -> HSDeriv:
    """D o E, with (D o E)_n = sum_{i+j=n} D_i o E_j."""
    _same_shape(D, E)
    m, p = D.length, D.p
    rows = []
    for i in range(D.nvars):
        acc = [dict() for _ in range(m + 1)]
        for j, g in enumerate(E.images[i]):
            if not g:
                continue
            s = D.series_terms(g, m - j)
            for t, d in enumerate(s):
                tgt = acc[j + t]
                for mono, c in d.items():
                    tgt[mono] = (tgt.get(mono, 0) + c) % p
        rows.append([Poly(p, D.nvars, {k: v for k, v in d.items() if v}, _clean=True)
                     for d in acc])
    return HSDeriv(p, D.nvars, m, rows)


def compose_all(ds: Sequence[HSDeriv]) -> HSDeriv:
    if not ds:
        raise ValueError("nothing to compose")
    out = ds[0]
    for d in ds[1:]:
        out = compose(out, d)
    return out


def inverse(D: HSDeriv) -> HSDeriv:
    """The inverse D*, via D*_n(x) = -sum_{i=1..n} D_i(D*_{n-i}(x))."""
    m, p = D.length, D.p
    rows = []
    for i in range(D.nvars):
        # contributions[n] accumulates sum_{k<n} D_{n-k}(c_k)
        contrib = [dict() for _ in range(m + 1)]
        coeffs = [Poly.var(i, p, D.nvars)]
        for n in range(1, m + 1):
            k = n - 1
            s = D.series_terms(coeffs[k], m - k)
            for t in range(1, len(s)):
                tgt = contrib[k + t]
                for mono, c in s[t].items():
                    tgt[mono] = (tgt.get(mono, 0) + c) % p
            coeffs.append(Poly(p, D.nvars, {mo: (-c) % p for mo, c in contrib[n].items() if c},
                               _clean=True))
        rows.append(coeffs)
    return HSDeriv(p, D.nvars, m, rows)


def scale(a, D: HSDeriv) -> HSDeriv:
    """a . D, with component n multiplied by a^n.  ``a`` may be a polynomial."""
    if isinstance(a, FpElem):
        a = a.value
    if isinstance(a, int):
        a = Poly.const(a, D.p, D.nvars)
    powers = [Poly.one(D.p, D.nvars)]
    for _ in range(D.length):
        powers.append(powers[-1] * a)
    return HSDeriv(D.p, D.nvars, D.length,
                   [[c * powers[n] for n, c in enumerate(row)] for row in D.images])


def truncate(D: HSDeriv, n: int) -> HSDeriv:
    if not 0 <= n <= D.length:
        raise BadLength(f"cannot truncate length {D.length} to {n}")
    return HSDeriv(D.p, D.nvars, n, [row[:n + 1] for row in D.images])


def stretch(D: HSDeriv, n: int) -> HSDeriv:
    """D[n]: component i is D_{i/n} when n divides i, else 0 (mu -> mu^n)."""
    if n < 1:
        raise ValueError("stretch factor must be positive")
    zero = Poly.zero(D.p, D.nvars)
    rows = []
    for row in D.images:
        new = [zero] * (D.length * n + 1)
        for j, c in enumerate(row):
            new[j * n] = c
        rows.append(new)
    return HSDeriv(D.p, D.nvars, D.length * n, rows)


def ell(D: HSDeriv):
    """Smallest h >= 1 with D_h nonzero; infinity for the identity."""
    for h in range(1, D.length + 1):
        if not D.component_is_zero(h):
            return h
    return INF


def ell_e(D: HSDeriv, e: int) -> int:
    """Smallest h with D_{he+a} nonzero for some a in 1..e-1; ceil(m/e) if none."""
    if not 1 < e <= D.length:
        raise BadE(f"need 1 < e <= {D.length}, got e={e}")
    for n in range(1, D.length + 1):
        if n % e and not D.component_is_zero(n):
            return n // e
    return -(-D.length // e)


def is_logarithmic(D: HSDeriv, I: IdealPresentation, upto: Optional[int] = None) -> bool:
    """True when D_i maps every generator of I into I for all i <= upto."""
    upto = D.length if upto is None else upto
    if upto > D.length:
        raise IndexBeyondLength(f"upto {upto} beyond length {D.length}")
    for g in I.generators:
        s = D.series_terms(g, upto)
        for n in range(1, upto + 1):
            if s[n] and not I.in_ideal(Poly(D.p, D.nvars, s[n], _clean=True)):
                return False
    return True


def log_order(D: HSDeriv, I: IdealPresentation):
    """Largest r such that D is r-logarithmic (the full length if it is)."""
    s = [D.series_terms(g) for g in I.generators]
    for n in range(1, D.length + 1):
        for sg in s:
            if sg[n] and not I.in_ideal(Poly(D.p, D.nvars, sg[n], _clean=True)):
                return n - 1
    return D.length


def pad_extend(D: HSDeriv, M: int, deltas: Optional[Mapping[int, Sequence[Poly]]] = None,
               m: Optional[int] = None) -> HSDeriv:
    """Extend D to length M.

    Without ``deltas`` the new components are zero.  With ``deltas`` (keyed
    by alpha in 1..m-1, each a tuple of variable images of a derivation) the
    input must have length m*n with every non-multiple of m vanishing, and
    delta_alpha is placed at position m*n + alpha.
    """
    if M < D.length:
        raise BadLength(f"target length {M} below current length {D.length}")
    zero = Poly.zero(D.p, D.nvars)
    rows = [list(row) + [zero] * (M - D.length) for row in D.images]
    if deltas:
        if m is None or m < 2 or D.length % m or not all(
                D.component_is_zero(j) for j in range(1, D.length + 1) if j % m):
            raise ShapeMismatch("deltas need a length m*n input supported on multiples of m")
        base = D.length
        for a, vals in deltas.items():
            if not 1 <= a < m:
                raise ShapeMismatch(f"delta position {a} outside 1..{m - 1}")
            if base + a > M:
                raise ShapeMismatch(f"target length {M} too short for delta {a}")
            for i, v in enumerate(vals):
                rows[i][base + a] = v
    return HSDeriv(D.p, D.nvars, M, rows)


def compress(D: HSDeriv, m: int) -> HSDeriv:
    """Keep every m-th component: D'_a = D_{m a}.  Requires the others to vanish."""
    if m < 1:
        raise ValueError("m must be positive")
    for j in range(1, D.length + 1):
        if j % m and not D.component_is_zero(j):
            raise NotMultipleSupported(f"component {j} is nonzero and not a multiple of {m}")
    n = D.length // m
    return HSDeriv(D.p, D.nvars, n, [[row[m * a] for a in range(n + 1)] for row in D.images])


def e_dm(D: HSDeriv, m: int) -> HSDeriv:
    """The length (n+1)m-1 derivation E with E_m = -D_1, supported on multiples of m."""
    if m < 2:
        raise ValueError("m must exceed 1")
    return pad_extend(stretch(scale(-1, D), m), (D.length + 1) * m - 1)


# ---------------------------------------------------------------------------
# text format

def to_text(D: HSDeriv, names: Sequence[str]) -> str:
    lines = [f"prime {D.p}", "vars " + " ".join(names), f"length {D.length}"]
    for name, row in zip(names, D.images):
        for n in range(1, D.length + 1):
            if row[n]:
                lines.append(f"map {name} {n} {row[n].to_str(names)}")
    return "\n".join(lines) + "\n"


def from_text(text: str):
    """Parse the line format; returns ``(HSDeriv, names)``."""
    p = names = length = None
    maps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        col = raw.index(head) + 1
        if head == "prime":
            try:
                p = check_prime(int(rest))
            except ValueError as exc:
                raise ParseError(f"bad prime: {exc}", lineno, col) from None
        elif head == "vars":
            names = rest.split()
            if not names or len(set(names)) != len(names):
                raise ParseError("vars needs distinct names", lineno, col)
        elif head == "length":
            if not rest.strip().isdigit():
                raise ParseError("length must be a nonnegative integer", lineno, col)
            length = int(rest)
        elif head == "map":
            parts = rest.split(None, 2)
            if len(parts) < 3:
                raise ParseError("expected 'map <var> <n> <poly>'", lineno, col)
            maps.append((lineno, raw, parts))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno, col)
    if p is None or names is None or length is None:
        raise ParseError("missing prime, vars or length header", 1, 1)
    rows = [[Poly.zero(p, len(names))] * (length + 1) for _ in names]
    for lineno, raw, (var, n, poly) in maps:
        if var not in names:
            raise ParseError(f"undeclared variable {var!r}", lineno, raw.index(var) + 1)
        if not n.isdigit() or not 1 <= int(n) <= length:
            raise ParseError(f"index {n} outside 1..{length}", lineno, 1)
        offset = raw.index(poly)
        try:
            f = Poly.parse(poly, names, p, line=lineno)
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[1], lineno, exc.column + offset) from None
        rows[names.index(var)][int(n)] = f
    return HSDeriv(p, len(names), length, rows), names

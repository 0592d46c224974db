"""Two-variable Hasse-Schmidt derivations indexed by a weighted co-ideal, and
the constructions that turn a univariate derivation D into the bivariate
families used to correct the top component of a nearly logarithmic D:
the binomial split ``bstar``, the external square and its inverse, their
product ``gd``, and its weighted restriction to one variable ``gd_pt``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .digits import binom_int, is_power_of, lowest_digit_index
from .errors import BadN, InsufficientSupport, OutsideCoideal, ShapeMismatch, SourceTooShort
from .hsd import HSDeriv, inverse, pad_extend, truncate
from .poly import Poly, mul_terms


@dataclass(frozen=True)
class CoIdeal2:
    """{(i, j) : w1*i + w2*j <= bound}."""

    w1: int
    w2: int
    bound: int

    def __post_init__(self):
        if self.w1 < 1 or self.w2 < 1 or self.bound < 0:
            raise ValueError("weights must be positive and the bound nonnegative")

    @classmethod
    def total_degree(cls, n: int) -> "CoIdeal2":
        return cls(1, 1, n)

    def __contains__(self, a) -> bool:
        i, j = a
        return i >= 0 and j >= 0 and self.w1 * i + self.w2 * j <= self.bound

    def elements(self) -> list:
        """Members sorted by total degree, then lexicographically."""
        out = [(i, j) for i in range(self.bound // self.w1 + 1)
               for j in range((self.bound - self.w1 * i) // self.w2 + 1)]
        out.sort(key=lambda a: (a[0] + a[1], a))
        return out

    def max_total(self) -> int:
        return max(i + j for i, j in self.elements())

    def max_i(self) -> int:
        return self.bound // self.w1

    def max_j(self) -> int:
        return self.bound // self.w2


def _bi_mul(a: dict, b: dict, delta: CoIdeal2, p: int) -> dict:
    out: dict = {}
    for (i1, j1), ta in a.items():
        for (i2, j2), tb in b.items():
            k = (i1 + i2, j1 + j2)
            if k not in delta:
                continue
            acc = out.setdefault(k, {})
            for m, c in mul_terms(ta, tb, p).items():
                acc[m] = acc.get(m, 0) + c
    res = {}
    for k, d in out.items():
        d = {m: c % p for m, c in d.items() if c % p}
        if d:
            res[k] = d
    return res


class BiHSDeriv:
    """Bivariate HS derivation; ``images[v]`` maps (i, j) in the co-ideal to D_(i,j)(x_v).

    Missing keys are zero; the (0, 0) entry is the variable itself.
    """

    __slots__ = ("p", "nvars", "coideal", "images", "_cache")

    def __init__(self, p: int, nvars: int, coideal: CoIdeal2, images):
        self.p = p
        self.nvars = nvars
        self.coideal = coideal
        rows = []
        for v in range(nvars):
            src = images[v] if v < len(images) else {}
            row = {}
            for a, f in src.items():
                a = tuple(a)
                if a not in coideal:
                    raise OutsideCoideal(f"index {a} outside the co-ideal")
                if f.p != p or f.nvars != nvars:
                    raise ShapeMismatch("image coefficient lives in another ring")
                if f:
                    row[a] = f
            row[(0, 0)] = Poly.var(v, p, nvars)
            rows.append(row)
        self.images = tuple(rows)
        self._cache = None

    @classmethod
    def identity(cls, p, nvars, coideal):
        return cls(p, nvars, coideal, [{} for _ in range(nvars)])

    def component(self, a) -> tuple:
        a = tuple(a)
        if a not in self.coideal:
            raise OutsideCoideal(f"index {a} outside the co-ideal")
        zero = Poly.zero(self.p, self.nvars)
        return tuple(row.get(a, zero) for row in self.images)

    def __eq__(self, other):
        if not isinstance(other, BiHSDeriv):
            return NotImplemented
        return (self.p, self.nvars, self.coideal, self.images) == (
            other.p, other.nvars, other.coideal, other.images)

    def is_identity(self) -> bool:
        return all(set(row) == {(0, 0)} for row in self.images)

    def _mono_series(self, exp):
        cache = self._cache
        if cache is None:
            cache = self._cache = {(0,) * self.nvars: {(0, 0): {(0,) * self.nvars: 1}}}
        s = cache.get(exp)
        if s is not None:
            return s
        k = max(range(self.nvars), key=lambda i: exp[i])
        prev = list(exp)
        prev[k] -= 1
        base = self._mono_series(tuple(prev))
        img = {a: f.terms for a, f in self.images[k].items()}
        s = _bi_mul(base, img, self.coideal, self.p)
        cache[exp] = s
        return s

    def series_terms(self, f: Poly, delta: CoIdeal2 | None = None) -> dict:
        """f evaluated at the images, as {(i, j): term dict}, restricted to ``delta``."""
        p = self.p
        out: dict = {}
        for exp, c in f.terms.items():
            for a, d in self._mono_series(exp).items():
                if delta is not None and a not in delta:
                    continue
                acc = out.setdefault(a, {})
                for m, v in d.items():
                    acc[m] = acc.get(m, 0) + c * v
        res = {}
        for a, d in out.items():
            d = {m: v % p for m, v in d.items() if v % p}
            if d:
                res[a] = d
        return res


def bi_apply(D: BiHSDeriv, a, f: Poly) -> Poly:
    a = tuple(a)
    if a not in D.coideal:
        raise OutsideCoideal(f"index {a} outside the co-ideal")
    if a == (0, 0):
        return f
    return Poly(D.p, D.nvars, D.series_terms(f).get(a, {}), _clean=True)


def _check_same(D: BiHSDeriv, E: BiHSDeriv):
    if (D.p, D.nvars, D.coideal) != (E.p, E.nvars, E.coideal):
        raise ShapeMismatch("bivariate derivations on different rings or co-ideals")


def _shift_add(acc: dict, series: dict, shift, delta, p):
    si, sj = shift
    for (i, j), d in series.items():
        k = (i + si, j + sj)
        if k not in delta:
            continue
        tgt = acc.setdefault(k, {})
        for m, c in d.items():
            tgt[m] = (tgt.get(m, 0) + c) % p


def _rows_from_acc(accs, p, nvars):
    return [{a: Poly(p, nvars, {m: c for m, c in d.items() if c}, _clean=True)
             for a, d in acc.items()} for acc in accs]


def bi_compose(D: BiHSDeriv, E: BiHSDeriv) -> BiHSDeriv:
    """(D o E)_a = sum_{b+c=a} D_b o E_c."""
    _check_same(D, E)
    delta, p = D.coideal, D.p
    accs = []
    for v in range(D.nvars):
        acc: dict = {}
        for c, g in E.images[v].items():
            _shift_add(acc, D.series_terms(g), c, delta, p)
        accs.append(acc)
    return BiHSDeriv(p, D.nvars, delta, _rows_from_acc(accs, p, D.nvars))


def bi_inverse(D: BiHSDeriv) -> BiHSDeriv:
    """Two-sided inverse, solved over the co-ideal in order of total degree then lex."""
    delta, p, k = D.coideal, D.p, D.nvars
    order = delta.elements()
    rows = []
    for v in range(k):
        contrib: dict = {}
        coeffs = {}
        for a in order:
            if a == (0, 0):
                c = Poly.var(v, p, k)
            else:
                c = Poly(p, k, {m: (-x) % p for m, x in contrib.get(a, {}).items() if x},
                         _clean=True)
            coeffs[a] = c
            if c:
                s = D.series_terms(c)
                s.pop((0, 0), None)
                _shift_add(contrib, s, a, delta, p)
        rows.append(coeffs)
    return BiHSDeriv(p, k, delta, rows)


def _need_length(D: HSDeriv, n: int):
    if D.length < n:
        raise SourceTooShort(f"derivation of length {D.length} does not reach order {n}")


def bstar(D: HSDeriv, delta: CoIdeal2) -> BiHSDeriv:
    """B^D: substitute mu -> mu1 + mu2, so B_(i,j) = C(i+j, i) D_{i+j}."""
    _need_length(D, delta.max_total())
    p = D.p
    rows = []
    for row in D.images:
        rows.append({(i, j): row[i + j].scale(binom_int(i + j, i, p))
                     for i, j in delta.elements() if (i, j) != (0, 0)})
    return BiHSDeriv(p, D.nvars, delta, rows)


def _nested(outer: HSDeriv, inner: HSDeriv, delta: CoIdeal2, swap: bool) -> BiHSDeriv:
    """Images a -> outer_a(inner_b(x)) at (a, b), or at (b, a) when ``swap``."""
    p, k = outer.p, outer.nvars
    rows = []
    for v in range(k):
        row = {}
        for b, g in enumerate(inner.images[v]):
            if not g:
                continue
            s = outer.series_terms(g)
            for a, d in enumerate(s):
                idx = (b, a) if swap else (a, b)
                if d and idx in delta:
                    row[idx] = Poly(p, k, d, _clean=True)
        rows.append(row)
    return BiHSDeriv(p, k, delta, rows)


def external_product(D: HSDeriv, E: HSDeriv, delta: CoIdeal2) -> BiHSDeriv:
    """D x E with components (D x E)_(i,j) = D_i o E_j."""
    if (D.p, D.nvars) != (E.p, E.nvars):
        raise ShapeMismatch("factors live in different rings")
    _need_length(D, delta.max_i())
    _need_length(E, delta.max_j())
    return _nested(truncate(D, delta.max_i()), truncate(E, delta.max_j()), delta, False)


def fstar_inv(D: HSDeriv, delta: CoIdeal2) -> BiHSDeriv:
    """Inverse of F^D = D x D, with components D*_j o D*_i."""
    n = max(delta.max_i(), delta.max_j())
    _need_length(D, n)
    Dstar = inverse(truncate(D, n))
    return _nested(truncate(Dstar, delta.max_j()), truncate(Dstar, delta.max_i()), delta, True)


def gd(D: HSDeriv, delta: CoIdeal2) -> BiHSDeriv:
    """G^D = B^D o (F^D)*."""
    return bi_compose(bstar(D, delta), fstar_inv(D, delta))


def substitute(weights, D: BiHSDeriv, M: int) -> HSDeriv:
    """Push D along mu1 -> mu^d1, mu2 -> mu^d2, truncated at length M."""
    d1, d2 = weights
    if d1 < 1 or d2 < 1:
        raise ValueError("substitution exponents must be positive")
    for i in range(M // d1 + 1):
        for j in range((M - d1 * i) // d2 + 1):
            if (i, j) not in D.coideal:
                raise InsufficientSupport(f"index {(i, j)} needed for order {M} is missing")
    p, k = D.p, D.nvars
    rows = []
    for row in D.images:
        acc = [dict() for _ in range(M + 1)]
        for (i, j), f in row.items():
            a = d1 * i + d2 * j
            if a <= M:
                tgt = acc[a]
                for m, c in f.terms.items():
                    tgt[m] = (tgt.get(m, 0) + c) % p
        rows.append([Poly(p, k, {m: c for m, c in d.items() if c}, _clean=True) for d in acc])
    return HSDeriv(p, k, M, rows)


def gd_pt_support(n: int, p: int):
    """(t, co-ideal) used by gd_pt; raises BadN for unsuitable n."""
    if n < 1 or n % p or is_power_of(n, p):
        raise BadN(f"n={n} must be a multiple of {p} that is not a power of {p}")
    t = lowest_digit_index(n, p)
    q = p ** t
    return t, CoIdeal2(q + 1, q, (n + 1) * q)


def gd_pt(D: HSDeriv, n: int, p: int) -> HSDeriv:
    """Collapse gd(D) along the weights (p^t + 1, p^t) into one variable.

    The result has length (n+1)p^t and component a is the sum of the
    bivariate components (i, j) with (p^t+1)i + p^t j = a.

    Only D_1..D_n enter; D is truncated or zero-padded to length n first.
    """
    if p != D.p:
        raise ShapeMismatch("prime does not match the derivation")
    t, delta = gd_pt_support(n, p)
    base = truncate(D, n) if D.length >= n else D
    base = pad_extend(base, n + 1)
    G = gd(base, delta)
    return substitute((delta.w1, delta.w2), G, delta.bound)

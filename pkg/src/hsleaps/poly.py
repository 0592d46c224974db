"""Sparse multivariate polynomials over F_p, weighted gradings and Gröbner
normal forms.

Monomials are exponent tuples.  Coefficients are stored as ints in
``[1, p)``; zero coefficients are never stored.  The monomial order is
graded reverse lexicographic throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .digits import binom_int
from .errors import BudgetExceeded, ParseError
from .zpfield import FpElem, check_prime, inv_mod


def grevlex_key(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _add_into(acc: dict, terms: dict, p: int, scale: int = 1):
    for m, c in terms.items():
        v = (acc.get(m, 0) + scale * c) % p
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def mul_terms(a: dict, b: dict, p: int) -> dict:
    if not a or not b:
        return {}
    if len(a) < len(b):
        a, b = b, a
    out: dict = {}
    get = out.get
    for mb, cb in b.items():
        for ma, ca in a.items():
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = get(m, 0) + ca * cb
    return {m: c % p for m, c in out.items() if c % p}


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables over F_p."""

    __slots__ = ("p", "nvars", "terms", "_hash")

    def __init__(self, p: int, nvars: int, terms: Optional[dict] = None, _clean=False):
        self.p = p
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            cleaned = {}
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != nvars:
                    raise ValueError(f"exponent {m} does not have {nvars} entries")
                c = int(c) % p
                if c:
                    cleaned[m] = (cleaned.get(m, 0) + c) % p
            terms = {m: c for m, c in cleaned.items() if c}
        self.terms = terms
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, p, nvars):
        return cls(p, nvars, {}, _clean=True)

    @classmethod
    def const(cls, c, p, nvars):
        c %= p
        return cls(p, nvars, {(0,) * nvars: c} if c else {}, _clean=True)

    @classmethod
    def one(cls, p, nvars):
        return cls.const(1, p, nvars)

    @classmethod
    def var(cls, i, p, nvars):
        e = [0] * nvars
        e[i] = 1
        return cls(p, nvars, {tuple(e): 1}, _clean=True)

    @classmethod
    def monomial(cls, exp, p, c=1):
        exp = tuple(exp)
        c %= p
        return cls(p, len(exp), {exp: c} if c else {}, _clean=True)

    def _new(self, terms):
        return Poly(self.p, self.nvars, terms, _clean=True)

    # basic protocol ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.p == other.p and self.nvars == other.nvars
                    and self.terms == other.terms)
        if isinstance(other, int):
            return self == Poly.const(other, self.p, self.nvars)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p, self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"Poly({self.to_str(names)!r}, p={self.p})"

    def _check(self, other):
        if other.p != self.p or other.nvars != self.nvars:
            raise ValueError("polynomials live in different rings")

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, FpElem):
            return Poly.const(other.value, self.p, self.nvars)
        if isinstance(other, int):
            return Poly.const(other, self.p, self.nvars)
        return None

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        acc = dict(self.terms)
        _add_into(acc, o.terms, self.p)
        return self._new(acc)

    __radd__ = __add__

    def __neg__(self):
        p = self.p
        return self._new({m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        acc = dict(self.terms)
        _add_into(acc, o.terms, self.p, -1)
        return self._new(acc)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c: int) -> "Poly":
        c %= self.p
        if c == 0:
            return Poly.zero(self.p, self.nvars)
        if c == 1:
            return self
        p = self.p
        return self._new({m: v * c % p for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, FpElem)):
            return self.scale(int(other))
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        return self._new(mul_terms(self.terms, other.terms, self.p))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Poly.one(self.p, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # structure -----------------------------------------------------------
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def wdeg(self, weights) -> int:
        w = weights.weights if isinstance(weights, WeightVector) else weights
        return max((sum(a * b for a, b in zip(m, w)) for m in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in descending grevlex order."""
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_monomial(self):
        return max(self.terms, key=grevlex_key)

    def leading_term(self):
        m = self.leading_monomial()
        return m, self.terms[m]

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(inv_mod(self.leading_term()[1], self.p))

    def derivative(self, i: int) -> "Poly":
        p = self.p
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e % p:
                mm = list(m)
                mm[i] -= 1
                out[tuple(mm)] = c * e % p
        return self._new(out)

    def hasse(self, beta: Sequence[int]) -> "Poly":
        """Hasse derivative: x^a -> prod C(a_i, beta_i) x^(a - beta)."""
        p = self.p
        out = {}
        for m, c in self.terms.items():
            v = c
            for a, b in zip(m, beta):
                if b > a:
                    v = 0
                    break
                if b:
                    v = v * binom_int(a, b, p) % p
                    if not v:
                        break
            if v:
                mm = tuple(a - b for a, b in zip(m, beta))
                out[mm] = (out.get(mm, 0) + v) % p
        return self._new({m: c for m, c in out.items() if c})

    def mul_monomial(self, exp, c: int = 1) -> "Poly":
        p = self.p
        c %= p
        if not c:
            return Poly.zero(p, self.nvars)
        return self._new({tuple(a + b for a, b in zip(m, exp)): v * c % p
                          for m, v in self.terms.items()})

    def is_weighted_homogeneous(self, weights) -> bool:
        return len(weighted_parts(self, weights)) <= 1

    # text ----------------------------------------------------------------
    def to_str(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    @classmethod
    def parse(cls, text: str, names: Sequence[str], p: int, line: int = 1) -> "Poly":
        return _Parser(text, list(names), p, line).parse()


@dataclass(frozen=True)
class WeightVector:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def degree(self, exp) -> int:
        return sum(a * b for a, b in zip(exp, self.weights))


def weighted_parts(f: Poly, w) -> dict:
    """Split ``f`` into weighted-homogeneous parts keyed by weighted degree."""
    ws = w.weights if isinstance(w, WeightVector) else tuple(w)
    parts: dict = {}
    for m, c in f.terms.items():
        d = sum(a * b for a, b in zip(m, ws))
        parts.setdefault(d, {})[m] = c
    return {d: Poly(f.p, f.nvars, t, _clean=True) for d, t in sorted(parts.items())}


def monomials_of_wdeg(d: int, weights: Sequence[int]):
    """All exponent vectors of weighted degree exactly ``d`` (ascending lex)."""
    n = len(weights)
    if d < 0:
        return []
    out = []

    def rec(i, rem, cur):
        if i == n - 1:
            if rem % weights[i] == 0:
                out.append(tuple(cur + [rem // weights[i]]))
            return
        for e in range(rem // weights[i] + 1):
            rec(i + 1, rem - e * weights[i], cur + [e])

    if n == 0:
        return [()] if d == 0 else []
    rec(0, d, [])
    return out


def monomials_up_to_degree(d: int, nvars: int):
    out = []
    for k in range(d + 1):
        out.extend(monomials_of_wdeg(k, [1] * nvars))
    return out


# ---------------------------------------------------------------------------
# Gröbner bases

def _spoly(f: Poly, g: Poly) -> Poly:
    lf, cf = f.leading_term()
    lg, cg = g.leading_term()
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    a = f.mul_monomial(tuple(x - y for x, y in zip(lcm, lf)), inv_mod(cf, f.p))
    b = g.mul_monomial(tuple(x - y for x, y in zip(lcm, lg)), inv_mod(cg, g.p))
    return a - b


def _reduce_terms(terms: dict, basis, p: int) -> dict:
    """Full reduction of ``terms`` by a list of (lead monomial, monic poly)."""
    if not basis:
        return dict(terms)
    work = dict(terms)
    rem = {}
    while work:
        m = max(work, key=grevlex_key)
        c = work.pop(m)
        for lm, g in basis:
            if all(x >= y for x, y in zip(m, lm)):
                q = tuple(x - y for x, y in zip(m, lm))
                for gm, gc in g.terms.items():
                    if gm == lm:
                        continue
                    mm = tuple(a + b for a, b in zip(gm, q))
                    v = (work.get(mm, 0) - c * gc) % p
                    if v:
                        work[mm] = v
                    else:
                        work.pop(mm, None)
                break
        else:
            rem[m] = c
    return rem


class IdealPresentation:
    """An ideal given by generators together with its reduced Gröbner basis."""

    order = "grevlex"

    def __init__(self, generators: Sequence[Poly], groebner: Sequence[Poly]):
        self.generators = tuple(generators)
        self.groebner = tuple(groebner)
        if self.generators:
            self.p = self.generators[0].p
            self.nvars = self.generators[0].nvars
        self._basis = [(g.leading_monomial(), g) for g in self.groebner]
        self._nf_cache: dict = {}

    @property
    def leading_monomials(self):
        return [lm for lm, _ in self._basis]

    def is_standard(self, exp) -> bool:
        return not any(_divides(lm, exp) for lm in self.leading_monomials)

    def normal_form(self, f: Poly) -> Poly:
        if not self._basis or not f.terms:
            return f
        cached = self._nf_cache.get(f)
        if cached is not None:
            return cached
        out = Poly(f.p, f.nvars, _reduce_terms(f.terms, self._basis, f.p), _clean=True)
        if len(self._nf_cache) > 200000:
            self._nf_cache.clear()
        self._nf_cache[f] = out
        return out

    def nf_terms(self, terms: dict) -> dict:
        """Normal form on a raw term dict (no caching, no Poly wrapping)."""
        if not self._basis:
            return terms
        return _reduce_terms(terms, self._basis, self.p)

    def in_ideal(self, f: Poly) -> bool:
        return self.normal_form(f).is_zero()

    def is_weighted_homogeneous(self, w) -> bool:
        return all(g.is_weighted_homogeneous(w) for g in self.generators)

    def __repr__(self):
        return f"IdealPresentation({list(self.generators)!r})"


def groebner_basis(gens: Sequence[Poly], budget: int = 100000) -> IdealPresentation:
    """Buchberger's algorithm with a FIFO pair queue, then full auto-reduction.

    ``budget`` bounds the number of S-pair reductions; exceeding it raises
    :class:`BudgetExceeded`.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator")
    p, n = gens[0].p, gens[0].nvars
    for g in gens:
        if g.p != p or g.nvars != n:
            raise ValueError("generators must share p and nvars")
    G = []
    for g in gens:
        if g.terms:
            r = _reduce_terms(g.terms, [(h.leading_monomial(), h) for h in G], p)
            if r:
                G.append(Poly(p, n, r, _clean=True).monic())
    pairs = [(i, j) for j in range(len(G)) for i in range(j)]
    steps = 0
    while pairs:
        i, j = pairs.pop(0)
        li, lj = G[i].leading_monomial(), G[j].leading_monomial()
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue  # coprime leading monomials
        steps += 1
        if steps > budget:
            raise BudgetExceeded(f"Gröbner computation exceeded {budget} S-pair steps")
        s = _spoly(G[i], G[j])
        r = _reduce_terms(s.terms, [(h.leading_monomial(), h) for h in G], p)
        if r:
            G.append(Poly(p, n, r, _clean=True).monic())
            k = len(G) - 1
            pairs.extend((a, k) for a in range(k))
    # minimalise, then reduce
    G.sort(key=lambda g: grevlex_key(g.leading_monomial()))
    minimal = []
    for g in G:
        lm = g.leading_monomial()
        if not any(_divides(h.leading_monomial(), lm) for h in minimal):
            minimal = [h for h in minimal if not _divides(lm, h.leading_monomial())]
            minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = [(h.leading_monomial(), h) for j, h in enumerate(minimal) if j != i]
        lm, _ = g.leading_term()
        tail = {m: c for m, c in g.terms.items() if m != lm}
        r = _reduce_terms(tail, others, p)
        r[lm] = 1
        reduced.append(Poly(p, n, r, _clean=True))
    reduced.sort(key=lambda g: grevlex_key(g.leading_monomial()))
    return IdealPresentation(gens, reduced)


def normal_form(f: Poly, I: IdealPresentation) -> Poly:
    return I.normal_form(f)


def in_ideal(f: Poly, I: IdealPresentation) -> bool:
    return I.in_ideal(f)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^|\*|\+|-)|(\S))")


class _Parser:
    def __init__(self, text, names, p, line):
        self.text = text
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.p = check_prime(p)
        self.line = line
        self.toks = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None or mt.end() == pos:
                break
            if mt.group(4):
                raise ParseError(f"unexpected character {mt.group(4)!r}", line, mt.start(4) + 1)
            for kind, g in (("num", 1), ("id", 2), ("op", 3)):
                if mt.group(g):
                    self.toks.append((kind, mt.group(g), mt.start(g) + 1))
            pos = mt.end()
        self.i = 0

    def _err(self, msg, col=None):
        if col is None:
            col = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text) + 1
        raise ParseError(msg, self.line, col)

    def _peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def parse(self) -> Poly:
        n = len(self.names)
        if not self.toks:
            self._err("empty polynomial")
        acc: dict = {}
        sign = 1
        if self._peek()[1] == "-":
            sign = -1
            self.i += 1
        while True:
            m, c = self._term()
            acc[m] = (acc.get(m, 0) + sign * c) % self.p
            tok = self._peek()
            if tok is None:
                break
            if tok[1] == "+":
                sign = 1
            elif tok[1] == "-":
                sign = -1
            else:
                self._err(f"expected '+' or end of input, got {tok[1]!r}")
            self.i += 1
        return Poly(self.p, n, {m: c for m, c in acc.items() if c}, _clean=True)

    def _term(self):
        exp = [0] * len(self.names)
        coeff = 1
        tok = self._peek()
        if tok is None:
            self._err("expected a term")
        if tok[0] == "num":
            v = int(tok[1])
            if v >= self.p:
                self._err(f"coefficient {v} not in [0, {self.p})", tok[2])
            coeff = v
            self.i += 1
            nxt = self._peek()
            if nxt is None or nxt[1] != "*":
                return tuple(exp), coeff
            self.i += 1
        self._factor(exp)
        while True:
            nxt = self._peek()
            if nxt is None or nxt[1] != "*":
                break
            self.i += 1
            self._factor(exp)
        return tuple(exp), coeff

    def _factor(self, exp):
        tok = self._peek()
        if tok is None or tok[0] != "id":
            self._err("expected a variable")
        if tok[1] not in self.index:
            self._err(f"undeclared variable {tok[1]!r}", tok[2])
        k = self.index[tok[1]]
        self.i += 1
        e = 1
        nxt = self._peek()
        if nxt is not None and nxt[1] == "^":
            self.i += 1
            num = self._peek()
            if num is None or num[0] != "num":
                self._err("expected an exponent")
            e = int(num[1])
            self.i += 1
        exp[k] += e


def parse_poly(text: str, names: Sequence[str], p: int) -> Poly:
    return Poly.parse(text, names, p)


def make_ideal(texts: Iterable[str], names: Sequence[str], p: int) -> IdealPresentation:
    return groebner_basis([Poly.parse(t, names, p) for t in texts])

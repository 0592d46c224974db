"""Shared generators and brute-force oracles for the test suite.

The brute-force routines deliberately avoid the library's series machinery:
a derivation is expanded by substituting x_i -> sum_n phi_i[n] * mu^n with
mu adjoined as an extra polynomial variable.
"""

import itertools
import random

from hsleaps.hsd import HSDeriv
from hsleaps.poly import Poly, make_ideal, monomials_of_wdeg, monomials_up_to_degree


def rpoly(rng, p, k, deg=2, nterms=3):
    terms = {}
    for _ in range(nterms):
        exp = tuple(rng.randint(0, deg) for _ in range(k))
        if sum(exp) <= deg:
            terms[exp] = rng.randrange(p)
    return Poly(p, k, terms)


def rderiv(rng, p, k, length, deg=2, nterms=2, density=0.7):
    rows = []
    for _ in range(k):
        row = [None]
        for _ in range(length):
            row.append(rpoly(rng, p, k, deg, nterms) if rng.random() < density
                       else Poly.zero(p, k))
        rows.append(row)
    return HSDeriv(p, k, length, rows)


def curve(p, a, b):
    """Ideal of x^a - y^b over F_p with the grading (b, a)."""
    return make_ideal([f"x^{a} + {p - 1}*y^{b}"], ["x", "y"], p), (b, a)


# -- expansion with mu as a polynomial variable ------------------------------

def _lift(f, k):
    return Poly(f.p, k + 1, {e + (0,): c for e, c in f.terms.items()})


def _cut(f, n, k):
    return Poly(f.p, k + 1, {e: c for e, c in f.terms.items() if e[k] <= n})


def _mu_images(D):
    p, k = D.p, D.nvars
    mu = Poly.var(k, p, k + 1)
    out = []
    for i in range(k):
        s = Poly.zero(p, k + 1)
        for n in range(D.length + 1):
            s = s + _lift(D.component(n)[i], k) * mu ** n
        out.append(s)
    return out


def brute_components(D, f, upto=None):
    """[D_0(f), ..., D_upto(f)] by naive substitution."""
    p, k = D.p, D.nvars
    upto = D.length if upto is None else upto
    imgs = _mu_images(D)
    total = Poly.zero(p, k + 1)
    for exp, c in f.terms.items():
        term = Poly.const(c, p, k + 1)
        for i, a in enumerate(exp):
            for _ in range(a):
                term = _cut(term * imgs[i], upto, k)
        total = total + term
    comps = [dict() for _ in range(upto + 1)]
    for e, c in total.terms.items():
        comps[e[k]][e[:k]] = c
    return [Poly(p, k, t) for t in comps]


def brute_apply(D, n, f):
    return brute_components(D, f, n)[n]


def brute_log(D, I, upto=None):
    upto = D.length if upto is None else upto
    for g in I.generators:
        for n, h in enumerate(brute_components(D, g, upto)):
            if n and not I.in_ideal(h):
                return False
    return True


# -- exhaustive integral search ----------------------------------------------

def stage_space(I, w, e, degree_bound, n):
    """(variable, standard monomial) unknowns for component n of an integral."""
    k = I.nvars
    out = []
    for i in range(k):
        if degree_bound is None:
            mons = monomials_of_wdeg(w[i] + n * e, w)
        else:
            mons = monomials_up_to_degree(degree_bound, k)
        out.extend((i, m) for m in mons if I.is_standard(m))
    return out


def brute_integrable(images, m, I, w, e=None, degree_bound=None):
    """Does some assignment of coefficients to components 2..m give a
    logarithmic derivation? Component 1 is the normal form of ``images``.

    Exhaustive over every assignment of the given stage; the only shortcut
    is abandoning a prefix that already fails to be logarithmic.
    """
    p, k = I.p, I.nvars
    first = [I.normal_form(f) for f in images]
    rows = [[None, f] for f in first]

    def build(n):
        return HSDeriv(p, k, n, [r[:n + 1] for r in rows])

    if not brute_log(build(1), I):
        return False

    def rec(n):
        if n > m:
            return True
        space = stage_space(I, w, e or 0, degree_bound, n)
        for coeffs in itertools.product(range(p), repeat=len(space)):
            comp = [dict() for _ in range(k)]
            for (i, mono), c in zip(space, coeffs):
                if c:
                    comp[i][mono] = c
            for i in range(k):
                rows[i].append(Poly(p, k, comp[i]))
            D = build(n)
            ok = all(I.in_ideal(brute_apply(D, n, g)) for g in I.generators) and rec(n + 1)
            for i in range(k):
                rows[i].pop()
            if ok:
                return True
        return False

    return rec(2)


def seeded(seed):
    return random.Random(seed)


# -- logarithmic test inputs -------------------------------------------------

def log_basis(I, w, degrees):
    from hsleaps.leapfinder import log_derivations
    out = []
    for d in degrees:
        out.extend(log_derivations(I, w, d))
    return out


def integrable_basis(I, w, m, degrees, engine=None):
    """(delta, m-integral) for every basis derivation that integrates to m."""
    from hsleaps.errors import NotFoundWithinBounds
    from hsleaps.leapfinder import LogIntegralSearch, find_log_integral
    engine = engine or LogIntegralSearch(I, w)
    out = []
    for delta in log_basis(I, w, degrees):
        try:
            out.append((delta, find_log_integral(delta, m, I, engine=engine)))
        except NotFoundWithinBounds:
            pass
    return out


def stacked(I, w, L, e, rng, degrees=range(-3, 4), engine=None, top=None):
    """A length-L logarithmic derivation with l >= e built by composing
    stretched integrals E^j[j] for j = e..L, each padded to length L.
    The j = e factor is always attempted; others are kept at random.

    ``top`` (variable images) is added at position L, which in general breaks
    logarithmicity in that single component only.
    """
    from hsleaps.hsd import compose, pad_extend, stretch, truncate
    from hsleaps.leapfinder import LogIntegralSearch, find_log_integral
    from hsleaps.errors import NotFoundWithinBounds
    engine = engine or LogIntegralSearch(I, w)
    basis = log_basis(I, w, degrees)
    p, k = I.p, I.nvars
    D = HSDeriv.identity(p, k, L)
    for j in range(e, L + 1):
        if j > e and rng.random() < 0.35:
            continue
        delta = rng.choice(basis)
        reach = L // j
        try:
            E = find_log_integral(delta, reach, I, engine=engine)
        except NotFoundWithinBounds:
            # a shorter integral would not stay logarithmic once padded
            continue
        S = stretch(E, j)
        S = truncate(S, L) if S.length > L else pad_extend(S, L)
        D = compose(D, S)
    if top is not None:
        rows = [list(row) for row in D.images]
        for i in range(k):
            rows[i][L] = rows[i][L] + top[i]
        D = HSDeriv(p, k, L, rows)
    return D


def near_log(I, w, n, rng, degrees=range(-3, 4), engine=None, top_terms=2):
    """A random length-n derivation that is (n-1)-logarithmic but, in general,
    not n-logarithmic: a composite of (n-1)-integrals, zero-padded, with a
    random polynomial added to the top component."""
    from hsleaps.hsd import compose, pad_extend, scale
    from hsleaps.leapfinder import LogIntegralSearch
    engine = engine or LogIntegralSearch(I, w)
    pool = [D for _, D in integrable_basis(I, w, n - 1, degrees, engine)]
    p, k = I.p, I.nvars
    D = HSDeriv.identity(p, k, n)
    for E in rng.sample(pool, min(len(pool), rng.randint(1, 3))):
        D = compose(D, pad_extend(scale(rng.randrange(1, p), E), n))
    rows = [list(row) for row in D.images]
    for i in range(k):
        rows[i][n] = rows[i][n] + rpoly(rng, p, k, 3, top_terms)
    return HSDeriv(p, k, n, rows)

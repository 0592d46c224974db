"""Search for logarithmic integrals of derivations and leap detection.

A derivation delta of F_p[x] is logarithmic for I when delta(I) is inside I.
An m-integral is a Hasse-Schmidt derivation of length m whose first
component is delta; it is logarithmic when every component maps I into I.

The search builds the images phi_n(x_i) stage by stage.  At stage n the
constraint "D_n(g) in I for every generator g" is affine in the new
unknowns, because D_n(g) = (terms from earlier stages) + sum_i dg/dx_i *
phi_n(x_i).  Unknowns range over standard monomials (those not divisible
by a leading monomial of the Gröbner basis); changing an image by an
element of I never matters.

Solutions at a stage form a coset of the space K of logarithmic
derivations (in that degree).  Two choices that differ by a derivation
which is itself logarithmically q-integrable, with (q+1)n - 1 >= target,
are interchangeable: the difference can be absorbed by composing with a
stretched integral.  So the search only branches over representatives of
K modulo that subspace, which is computed recursively.

For weighted-homogeneous ideals and derivations ("auto" bounds) the
coefficient of mu^n in phi(x_i) is searched in weighted degree
w_i + n*d, which makes the search exhaustive for homogeneous integrals.
With an explicit ``degree_bound`` every standard monomial of total degree
up to the bound is allowed at each stage; a failure then only means that
nothing exists inside those bounds.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .digits import is_power_of
from .errors import HypothesisViolated, NotFoundWithinBounds, NotLogarithmicInput
from .hsd import HSDeriv, compose
from .poly import (IdealPresentation, Poly, WeightVector, monomials_of_wdeg,
                   monomials_up_to_degree, mul_terms, weighted_parts)
from .zpfield import echelon_basis, solve_mod

DEFAULT_BRANCH_CAP = 4096


def default_branch_cap() -> int:
    env = os.environ.get("HSLEAPS_BRANCH_CAP")
    return int(env) if env else DEFAULT_BRANCH_CAP


@dataclass(frozen=True)
class SearchBounds:
    """``degree_bound=None`` selects weighted-degree (auto) bounds."""

    degree_bound: Optional[int] = None
    branch_cap: int = field(default_factory=default_branch_cap)

    def __post_init__(self):
        if self.branch_cap < 1:
            raise ValueError("branch_cap must be at least 1")
        if self.degree_bound is not None and self.degree_bound < 0:
            raise ValueError("degree_bound must be nonnegative")

    @property
    def auto(self) -> bool:
        return self.degree_bound is None


def _weights_tuple(w):
    return tuple(w.weights) if isinstance(w, WeightVector) else tuple(w)


def _add(acc, terms, p, c=1):
    for m, v in terms.items():
        x = (acc.get(m, 0) + c * v) % p
        if x:
            acc[m] = x
        else:
            acc.pop(m, None)


class LogIntegralSearch:
    """Search engine bound to one ideal, grading and bound choice.

    Results (kernels, integrable subspaces, reaches) are memoised, so one
    engine should be reused for many queries on the same algebra.
    """

    def __init__(self, I: IdealPresentation, weights=None, bounds: Optional[SearchBounds] = None):
        self.I = I
        self.bounds = bounds or SearchBounds()
        self.p = I.p
        self.k = I.nvars
        self.gens = [g for g in I.generators if g]
        if weights is None:
            weights = (1,) * self.k
        self.w = _weights_tuple(weights)
        if len(self.w) != self.k:
            raise ValueError("one weight per variable is required")
        if self.bounds.auto and not I.is_weighted_homogeneous(self.w):
            raise ValueError("auto bounds need a weighted-homogeneous ideal; pass degree_bound")
        self._systems: dict = {}
        self._subspaces: dict = {}
        self._reach: dict = {}
        self.anomalies: list = []
        # monomials whose series are tracked, with (variable, predecessor)
        mons = set()
        for g in self.gens:
            for a in g.terms:
                while sum(a):
                    mons.add(a)
                    i = next(j for j, x in enumerate(a) if x)
                    a = a[:i] + (a[i] - 1,) + a[i + 1:]
        self._chain = []
        for a in sorted(mons, key=lambda a: (sum(a), a)):
            i = next(j for j, x in enumerate(a) if x)
            self._chain.append((a, i, a[:i] + (a[i] - 1,) + a[i + 1:]))

    # -- linear systems -----------------------------------------------------
    def _nf(self, terms):
        return self.I.nf_terms(terms) if terms else terms

    def columns(self, e):
        """Unknowns (variable index, standard monomial) for image degree shift ``e``."""
        out = []
        for i in range(self.k):
            if self.bounds.auto:
                mons = monomials_of_wdeg(self.w[i] + e, self.w)
            else:
                mons = monomials_up_to_degree(self.bounds.degree_bound, self.k)
            out.extend((i, m) for m in mons if self.I.is_standard(m))
        return out

    def system(self, e):
        key = e if self.bounds.auto else None
        s = self._systems.get(key)
        if s is not None:
            return s
        cols = self.columns(e)
        partials = [[g.derivative(i) for i in range(self.k)] for g in self.gens]
        colvecs = []
        rowkeys = {}
        for (i, mono) in cols:
            vec = {}
            for gi, dg in enumerate(partials):
                t = self._nf(dg[i].mul_monomial(mono).terms)
                for m, c in t.items():
                    vec[(gi, m)] = c
                    rowkeys.setdefault((gi, m), len(rowkeys))
            colvecs.append(vec)
        rows = [[0] * len(cols) for _ in rowkeys]
        for j, vec in enumerate(colvecs):
            for key2, c in vec.items():
                rows[rowkeys[key2]][j] = c
        _, kernel = solve_mod(rows, [0] * len(rows), len(cols), self.p)
        s = {"cols": cols, "rows": rows, "rowkeys": rowkeys, "kernel": kernel}
        self._systems[key] = s
        return s

    def _solve(self, e, rests):
        s = self.system(e)
        rhs = [0] * len(s["rows"])
        for gi, terms in enumerate(rests):
            for m, c in terms.items():
                r = s["rowkeys"].get((gi, m))
                if r is None:
                    return None
                rhs[r] = (-c) % self.p
        if not s["cols"]:
            return [] if not any(rhs) else None
        x, _ = solve_mod(s["rows"], rhs, len(s["cols"]), self.p)
        return x

    def vector_to_images(self, e, vec):
        cols = self.system(e)["cols"]
        imgs = [dict() for _ in range(self.k)]
        for (i, mono), c in zip(cols, vec):
            if c % self.p:
                imgs[i][mono] = c % self.p
        return imgs

    def images_to_vector(self, e, images):
        """Coordinates of normalised images in the stage columns, or None if outside."""
        cols = self.system(e)["cols"]
        index = {c: j for j, c in enumerate(cols)}
        vec = [0] * len(cols)
        for i, terms in enumerate(images):
            for m, c in terms.items():
                j = index.get((i, m))
                if j is None:
                    return None
                vec[j] = c
        return vec

    def kernel(self, e):
        return self.system(e)["kernel"]

    # -- integrable subspaces ------------------------------------------------
    def _projective_points(self, basis):
        k = len(basis)
        n = len(basis[0]) if basis else 0
        for lead in range(k):
            for tail in itertools.product(range(self.p), repeat=k - lead - 1):
                coeffs = [0] * lead + [1] + list(tail)
                yield [sum(c * b[j] for c, b in zip(coeffs, basis)) % self.p for j in range(n)]

    def integrable_subspace(self, e, q):
        """Echelon basis of the degree-e logarithmic derivations that have a
        logarithmic q-integral."""
        K = echelon_basis(self.kernel(e), self.p)
        if q <= 1 or not K:
            return K
        if not self.bounds.auto:
            return []
        key = (e, q)
        W = self._subspaces.get(key)
        if W is not None:
            return W
        passing = [v for v in self._projective_points(K) if self.reach(e, v, q) >= q]
        W = echelon_basis(passing, self.p) if passing else []
        expected = (self.p ** len(W) - 1) // (self.p - 1)
        if len(passing) != expected:
            self.anomalies.append((e, q, len(passing), len(W)))
            W = []
        self._subspaces[key] = W
        return W

    def reach(self, e, vec, target):
        """Largest order <= target to which the degree-e derivation ``vec`` integrates."""
        key = (e, tuple(v % self.p for v in vec))
        known = self._reach.get(key)
        if known is not None:
            tried, r = known
            if r < tried or tried >= target:
                return min(r, target)
        r, _ = self._run(e, self.vector_to_images(e, vec), target)
        self._reach[key] = (target, r)
        return r

    # -- the staged search ---------------------------------------------------
    def _run(self, e, first, target):
        """Depth-first search; returns (reach, images per stage or None)."""
        p = self.p
        nf = self._nf
        chain = self._chain
        zero = (0,) * self.k
        phi = [[{tuple(int(j == i) for j in range(self.k)): 1}] for i in range(self.k)]
        S = {a: [{a: 1}] for a, _, _ in chain}
        S[zero] = [{zero: 1}]
        best = [0]

        def rest_at(n):
            S0 = {zero: {}}
            for a, i, b in chain:
                acc = {}
                sb0 = S0[b]
                if sb0:
                    _add(acc, mul_terms(sb0, phi[i][0], p), p)
                Sb = S[b]
                for kk in range(1, n):
                    if phi[i][kk] and Sb[n - kk]:
                        _add(acc, mul_terms(Sb[n - kk], phi[i][kk], p), p)
                S0[a] = nf(acc)
            rests = []
            for g in self.gens:
                acc = {}
                for a, c in g.terms.items():
                    if sum(a):
                        _add(acc, S0[a], p, c)
                rests.append(acc)
            return S0, rests

        def commit(n, imgs, S0):
            for i in range(self.k):
                phi[i].append(imgs[i])
            S[zero].append({})
            for a, i, b in chain:
                acc = dict(S0[a])
                for j in range(self.k):
                    if a[j] % p and imgs[j]:
                        mono = a[:j] + (a[j] - 1,) + a[j + 1:]
                        _add(acc, {tuple(x + y for x, y in zip(m, mono)): c * a[j] % p
                                   for m, c in imgs[j].items()}, p)
                S[a].append(nf(acc))

        def pop(n):
            for i in range(self.k):
                del phi[i][n:]
            for lst in S.values():
                del lst[n:]

        def dfs(n):
            if n > target:
                return True
            S0, rests = rest_at(n)
            if n == 1:
                for gi, g in enumerate(self.gens):
                    acc = dict(rests[gi])
                    for i in range(self.k):
                        if first[i]:
                            _add(acc, mul_terms(g.derivative(i).terms, first[i], p), p)
                    if nf(acc):
                        raise NotLogarithmicInput("the derivation does not map I into I")
                commit(1, first, S0)
                best[0] = max(best[0], 1)
                return dfs(2)
            en = n * e
            x = self._solve(en, rests)
            if x is None:
                return False
            # the particular solution first; the pruning subspace is only
            # worth computing once it fails
            commit(n, self.vector_to_images(en, x), S0)
            best[0] = max(best[0], n)
            if dfs(n + 1):
                return True
            pop(n)
            q = -(-(target + 1) // n) - 1
            K = echelon_basis(self.kernel(en), p)
            W = self.integrable_subspace(en, q) if self.bounds.auto or q <= 1 else []
            comp = _complement(K, W, p)
            if p ** len(comp) > self.bounds.branch_cap:
                raise NotFoundWithinBounds(
                    f"stage {n} needs {p ** len(comp)} branches, above the cap "
                    f"{self.bounds.branch_cap}", reached=best[0], exhausted=False)
            for coeffs in itertools.product(range(p), repeat=len(comp)):
                if not any(coeffs):
                    continue
                v = list(x)
                for c, b in zip(coeffs, comp):
                    if c:
                        v = [(a + c * bb) % p for a, bb in zip(v, b)]
                commit(n, self.vector_to_images(en, v), S0)
                best[0] = max(best[0], n)
                if dfs(n + 1):
                    return True
                pop(n)
            return False

        ok = dfs(1)
        if ok:
            return target, [[phi[i][n] for i in range(self.k)] for n in range(target + 1)]
        return best[0], None

    # -- public entry points ---------------------------------------------------
    def integrate_images(self, images: Sequence[Poly], m: int) -> HSDeriv:
        """Logarithmic m-integral of the derivation x_i -> images[i]."""
        p, k = self.p, self.k
        if m < 1:
            raise ValueError("target length must be at least 1")
        images = [Poly(p, k, img.terms, _clean=True) for img in images]
        if not any(images):
            return HSDeriv.identity(p, k, m)
        normal = [self._nf(img.terms) for img in images]
        e = None
        if self.bounds.auto:
            degs = {img.wdeg(self.w) - wi for img, wi in zip(images, self.w) if img}
            parts = [weighted_parts(img, self.w) for img in images]
            if len(degs) != 1 or any(len(pt) > 1 for pt in parts):
                raise ValueError("auto bounds need a homogeneous derivation")
            e = degs.pop()
            if self.images_to_vector(e, normal) is None:
                raise ValueError("derivation does not fit the search columns")
        elif self.images_to_vector(0, normal) is None:
            raise NotFoundWithinBounds("derivation exceeds the degree bound", reached=0)
        r, stages = self._run(e if e is not None else 0, normal, m)
        if stages is None:
            raise NotFoundWithinBounds(
                f"no logarithmic {m}-integral within bounds (reached order {r})", reached=r)
        rows = [[Poly(p, k, stages[n][i], _clean=True) for n in range(m + 1)] for i in range(k)]
        D = HSDeriv(p, k, m, rows)
        fix = [img - Poly(p, k, nv, _clean=True) for img, nv in zip(images, normal)]
        if any(fix):
            # images differ from their normal forms by elements of I; composing
            # with x -> x + fix*mu restores the exact first component
            D = compose(D, HSDeriv(p, k, m, [[None, f] for f in fix]))
        return D


def _complement(K, W, p):
    """Vectors of K (echelon) extending the echelon basis W to a basis of span K."""
    if not W:
        return list(K)
    out = []
    cur = [list(v) for v in W]
    r = len(cur)
    for v in K:
        trial = echelon_basis(cur + [v], p)
        if len(trial) > r:
            cur.append(list(v))
            r += 1
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# module-level API

def derivation_images(delta) -> list:
    if isinstance(delta, HSDeriv):
        if delta.length < 1:
            raise ValueError("derivation needs component 1")
        return list(delta.component(1))
    return list(delta)


def log_derivations(I: IdealPresentation, w, d: int) -> list:
    """Basis of logarithmic derivations whose images of x_i have weighted degree w_i + d.

    All monomials (standard or not) are allowed, so derivations with images
    in I are included.  Each basis element is a tuple of images.
    """
    ws = _weights_tuple(w)
    p, k = I.p, I.nvars
    cols = [(i, m) for i in range(k) for m in monomials_of_wdeg(ws[i] + d, ws)]
    gens = [g for g in I.generators if g]
    rowkeys: dict = {}
    vecs = []
    for i, m in cols:
        vec = {}
        for gi, g in enumerate(gens):
            for mono, c in I.normal_form(g.derivative(i).mul_monomial(m)).terms.items():
                vec[(gi, mono)] = c
                rowkeys.setdefault((gi, mono), len(rowkeys))
        vecs.append(vec)
    rows = [[0] * len(cols) for _ in rowkeys]
    for j, vec in enumerate(vecs):
        for key, c in vec.items():
            rows[rowkeys[key]][j] = c
    _, kernel = solve_mod(rows, [0] * len(rows), len(cols), p)
    out = []
    for v in echelon_basis(kernel, p):
        imgs = [dict() for _ in range(k)]
        for (i, m), c in zip(cols, v):
            if c:
                imgs[i][m] = c
        out.append(tuple(Poly(p, k, t, _clean=True) for t in imgs))
    return out


def find_log_integral(delta, m: int, I: IdealPresentation, w=None,
                      bounds: Optional[SearchBounds] = None,
                      engine: Optional[LogIntegralSearch] = None) -> HSDeriv:
    """A logarithmic m-integral of ``delta`` (images or an HSDeriv's first component).

    Raises :class:`NotFoundWithinBounds` when none exists inside the bounds.
    """
    if engine is None:
        engine = LogIntegralSearch(I, w, bounds)
    images = derivation_images(delta)
    p, k = I.p, I.nvars
    for g in I.generators:
        val = sum((g.derivative(i) * images[i] for i in range(k)), Poly.zero(p, k))
        if not I.in_ideal(val):
            raise NotLogarithmicInput("the derivation does not map I into I")
    if engine.bounds.auto:
        parts = _homogeneous_parts(images, engine.w)
        if len(parts) > 1:
            out = HSDeriv.identity(p, k, m)
            for part in parts:
                out = compose(out, engine.integrate_images(part, m))
            return out
    return engine.integrate_images(images, m)


def _homogeneous_parts(images, w):
    """Split a derivation into pieces of fixed degree shift."""
    by_deg: dict = {}
    for i, img in enumerate(images):
        for d, part in weighted_parts(img, w).items():
            by_deg.setdefault(d - w[i], [None] * len(images))[i] = part
    out = []
    for d in sorted(by_deg):
        imgs = by_deg[d]
        p, k = images[0].p, images[0].nvars
        out.append([x if x is not None else Poly.zero(p, k) for x in imgs])
    return out


@dataclass
class IderTable:
    """dims[(m, d)] = dimension of degree-d logarithmic derivations with a log m-integral."""

    p: int
    m_max: int
    degrees: list
    dims: dict
    anomalies: list = field(default_factory=list)

    def column(self, d):
        return [self.dims[(m, d)] for m in range(1, self.m_max + 1)]

    def leaps(self):
        out = set()
        for d in self.degrees:
            col = self.column(d)
            for m in range(2, self.m_max + 1):
                if col[m - 1] < col[m - 2]:
                    out.add(m)
        return sorted(out)

    def degree_leaps(self, d):
        col = self.column(d)
        return [m for m in range(2, self.m_max + 1) if col[m - 1] < col[m - 2]]


def degree_dims(I: IdealPresentation, w, d: int, m_max: int,
                bounds: Optional[SearchBounds] = None,
                engine: Optional[LogIntegralSearch] = None):
    """Dimensions for one degree, orders 1..m_max, plus any anomalies."""
    if engine is None:
        engine = LogIntegralSearch(I, w, bounds)
    ws = engine.w
    total = len(log_derivations(I, ws, d))
    K = echelon_basis(engine.kernel(d), engine.p)
    if not engine.gens:
        # no relations: zero padding integrates everything, so the passing set
        # is all of K; the basis still goes through the search as a check
        for v in K:
            if engine.reach(d, v, m_max) < m_max:
                raise HypothesisViolated(f"free derivation of degree {d} failed to integrate")
        return [total] * m_max, list(engine.anomalies)
    reaches = [(v, engine.reach(d, v, m_max)) for v in engine._projective_points(K)]
    dims = []
    anomalies = []
    for m in range(1, m_max + 1):
        passing = [v for v, r in reaches if r >= m]
        basis = echelon_basis(passing, engine.p) if passing else []
        if len(passing) != (engine.p ** len(basis) - 1) // (engine.p - 1):
            anomalies.append((d, m))
        dims.append(total - len(K) + len(basis))
    return dims, anomalies + [("subspace", *a) for a in engine.anomalies]


def _degree_job(args):
    I, w, d, m_max, bounds = args
    return d, degree_dims(I, w, d, m_max, bounds)


def ider_dims(I: IdealPresentation, w, m_max: int, d_range: Sequence[int],
              bounds: Optional[SearchBounds] = None, jobs: int = 1) -> IderTable:
    bounds = bounds or SearchBounds()
    ws = _weights_tuple(w)
    degrees = list(d_range)
    dims: dict = {}
    anomalies = []
    if jobs > 1 and len(degrees) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_degree_job, [(I, ws, d, m_max, bounds) for d in degrees]))
    else:
        engine = LogIntegralSearch(I, ws, bounds)
        results = [(d, degree_dims(I, ws, d, m_max, bounds, engine)) for d in degrees]
    for d, (col, anom) in results:
        for m, v in enumerate(col, 1):
            dims[(m, d)] = v
        anomalies.extend(anom)
    return IderTable(I.p, m_max, degrees, dims, sorted(set(map(tuple, anomalies)), key=str))


@dataclass
class LeapReport:
    table: IderTable
    leaps: list
    per_degree: dict
    verdict: bool

    @property
    def p(self):
        return self.table.p


def scan_leaps(I: IdealPresentation, w, m_max: int, d_range: Sequence[int],
               bounds: Optional[SearchBounds] = None, jobs: int = 1) -> LeapReport:
    table = ider_dims(I, w, m_max, d_range, bounds, jobs)
    leaps = table.leaps()
    per_degree = {d: table.degree_leaps(d) for d in table.degrees}
    verdict = all(is_power_of(m, I.p) for m in leaps)
    return LeapReport(table, leaps, per_degree, verdict)


def default_degree_range(w, max_degree: int, min_degree: Optional[int] = None):
    ws = _weights_tuple(w)
    lo = -max(ws) if min_degree is None else min_degree
    return range(lo, max_degree + 1)


def to_tsv(report: LeapReport) -> str:
    t = report.table
    lines = ["degree\t" + "\t".join(str(m) for m in range(1, t.m_max + 1))]
    for d in t.degrees:
        lines.append(f"{d}\t" + "\t".join(str(v) for v in t.column(d)))
    leaps = ",".join(str(m) for m in report.leaps) or "none"
    lines.append(f"LEAPS: {leaps} POWERS_OF_{t.p}: {'yes' if report.verdict else 'no'}")
    return "\n".join(lines) + "\n"

"""Constructive integration of logarithmic Hasse-Schmidt derivations.

Every procedure takes an *integration oracle*: a callable
``oracle(delta, I, M)`` returning a logarithmic M-integral of the derivation
``delta`` (the first component of an HSDeriv).  The default oracle searches
for integrals with :mod:`hsleaps.leapfinder`.

All intermediate claims (vanishing components, logarithmicity, the
relation between top components) are re-checked at run time; a failed
check raises :class:`HypothesisViolated` carrying the pipeline trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .bivariate import CoIdeal2, bi_apply, gd, gd_pt
from .digits import (BasePDigits, binom_int, cset_max, fermat_system_int, is_power_of,
                     lowest_digit_index, t_p)
from .errors import (BadLength, BadN, BadTp, HypothesisViolated, NotFoundWithinBounds,
                     NotLogarithmicInput, NotLogEnough, OracleFailure, WrongCharacteristic)
from .hsd import (HSDeriv, apply, compose, compose_all, compress, e_dm, ell, ell_e,
                  is_logarithmic, pad_extend, scale, stretch, truncate)
from .leapfinder import LogIntegralSearch, SearchBounds, derivation_images, find_log_integral
from .poly import IdealPresentation, Poly
from .zpfield import inv_mod


# ---------------------------------------------------------------------------
# tracing

def _fmt(v):
    return "inf" if v == float("inf") else str(v)


@dataclass
class TraceStep:
    step: str
    ell_before: object
    ell_after: object
    log_ok: bool

    def line(self):
        return (f"step {self.step} ell_before={_fmt(self.ell_before)} "
                f"ell_after={_fmt(self.ell_after)} log_ok={str(self.log_ok).lower()}")


@dataclass
class PipelineTrace:
    steps: list = field(default_factory=list)

    def record(self, step, before, after, log_ok):
        self.steps.append(TraceStep(step, before, after, bool(log_ok)))

    def dump(self) -> str:
        return "".join(s.line() + "\n" for s in self.steps)

    def __len__(self):
        return len(self.steps)


def _fail(msg, trace):
    raise HypothesisViolated(msg + ("\n" + trace.dump() if trace and len(trace) else ""), trace)


# ---------------------------------------------------------------------------
# oracles

def derivation(images, p, nvars) -> HSDeriv:
    """The length-1 HS derivation (Id, delta) with delta(x_i) = images[i]."""
    return HSDeriv(p, nvars, 1, [[None, f] for f in images])


def component_derivation(D: HSDeriv, n: int) -> HSDeriv:
    return derivation(D.component(n), D.p, D.nvars)


IntegrationOracle = Callable[[HSDeriv, IdealPresentation, int], HSDeriv]


class SearchOracle:
    """Oracle backed by the staged integral search.

    Derivations that are not homogeneous are split into homogeneous pieces
    (each of which is logarithmic for a homogeneous ideal); the integrals of
    the pieces are composed.
    """

    def __init__(self, weights=None, bounds: Optional[SearchBounds] = None):
        self.weights = weights
        self.bounds = bounds
        self._engines: dict = {}
        self.calls = 0

    def _engine(self, I):
        eng = self._engines.get(id(I))
        if eng is None or eng.I is not I:
            eng = LogIntegralSearch(I, self.weights, self.bounds)
            self._engines[id(I)] = eng
        return eng

    def __call__(self, delta, I: IdealPresentation, M: int) -> HSDeriv:
        self.calls += 1
        try:
            return find_log_integral(delta, M, I, engine=self._engine(I))
        except NotFoundWithinBounds as exc:
            if not exc.exhausted:
                # the branch cap stopped the search: a budget problem, not a verdict
                raise
            raise OracleFailure(f"no logarithmic {M}-integral found: {exc}") from exc
        except NotLogarithmicInput as exc:
            raise OracleFailure(f"no logarithmic {M}-integral found: {exc}") from exc


def _checked_oracle(oracle, images, I, M, p, k) -> HSDeriv:
    if not any(images):
        return HSDeriv.identity(p, k, M)
    E = oracle(derivation(images, p, k), I, M)
    if E.length < M:
        raise OracleFailure(f"oracle returned length {E.length} < {M}")
    E = truncate(E, M)
    if tuple(E.component(1)) != tuple(images):
        raise OracleFailure("oracle result does not integrate the requested derivation")
    if not is_logarithmic(E, I, M):
        raise OracleFailure("oracle result is not logarithmic")
    return E


# ---------------------------------------------------------------------------
# helpers

def _fit(D: HSDeriv, n: int) -> HSDeriv:
    """Truncate or zero-pad D to length n."""
    return truncate(D, n) if D.length >= n else pad_extend(D, n)


def _op_in_ideal(I, terms) -> bool:
    """``terms`` maps a generator to a list of (derivation, index, sign); checks
    that the signed sum of components applied to every generator lies in I."""
    for g in I.generators:
        acc = Poly.zero(g.p, g.nvars)
        for D, n, sign in terms:
            acc = acc + apply(D, n, g).scale(sign)
        if not I.in_ideal(acc):
            return False
    return True


def _top_relation(I, new, n_new, old, n_old) -> bool:
    return _op_in_ideal(I, [(new, n_new, 1), (old, n_old, -1)])


def _require_log(D, I, upto, what):
    if not is_logarithmic(D, I, upto):
        raise NotLogEnough(f"{what} is not {upto}-logarithmic")


# ---------------------------------------------------------------------------
# small closed-form integrators

def integrate6_char2(D: HSDeriv, I: IdealPresentation, trace: Optional[PipelineTrace] = None) -> HSDeriv:
    """Logarithmic 6-integral of D_1 from a 5-logarithmic D, in characteristic 2."""
    if D.p != 2:
        raise WrongCharacteristic("this construction needs characteristic 2")
    trace = trace if trace is not None else PipelineTrace()
    D6 = _fit(D, 6)
    _require_log(D6, I, 5, "input")
    G = gd(D6, CoIdeal2.total_degree(6))
    rows = []
    for x, c12, c24, c13 in zip(
            [Poly.var(i, 2, D.nvars) for i in range(D.nvars)],
            G.component((1, 2)), G.component((2, 4)), G.component((1, 3))):
        rows.append([x, c12, c24 - bi_apply(G, (1, 1), c13)])
    Dp = HSDeriv(2, D.nvars, 2, rows)
    for g in I.generators:
        want = bi_apply(G, (2, 4), g) - bi_apply(G, (1, 1), bi_apply(G, (1, 3), g))
        if apply(Dp, 2, g) != want:
            _fail("second component does not match the product-rule construction", trace)
    out = compose(D6, stretch(Dp, 3))
    ok = is_logarithmic(out, I, 6)
    trace.record("char2_sixth", ell(D6), ell(out), ok)
    if not ok or out.component(1) != D6.component(1):
        _fail("sixth-order integral failed its postconditions", trace)
    return out


def integrate_via_tp(D: HSDeriv, n: int, I: IdealPresentation,
                     trace: Optional[PipelineTrace] = None) -> HSDeriv:
    """Average scaled copies of D so that the top component cancels."""
    p = D.p
    m = t_p(n, p)
    if m == 1:
        raise BadTp(f"T_p({n}) = 1 for p = {p}; averaging does not apply")
    trace = trace if trace is not None else PipelineTrace()
    a = fermat_system_int(m, p)
    if sum(a) % p != 1 or sum(pow(x, m, p) for x in a) % p:
        _fail("averaging coefficients do not satisfy their defining system", trace)
    Dn = _fit(D, n)
    _require_log(Dn, I, n - 1, "input")
    E = compose_all([scale(x, Dn) for x in a])
    ok = is_logarithmic(E, I, n)
    trace.record("average", ell(Dn), ell(E), ok)
    if not ok or E.component(1) != Dn.component(1):
        _fail("averaged derivation failed its postconditions", trace)
    return E


# ---------------------------------------------------------------------------
# killers and compression

def build_killer(delta, m: int, e: int, s: int, I: IdealPresentation, oracle: IntegrationOracle,
                 p: Optional[int] = None, nvars: Optional[int] = None) -> HSDeriv:
    """E with E_m = -delta, supported on multiples of m, logarithmic, of length
    e*p^s - 1 (m a multiple of e) or e*p^s (otherwise)."""
    images = derivation_images(delta)
    p = p or images[0].p
    k = nvars or images[0].nvars
    if not 1 < e <= m < e * p ** s:
        raise ValueError(f"need 1 < e <= m < e*p^s (e={e}, m={m}, s={s})")
    target = e * p ** s - 1 if m % e == 0 else e * p ** s
    if not any(images):
        return HSDeriv.identity(p, k, target)
    r = cset_max(m, e, s, p)
    integ = _checked_oracle(oracle, images, I, p ** (r + 1) - 1, p, k)
    E = e_dm(integ, m)
    if E.length < target:
        raise HypothesisViolated(f"killer too short: {E.length} < {target}")
    return truncate(E, target)


def _kill_round_base(D, e, i, I, oracle, trace):
    """One round for s = 1: cancel D_{ie+a}, a = 1..e-1, with composed killers."""
    p, k = D.p, D.nvars
    L = e * p
    killers = []
    for a in range(1, e):
        imgs = D.component(i * e + a)
        if not any(imgs):
            continue
        integ = _checked_oracle(oracle, imgs, I, p - 1, p, k)
        killers.append(truncate(e_dm(integ, i * e + a), L))
    if not killers:
        return D
    return compose(D, compose_all(killers))


def _certify(cur, m, e, s, I, oracle, trace):
    """Re-derive that cur_m has a logarithmic p^r-integral by compressing."""
    p = cur.p
    r = cset_max(m, e, s, p)
    if r >= 1:
        sub = compress_integral(truncate(cur, m * p ** r), m, r, I, oracle, trace)
        trace.record("certify", m, sub.length, True)
    return r


def _kill_round(D, e, s, i, I, oracle, trace):
    """One round for s >= 2: clear multiples of e up to ie, then cancel ie+1..ie+e-1."""
    p = D.p
    L = e * p ** s
    cur = truncate(D, L - 1)
    while True:
        lv = ell(cur)
        if lv > i * e:
            break
        if lv % e:
            _fail(f"unexpected nonzero component {lv} below {i * e}", trace)
        _certify(cur, lv, e, s, I, oracle, trace)
        K = build_killer(cur.component(lv), lv, e, s, I, oracle, p, D.nvars)
        nxt = compose(cur, K)
        ok = is_logarithmic(nxt, I)
        trace.record("kill_multiple", lv, ell(nxt), ok)
        if not ok or ell(nxt) <= lv:
            _fail(f"killing component {lv} did not raise the order", trace)
        cur = nxt
    killers = []
    for a in range(1, e):
        idx = i * e + a
        imgs = cur.component(idx)
        if imgs != D.component(idx):
            _fail(f"component {idx} changed while clearing lower multiples", trace)
        if not any(imgs):
            continue
        _certify(cur, idx, e, s, I, oracle, trace)
        Ea = build_killer(imgs, idx, e, s, I, oracle, p, D.nvars)
        killers.append(Ea)
        nxt = compose(cur, truncate(Ea, L - 1))
        ok = is_logarithmic(nxt, I)
        trace.record("kill_offmultiple", idx, ell(nxt), ok)
        if not ok or ell(nxt) <= idx:
            _fail(f"killing component {idx} did not raise the order", trace)
        cur = nxt
    if not killers:
        return D
    return compose(D, compose_all(killers))


def compress_integral(D: HSDeriv, e: int, s: int, I: IdealPresentation,
                      oracle: IntegrationOracle, trace: Optional[PipelineTrace] = None) -> HSDeriv:
    """Logarithmic p^s-integral D' of D_e, given an (e*p^s - 1)-logarithmic D
    with l(D) >= e; D'_{p^s} - D_{e p^s} maps I into I."""
    trace = trace if trace is not None else PipelineTrace()
    p = D.p
    L = e * p ** s
    if D.length < L:
        raise BadLength(f"need length {L}, got {D.length}")
    D = truncate(D, L)
    if ell(D) < e:
        raise NotLogEnough(f"first nonzero component {ell(D)} is below {e}")
    _require_log(D, I, L - 1, "input")
    if e == 1:
        return truncate(D, p ** s)
    cur = D
    while True:
        i = ell_e(cur, e)
        if i >= p ** s:
            break
        if s == 1:
            nxt = _kill_round_base(cur, e, i, I, oracle, trace)
            step = "kill_base"
        else:
            nxt = _kill_round(cur, e, s, i, I, oracle, trace)
            step = "kill_round"
        ok = is_logarithmic(nxt, I, L - 1)
        after = ell_e(nxt, e)
        trace.record(step, i, after, ok)
        if not ok or after <= i:
            _fail(f"round at level {i} did not raise the order", trace)
        if any(nxt.component(j * e) != cur.component(j * e) for j in range(1, i + 1)):
            _fail("a cleared round changed a lower multiple of e", trace)
        if not _top_relation(I, nxt, L, cur, L):
            _fail("top component changed by a non-logarithmic operator", trace)
        cur = nxt
    out = compress(cur, e)
    ok = is_logarithmic(out, I, p ** s - 1)
    trace.record("compress", e, out.length, ok)
    if not ok or out.component(1) != D.component(e) or not _top_relation(I, out, p ** s, D, L):
        _fail("compressed integral failed its postconditions", trace)
    return out


# ---------------------------------------------------------------------------
# the leap bridge

def bridge_leap(D: HSDeriv, n: int, I: IdealPresentation, oracle: IntegrationOracle,
                trace: Optional[PipelineTrace] = None) -> HSDeriv:
    """Extend an (n-1)-logarithmic D to a logarithmic n-integral of D_1.

    ``n`` must be a multiple of p that is not a power of p.
    """
    p, k = D.p, D.nvars
    if n < 2 or n % p:
        raise BadN(f"n={n} is not a multiple of {p}; when p does not divide n every "
                   f"(n-1)-integrable derivation is already n-integrable")
    if is_power_of(n, p):
        raise BadN(f"n={n} is a power of {p}; leaps can occur there")
    trace = trace if trace is not None else PipelineTrace()
    t = lowest_digit_index(n, p)
    s = BasePDigits.of(n, p).highest_index
    q = p ** t
    N = (n + 1) * q
    Dn = _fit(truncate(D, min(D.length, n - 1)), n)
    _require_log(Dn, I, n - 1, "input")

    G = gd_pt(Dn, n, p)
    c = binom_int(n, q, p)
    ok = is_logarithmic(G, I, N - 1)
    trace.record("gd_pt", ell(Dn), ell(G), ok)
    if not ok or ell(G) < 2 * q + 1 or not _op_in_ideal(I, [(G, N, 1), (Dn, n, -c)]):
        _fail("gd_pt output failed its order or logarithmicity bounds", trace)

    for j in range(2 * q + 1, n + 1):
        if G.component_is_zero(j):
            continue
        r = cset_max(j, n + 1, t, p)
        if r > s:
            _fail(f"order bound {r} exceeds top digit index {s}", trace)
        if r >= 1:
            sub = compress_integral(truncate(G, j * p ** r), j, r, I, oracle, trace)
            trace.record("certify", j, sub.length, True)
        target = p ** (r + 1) - 1 if r < s else n - 1
        integ = _checked_oracle(oracle, G.component(j), I, target, p, k)
        E = e_dm(integ, j)
        if E.length < N:
            _fail(f"killer for component {j} too short ({E.length} < {N})", trace)
        T = truncate(E, N)
        nxt = compose(T, G)
        ok = is_logarithmic(nxt, I, N - 1)
        trace.record("kill_component", j, ell(nxt), ok)
        if not ok or ell(nxt) <= j or not _top_relation(I, nxt, N, G, N):
            _fail(f"killing component {j} broke an invariant", trace)
        G = nxt

    T_final = compress_integral(G, n + 1, t, I, oracle, trace)
    f = inv_mod(c, p)
    R = truncate(compose(Dn, stretch(scale(-f, T_final), n // q)), n)
    ok = is_logarithmic(R, I, n)
    trace.record("final_compose", ell(Dn), ell(R), ok)
    if not ok or R.component(1) != Dn.component(1):
        _fail("bridged derivation failed its postconditions", trace)
    return R

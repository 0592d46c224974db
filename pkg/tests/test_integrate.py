import pytest

from helpers import curve, integrable_basis, seeded, stacked
from hsleaps.bivariate import CoIdeal2, bi_apply, gd
from hsleaps.errors import (BadLength, BadN, BadTp, NotLogEnough,
                            OracleFailure, WrongCharacteristic)
from hsleaps.hsd import (HSDeriv, apply, compress, ell, ell_e, is_logarithmic, pad_extend,
                         stretch, truncate)
from hsleaps.integrate import (PipelineTrace, SearchOracle, bridge_leap,
                               build_killer, compress_integral, integrate6_char2,
                               integrate_via_tp)
from hsleaps.poly import Poly


@pytest.fixture(scope="module")
def cusp2():
    I, w = curve(2, 2, 3)
    return I, w, SearchOracle(w)


@pytest.fixture(scope="module")
def cusp3():
    I, w = curve(3, 2, 3)
    return I, w, SearchOracle(w)


def test_char2_sixth_on_identity(cusp2):
    I, _, _ = cusp2
    assert integrate6_char2(HSDeriv.identity(2, 2, 5), I).is_identity()


def test_char2_sixth_rejects_bad_input(cusp2, cusp3):
    I, w, _ = cusp2
    with pytest.raises(WrongCharacteristic):
        integrate6_char2(HSDeriv.identity(3, 2, 5), cusp3[0])
    bad = HSDeriv(2, 2, 5, [[None, Poly.var(1, 2, 2)], [None, Poly.one(2, 2)]])
    with pytest.raises(NotLogEnough):
        integrate6_char2(bad, I)


def test_char2_sixth_end_to_end(cusp2):
    I, w, orc = cusp2
    cases = integrable_basis(I, w, 5, range(-3, 6), orc._engine(I))
    assert cases
    for delta, D in cases:
        out = integrate6_char2(D, I)
        assert out.length == 6
        assert is_logarithmic(out, I)
        assert out.component(1) == D.component(1)
        # the inner second component differs from the sixth component of the
        # padded input by an operator preserving I (padding zeroes the images
        # of D_6, not D_6 itself)
        D6 = pad_extend(D, 6)
        G = gd(D6, CoIdeal2.total_degree(6))
        for g in I.generators:
            second = bi_apply(G, (2, 4), g) - bi_apply(G, (1, 1), bi_apply(G, (1, 3), g))
            assert I.in_ideal(second - apply(D6, 6, g))


def test_averaging_on_identity():
    I, _ = curve(3, 2, 3)
    assert integrate_via_tp(HSDeriv.identity(3, 2, 5), 6, I).is_identity()


@pytest.mark.parametrize("n,p", [(4, 2), (9, 3), (8, 2), (25, 5)])
def test_averaging_needs_tp_above_one(n, p):
    I, _ = curve(p, 2, 3)
    with pytest.raises(BadTp):
        integrate_via_tp(HSDeriv.identity(p, 2, n - 1), n, I)


def test_averaging_end_to_end(cusp3):
    I, w, orc = cusp3
    cases = integrable_basis(I, w, 5, range(-3, 6), orc._engine(I))
    assert cases
    for delta, D in cases:
        E = integrate_via_tp(D, 6, I)
        assert E.length == 6 and is_logarithmic(E, I)
        assert E.component(1) == D.component(1)


def test_killer_shapes(cusp2):
    I, w, orc = cusp2
    zero = [Poly.zero(2, 2)] * 2
    K = build_killer(zero, 3, 3, 2, I, orc)
    assert K.is_identity() and K.length == 11
    delta = [Poly.var(0, 2, 2), Poly.zero(2, 2)]
    for m, e, s, length in [(3, 3, 1, 5), (4, 3, 1, 6), (2, 2, 2, 7), (5, 2, 2, 8)]:
        E = build_killer(delta, m, e, s, I, orc)
        assert E.length == length
        assert list(E.component(m)) == [-f for f in delta]
        assert all(E.component_is_zero(j) for j in range(1, length + 1) if j % m)
        assert is_logarithmic(E, I)


def test_killer_rejects_bad_parameters(cusp2):
    I, _, orc = cusp2
    with pytest.raises(ValueError):
        build_killer([Poly.var(0, 2, 2), Poly.zero(2, 2)], 9, 3, 1, I, orc)


def test_compress_integral_trivial_cases(cusp2):
    I, w, orc = cusp2
    rng = seeded(5)
    D = stacked(I, w, 6, 1, rng, engine=orc._engine(I))
    assert compress_integral(D, 1, 2, I, orc) == truncate(D, 4)
    delta, E = integrable_basis(I, w, 2, [0], orc._engine(I))[0]
    S = stretch(E, 3)
    assert ell_e(S, 3) == 2
    assert compress_integral(S, 3, 1, I, orc) == compress(S, 3)


def test_compress_integral_with_kills(cusp2):
    I, w, orc = cusp2
    rng = seeded(11)
    done = 0
    for _ in range(20):
        D = stacked(I, w, 6, 3, rng, engine=orc._engine(I))
        if ell(D) != 3 or ell_e(D, 3) >= 2:
            continue
        tr = PipelineTrace()
        out = compress_integral(D, 3, 1, I, orc, tr)
        assert out.length == 2 and is_logarithmic(out, I, 1)
        assert out.component(1) == D.component(3)
        assert any(step.step == "kill_base" for step in tr.steps)
        done += 1
    assert done >= 3


def test_compress_integral_input_checks(cusp2):
    I, w, orc = cusp2
    with pytest.raises(BadLength):
        compress_integral(HSDeriv.identity(2, 2, 5), 3, 1, I, orc)
    early = HSDeriv(2, 2, 6, [[None, Poly.var(0, 2, 2)], []])
    with pytest.raises(NotLogEnough):
        compress_integral(early, 3, 1, I, orc)


@pytest.mark.parametrize("n", [4, 8, 5, 7, 1])
def test_bridge_rejects_bad_n(cusp2, n):
    I, _, orc = cusp2
    with pytest.raises(BadN):
        bridge_leap(HSDeriv.identity(2, 2, max(n - 1, 1)), n, I, orc)


def test_bridge_end_to_end_p2_n6(cusp2):
    I, w, orc = cusp2
    cases = integrable_basis(I, w, 5, range(-3, 4), orc._engine(I))
    assert cases
    for delta, D in cases:
        tr = PipelineTrace()
        R = bridge_leap(D, 6, I, orc, tr)
        assert R.length == 6 and is_logarithmic(R, I)
        assert R.component(1) == D.component(1)
        assert is_logarithmic(integrate6_char2(D, I), I)
        steps = [s.step for s in tr.steps]
        assert steps[0] == "gd_pt" and steps[-1] == "final_compose"
        assert all(s.log_ok for s in tr.steps)


def test_oracle_failure_is_wrapped():
    # y^2 d/dx on x^2 + y^5 over F_2 integrates to order 7 but not 8
    I5, w5 = curve(2, 2, 5)
    delta = [Poly.monomial((0, 2), 2), Poly.zero(2, 2)]
    with pytest.raises(OracleFailure):
        SearchOracle(w5)(delta, I5, 8)


def test_trace_line_format():
    tr = PipelineTrace()
    tr.record("gd_pt", 2, float("inf"), True)
    tr.record("compress", 3, 4, False)
    assert tr.dump().splitlines() == [
        "step gd_pt ell_before=2 ell_after=inf log_ok=true",
        "step compress ell_before=3 ell_after=4 log_ok=false",
    ]
    assert len(tr) == 2


def test_postcondition_failure_carries_trace(cusp2):
    I, w, _ = cusp2

    def liar(delta, I, M):
        # claims an integral but returns one with the wrong first component
        rows = [[None, Poly.var(0, 2, 2)] + [Poly.zero(2, 2)] * (M - 1),
                [None] + [Poly.zero(2, 2)] * M]
        return HSDeriv(2, 2, M, rows)

    cases = integrable_basis(I, w, 5, range(-1, 2))
    delta, D = next((d, D) for d, D in cases if ell(D) == 1)
    trace = PipelineTrace()
    with pytest.raises(OracleFailure):
        bridge_leap(D, 6, I, liar, trace)
    assert len(trace) >= 1

import math

import mpmath
import pytest

from qso3 import DeformationParam, IntegrityError
from qso3 import matelem as me
from qso3.basis import allowed_L
from qso3.fockrep import build_space
from qso3.verify import CHECKS, Context

mpmath.mp.dps = 40


def mp_raising(lam, L, tau):
    b = lambda x: mpmath.sinh(tau * x) / mpmath.sinh(tau)  # noqa: E731
    return (
        mpmath.exp(tau * (lam - mpmath.mpf(1) / 2)) / b(2) * mpmath.sqrt(b(3) * b(4) / b(2))
        * mpmath.sqrt(b(lam - L) * b(lam + L + 3) * b(2 * L + 4) * b(2 * L + 2) / b(2 * L + 3))
    )


def mp_diagonal(lam, L, tau):
    b = lambda x: mpmath.sinh(tau * x) / mpmath.sinh(tau)  # noqa: E731
    h = mpmath.mpf(1) / 2
    bracket = mpmath.exp(tau * (L - h)) * b(lam - L) + mpmath.exp(tau * (h - L)) * b(lam + L + 3)
    return (
        -mpmath.exp(tau * (lam - h)) / b(2)
        * mpmath.sqrt(b(2 * L) * b(2 * L + 1) * b(2 * L + 2) / (b(2 * L - 1) * b(2 * L + 3)))
        * bracket
    )


def series(fn, lam, L):
    # central finite differences at 40 digits on a tiny step
    return [float(c) for c in mpmath.taylor(lambda t: fn(lam, L, t), mpmath.mpf("1e-30"), 2)]


def test_classical_spot_values():
    p = DeformationParam(0.0)
    assert me.reduced_me(2, 2, 0, p).value == pytest.approx(2 * math.sqrt(10), rel=1e-8)
    assert me.reduced_me(2, 2, 2, p).value == pytest.approx(-8.36660026534076, rel=1e-7)
    assert me.reduced_me(4, 2, 0, p).value == pytest.approx(math.sqrt(112), rel=1e-12)
    assert me.be2(4, 0, p).value == pytest.approx(22.4, rel=1e-8)
    assert me.reduced_me(4, 0, 0, p).value == 0.0


def test_lowering_element_uses_symmetry():
    p = DeformationParam(0.3)
    assert me.reduced_me(6, 2, 4, p).value == me.reduced_me(6, 4, 2, p).value


@pytest.mark.parametrize(
    "call",
    [
        lambda: me.reduced_me_raising(4, 4, 0.1),
        lambda: me.reduced_me(4, 4, 0, 0.1),
        lambda: me.reduced_me_diagonal(4, 3, 0.1),
        lambda: me.ReducedMERecord(4, 3, 0, 0.1, 1.0),
        lambda: me.BE2Record(4, 0, 0.1, -1.0),
    ],
)
def test_invalid_requests(call):
    with pytest.raises(ValueError):
        call()


@pytest.mark.parametrize("lam,L", [(2, 0), (4, 2), (9, 3), (12, 10)])
def test_raising_taylor_coefficients(lam, L):
    assert me.taylor_raising(lam, L) == pytest.approx(series(mp_raising, lam, L), rel=1e-9)


@pytest.mark.parametrize("lam,L", [(1, 1), (4, 2), (9, 5), (12, 12)])
def test_diagonal_taylor_coefficients(lam, L):
    assert me.taylor_diagonal(lam, L) == pytest.approx(series(mp_diagonal, lam, L), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("lam,L", [(5, 1), (8, 6), (11, 3)])
def test_closed_forms_match_high_precision(lam, L):
    for tau in (-0.4, 0.25):
        assert me.reduced_me_raising(lam, L, tau).value == pytest.approx(float(mp_raising(lam, L, tau)), rel=1e-12)
        assert me.reduced_me_diagonal(lam, L, tau).value == pytest.approx(
            float(mp_diagonal(lam, L, tau)), rel=1e-12
        )


@pytest.mark.parametrize("lam", [3, 8])
def test_stretched_diagonal_is_even_in_tau(lam):
    # the linear coefficient carries lam(lam+1) - L(L+1), zero at L = lam
    assert me.taylor_diagonal(lam, lam)[1] == 0.0
    for tau in (0.05, 0.4):
        assert me.reduced_me_diagonal(lam, lam, tau).value == pytest.approx(
            me.reduced_me_diagonal(lam, lam, -tau).value, rel=1e-12
        )


def test_classical_limit_matches_constants():
    for lam in range(13):
        for L in allowed_L(lam):
            if L + 2 <= lam:
                assert me.reduced_me_raising(lam, L, 1e-12).value == pytest.approx(
                    me.taylor_raising(lam, L)[0], rel=1e-8
                )
            if L:
                assert me.reduced_me_diagonal(lam, L, 1e-12).value == pytest.approx(
                    me.taylor_diagonal(lam, L)[0], rel=1e-8
                )


def test_signs_over_tau_range():
    for tau in (-0.5, -0.2, 0.0, 0.3, 0.5):
        for lam in range(2, 13):
            for L in allowed_L(lam):
                if L + 2 <= lam:
                    assert me.reduced_me_raising(lam, L, tau).value > 0
                if L >= 2:
                    assert me.reduced_me_diagonal(lam, L, tau).value < 0


def test_oracle_examples():
    p = DeformationParam(0.0)
    rec = me.reduced_me_oracle(2, 2, 0, p)
    assert rec.source == "oracle"
    assert rec.value == pytest.approx(2 * math.sqrt(10), rel=1e-10)
    assert me.reduced_me_oracle(2, 0, 2, p).value == pytest.approx(rec.value, rel=1e-10)
    p = DeformationParam(0.3)
    assert me.reduced_me_oracle(1, 1, 1, p).value == pytest.approx(me.reduced_me_diagonal(1, 1, p).value, rel=1e-9)


def test_oracle_rejects_unreachable_pairs():
    with pytest.raises(ValueError):
        me.reduced_me_oracle(4, 0, 0, DeformationParam(0.2))
    with pytest.raises(ValueError):
        me.reduced_me_oracle(4, 4, 0, DeformationParam(0.2))


def test_oracle_flags_inconsistent_channels(monkeypatch):
    p = DeformationParam(0.2)
    real = me.wigner_eckart_factor
    monkeypatch.setattr(me, "wigner_eckart_factor", lambda *a, **k: real(*a, **k) * (1 + 0.01 * a[1]))
    with pytest.raises(IntegrityError):
        me.reduced_me_oracle(4, 2, 2, p, all_channels=True)


def test_full_matrix_element_matches_oracle():
    p = DeformationParam(0.25)
    oracle = me.FockOracle(build_space(12), p)
    for Lp, Mp, m, L, M in [(4, 3, 1, 2, 2), (2, -1, -1, 2, 0), (0, 0, -2, 2, 2), (4, 0, -2, 4, 2)]:
        expect = me.full_me_from_reduced(6, Lp, Mp, m, L, M, p)
        got = oracle.matrix_element(6, Lp, Mp, m, L, M)
        assert got == pytest.approx(expect, rel=1e-8, abs=1e-12)


def test_expansion_coefficients_from_oracle():
    p = DeformationParam(-0.2)
    a, b, rest = me.coefficients_from_oracle(6, 2, p)
    assert a == pytest.approx(me.coeff_a(6, 2, p), rel=1e-10)
    assert b == pytest.approx(me.coeff_b(6, 2, p), rel=1e-10)
    assert rest < 1e-12


MATELEM = [c for c in CHECKS if c.group in ("matelem", "qcg")]


@pytest.fixture(scope="module", params=[-0.3, -0.1, 0.0, 0.1, 0.3, 0.5])
def ctx(request):
    return Context(12, request.param)


@pytest.mark.parametrize("check", MATELEM, ids=lambda c: c.name.replace(" ", "_"))
def test_matelem_checks(check, ctx):
    assert check.fn(ctx) <= check.tol

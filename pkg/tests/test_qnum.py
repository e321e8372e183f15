import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qso3 import (
    DeformationParam,
    q_binomial,
    q_double_factorial,
    q_factorial,
    q_number,
    q_number_scaled,
)

mpmath.mp.dps = 40

taus = st.floats(-2.0, 2.0, allow_nan=False)
xs = st.floats(-20.0, 20.0, allow_nan=False)


def mp_bracket(x, tau):
    if tau == 0:
        return mpmath.mpf(x)
    return mpmath.sinh(mpmath.mpf(tau) * x) / mpmath.sinh(mpmath.mpf(tau))


# values recomputed at 40 digits with mpmath and frozen here
FROZEN = [
    (lambda: q_number(3, 0.2), 3.16214474367691),
    (lambda: q_number_scaled(2, 2, 0.1), 2.04013351123815),
    (lambda: q_factorial(3, 0.2), 6.45119745896084),
    (lambda: q_double_factorial(4, 0.2), 8.99915937996351),
    (lambda: math.sqrt(q_number(3, 0.2)), 1.77824203742823),
    (lambda: q_binomial(2, 1, 2, 0.1), 2.04013351123815),
]


@pytest.mark.parametrize("fn,expected", FROZEN)
def test_frozen_values(fn, expected):
    assert fn() == pytest.approx(expected, rel=1e-13)


def test_classical_values_are_plain_integers():
    assert q_number(5, 0.0) == 5.0
    assert q_factorial(5, 0.0) == 120.0
    assert q_double_factorial(7, 0.0) == 105.0
    assert q_binomial(6, 2, 1, 0.0) == 15.0


def test_double_factorial_empty_products():
    for tau in (0.0, 0.4):
        assert q_double_factorial(0, tau) == 1.0
        assert q_double_factorial(-1, tau) == 1.0


def test_tiny_tau_is_treated_as_classical():
    assert DeformationParam(1e-13).classical
    assert q_number(3, 1e-13) == 3.0
    assert not DeformationParam(1e-11).classical


@pytest.mark.parametrize(
    "call",
    [
        lambda: q_factorial(-1, 0.1),
        lambda: q_factorial(2.5, 0.1),
        lambda: q_double_factorial(-2, 0.1),
        lambda: q_binomial(2, 3, 1, 0.1),
        lambda: q_number(float("inf"), 0.1),
        lambda: DeformationParam(float("nan")),
    ],
)
def test_domain_errors(call):
    with pytest.raises(ValueError):
        call()


def test_param_helpers():
    p = DeformationParam(0.3)
    assert p.q == pytest.approx(math.exp(0.3))
    assert p.power(2.5) == pytest.approx(math.exp(0.75))
    assert p.scaled(2).tau == pytest.approx(0.6)
    assert p.inverted().tau == -0.3


@given(xs, taus)
def test_bracket_matches_high_precision(x, tau):
    expected = float(mp_bracket(x, tau)) if abs(tau) >= 1e-12 else x
    assert q_number(x, tau) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(xs, taus)
def test_bracket_is_odd_and_invariant_under_inversion(x, tau):
    v = q_number(x, tau)
    assert q_number(-x, tau) == pytest.approx(-v, rel=1e-13, abs=1e-13)
    assert q_number(x, -tau) == pytest.approx(v, rel=1e-13, abs=1e-13)


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-1, 1))
def test_addition_rule(x, y, tau):
    # [x+y] = q^y [x] + q^{-x} [y]
    p = DeformationParam(tau)
    lhs = q_number(x + y, p)
    rhs = p.power(y) * q_number(x, p) + p.power(-x) * q_number(y, p)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@given(st.integers(0, 25), taus)
def test_factorial_recursion(n, tau):
    assert q_factorial(n + 1, tau) == pytest.approx(q_factorial(n, tau) * q_number(n + 1, tau), rel=1e-12)


@given(st.integers(0, 25), taus)
def test_double_factorials_compose_factorial(n, tau):
    assert q_double_factorial(n, tau) * q_double_factorial(n - 1, tau) == pytest.approx(
        q_factorial(n, tau), rel=1e-12
    )


@settings(max_examples=60)
@given(st.integers(1, 20), st.data(), st.floats(-1, 1), st.sampled_from([1, 2, 0.5]))
def test_binomial_pascal_rule(k, data, tau, s):
    t = data.draw(st.integers(1, k))
    p = DeformationParam(tau)
    # [k, t] = q^{k-t}[k-1, t-1] + q^{-t}[k-1, t] in base q^s
    lhs = q_binomial(k, t, s, p)
    rhs = p.power(s * (k - t)) * q_binomial(k - 1, t - 1, s, p)
    if t < k:
        rhs += p.power(-s * t) * q_binomial(k - 1, t, s, p)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert lhs == pytest.approx(q_binomial(k, k - t, s, p), rel=1e-12)

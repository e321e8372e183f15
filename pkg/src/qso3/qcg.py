"""Clebsch-Gordan coefficients of su_q(2) / so_q(3) for real q.

Base-q coefficients (``base_inverted=False``) couple vectors under the
coproduct ``D(J+-) = J+- (x) q^J0 + q^-J0 (x) J+-``; base-inverted ones are
the same coefficients at ``q -> 1/q``.  The closed q-Racah sum is in
:func:`qcg`; :func:`coupled_basis_oracle` rebuilds the same numbers by
taking the kernel of the coupled raising operator and lowering from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .qnum import DeformationParam, as_param, q_factorial, q_number

__all__ = [
    "CGKey",
    "qcg",
    "qcg_column",
    "coupled_basis_oracle",
    "spin_matrices",
]


def _twice(x, name: str) -> int:
    two = Fraction(x) * 2
    if two.denominator != 1:
        raise ValueError(f"{name}={x!r} is not a half-integer")
    return int(two)


@dataclass(frozen=True)
class CGKey:
    """Quantum numbers of ``C^{J M}_{j1 m1, j2 m2}``; stored as doubled ints."""

    j1: float
    m1: float
    j2: float
    m2: float
    J: float
    M: float
    base_inverted: bool = False

    def __post_init__(self):
        for name in ("j1", "m1", "j2", "m2", "J", "M"):
            _twice(getattr(self, name), name)
        pairs = ((self.j1, self.m1), (self.j2, self.m2), (self.J, self.M))
        for j, m in pairs:
            tj, tm = _twice(j, "j"), _twice(m, "m")
            if tj < 0:
                raise ValueError(f"negative angular momentum {j}")
            if abs(tm) > tj:
                raise ValueError(f"|m|={abs(m)} exceeds j={j}")
            if (tj - tm) % 2:
                raise ValueError(f"m={m} and j={j} differ by a half-integer")

    def doubled(self) -> tuple[int, ...]:
        return tuple(
            _twice(getattr(self, n), n) for n in ("j1", "m1", "j2", "m2", "J", "M")
        )


def _triangle(tj1: int, tj2: int, tJ: int) -> bool:
    return abs(tj1 - tj2) <= tJ <= tj1 + tj2 and (tj1 + tj2 + tJ) % 2 == 0


def _racah_sum(tj1, tm1, tj2, tm2, tJ, tM, p: DeformationParam) -> float:
    # doubled arguments; every combination below is an integer
    j1p, j1m = (tj1 + tm1) // 2, (tj1 - tm1) // 2
    j2p, j2m = (tj2 + tm2) // 2, (tj2 - tm2) // 2
    Jp, Jm = (tJ + tM) // 2, (tJ - tM) // 2
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tj2 + tJ) // 2
    c = (-tj1 + tj2 + tJ) // 2
    s = (tj1 + tj2 + tJ) // 2 + 1

    f = lambda n: q_factorial(n, p)  # noqa: E731
    delta = math.sqrt(f(a) * f(b) * f(c) / f(s))
    norm = math.sqrt(
        q_number(tJ + 1, p) * f(j1p) * f(j1m) * f(j2p) * f(j2m) * f(Jp) * f(Jm)
    )
    # q^{(j1+j2-J)(j1+j2+J+1)/2 + j1 m2 - j2 m1}
    phase_exp = a * s / 2 + (tj1 * tm2 - tj2 * tm1) / 4
    total = 0.0
    zmin = max(0, (tj2 - tJ - tm1) // 2, (tj1 - tJ + tm2) // 2)
    zmax = min(a, j1m, j2p)
    for z in range(zmin, zmax + 1):
        denom = (
            f(z)
            * f(a - z)
            * f(j1m - z)
            * f(j2p - z)
            * f((tJ - tj2 + tm1) // 2 + z)
            * f((tJ - tj1 - tm2) // 2 + z)
        )
        total += (-1) ** z * p.power(-z * s) / denom
    return p.power(phase_exp) * delta * norm * total


@lru_cache(maxsize=None)
def _qcg_cached(doubled: tuple[int, ...], base_inverted: bool, tau: float) -> float:
    tj1, tm1, tj2, tm2, tJ, tM = doubled
    if tm1 + tm2 != tM or not _triangle(tj1, tj2, tJ):
        return 0.0
    p = DeformationParam(-tau if base_inverted else tau)
    return _racah_sum(tj1, tm1, tj2, tm2, tJ, tM, p)


def qcg(key: CGKey, p: DeformationParam) -> float:
    """Coefficient ``C^{J M}_{j1 m1, j2 m2}`` (zero off the selection rules)."""
    return _qcg_cached(key.doubled(), bool(key.base_inverted), as_param(p).tau)


@lru_cache(maxsize=None)
def _column_cached(tj1, tj2, tJ, tM, base_inverted, tau):
    if not _triangle(tj1, tj2, tJ) or abs(tM) > tJ or (tJ - tM) % 2:
        return ()
    out = []
    for tm1 in range(tj1, -tj1 - 1, -2):
        tm2 = tM - tm1
        if abs(tm2) > tj2:
            continue
        c = _qcg_cached((tj1, tm1, tj2, tm2, tJ, tM), base_inverted, tau)
        if c != 0.0:
            out.append((tm1 / 2, tm2 / 2, c))
    return tuple(out)


def qcg_column(j1, j2, J, M, base_inverted: bool, p: DeformationParam):
    """All nonzero ``(m1, m2, C)`` for fixed ``(J, M)``; empty off the triangle."""
    return list(
        _column_cached(
            _twice(j1, "j1"),
            _twice(j2, "j2"),
            _twice(J, "J"),
            _twice(M, "M"),
            bool(base_inverted),
            as_param(p).tau,
        )
    )


def spin_matrices(j, p: DeformationParam):
    """``(ms, J+, q^J0)`` on the spin-j irrep, rows ordered m = j, j-1, ..., -j."""
    p = as_param(p)
    tj = _twice(j, "j")
    ms = [(tj - 2 * k) / 2 for k in range(tj + 1)]
    raise_ = np.zeros((tj + 1, tj + 1))
    for k in range(1, tj + 1):
        m = ms[k]
        raise_[k - 1, k] = math.sqrt(q_number(j - m, p) * q_number(j + m + 1, p))
    kq = np.diag([p.power(m) for m in ms])
    return ms, raise_, kq


def coupled_basis_oracle(j1, j2, base_inverted: bool, p: DeformationParam):
    """Coupled basis of ``V_j1 (x) V_j2`` built from kernels of the coupled raising operator.

    Returns ``(pairs, vectors)`` where ``pairs`` lists the product states
    ``(m1, m2)`` and ``vectors[(J, M)]`` holds the coefficients over them.
    Phase: the ``m1 = j1`` component of each highest-weight vector is positive.
    """
    p = as_param(p)
    if base_inverted:
        p = p.inverted()
    ms1, r1, k1 = spin_matrices(j1, p)
    ms2, r2, k2 = spin_matrices(j2, p)
    raise_ = np.kron(r1, k2) + np.kron(np.linalg.inv(k1), r2)
    lower = raise_.T
    pairs = [(a, b) for a in ms1 for b in ms2]
    weights = np.array([a + b for a, b in pairs])
    vectors = {}
    J = j1 + j2
    while J >= abs(j1 - j2) - 1e-9:
        sel = np.flatnonzero(np.abs(weights - J) < 1e-9)
        _, _, vt = np.linalg.svd(raise_[:, sel])
        v = np.zeros(len(pairs))
        v[sel] = vt[-1]
        top = next(i for i in sel if abs(pairs[i][0] - j1) < 1e-9)
        if v[top] < 0:
            v = -v
        v /= np.linalg.norm(v)
        M = J
        vectors[(J, M)] = v
        while M > -J + 1e-9:
            v = lower @ v / math.sqrt(q_number(J + M, p) * q_number(J - M + 1, p))
            M -= 1
            vectors[(J, M)] = v
        J -= 1
    return pairs, vectors

"""Orthonormal so_q(3) basis |lambda; L M> of the symmetric irrep [lambda, 0, 0].

Two independent constructions: :func:`basis_state_lowering` acts with the
matrix operators (L- powers, then S+ powers) on the highest-weight state;
:func:`basis_state_explicit` evaluates the closed double sum over Fock
monomials without touching any matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError
from .fockrep import FockSpace, FockState, SectorOperator, modified_boson, q_boson
from .fockrep import q_power, scalar_ops, so3_generators
from .qnum import DeformationParam, as_param, q_double_factorial, q_factorial, q_number

__all__ = [
    "BasisVector",
    "check_labels",
    "allowed_L",
    "highest_weight_state",
    "normalization_constant",
    "basis_state_lowering",
    "basis_state_explicit",
    "monomial_amplitude",
    "splus_power_expansion",
    "full_basis",
]

ZERO_CUT = 1e-14


@dataclass(frozen=True)
class BasisVector:
    lam: int
    L: int
    M: int
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def from_array(cls, space: FockSpace, lam, L, M, vec: np.ndarray) -> "BasisVector":
        states = space.sectors[lam]
        coeffs = {s: float(c) for s, c in zip(states, vec) if abs(c) > ZERO_CUT}
        return cls(lam, L, M, coeffs)

    def to_array(self, space: FockSpace) -> np.ndarray:
        if self.lam > space.nmax:
            raise CapacityError(f"lambda={self.lam} exceeds nmax={space.nmax}")
        v = np.zeros(space.dim(self.lam))
        for s, c in self.coeffs.items():
            v[space.index(s)] = c
        return v

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self.coeffs.values()))

    def rows(self):
        """``(nplus, nzero, nminus, coeff)`` in lexicographic state order."""
        return [(*s, c) for s, c in sorted(self.coeffs.items())]


def check_labels(lam: int, L: int, M: int | None = None):
    if lam < 0 or L < 0 or L > lam:
        raise ValueError(f"need lambda >= L >= 0, got lambda={lam}, L={L}")
    if (lam - L) % 2:
        raise ValueError(f"lambda - L must be even, got lambda={lam}, L={L}")
    if M is not None and abs(M) > L:
        raise ValueError(f"need |M| <= L, got M={M}, L={L}")


def allowed_L(lam: int) -> list[int]:
    """``L = lambda, lambda-2, ..., 1 or 0``."""
    return list(range(lam, -1, -2))


def _need(space: FockSpace, N: int):
    if N > space.nmax:
        raise CapacityError(f"sector {N} exceeds nmax={space.nmax}")


def highest_weight_state(L: int, space: FockSpace, p: DeformationParam) -> BasisVector:
    """``(b+^dagger)^L / sqrt([L]!) |0>``, cross-checked against the B+ form."""
    p = as_param(p)
    _need(space, L)
    vac = space.basis_vector(FockState(0, 0, 0))
    bp = q_boson("+", True, space, p)
    Bp = modified_boson("+", True, space, p)
    v, w = vac, vac
    for N in range(L):
        v = bp.apply(v, N)
        w = Bp.apply(w, N)
    v = v / math.sqrt(q_factorial(L, p))
    w = w * p.power(-L * L / 2) / math.sqrt(q_double_factorial(2 * L, p))
    if np.abs(v - w).max() > 1e-10 * max(1.0, np.abs(v).max()):
        raise ArithmeticError("highest-weight constructions disagree")
    return BasisVector.from_array(space, L, L, L, v)


def normalization_constant(lam: int, L: int, p: DeformationParam) -> float:
    """``sqrt([lam-L]!! [lam+L+1]!! / [2L+1]!!)``."""
    check_labels(lam, L)
    return math.sqrt(
        q_double_factorial(lam - L, p)
        * q_double_factorial(lam + L + 1, p)
        / q_double_factorial(2 * L + 1, p)
    )


def basis_state_lowering(
    lam: int, L: int, M: int, space: FockSpace, p: DeformationParam, ops=None
) -> BasisVector:
    """``sqrt([L+M]!/([2L]![L-M]!)) (S+)^k (L-)^{L-M} |L L> / N_{lam L}``, k = (lam-L)/2.

    Built with the matrix operators, so it is independent of the closed form.
    """
    check_labels(lam, L, M)
    p = as_param(p)
    _need(space, lam)
    if ops is None:
        Sp = scalar_ops(space, p).Splus
        Lm = so3_generators(space, p)[2]
    else:
        Sp, Lm = ops
    # lower first: L- on the single Fock state |L,0,0> only adds positive terms,
    # and S+ commutes with L-
    v = highest_weight_state(L, space, p).to_array(space)
    for _ in range(L - M):
        v = Lm.apply(v, L)
    v = v * math.sqrt(
        q_factorial(L + M, p) / (q_factorial(2 * L, p) * q_factorial(L - M, p))
    )
    N = L
    for _ in range((lam - L) // 2):
        v = Sp.apply(v, N)
        N += 2
    v = v / normalization_constant(lam, L, p)
    return BasisVector.from_array(space, lam, L, M, v)


def monomial_amplitude(x: int, y: int, z: int, p: DeformationParam) -> float:
    """Coefficient of |x, y, z> in ``(B+^+)^x (B0^+)^y (B-^+)^z |0>``."""
    return (
        math.sqrt(q_double_factorial(2 * x, p) * q_double_factorial(2 * z, p))
        * p.power((x * x + z * z) / 2)
        * math.sqrt(q_factorial(y, p))
        * p.power(-y * (y - 1) / 4)
    )


def basis_state_explicit(lam: int, L: int, M: int, p: DeformationParam) -> BasisVector:
    """Closed polynomial form; the result is not renormalised."""
    check_labels(lam, L, M)
    p = as_param(p)
    dfac = lambda n: q_double_factorial(n, p)  # noqa: E731
    fac = lambda n: q_factorial(n, p)  # noqa: E731
    pre = p.power((lam - L) * (lam + L + 1) / 4 - M * M / 2) * math.sqrt(
        fac(L + M) * fac(L - M) * dfac(lam - L) * q_number(2 * L + 1, p) / dfac(lam + L + 1)
    )
    coeffs: dict[FockState, float] = {}
    for t in range((lam - L) // 2 + 1):
        wt = (-1) ** t * p.power(-(lam + L + 1) * t) / (dfac(2 * t) * dfac(lam - L - 2 * t))
        for s in range(max(0, M), (L + M) // 2 + 1):
            x, y, z = s + t, lam + M - 2 * s - 2 * t, s + t - M
            term = wt / (dfac(2 * s) * fac(L + M - 2 * s) * dfac(2 * s - 2 * M))
            state = FockState(x, y, z)
            coeffs[state] = coeffs.get(state, 0.0) + pre * term * monomial_amplitude(x, y, z, p)
    coeffs = {st: c for st, c in coeffs.items() if abs(c) > ZERO_CUT}
    return BasisVector(lam, L, M, coeffs)


def splus_power_expansion(k: int, space: FockSpace, p: DeformationParam) -> SectorOperator:
    """``(S+)^k`` as the explicit t-sum over ``(B+^+)^t (B0^+)^{2(k-t)} (B-^+)^t q^{(k-2t)N}``."""
    p = as_param(p)
    if k < 0:
        raise ValueError("k must be >= 0")
    if 2 * k > space.nmax:
        raise CapacityError(f"(S+)^{k} leaves nmax={space.nmax}")
    if k == 0:
        return space.identity()
    Bp = modified_boson("+", True, space, p)
    B0 = modified_boson("0", True, space, p)
    Bm = modified_boson("-", True, space, p)
    pre = p.power(k * (k + 0.5)) * q_double_factorial(2 * k, p)
    total = None
    for t in range(k + 1):
        c = (-1) ** t * p.power(-(2 * k + 1) * t) / (
            q_double_factorial(2 * t, p) * q_double_factorial(2 * k - 2 * t, p)
        )
        term = Bp.power(t) @ B0.power(2 * (k - t)) @ Bm.power(t)
        term = (pre * c) * (term @ q_power(space, p, k - 2 * t, k - 2 * t, k - 2 * t))
        total = term if total is None else total + term
    return total


def full_basis(lam: int, space: FockSpace, p: DeformationParam, route: str = "explicit"):
    """Every ``|lam; L M>`` in the sector, ordered by descending L then descending M."""
    p = as_param(p)
    ops = None
    if route == "lowering":
        ops = (scalar_ops(space, p).Splus, so3_generators(space, p)[2])
    elif route != "explicit":
        raise ValueError(f"route must be 'explicit' or 'lowering', got {route!r}")
    out = []
    for L in allowed_L(lam):
        for M in range(L, -L - 1, -1):
            if route == "explicit":
                out.append(basis_state_explicit(lam, L, M, p))
            else:
                out.append(basis_state_lowering(lam, L, M, space, p, ops))
    return out

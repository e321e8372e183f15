"""Reduced matrix elements of the q-deformed quadrupole operator and B(E2) factors.

Closed forms live next to a Fock-space oracle that extracts the same
numbers from explicit matrices through the q-deformed Wigner-Eckart theorem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import allowed_L, basis_state_lowering, check_labels
from .errors import IntegrityError
from .fockrep import FockSpace, build_space, coupled_tensor, scalar_ops, so3_generators
from .fockrep import vector_ops
from .qcg import CGKey, qcg
from .qnum import DeformationParam, as_param, q_number

__all__ = [
    "ReducedMERecord",
    "BE2Record",
    "coeff_a",
    "coeff_b",
    "reduced_me_raising",
    "reduced_me_diagonal",
    "reduced_me",
    "be2",
    "taylor_raising",
    "taylor_diagonal",
    "taylor_eval",
    "full_me_from_reduced",
    "wigner_eckart_factor",
    "FockOracle",
    "reduced_me_oracle",
    "oracle_channels",
    "coefficients_from_oracle",
    "symmetry_via_cg",
    "all_pairs",
    "ORACLE_TOL",
    "CHANNEL_TOL",
]

ORACLE_TOL = 1e-8
CHANNEL_TOL = 1e-9
# channels whose Wigner-Eckart factor is below this fraction of the largest
# one are ill-conditioned in double precision and are skipped
MIN_CG = 1e-4


@dataclass(frozen=True)
class ReducedMERecord:
    lam: int
    L_final: int
    L_initial: int
    tau: float
    value: float
    source: str = "closed_form"

    def __post_init__(self):
        if self.L_final - self.L_initial not in (-2, 0, 2):
            raise ValueError("quadrupole only connects L' = L, L +- 2")
        if (self.lam - self.L_final) % 2 or (self.lam - self.L_initial) % 2:
            raise ValueError("parity of L must match lambda")


@dataclass(frozen=True)
class BE2Record:
    lam: int
    L: int
    tau: float
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("B(E2) cannot be negative")


def _bracket(p):
    return lambda x: q_number(x, p)


def _check_raising(lam: int, L: int):
    check_labels(lam, L)
    if L + 2 > lam:
        raise ValueError(f"no L+2 = {L + 2} state in lambda = {lam}")


def coeff_a(lam: int, L: int, p: DeformationParam) -> float:
    """Weight of ``|lam; L+2 L>`` in ``A^2_0 |lam; L L>``."""
    _check_raising(lam, L)
    p = as_param(p)
    b = _bracket(p)
    return (
        p.power(lam - 2 * L - 0.5)
        / b(2 * L + 3)
        * math.sqrt(b(3) * b(4) / b(2))
        * math.sqrt(b(lam - L) * b(lam + L + 3) * b(2 * L + 2) / (b(2) * b(2 * L + 5)))
    )


def _diag_bracket(lam, L, p):
    b = _bracket(p)
    return p.power(L - 0.5) * b(lam - L) + p.power(-L + 0.5) * b(lam + L + 3)


def coeff_b(lam: int, L: int, p: DeformationParam) -> float:
    """Weight of ``|lam; L L>`` in ``A^2_0 |lam; L L>``."""
    check_labels(lam, L)
    p = as_param(p)
    b = _bracket(p)
    return (
        -p.power(lam + 2.5)
        * b(2 * L)
        / (b(2) * b(2 * L + 3))
        * math.sqrt(b(2) / (b(3) * b(4)))
        * _diag_bracket(lam, L, p)
    )


def reduced_me_raising(lam: int, L: int, p: DeformationParam) -> ReducedMERecord:
    """``<lam, L+2 || Q^2 || lam, L>``."""
    _check_raising(lam, L)
    p = as_param(p)
    b = _bracket(p)
    value = (
        p.power(lam - 0.5)
        / b(2)
        * math.sqrt(b(3) * b(4) / b(2))
        * math.sqrt(b(lam - L) * b(lam + L + 3) * b(2 * L + 4) * b(2 * L + 2) / b(2 * L + 3))
    )
    return ReducedMERecord(lam, L + 2, L, p.tau, value)


def reduced_me_diagonal(lam: int, L: int, p: DeformationParam) -> ReducedMERecord:
    """``<lam, L || Q^2 || lam, L>``; vanishes at L = 0."""
    check_labels(lam, L)
    p = as_param(p)
    if L == 0:
        return ReducedMERecord(lam, 0, 0, p.tau, 0.0)
    b = _bracket(p)
    value = (
        -p.power(lam - 0.5)
        / b(2)
        * math.sqrt(b(2 * L) * b(2 * L + 1) * b(2 * L + 2) / (b(2 * L - 1) * b(2 * L + 3)))
        * _diag_bracket(lam, L, p)
    )
    return ReducedMERecord(lam, L, L, p.tau, value)


def reduced_me(lam: int, Lp: int, L: int, p: DeformationParam) -> ReducedMERecord:
    """Any nonzero closed form; ``L' = L - 2`` uses ``<L||Q||L+2> = <L+2||Q||L>``."""
    p = as_param(p)
    if Lp == L + 2:
        return reduced_me_raising(lam, L, p)
    if Lp == L:
        return reduced_me_diagonal(lam, L, p)
    if Lp == L - 2:
        up = reduced_me_raising(lam, Lp, p)
        return ReducedMERecord(lam, Lp, L, p.tau, up.value)
    raise ValueError(f"quadrupole does not connect L={L} to L'={Lp}")


def be2(lam: int, L: int, p: DeformationParam) -> BE2Record:
    """``B[E2; (lam, L+2) -> (lam, L)] = |<lam,L+2||Q^2||lam,L>|^2 / [2L+5]``."""
    p = as_param(p)
    rme = reduced_me_raising(lam, L, p).value
    return BE2Record(lam, L, p.tau, rme * rme / q_number(2 * L + 5, p))


def taylor_raising(lam: int, L: int) -> tuple[float, float, float]:
    """Coefficients of ``tau^0, tau^1, tau^2`` for the raising element."""
    _check_raising(lam, L)
    c0 = math.sqrt(6 * (lam - L) * (lam + L + 3) * (L + 2) * (L + 1) / (2 * L + 3))
    return c0, c0 * (lam - 0.5), c0 * (2 * lam**2 / 3 + L**2 / 2 + 1.5 * L + 65 / 24)


def taylor_diagonal(lam: int, L: int) -> tuple[float, float, float]:
    """Coefficients of ``tau^0, tau^1, tau^2`` for the diagonal element."""
    check_labels(lam, L)
    if L == 0:
        return 0.0, 0.0, 0.0
    c0 = -(2 * lam + 3) * math.sqrt(L * (L + 1) * (2 * L + 1) / ((2 * L - 1) * (2 * L + 3)))
    c1 = c0 * 2 * (lam * (lam + 1) - L * (L + 1)) / (2 * lam + 3)
    c2 = c0 * (
        (2 * lam + 15) * L * (L + 1) + (2 * lam + 1) * (2 * lam**2 + 2 * lam + 3)
    ) / (3 * (2 * lam + 3))
    return c0, c1, c2


def taylor_eval(coeffs, tau: float) -> float:
    c0, c1, c2 = coeffs
    return c0 + c1 * tau + c2 * tau * tau


def wigner_eckart_factor(Lp, Mp, m, L, M, p: DeformationParam, rank: int = 2) -> float:
    """``(-1)^{2j} C^{L'M'}_{LM, jm} / sqrt([2L'+1])``."""
    p = as_param(p)
    if M + m != Mp or abs(M) > L or abs(Mp) > Lp or abs(m) > rank:
        return 0.0
    c = qcg(CGKey(L, M, rank, m, Lp, Mp), p)
    return (-1) ** (2 * rank) * c / math.sqrt(q_number(2 * Lp + 1, p))


def full_me_from_reduced(lam, Lp, Mp, m, L, M, p: DeformationParam) -> float:
    """``<lam; L'M'| Q^2_m |lam; L M>`` from the closed reduced element."""
    p = as_param(p)
    check_labels(lam, Lp, Mp)
    check_labels(lam, L, M)
    if abs(Lp - L) > 2 or (Lp == L == 0):
        return 0.0
    factor = wigner_eckart_factor(Lp, Mp, m, L, M, p)
    if factor == 0.0:
        return 0.0
    return factor * reduced_me(lam, Lp, L, p).value


class FockOracle:
    """Caches the matrix operators and basis vectors for one ``(nmax, tau)``."""

    def __init__(self, space: FockSpace, p: DeformationParam):
        self.space = space
        self.p = as_param(p)
        vectors = vector_ops(space, self.p)
        self.A2 = coupled_tensor(2, space, self.p, vectors)
        s = math.sqrt(q_number(3, self.p) * q_number(4, self.p) / q_number(2, self.p))
        self.Q2 = {M: s * op for M, op in self.A2.items()}
        self._ladder = (scalar_ops(space, self.p).Splus, so3_generators(space, self.p)[2])
        self._states: dict = {}

    def state(self, lam: int, L: int, M: int) -> np.ndarray:
        key = (lam, L, M)
        if key not in self._states:
            vec = basis_state_lowering(lam, L, M, self.space, self.p, self._ladder)
            self._states[key] = vec.to_array(self.space)
        return self._states[key]

    def matrix_element(self, lam, Lp, Mp, m, L, M) -> float:
        return float(self.state(lam, Lp, Mp) @ self.Q2[m].apply(self.state(lam, L, M), lam))


def _oracle_for(lam, p, space, oracle):
    if oracle is not None:
        return oracle
    if space is None:
        space = build_space(max(12, lam + 2))
    return FockOracle(space, p)


def oracle_channels(lam, Lp, L, p, space=None, oracle=None) -> dict:
    """Reduced element extracted from every well-conditioned ``(M, m, M')`` channel.

    A channel is used when its Wigner-Eckart factor is at least ``MIN_CG``
    times the largest factor for the same ``(L', L)``.
    """
    check_labels(lam, Lp)
    check_labels(lam, L)
    p = as_param(p)
    factors = {}
    for M in range(-L, L + 1):
        for m in range(-2, 3):
            Mp = M + m
            if abs(Mp) <= Lp:
                factor = wigner_eckart_factor(Lp, Mp, m, L, M, p)
                if factor != 0.0:
                    factors[(M, m, Mp)] = factor
    if not factors:
        return {}
    oracle = _oracle_for(lam, p, space, oracle)
    floor = MIN_CG * max(abs(f) for f in factors.values())
    return {
        (M, m, Mp): oracle.matrix_element(lam, Lp, Mp, m, L, M) / f
        for (M, m, Mp), f in factors.items()
        if abs(f) >= floor
    }


def _default_channel(channels: dict, L: int, Lp: int):
    stretched = (L, min(L, Lp) - L, min(L, Lp))
    if stretched in channels:
        return stretched
    return min(channels, key=lambda c: (abs(c[0]), -c[0], c[1]))


def reduced_me_oracle(
    lam, Lp, L, p, space=None, oracle=None, all_channels: bool = False
) -> ReducedMERecord:
    """Reduced element of ``Q^2`` read off from explicit Fock-space matrices.

    With ``all_channels`` every usable channel is evaluated and must agree
    within ``CHANNEL_TOL`` (relative), otherwise :class:`IntegrityError`.
    """
    p = as_param(p)
    channels = oracle_channels(lam, Lp, L, p, space, oracle)
    if not channels:
        raise ValueError(f"no channel couples L={L} to L'={Lp} through rank 2")
    chosen = _default_channel(channels, L, Lp)
    value = channels[chosen]
    if all_channels:
        vals = np.array(list(channels.values()))
        spread = (vals.max() - vals.min()) / max(1.0, abs(value))
        if spread > CHANNEL_TOL:
            raise IntegrityError(
                f"channel spread {spread:.3e} for lambda={lam}, L'={Lp}, L={L}"
            )
    return ReducedMERecord(lam, Lp, L, p.tau, float(value), source="oracle")


def coefficients_from_oracle(lam, L, p, space=None, oracle=None):
    """Project ``A^2_0 |lam; L L>`` onto ``|lam; L+2 L>`` and ``|lam; L L>``.

    Returns ``(a, b, leftover)`` where ``leftover`` is the norm of what the
    two-term expansion does not capture.
    """
    check_labels(lam, L)
    p = as_param(p)
    oracle = _oracle_for(lam, p, space, oracle)
    image = oracle.A2[0].apply(oracle.state(lam, L, L), lam)
    same = oracle.state(lam, L, L)
    b = float(same @ image)
    rest = image - b * same
    a = 0.0
    if L + 2 <= lam:
        up = oracle.state(lam, L + 2, L)
        a = float(up @ image)
        rest = rest - a * up
    return a, b, float(np.linalg.norm(rest))


def symmetry_via_cg(lam: int, L: int, p: DeformationParam) -> float:
    """Largest deviation of ``<L||Q||L+2>`` from ``<L+2||Q||L>`` implied by conjugation.

    ``(Q_m)^dagger = (-1)^m q^{-m} Q_{-m}`` turns every matrix element
    ``<L M'|Q_m|L+2 M>`` into one of the raising element; dividing by the
    Wigner-Eckart factor of the downward channel must return the same number.
    """
    _check_raising(lam, L)
    p = as_param(p)
    up = reduced_me_raising(lam, L, p).value
    worst = 0.0
    for M in range(-(L + 2), L + 3):
        for m in range(-2, 3):
            Mp = M + m
            if abs(Mp) > L:
                continue
            down_factor = wigner_eckart_factor(L, Mp, m, L + 2, M, p)
            if abs(down_factor) < MIN_CG:
                continue
            element = (-1) ** m * p.power(-m) * wigner_eckart_factor(L + 2, M, -m, L, Mp, p) * up
            worst = max(worst, abs(element / down_factor - up) / max(1.0, abs(up)))
    return worst


def all_pairs(lam: int):
    """Every nonzero ``(L', L)`` pair of the quadrupole inside one irrep."""
    out = []
    for L in sorted(allowed_L(lam)):
        for Lp in (L - 2, L, L + 2):
            if 0 <= Lp <= lam and not (Lp == L == 0):
                out.append((Lp, L))
    return out

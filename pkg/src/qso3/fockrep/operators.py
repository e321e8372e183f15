"""Matrix realisation of the q-boson, so_q(3) and tensor operators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ..errors import IntegrityError
from ..qcg import qcg_column
from ..qnum import DeformationParam, as_param, q_number
from .space import MODES, FockSpace, SectorOperator, residual

__all__ = [
    "q_number_array",
    "q_boson",
    "modified_boson",
    "number_operator",
    "q_power",
    "so3_generators",
    "casimir",
    "ScalarOps",
    "scalar_ops",
    "VectorOpParams",
    "vector_ops",
    "couple",
    "coupled_tensor",
    "j1_tensor",
    "j1_zero_forms",
    "quadrupole",
    "q_commutator",
    "TensorCheckReport",
    "tensor_check",
]

# relative tolerance for internal two-route consistency assertions
ROUTE_TOL = 1e-10


def q_number_array(x, p: DeformationParam) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if p.classical:
        return x.copy()
    return np.sinh(p.tau * x) / np.sinh(p.tau)


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"mode must be one of '+', '0', '-', got {mode!r}")


def q_boson(mode: str, dagger: bool, space: FockSpace, p: DeformationParam):
    """``b_i`` or ``b_i^dagger`` with amplitudes ``sqrt([n])`` / ``sqrt([n+1])``."""
    _check_mode(mode)
    p = as_param(p)
    if dagger:
        return space.ladder(mode, +1, lambda n: math.sqrt(q_number(n + 1, p)))
    return space.ladder(mode, -1, lambda n: math.sqrt(q_number(n, p)))


def modified_boson(mode: str, dagger: bool, space: FockSpace, p: DeformationParam):
    """``B_0 = q^{-N0/2} b_0`` and ``B_pm = q^{N+1/2} b sqrt([2N]/[N])`` (and conjugates).

    The charged-mode square root is applied in action form so ``[0]/[0]``
    never appears.
    """
    _check_mode(mode)
    p = as_param(p)
    if mode == "0":
        if dagger:
            amp = lambda n: p.power(-n / 2) * math.sqrt(q_number(n + 1, p))  # noqa: E731
        else:
            amp = lambda n: p.power(-(n - 1) / 2) * math.sqrt(q_number(n, p))  # noqa: E731
    elif dagger:
        amp = lambda n: math.sqrt(q_number(2 * n + 2, p)) * p.power(n + 0.5)  # noqa: E731
    else:
        amp = lambda n: math.sqrt(q_number(2 * n, p)) * p.power(n - 0.5)  # noqa: E731
    return space.ladder(mode, +1 if dagger else -1, amp)


def number_operator(mode: str | None, space: FockSpace) -> SectorOperator:
    """``N_i`` for a mode, or the total ``N`` when ``mode`` is None."""
    if mode is None:
        return space.diagonal(lambda a, b, c: a + b + c)
    _check_mode(mode)
    k = MODES[mode]
    return space.diagonal(lambda *occ: occ[k])


def q_power(space: FockSpace, p: DeformationParam, a=0.0, b=0.0, c=0.0, const=0.0):
    """Diagonal ``q^{a N+ + b N0 + c N- + const}``."""
    p = as_param(p)
    return space.diagonal(lambda x, y, z: np.exp(p.tau * (a * x + b * y + c * z + const)))


def _q_power_L0(space, p, sign=1.0, const=0.0):
    return q_power(space, p, a=sign, c=-sign, const=const)


def so3_generators(space: FockSpace, p: DeformationParam, form: str = "simplified"):
    """``(L0, L+, L-)`` in the simplified (modified-boson) or original form."""
    p = as_param(p)
    L0 = space.diagonal(lambda a, b, c: a - c)
    if form == "simplified":
        Bd = {m: modified_boson(m, True, space, p) for m in MODES}
        B = {m: modified_boson(m, False, space, p) for m in MODES}
        Lp = _q_power_L0(space, p, -1, 0.5) @ Bd["+"] @ B["0"] + _q_power_L0(
            space, p, 1, -0.5
        ) @ Bd["0"] @ B["-"]
        Lm = _q_power_L0(space, p, -1, -0.5) @ Bd["0"] @ B["+"] + _q_power_L0(
            space, p, 1, 0.5
        ) @ Bd["-"] @ B["0"]
    elif form == "original":
        bd = {m: q_boson(m, True, space, p) for m in MODES}
        b = {m: q_boson(m, False, space, p) for m in MODES}
        root = lambda k: space.diagonal(  # noqa: E731
            lambda *occ: np.sqrt(np.exp(p.tau * occ[k]) + np.exp(-p.tau * occ[k]))
        )
        left = q_power(space, p, b=-0.5, c=1) @ root(0)
        right = q_power(space, p, a=1, b=-0.5) @ root(2)
        Lp = left @ bd["+"] @ b["0"] + bd["0"] @ b["-"] @ right
        Lm = bd["0"] @ b["+"] @ left + right @ bd["-"] @ b["0"]
    else:
        raise ValueError(f"form must be 'simplified' or 'original', got {form!r}")
    return L0, Lp, Lm


def _bracket_of_L0(space, p, shift=0.0):
    return space.diagonal(lambda a, b, c: q_number_array(a - c + shift, p))


def casimir(space: FockSpace, p: DeformationParam, generators=None) -> SectorOperator:
    """``L- L+ + [L0][L0+1]``, cross-checked against ``L+ L- + [L0][L0-1]``."""
    p = as_param(p)
    L0, Lp, Lm = generators or so3_generators(space, p)
    bL0 = _bracket_of_L0(space, p)
    first = Lm @ Lp + bL0 @ _bracket_of_L0(space, p, 1)
    second = Lp @ Lm + bL0 @ _bracket_of_L0(space, p, -1)
    r = residual(first, second)
    if r > ROUTE_TOL:
        raise IntegrityError(f"Casimir forms disagree (residual {r:.3e})")
    return first


class ScalarOps(NamedTuple):
    Splus: SectorOperator
    S0: SectorOperator
    Sminus: SectorOperator
    Stilde_plus: SectorOperator
    Stilde_minus: SectorOperator


def scalar_ops(space: FockSpace, p: DeformationParam) -> ScalarOps:
    """so_q(3) scalars ``S+ = (B0^+)^2 q^{2S0} - B+^+ B-^+ q^{-2S0}`` and partners."""
    p = as_param(p)
    B0d = modified_boson("0", True, space, p)
    B0 = modified_boson("0", False, space, p)
    q2S0 = q_power(space, p, 1, 1, 1, 1.5)
    q2S0inv = q_power(space, p, -1, -1, -1, -1.5)
    Sp = B0d @ B0d @ q2S0 - modified_boson("+", True, space, p) @ modified_boson(
        "-", True, space, p
    ) @ q2S0inv
    Sm = q2S0 @ B0 @ B0 - q2S0inv @ modified_boson("+", False, space, p) @ modified_boson(
        "-", False, space, p
    )
    S0 = space.diagonal(lambda a, b, c: (a + b + c + 1.5) / 2)
    two = q_number(2, p)
    return ScalarOps(Sp, S0, Sm, Sp / two, Sm / two)


@dataclass(frozen=True)
class VectorOpParams:
    """Constants of ``T+1 = omega B+^+ q^{alpha N+ + beta N0 + gamma N- + delta}``.

    Highest-weight consistency requires ``alpha + 2 = beta = gamma``.
    """

    omega: float
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        if not (
            math.isclose(self.alpha + 2, self.beta, abs_tol=1e-12)
            and math.isclose(self.beta, self.gamma, abs_tol=1e-12)
        ):
            raise ValueError(
                "vector-operator constants must satisfy alpha + 2 = beta = gamma, "
                f"got alpha={self.alpha}, beta={self.beta}, gamma={self.gamma}"
            )

    @classmethod
    def from_beta(cls, omega: float, beta: float, delta: float) -> "VectorOpParams":
        return cls(omega=omega, alpha=beta - 2, beta=beta, gamma=beta, delta=delta)

    @classmethod
    def canonical(cls, p: DeformationParam) -> "VectorOpParams":
        """Values fixed by matching the coupled rank-1 tensor to the generators."""
        return cls.from_beta(1 / math.sqrt(q_number(2, as_param(p))), 1.0, -0.5)


def vector_ops(space: FockSpace, p: DeformationParam, params: VectorOpParams | None = None):
    """Components ``{m: T^dagger_m}`` and ``{m: Ttilde_m}`` for ``m = +1, 0, -1``."""
    p = as_param(p)
    if params is None:
        params = VectorOpParams.canonical(p)
    elif not isinstance(params, VectorOpParams):
        raise TypeError("params must be a VectorOpParams")
    w, beta, d = params.omega, params.beta, params.delta
    qd = p.q - 1 / p.q
    root2 = math.sqrt(q_number(2, p))
    Bd = {m: modified_boson(m, True, space, p) for m in MODES}
    B = {m: modified_boson(m, False, space, p) for m in MODES}

    def expo(plus, total, const):
        # q^{plus*N+ + total*N + const}
        return q_power(space, p, plus + total, total, total, const)

    tdag = {
        1: w * Bd["+"] @ q_power(space, p, params.alpha, params.beta, params.gamma, d),
        0: w * root2 * Bd["0"] @ expo(-2, beta, d + 0.5),
        -1: w
        * (
            Bd["-"] @ expo(2, beta - 2, d)
            - qd * B["+"] @ Bd["0"] @ Bd["0"] @ expo(-2, beta, d + 2)
        ),
    }
    ttilde = {
        1: -w
        * (
            expo(2, beta - 2, d - 1) @ B["-"]
            - qd * expo(-2, beta, d + 1) @ Bd["+"] @ B["0"] @ B["0"]
        ),
        0: w * root2 * expo(-2, beta, d + 0.5) @ B["0"],
        -1: -w * expo(-2, beta, d + 1) @ B["+"],
    }
    return tdag, ttilde


def couple(X: dict, Y: dict, rank: int, p: DeformationParam, base_inverted: bool = True):
    """``[X (x) Y]^rank_M = sum C^{rank M}_{1m,1n} X_m Y_n`` for two vector operators."""
    p = as_param(p)
    out = {}
    for M in range(-rank, rank + 1):
        terms = [
            c * (X[int(m)] @ Y[int(n)])
            for m, n, c in qcg_column(1, 1, rank, M, base_inverted, p)
        ]
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        out[M] = total
    return out


def coupled_tensor(rank: int, space: FockSpace, p: DeformationParam, vectors=None):
    """``A^rank_M = [T^dagger (x) Ttilde]^rank_M`` with base-inverted coefficients."""
    if rank not in (0, 1, 2):
        raise ValueError(f"rank must be 0, 1 or 2, got {rank}")
    tdag, ttilde = vectors or vector_ops(space, p)
    return couple(tdag, ttilde, rank, p, base_inverted=True)


def j1_zero_forms(space: FockSpace, p: DeformationParam, generators=None):
    """The three printed expressions for ``J^1_0``."""
    p = as_param(p)
    L0, Lp, Lm = generators or so3_generators(space, p)
    two = q_number(2, p)
    q = p.q
    commutator_form = (q * (Lp @ Lm) - (Lm @ Lp) / q) / two
    bracket2 = space.diagonal(lambda a, b, c: q_number_array(2 * (a - c), p))
    lowering_form = (q * bracket2 + (q - 1 / q) * (Lm @ Lp)) / two
    C2 = casimir(space, p, (L0, Lp, Lm))
    bL0 = _bracket_of_L0(space, p) @ _bracket_of_L0(space, p, 1)
    casimir_form = (q * bracket2 + (q - 1 / q) * (C2 - bL0)) / two
    return commutator_form, lowering_form, casimir_form


def j1_tensor(space: FockSpace, p: DeformationParam, generators=None):
    """Rank-1 tensor built from the generators: ``J_{+-1} = -+ q^{-L0} L_{+-} / sqrt([2])``."""
    p = as_param(p)
    L0, Lp, Lm = generators or so3_generators(space, p)
    root2 = math.sqrt(q_number(2, p))
    qL0 = _q_power_L0(space, p, -1)
    forms = j1_zero_forms(space, p, (L0, Lp, Lm))
    for other in forms[1:]:
        r = residual(forms[0], other)
        if r > ROUTE_TOL:
            raise IntegrityError(f"J^1_0 forms disagree (residual {r:.3e})")
    return {1: -(qL0 @ Lp) / root2, 0: forms[0], -1: (qL0 @ Lm) / root2}


def quadrupole(space: FockSpace, p: DeformationParam, vectors=None):
    """``Q^2_M = sqrt([3][4]/[2]) A^2_M``."""
    p = as_param(p)
    scale = math.sqrt(q_number(3, p) * q_number(4, p) / q_number(2, p))
    A2 = coupled_tensor(2, space, p, vectors)
    return {M: scale * op for M, op in A2.items()}


def q_commutator(X: SectorOperator, Y: SectorOperator, m_exponent: float, p):
    """``[X, Y]_{q^m} = X Y - q^m Y X``."""
    if X.space.nmax != Y.space.nmax:
        raise ValueError("q_commutator operands live on different Fock spaces")
    return X @ Y - as_param(p).power(m_exponent) * (Y @ X)


@dataclass
class TensorCheckReport:
    rank: int
    residuals: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_residual <= tol


def tensor_check(T: dict, rank: int, space: FockSpace, p: DeformationParam, generators=None):
    """Residuals of the so_q(3) tensor-operator relations for every component.

    ``[L0, T_m] = m T_m`` and
    ``[L_{+-}, T_m]_{q^m} q^{L0} = sqrt([j -+ m][j +- m + 1]) T_{m+-1}``.
    """
    p = as_param(p)
    missing = [m for m in range(-rank, rank + 1) if m not in T]
    if missing:
        raise ValueError(f"tensor components {missing} missing")
    L0, Lp, Lm = generators or so3_generators(space, p)
    K = _q_power_L0(space, p)
    report = TensorCheckReport(rank)
    for m in range(-rank, rank + 1):
        Tm = T[m]
        report.residuals[f"[L0,T{m:+d}]"] = residual(
            L0 @ Tm - Tm @ L0, m * Tm, scale=(L0 @ Tm).max_abs()
        )
        for sign, L, label in ((1, Lp, "L+"), (-1, Lm, "L-")):
            lhs = q_commutator(L, Tm, m, p) @ K
            coeff = math.sqrt(
                max(q_number(rank - sign * m, p) * q_number(rank + sign * m + 1, p), 0.0)
            )
            target = m + sign
            rhs = coeff * T[target] if abs(target) <= rank else 0.0 * lhs
            scale = max((L @ Tm @ K).max_abs(), p.power(m) * (Tm @ L @ K).max_abs())
            report.residuals[f"[{label},T{m:+d}]_q^{m}"] = residual(lhs, rhs, scale=scale)
    return report

"""Catalog of operator identities and closed-form cross-checks.

Each check returns a single worst-case residual for one ``(nmax, tau)``
context; :func:`run_suite` evaluates the catalog over a tau grid and
produces ordered :class:`CheckResult` rows.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import basis as bs
from . import fockrep as fr
from . import matelem as me
from .fockrep import residual
from .qcg import CGKey, coupled_basis_oracle, qcg
from .qnum import DeformationParam, q_double_factorial, q_factorial, q_number

IDENTITY_TOL = 1e-10
CONSTRUCTION_TOL = 1e-12
MODES = ("+", "0", "-")


@dataclass(frozen=True)
class Check:
    name: str
    tag: str
    group: str
    tol: float
    fn: Callable[["Context"], float]


@dataclass(frozen=True)
class CheckResult:
    name: str
    tag: str
    group: str
    tau: float
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tol


class Context:
    """Operators for one Fock space and deformation, built on first use."""

    def __init__(self, nmax: int, tau: float, max_lambda: int | None = None):
        self.space = fr.build_space(nmax)
        self.p = DeformationParam(tau)
        self.max_lambda = min(10, nmax) if max_lambda is None else min(max_lambda, nmax)
        # the quadrupole oracle needs a two-sector guard band above the irrep
        self.oracle_lambda = min(self.max_lambda, nmax - 2)

    def qn(self, x):
        return q_number(x, self.p)

    @cached_property
    def gens(self):
        return fr.so3_generators(self.space, self.p)

    @cached_property
    def gens_original(self):
        return fr.so3_generators(self.space, self.p, "original")

    @cached_property
    def b(self):
        return {(m, d): fr.q_boson(m, d, self.space, self.p) for m in MODES for d in (True, False)}

    @cached_property
    def B(self):
        return {
            (m, d): fr.modified_boson(m, d, self.space, self.p)
            for m in MODES
            for d in (True, False)
        }

    @cached_property
    def N(self):
        return {m: fr.number_operator(m, self.space) for m in (*MODES, None)}

    @cached_property
    def scalars(self):
        return fr.scalar_ops(self.space, self.p)

    @cached_property
    def vectors(self):
        return fr.vector_ops(self.space, self.p)

    @cached_property
    def A(self):
        return {L: fr.coupled_tensor(L, self.space, self.p, self.vectors) for L in (0, 1, 2)}

    @cached_property
    def J(self):
        return fr.j1_tensor(self.space, self.p, self.gens)

    @cached_property
    def Q(self):
        s = math.sqrt(self.qn(3) * self.qn(4) / self.qn(2))
        return {M: s * op for M, op in self.A[2].items()}

    @cached_property
    def casimir(self):
        return fr.casimir(self.space, self.p, self.gens)

    @cached_property
    def q2S0(self):
        return fr.q_power(self.space, self.p, 1, 1, 1, 1.5)

    @cached_property
    def oracle(self):
        return me.FockOracle(self.space, self.p)

    def diag(self, fn):
        return self.space.diagonal(fn)

    def qpow(self, a=0.0, b=0.0, c=0.0, const=0.0):
        return fr.q_power(self.space, self.p, a, b, c, const)

    def qcomm(self, X, Y, m):
        return fr.q_commutator(X, Y, m, self.p)

    def comm_res(self, X, Y, m, rhs=None):
        """Residual of ``[X, Y]_{q^m} = rhs`` scaled by the size of the products."""
        lhs = self.qcomm(X, Y, m)
        if rhs is None:
            rhs = 0.0 * lhs
        scale = max((X @ Y).max_abs(), self.p.power(m) * (Y @ X).max_abs())
        return residual(lhs, rhs, scale=scale)


# ---------------------------------------------------------------- algebra


def _boson_algebra(c: Context) -> float:
    out = 0.0
    for m in MODES:
        k = "+0-".index(m)
        b, bd = c.b[(m, False)], c.b[(m, True)]
        for sign in (1, -1):
            rhs = c.diag(lambda *occ, s=sign: np.exp(-s * c.p.tau * occ[k]))
            out = max(out, c.comm_res(b, bd, sign, rhs))
    return out


def _modified_number(c: Context) -> float:
    out = 0.0
    for m in MODES:
        Nm = c.N[m]
        out = max(
            out,
            c.comm_res(Nm, c.B[(m, True)], 0, c.B[(m, True)]),
            c.comm_res(Nm, c.B[(m, False)], 0, -c.B[(m, False)]),
        )
    return out


def _modified_products(c: Context) -> float:
    qa = lambda x: fr.q_number_array(x, c.p)  # noqa: E731
    tau = c.p.tau
    B0d, B0 = c.B[("0", True)], c.B[("0", False)]
    out = max(
        residual(B0d @ B0, c.diag(lambda a, b, z: np.exp(tau * (1 - b)) * qa(b))),
        residual(B0 @ B0d, c.diag(lambda a, b, z: np.exp(-tau * b) * qa(b + 1))),
    )
    for m in ("+", "-"):
        k = "+0-".index(m)
        Bd, B = c.B[(m, True)], c.B[(m, False)]
        out = max(
            out,
            residual(Bd @ B, c.diag(lambda *o, k=k: np.exp(tau * (2 * o[k] - 1)) * qa(2 * o[k]))),
            residual(B @ Bd, c.diag(lambda *o, k=k: np.exp(tau * (2 * o[k] + 1)) * qa(2 * o[k] + 2))),
        )
    return out


def _modified_commutators(c: Context) -> float:
    tau = c.p.tau
    out = c.comm_res(
        c.B[("0", False)], c.B[("0", True)], 0, c.diag(lambda a, b, z: np.exp(-2 * tau * b))
    )
    for m in ("+", "-"):
        k = "+0-".index(m)
        rhs = c.qn(2) * c.diag(lambda *o, k=k: np.exp(tau * (4 * o[k] + 1)))
        out = max(out, c.comm_res(c.B[(m, False)], c.B[(m, True)], 0, rhs))
    return out


def _generator_algebra(c: Context) -> float:
    L0, Lp, Lm = c.gens
    two_L0 = c.diag(lambda a, b, z: fr.q_number_array(2 * (a - z), c.p))
    return max(
        c.comm_res(L0, Lp, 0, Lp),
        c.comm_res(L0, Lm, 0, -Lm),
        c.comm_res(Lp, Lm, 0, two_L0),
    )


def _casimir_forms(c: Context) -> float:
    L0, Lp, Lm = c.gens
    bl = lambda s=0: c.diag(lambda a, b, z: fr.q_number_array(a - z + s, c.p))  # noqa: E731
    sym = 0.5 * (Lp @ Lm + Lm @ Lp + c.qn(2) * (bl() @ bl()))
    other = Lp @ Lm + bl() @ bl(-1)
    C = c.casimir
    return max(
        residual(C, sym),
        residual(C, other),
        c.comm_res(C, L0, 0),
        c.comm_res(C, Lp, 0),
        c.comm_res(C, Lm, 0),
    )


def _tilde_scalars(c: Context) -> float:
    S = c.scalars
    two_S0 = c.diag(lambda a, b, z: fr.q_number_array(a + b + z + 1.5, c.p.scaled(2)))
    return max(
        c.comm_res(S.S0, S.Stilde_plus, 0, S.Stilde_plus),
        c.comm_res(S.S0, S.Stilde_minus, 0, -S.Stilde_minus),
        c.comm_res(S.Stilde_plus, S.Stilde_minus, 0, -two_S0),
    )


def _scalar_commutator(c: Context) -> float:
    S = c.scalars
    rhs = c.qn(2) * c.diag(lambda a, b, z: fr.q_number_array(2 * (a + b + z) + 3, c.p))
    rhs2 = c.qn(2) ** 2 * c.diag(
        lambda a, b, z: fr.q_number_array(a + b + z + 1.5, c.p.scaled(2))
    )
    return max(
        c.comm_res(S.Sminus, S.Splus, 0, rhs),
        c.comm_res(S.Sminus, S.Splus, 0, rhs2),
        residual(S.Splus.dagger(), S.Sminus),
    )


def _scalars_commute(c: Context) -> float:
    S = c.scalars
    return max(c.comm_res(s, L, 0) for s in (S.Splus, S.S0, S.Sminus) for L in c.gens)


def _vector_tensor(c: Context) -> float:
    Td, Tt = c.vectors
    return max(
        fr.tensor_check(Td, 1, c.space, c.p, c.gens).max_residual,
        fr.tensor_check(Tt, 1, c.space, c.p, c.gens).max_residual,
    )


def _vector_extremes(c: Context) -> float:
    Td, _ = c.vectors
    _, Lp, Lm = c.gens
    return max(c.comm_res(Lp, Td[1], 1), c.comm_res(Lm, Td[-1], -1))


def _vector_conjugate(c: Context) -> float:
    Td, Tt = c.vectors
    return max(
        residual(Tt[m], (-1) ** m * c.p.power(-m) * Td[-m].dagger()) for m in (1, 0, -1)
    )


def _coupled_conjugate(c: Context) -> float:
    return max(
        residual(c.A[L][M].dagger(), (-1) ** M * c.p.power(-M) * c.A[L][-M])
        for L in (0, 1, 2)
        for M in range(-L, L + 1)
    )


def _j1_matches_rank1(c: Context) -> float:
    k = -math.sqrt(c.qn(4) / c.qn(2))
    return max(residual(c.J[M], k * c.A[1][M]) for M in (1, 0, -1))


def _j1_forms(c: Context) -> float:
    forms = fr.j1_zero_forms(c.space, c.p, c.gens)
    return max(
        max(residual(forms[0], f) for f in forms[1:]),
        fr.tensor_check(c.J, 1, c.space, c.p, c.gens).max_residual,
    )


def _rank2_tensor(c: Context) -> float:
    return max(
        fr.tensor_check(c.A[2], 2, c.space, c.p, c.gens).max_residual,
        fr.tensor_check(c.Q, 2, c.space, c.p, c.gens).max_residual,
    )


def _pair_scalars(c: Context) -> float:
    Td, Tt = c.vectors
    r3 = math.sqrt(c.qn(3))
    Rp = -r3 * fr.couple(Td, Td, 0, c.p)[0]
    Rm = -r3 * fr.couple(Tt, Tt, 0, c.p)[0]
    S = c.scalars
    return max(
        residual(Rp, S.Splus @ c.q2S0),
        residual(Rm, c.q2S0 @ S.Sminus),
        residual(Rp.dagger(), Rm),
    )


def _vector_relations(c: Context):
    Td, Tt = c.vectors
    q = c.p.q
    d1, d2 = q - 1 / q, q * q - 1 / (q * q)
    qN = lambda s: c.qpow(2, 2, 2, s)  # noqa: E731
    same = [
        (Td[1], Td[0], 2, None),
        (Tt[0], Tt[-1], 2, None),
        (Td[0], Td[-1], 2, None),
        (Tt[1], Tt[0], 2, None),
        (Td[1], Td[-1], 0, d1 * (Td[0] @ Td[0])),
        (Tt[1], Tt[-1], 0, d1 * (Tt[0] @ Tt[0])),
    ]
    mixed = [
        (Tt[0], Td[1], 0, None),
        (Tt[-1], Td[0], 0, None),
        (Tt[1], Td[1], 2, None),
        (Tt[-1], Td[-1], 2, None),
        (Tt[1], Td[0], 0, d2 * (Td[1] @ Tt[0])),
        (Tt[0], Td[-1], 0, d2 * (Td[0] @ Tt[-1])),
    ]
    contact = [
        (Tt[-1], Td[1], -2, -qN(1)),
        (Tt[0], Td[0], 0, qN(0) + d2 / q * (Td[1] @ Tt[-1])),
        (
            Tt[1],
            Td[-1],
            -2,
            -qN(-1) + d2 / q * (Td[0] @ Tt[0] + d1 * (Td[1] @ Tt[-1])),
        ),
        (Td[1].dagger(), Td[1], -2, qN(0)),
    ]
    return same, mixed, contact


def _relations_res(c, rel):
    return max(c.comm_res(X, Y, m, rhs) for X, Y, m, rhs in rel)


def _splus_commutators(c: Context, kmax: int = 4) -> float:
    Td, _ = c.vectors
    S = c.scalars
    A = c.A[2]
    out = 0.0
    for k in range(1, min(kmax, (c.space.nmax - 2) // 2) + 1):
        Sk = S.Splus.power(k)
        Sk1 = S.Splus.power(k - 1)
        pre = c.qn(2 * k)
        rhs2 = c.p.power(2 * k - 2) * pre * (Sk1 @ Td[1] @ Td[1] @ c.q2S0)
        rhs1 = (
            math.sqrt(c.qn(4) / c.qn(2)) * c.p.power(2 * k - 1) * pre
            * (Sk1 @ Td[0] @ Td[1] @ c.q2S0)
        )
        inner = S.Splus @ c.qpow(1, 1, 1, 2.5) + c.qn(3) * (Td[-1] @ Td[1])
        rhs0 = (
            math.sqrt(c.qn(4) / (c.qn(3) * c.qn(2))) * c.p.power(2 * k) * pre
            * (Sk1 @ inner @ c.q2S0)
        )
        out = max(
            out,
            c.comm_res(A[2], Sk, 0, rhs2),
            c.comm_res(A[1], Sk, 0, rhs1),
            c.comm_res(A[0], Sk, 0, rhs0),
        )
    return out


def _vacuum(c: Context):
    return c.space.basis_vector(fr.FockState(0, 0, 0))


def _apply_chain(ops, v, N):
    for op in reversed(ops):
        v = op.apply(v, N)
        N += op.delta_n
    return v, N


def _rel_err(x, y):
    ref = max(np.abs(x).max(initial=0.0), np.abs(y).max(initial=0.0))
    diff = np.abs(x - y).max(initial=0.0)
    return diff / ref if ref > 1e-12 else diff


def _hw_action(c: Context, Lmax: int = 8) -> float:
    Td, _ = c.vectors
    out = 0.0
    # A2_0 passes through sector L + 2
    for L in range(min(Lmax, c.space.nmax - 2) + 1):
        v, N = _apply_chain([Td[1]] * L, _vacuum(c), 0)
        lhs = c.A[2][0].apply(v, N)
        rhs = -math.sqrt(c.qn(2) / (c.qn(3) * c.qn(4))) * c.p.power(3) * c.qn(2 * L) / c.qn(2) * v
        out = max(out, _rel_err(lhs, rhs))
    return out


def _hw_lowering(c: Context, Lmax: int = 8) -> float:
    Td, _ = c.vectors
    _, _, Lm = c.gens
    Sp = c.scalars.Splus
    out = 0.0
    # T-1 contains B+ B0^+ B0^+, whose middle sector is two above the image
    for L in range(min(Lmax, c.space.nmax - 4) + 1):
        lhs, _ = _apply_chain([Td[-1]] + [Td[1]] * (L + 1), _vacuum(c), 0)
        low, _ = _apply_chain([Lm, Lm] + [Td[1]] * (L + 2), _vacuum(c), 0)
        up, _ = _apply_chain([Sp] + [Td[1]] * L, _vacuum(c), 0)
        rhs = (
            c.p.power(-2 * L - 2) / (c.qn(2 * L + 4) * c.qn(2 * L + 3)) * low
            - c.p.power(L + 2.5) * c.qn(2 * L + 2) / (c.qn(2) * c.qn(2 * L + 3)) * up
        )
        out = max(out, _rel_err(lhs, rhs))
    return out


# ----------------------------------------------------------- construction


def _generator_forms(c: Context) -> float:
    return max(residual(a, b) for a, b in zip(c.gens, c.gens_original))


def _modified_operator_form(c: Context) -> float:
    # sqrt([2N]/[N]) b^+ q^{N+1/2} checked on n >= 1 images only
    out = 0.0
    for m in ("+", "-"):
        k = "+0-".index(m)
        ratio = c.diag(
            lambda *o, k=k: np.sqrt(
                fr.q_number_array(2 * np.maximum(o[k], 1), c.p)
                / fr.q_number_array(np.maximum(o[k], 1), c.p)
            )
        )
        shift = c.diag(lambda *o, k=k: np.exp(c.p.tau * (o[k] + 0.5)))
        out = max(out, residual(c.B[(m, True)], ratio @ c.b[(m, True)] @ shift))
    B0d = c.b[("0", True)] @ c.diag(lambda a, b, z: np.exp(-c.p.tau * b / 2))
    return max(out, residual(c.B[("0", True)], B0d))


def _basis_routes(c: Context) -> float:
    ladder = (c.scalars.Splus, c.gens[2])
    out = 0.0
    for lam in range(c.max_lambda + 1):
        for L in bs.allowed_L(lam):
            for M in range(-L, L + 1):
                x = bs.basis_state_lowering(lam, L, M, c.space, c.p, ladder).to_array(c.space)
                y = bs.basis_state_explicit(lam, L, M, c.p).to_array(c.space)
                out = max(out, np.abs(x - y).max())
    return out


def _splus_expansion(c: Context, kmax: int = 4) -> float:
    kmax = min(kmax, c.space.nmax // 2)
    return max(
        residual(bs.splus_power_expansion(k, c.space, c.p), c.scalars.Splus.power(k))
        for k in range(kmax + 1)
    )


def _highest_weight_forms(c: Context) -> float:
    out = 0.0
    _, Lp, _ = c.gens
    Td, _ = c.vectors
    for L in range(c.max_lambda + 1):
        hw = bs.highest_weight_state(L, c.space, c.p).to_array(c.space)
        out = max(out, np.abs(Lp.apply(hw, L)).max(initial=0.0))
        alt, _ = _apply_chain([Td[1]] * L, _vacuum(c), 0)
        alt = alt / math.sqrt(q_factorial(L, c.p.scaled(2)))
        out = max(out, np.abs(alt - hw).max())
    return out


# ------------------------------------------------------------------ basis


def _full_basis_matrix(c: Context, lam: int):
    return np.array([v.to_array(c.space) for v in bs.full_basis(lam, c.space, c.p)])


def _orthonormal(c: Context) -> float:
    out = 0.0
    for lam in range(c.max_lambda + 1):
        X = _full_basis_matrix(c, lam)
        out = max(out, np.abs(X @ X.T - np.eye(len(X))).max())
    return out


def _complete(c: Context) -> float:
    # zero iff the count matches the sector and the vectors have full rank
    out = 0.0
    for lam in range(c.max_lambda + 1):
        X = _full_basis_matrix(c, lam)
        count = sum(2 * L + 1 for L in bs.allowed_L(lam))
        dim = c.space.dim(lam)
        sv = np.linalg.svd(X, compute_uv=False)
        out = max(out, abs(count - dim), float(dim - np.sum(sv > 0.5)), abs(1 - sv.min()))
    return out


def _eigenrelations(c: Context) -> float:
    L0, _, _ = c.gens
    C = c.casimir
    out = 0.0
    for lam in range(c.max_lambda + 1):
        for v in bs.full_basis(lam, c.space, c.p):
            x = v.to_array(c.space)
            cas = c.qn(v.L) * c.qn(v.L + 1)
            out = max(
                out,
                _rel_err(C.apply(x, lam), cas * x) if v.L else np.abs(C.apply(x, lam)).max(),
                np.abs(L0.apply(x, lam) - v.M * x).max(),
            )
    return out


def _explicit_norm(c: Context) -> float:
    return max(
        abs(bs.basis_state_explicit(lam, L, M, c.p).norm() - 1)
        for lam in range(c.max_lambda + 1)
        for L in bs.allowed_L(lam)
        for M in range(-L, L + 1)
    )


def _lowering_sum(c: Context, Lmax: int = 6) -> float:
    _, _, Lm = c.gens
    out = 0.0
    dfac = lambda n: q_double_factorial(n, c.p)  # noqa: E731
    for L in range(min(Lmax, c.space.nmax) + 1):
        v = c.space.basis_vector(fr.FockState(L, 0, 0))
        v = v * bs.monomial_amplitude(L, 0, 0, c.p) / dfac(2 * L)
        for m in range(2 * L + 1):
            expect = np.zeros_like(v)
            pre = c.p.power(m * (2 * L - m) / 2) * q_factorial(m, c.p)
            for s in range(0, L + 1):
                y, z = 2 * L - m - 2 * s, m - L + s
                if y < 0 or z < 0:
                    continue
                coef = pre / (dfac(2 * s) * q_factorial(y, c.p) * dfac(2 * z))
                st = fr.FockState(s, y, z)
                expect[c.space.index(st)] += coef * bs.monomial_amplitude(s, y, z, c.p)
            out = max(out, _rel_err(v, expect))
            v = Lm.apply(v, L)
    return out


# ---------------------------------------------------------------- matelem


def _oracle_agreement(c: Context) -> float:
    out = 0.0
    for lam in range(1, c.oracle_lambda + 1):
        for Lp, L in me.all_pairs(lam):
            closed = me.reduced_me(lam, Lp, L, c.p).value
            got = me.reduced_me_oracle(lam, Lp, L, c.p, oracle=c.oracle).value
            out = max(out, abs(closed - got) / max(1.0, abs(closed)))
    return out


def _channel_spread(c: Context) -> float:
    out = 0.0
    for lam in range(1, c.oracle_lambda + 1):
        for Lp, L in me.all_pairs(lam):
            vals = np.array(list(me.oracle_channels(lam, Lp, L, c.p, oracle=c.oracle).values()))
            ref = max(1.0, abs(me.reduced_me(lam, Lp, L, c.p).value))
            out = max(out, (vals.max() - vals.min()) / ref)
    return out


def _symmetry(c: Context) -> float:
    out = 0.0
    for lam in range(2, c.oracle_lambda + 1):
        for L in bs.allowed_L(lam):
            if L + 2 > lam:
                continue
            out = max(out, me.symmetry_via_cg(lam, L, c.p))
            up = me.reduced_me_oracle(lam, L + 2, L, c.p, oracle=c.oracle).value
            down = me.reduced_me_oracle(lam, L, L + 2, c.p, oracle=c.oracle).value
            out = max(out, abs(up - down) / max(1.0, abs(up)))
    return out


def _expansion_coefficients(c: Context) -> float:
    out = 0.0
    for lam in range(c.oracle_lambda + 1):
        for L in bs.allowed_L(lam):
            a, b, rest = me.coefficients_from_oracle(lam, L, c.p, oracle=c.oracle)
            ref = max(1.0, abs(b), abs(a))
            err = abs(b - me.coeff_b(lam, L, c.p))
            if L + 2 <= lam:
                err = max(err, abs(a - me.coeff_a(lam, L, c.p)))
            out = max(out, err / ref, rest / ref)
    return out


def _sign_pattern(c: Context) -> float:
    # number of sign violations; zero when every element has the expected sign
    bad = 0
    for lam in range(2, c.max_lambda + 1):
        for L in bs.allowed_L(lam):
            if L + 2 <= lam and me.reduced_me_raising(lam, L, c.p).value <= 0:
                bad += 1
            if L >= 2 and me.reduced_me_diagonal(lam, L, c.p).value >= 0:
                bad += 1
    return float(bad)


def _cg_orthogonality(c: Context) -> float:
    out = 0.0
    for j1 in range(4):
        for j2 in range(4):
            for inv in (False, True):
                pairs = [(m1, m2) for m1 in range(j1, -j1 - 1, -1) for m2 in range(j2, -j2 - 1, -1)]
                coupled = [(J, M) for J in range(abs(j1 - j2), j1 + j2 + 1) for M in range(-J, J + 1)]
                G = np.array(
                    [[qcg(CGKey(j1, m1, j2, m2, J, M, inv), c.p) for J, M in coupled] for m1, m2 in pairs]
                )
                out = max(out, np.abs(G.T @ G - np.eye(len(coupled))).max())
    return out


def _cg_oracle(c: Context) -> float:
    out = 0.0
    for j1, j2 in ((1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (0.5, 0.5), (1.5, 1)):
        for inv in (False, True):
            pairs, vecs = coupled_basis_oracle(j1, j2, inv, c.p)
            for (J, M), v in vecs.items():
                for i, (m1, m2) in enumerate(pairs):
                    out = max(out, abs(v[i] - qcg(CGKey(j1, m1, j2, m2, J, M, inv), c.p)))
    return out


CHECKS: tuple[Check, ...] = (
    Check("boson q-commutators", "Eq. (s1)", "algebra", IDENTITY_TOL, _boson_algebra),
    Check("modified boson number shifts", "Eq. (s7)", "algebra", IDENTITY_TOL, _modified_number),
    Check("modified boson products", "Eq. (s8)", "algebra", IDENTITY_TOL, _modified_products),
    Check("modified boson commutators", "Eq. (s9)", "algebra", IDENTITY_TOL, _modified_commutators),
    Check("so_q(3) commutators", "Eq. (s4)", "algebra", IDENTITY_TOL, _generator_algebra),
    Check("Casimir forms and centrality", "Eq. (s5)", "algebra", IDENTITY_TOL, _casimir_forms),
    Check("su_q2(1,1) scalar algebra", "Eq. (b3)", "algebra", IDENTITY_TOL, _tilde_scalars),
    Check("scalar commutator and adjoint", "Eq. (b4)", "algebra", IDENTITY_TOL, _scalar_commutator),
    Check("scalars commute with L", "Eq. (b2)", "algebra", IDENTITY_TOL, _scalars_commute),
    Check("vector operators are rank-1 tensors", "Eq. (v3)", "algebra", IDENTITY_TOL, _vector_tensor),
    Check("vector highest/lowest conditions", "Eq. (v5)/(v11)", "algebra", IDENTITY_TOL, _vector_extremes),
    Check("conjugate vector operator", "Eq. (v4)", "algebra", IDENTITY_TOL, _vector_conjugate),
    Check("coupled tensor conjugation", "Eq. (v14)", "algebra", IDENTITY_TOL, _coupled_conjugate),
    Check("J1 equals rescaled A1", "Eq. (v16)+(v18)", "algebra", IDENTITY_TOL, _j1_matches_rank1),
    Check("J1 zero-component forms", "Eq. (v15)", "algebra", IDENTITY_TOL, _j1_forms),
    Check("A2 and Q2 are rank-2 tensors", "Eq. (q0)", "algebra", IDENTITY_TOL, _rank2_tensor),
    Check("paired vector scalars", "Eq. (v21)", "algebra", IDENTITY_TOL, _pair_scalars),
    Check("vector-vector relations", "Eq. (v22a)", "algebra", IDENTITY_TOL,
          lambda c: _relations_res(c, _vector_relations(c)[0])),
    Check("vector-conjugate relations", "Eq. (v22b)", "algebra", IDENTITY_TOL,
          lambda c: _relations_res(c, _vector_relations(c)[1])),
    Check("vector-conjugate contact terms", "Eq. (v22c)", "algebra", IDENTITY_TOL,
          lambda c: _relations_res(c, _vector_relations(c)[2])),
    Check("A2 commutators with S+ powers", "Eq. (q8)", "algebra", IDENTITY_TOL, _splus_commutators),
    Check("A2_0 on stretched states", "Eq. (q10)", "algebra", IDENTITY_TOL, _hw_action),
    Check("T-1 on stretched states", "Eq. (q11)", "algebra", IDENTITY_TOL, _hw_lowering),
    Check("original vs simplified generators", "Eq. (s3)=(s10)", "construction", CONSTRUCTION_TOL,
          _generator_forms),
    Check("modified boson operator form", "Eq. (s6)", "construction", IDENTITY_TOL,
          _modified_operator_form),
    Check("highest-weight state forms", "Eq. (b1)/(q6)", "construction", IDENTITY_TOL,
          _highest_weight_forms),
    Check("lowering vs explicit basis", "Eq. (b7)=(b16)", "construction", IDENTITY_TOL, _basis_routes),
    Check("S+ power expansion", "Eq. (b15)", "construction", IDENTITY_TOL, _splus_expansion),
    Check("L- power sum", "Eq. (b9i)/(b10)", "basis", IDENTITY_TOL, _lowering_sum),
    Check("basis orthonormality", "Eq. (b5)-(b7)", "basis", IDENTITY_TOL, _orthonormal),
    Check("basis completeness", "Eq. (b5)", "basis", IDENTITY_TOL, _complete),
    Check("basis eigenrelations", "Eq. (s5)", "basis", IDENTITY_TOL, _eigenrelations),
    Check("explicit basis unit norm", "Eq. (b16)", "basis", IDENTITY_TOL, _explicit_norm),
    Check("q-CG orthogonality", "Eq. (t8a)", "qcg", 1e-11, _cg_orthogonality),
    Check("q-CG closed form vs coupled kernel", "Eq. (t8a)", "qcg", 1e-11, _cg_oracle),
    Check("closed reduced elements vs oracle", "Eq. (q14a)/(q14b)", "matelem", me.ORACLE_TOL,
          _oracle_agreement),
    Check("oracle channel independence", "Eq. (t8a)", "matelem", me.CHANNEL_TOL, _channel_spread),
    Check("reduced element symmetry", "Eq. (q15)", "matelem", me.CHANNEL_TOL, _symmetry),
    Check("A2_0 expansion coefficients", "Eq. (q1)/(q12a)/(q12b)", "matelem", me.ORACLE_TOL,
          _expansion_coefficients),
    Check("reduced element signs", "Eq. (q14a)/(q14b)", "matelem", 0.0, _sign_pattern),
)

GROUPS = tuple(dict.fromkeys(c.group for c in CHECKS))


def thread_cap() -> int:
    raw = os.environ.get("QSO3_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _run_one(nmax, tau, checks, max_lambda):
    ctx = Context(nmax, tau, max_lambda)
    out = []
    for chk in checks:
        try:
            r = float(chk.fn(ctx))
        except Exception:  # a crashing check is a failed check
            r = float("nan")
        out.append(CheckResult(chk.name, chk.tag, chk.group, float(tau), r, chk.tol))
    return out


def run_suite(
    nmax: int = 12,
    taus=(-0.3, 0.0, 0.1, 0.5),
    groups=None,
    tol: float | None = None,
    threads: int | None = None,
    max_lambda: int | None = None,
) -> list[CheckResult]:
    """Evaluate the catalog at every tau; rows ordered by check, then tau."""
    checks = [c for c in CHECKS if groups is None or c.group in groups]
    if tol is not None:
        checks = [Check(c.name, c.tag, c.group, tol, c.fn) for c in checks]
    workers = min(threads or thread_cap(), len(taus)) or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        per_tau = list(pool.map(lambda t: _run_one(nmax, t, checks, max_lambda), taus))
    rows = []
    for i in range(len(checks)):
        rows.extend(per_tau[j][i] for j in range(len(taus)))
    return rows

import math

import numpy as np
import pytest

from qso3 import CapacityError, DeformationParam, IntegrityError
from qso3 import fockrep as fr
from qso3.fockrep import FockState, build_space, residual
from qso3.qnum import q_number
from qso3.verify import CHECKS, Context

TAUS = [-0.3, 0.0, 0.1, 0.5]


@pytest.fixture(scope="module")
def space():
    return build_space(8)


def test_sector_sizes_and_ordering():
    sp = build_space(5)
    assert [sp.dim(N) for N in range(6)] == [1, 3, 6, 10, 15, 21]
    assert sp.total_dim == sum(fr.sector_dim(N) for N in range(6))
    states = list(sp.sectors[2])
    assert states == sorted(states)
    assert states[0] == FockState(0, 0, 2) and states[-1] == FockState(2, 0, 0)
    assert all(sp.index(s) == i for i, s in enumerate(states))


def test_negative_cutoff_rejected():
    with pytest.raises(ValueError):
        build_space(-1)


def test_basis_vector_outside_space():
    with pytest.raises(CapacityError):
        build_space(2).basis_vector(FockState(3, 0, 0))


def test_modified_raising_amplitude(space):
    # sqrt([4]) q^{3/2} on |1,0,0>, frozen from a 40-digit evaluation
    p = DeformationParam(0.1)
    Bd = fr.modified_boson("+", True, space, p)
    out = Bd.apply(space.basis_vector(FockState(1, 0, 0)), 1)
    assert out[space.index(FockState(2, 0, 0))] == pytest.approx(2.35273165834779, rel=1e-13)
    assert np.count_nonzero(out) == 1


def test_annihilation_of_vacuum(space):
    p = DeformationParam(0.2)
    vac = space.basis_vector(FockState(0, 0, 0))
    for mode in ("+", "0", "-"):
        op = fr.q_boson(mode, False, space, p)
        assert op.apply(vac, 0).size == 0


def test_top_sector_image_is_unknown(space):
    bd = fr.q_boson("0", True, space, DeformationParam(0.2))
    with pytest.raises(CapacityError):
        bd.block(space.nmax)


def test_products_drop_truncated_blocks(space):
    p = DeformationParam(0.2)
    bd = fr.q_boson("+", True, space, p)
    assert max(bd.sectors) == space.nmax - 1
    assert max(bd.power(3).sectors) == space.nmax - 3


def test_dagger_and_linear_ops(space):
    p = DeformationParam(0.3)
    b = fr.q_boson("-", False, space, p)
    bd = fr.q_boson("-", True, space, p)
    assert residual(b.dagger(), bd) == 0.0
    assert residual((2 * b - b) / 1.0, b) == 0.0
    assert residual(-(-b), b) == 0.0


def test_residual_requires_overlap(space):
    p = DeformationParam(0.3)
    with pytest.raises(ValueError):
        residual(fr.q_boson("+", True, space, p), fr.q_boson("+", False, space, p))


def test_vector_constants_validated():
    with pytest.raises(ValueError):
        fr.VectorOpParams(1.0, 0.0, 1.0, 1.0, 0.0)
    p = DeformationParam(0.2)
    c = fr.VectorOpParams.canonical(p)
    assert (c.alpha, c.beta, c.gamma, c.delta) == (-1.0, 1.0, 1.0, -0.5)
    assert c.omega == pytest.approx(1 / math.sqrt(q_number(2, p)))


def test_casimir_eigenvalue_on_stretched_state(space):
    p = DeformationParam(0.4)
    C = fr.casimir(space, p)
    v = space.basis_vector(FockState(3, 0, 0))
    assert C.apply(v, 3) == pytest.approx(q_number(3, p) * q_number(4, p) * v)


@pytest.mark.parametrize("tau", [0.1, 0.5])
def test_generator_forms_agree(tau, space):
    p = DeformationParam(tau)
    for a, b in zip(fr.so3_generators(space, p), fr.so3_generators(space, p, "original")):
        assert residual(a, b) < 1e-12
    with pytest.raises(ValueError):
        fr.so3_generators(space, p, "other")


def test_plain_angular_momentum_is_not_a_tensor(space):
    # the undeformed component pattern of L fails the deformed adjoint action
    p = DeformationParam(0.3)
    L0, Lp, Lm = fr.so3_generators(space, p)
    naive = {1: -Lp / math.sqrt(2), 0: L0, -1: Lm / math.sqrt(2)}
    assert fr.tensor_check(naive, 1, space, p).max_residual > 1e-2
    assert not fr.tensor_check(naive, 1, space, p).passed(1e-10)
    good = fr.j1_tensor(space, p)
    assert fr.tensor_check(good, 1, space, p).passed(1e-10)


def test_coupling_needs_inverted_base(space):
    p = DeformationParam(0.3)
    tdag, ttilde = fr.vector_ops(space, p)
    J = fr.j1_tensor(space, p)
    k = -math.sqrt(q_number(4, p) / q_number(2, p))
    inverted = fr.couple(tdag, ttilde, 1, p, base_inverted=True)
    direct = fr.couple(tdag, ttilde, 1, p, base_inverted=False)
    assert max(residual(J[m], k * inverted[m]) for m in (1, 0, -1)) < 1e-12
    assert max(residual(J[m], k * direct[m]) for m in (1, 0, -1)) > 1e-3


def test_quadrupole_scale(space):
    p = DeformationParam(0.2)
    Q = fr.quadrupole(space, p)
    A = fr.coupled_tensor(2, space, p)
    s = math.sqrt(q_number(3, p) * q_number(4, p) / q_number(2, p))
    assert all(residual(Q[m], s * A[m]) < 1e-13 for m in range(-2, 3))


ALGEBRA = [c for c in CHECKS if c.group == "algebra"]


@pytest.fixture(scope="module", params=TAUS)
def ctx(request):
    return Context(12, request.param)


@pytest.mark.parametrize("check", ALGEBRA, ids=lambda c: c.name.replace(" ", "_"))
def test_operator_identities(check, ctx):
    assert check.fn(ctx) <= check.tol


def test_j1_forms_disagreement_is_detected(monkeypatch, space):
    p = DeformationParam(0.2)
    forms = fr.j1_zero_forms(space, p)
    broken = (forms[0], 1.01 * forms[1], forms[2])
    monkeypatch.setattr(fr.operators, "j1_zero_forms", lambda *a, **k: broken)
    with pytest.raises(IntegrityError):
        fr.operators.j1_tensor(space, p)

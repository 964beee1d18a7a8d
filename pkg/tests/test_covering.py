import math

import numpy as np
import pytest

import _gen
from maslovkit import covering, symcore
from maslovkit.covering import GradedUnitary, MaslovLift, standard_lift
from maslovkit.errors import InconsistentStart, ModulusMismatch, NotTransverse
from maslovkit.paths import LagrangianPath, SymplecticPath
from maslovkit.symcore import INF, HalfInt, ZModN

J1 = symcore.j0(1)


def random_lift(rng, n, modulus):
    F = _gen.frame(rng, n)
    theta = np.angle(symcore.det_sq(F)) / (2 * math.pi) + int(rng.integers(-3, 4))
    return MaslovLift(F, theta, modulus)


def test_lift_path_examples():
    end, _ = covering.lift_path(LagrangianPath.constant(symcore.coordinate_frame(2)), 0.0)
    assert end.theta == pytest.approx(0.0)
    end, (ts, thetas) = covering.lift_path(LagrangianPath.exponential(symcore.coordinate_frame(1), math.pi * J1), 0.0)
    assert end.theta == pytest.approx(1.0)
    assert np.all(np.diff(thetas) >= 0)
    # half turn on the double cover changes sheet
    end2, _ = covering.lift_path(LagrangianPath.exponential(symcore.coordinate_frame(1), math.pi * J1), 0.0, 2)
    assert end2.theta == pytest.approx(1.0)
    with pytest.raises(InconsistentStart):
        covering.lift_path(LagrangianPath.constant(symcore.coordinate_frame(1)), 0.3)


def test_lift_path_is_functorial():
    rng = np.random.default_rng(11)
    F = _gen.frame(rng, 2)
    first = LagrangianPath.exponential(F, _gen.hamiltonian(rng, 2, 2.0), 0, 1)
    second = LagrangianPath.exponential(first.frame_at(1), _gen.hamiltonian(rng, 2, 2.0), 1, 2)
    theta0 = np.angle(symcore.det_sq(F)) / (2 * math.pi)
    mid, _ = covering.lift_path(first, theta0)
    end, _ = covering.lift_path(second, mid.theta)
    whole, _ = covering.lift_path(first.concat(second), theta0)
    assert whole.theta == pytest.approx(end.theta, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_abs_maslov_examples(n):
    L1 = standard_lift(n)
    L2 = standard_lift(n, imaginary=True, theta=1 - n / 2)
    assert covering.abs_maslov(L1, L2) == ZModN(1)
    assert covering.abs_maslov(L2, L1) == ZModN(n - 1)
    A, B = standard_lift(n, modulus=6), standard_lift(n, True, 1 - n / 2, modulus=6)
    assert covering.abs_maslov(A.deck(2), B.deck(5)) == covering.abs_maslov(A, B) - 2 + 5


def test_abs_maslov_rejects_non_transverse_and_mixed_moduli():
    with pytest.raises(NotTransverse):
        covering.abs_maslov(standard_lift(2), standard_lift(2, theta=1))
    with pytest.raises(ModulusMismatch):
        covering.abs_maslov(standard_lift(1, modulus=2), standard_lift(1, True, 0.5, modulus=3))


@pytest.mark.parametrize("seed", range(5))
def test_abs_maslov_path_choice_and_closed_form(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    L0, L1 = random_lift(rng, n, INF), random_lift(rng, n, INF)
    a = covering.abs_maslov(L0, L1)
    assert covering.abs_maslov(L0, L1, delta=math.pi / 5) == a
    assert covering.abs_maslov_closed_form(L0, L1) == a


def test_graded_group_structure():
    k, l = GradedUnitary.central(2, 3, 12), GradedUnitary.central(2, 4, 12)
    assert compose_t(k, l) == pytest.approx(7)
    rng = np.random.default_rng(2)
    for _ in range(10):
        g = GradedUnitary.from_unitary(symcore.realify(_gen.unitary(rng, 2)), 2)
        h = GradedUnitary.from_unitary(symcore.realify(_gen.unitary(rng, 2)), 2)
        gh = covering.compose_graded(g, h)
        U, s = covering.split_double(gh)
        assert np.allclose(U, g.U @ h.U)
        assert s == covering.split_double(g)[1] * covering.split_double(h)[1]


def compose_t(g, h):
    return covering.compose_graded(g, h).t


@pytest.mark.parametrize("seed", range(3))
def test_graded_action_preserves_index(seed):
    rng = np.random.default_rng(20 + seed)
    n = 2
    L0, L1 = random_lift(rng, n, 4), random_lift(rng, n, 4)
    g = GradedUnitary.from_unitary(symcore.realify(_gen.unitary(rng, n)), 4)
    assert covering.abs_maslov(covering.act_graded(g, L0), covering.act_graded(g, L1)) == covering.abs_maslov(L0, L1)
    central = GradedUnitary.central(n, 1, 4)
    assert covering.act_graded(central, L0).same_point(L0.deck(1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_oriented_sign(n):
    rng = np.random.default_rng(40 + n)
    constant = (-1) ** (n * (n + 1) // 2)
    for _ in range(5):
        L0, L1 = random_lift(rng, n, 2), random_lift(rng, n, 2)
        s = covering.oriented_sign(L0, L1)
        assert s == constant * covering.intersection_sign(L0, L1)
        assert covering.oriented_sign(L0.deck(1), L1) == -s
        assert s == (-1) ** covering.abs_maslov(L0, L1).value


def test_abs_cz_rules():
    # a small counter-clockwise rotation is the time-one map of a positive definite B
    phi = SymplecticPath.exponential(0.2 * symcore.j0(1))
    base = covering.abs_cz(phi, 0)
    assert base == ZModN(0)
    assert covering.abs_cz(phi, 3) == base - 3
    rng = np.random.default_rng(8)
    U = symcore.realify(_gen.unitary(rng, 2))
    t = float(np.angle(np.linalg.det(symcore.complexify(U)) ** 2) / (2 * math.pi))
    z = covering.abs_cz_graded(U, t, 8)
    assert covering.abs_cz_graded(U.T, -t, 8) == 4 - z


@pytest.mark.parametrize("n, end", [(1, HalfInt(1)), (2, HalfInt(0)), (3, HalfInt(-1))])
def test_handle_grading(n, end):
    *_, alpha_end = covering.handle_grading(covering.HandleCurve.default(n))
    assert alpha_end == end


@pytest.mark.parametrize("n", [1, 2, 4])
def test_dehn_local_shift(n):
    assert covering.dehn_local_shift(n) == 2 * n - 2

import numpy as np
import pytest

import _gen
from maslovkit import index, symcore
from maslovkit.errors import DimensionMismatch
from maslovkit.paths import LagrangianPath, SymplecticPath
from maslovkit.symcore import HalfInt

J1 = symcore.j0(1)
R = symcore.coordinate_frame(1)
IR = symcore.coordinate_frame(1, imaginary=True)


def turning(angle, frame=R):
    """R rotated by angle * t for t in [0, 1]."""
    return LagrangianPath.exponential(frame, angle * J1)


def test_transverse_constants_have_no_crossings():
    pair = LagrangianPath.constant(R), LagrangianPath.constant(IR)
    assert index.crossings(*pair) == []
    assert index.maslov_pair(*pair) == 0


def test_half_turn_crosses_once_positively():
    cs = index.crossings(turning(np.pi), LagrangianPath.constant(IR))
    assert len(cs) == 1
    c = cs[0]
    assert c.t == pytest.approx(0.5, abs=1e-8)
    assert (c.kernel_dim, c.positive, c.negative, c.endpoint) == (1, 1, 0, False)
    assert index.maslov_pair(turning(np.pi), LagrangianPath.constant(IR)) == 1


def test_endpoint_crossing_counts_half():
    mu = index.maslov_pair(turning(np.pi / 2), LagrangianPath.constant(IR))
    assert mu == HalfInt(1)
    assert not mu.is_integral()


def test_graph_path_crosses_at_start_with_full_kernel():
    rng = np.random.default_rng(3)
    n = 3
    S = _gen.symmetric(rng, n)
    S = S @ S.T + np.eye(n)  # rank n
    gen = np.block([[np.zeros((n, n)), np.zeros((n, n))], [S, np.zeros((n, n))]])
    path = LagrangianPath.exponential(symcore.coordinate_frame(n), gen)
    cs = index.crossings(path, LagrangianPath.constant(symcore.coordinate_frame(n)))
    assert len(cs) == 1 and cs[0].t == pytest.approx(0.0) and cs[0].kernel_dim == n


def test_conley_zehnder_small_rotations():
    # pinned sign: the counter-clockwise rotation exp(t J0) counts +1
    assert index.conley_zehnder(SymplecticPath.exponential(J1, 0, 0.25)) == 1
    assert index.conley_zehnder(SymplecticPath.exponential(-J1, 0, 0.25)) == -1


def test_conley_zehnder_constant_nondegenerate():
    Phi = symcore.rotation([0.9, -2.0])
    assert index.conley_zehnder(SymplecticPath.exponential(np.zeros((4, 4)), initial=Phi)) == 0


@pytest.mark.parametrize("seed", range(4))
def test_conley_zehnder_there_and_back(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 2
    A = _gen.hamiltonian(rng, n, 1.5)
    Phi0 = _gen.symplectic(rng, n, 0.5)
    go = SymplecticPath.exponential(A, 0, 1, initial=Phi0)
    back = SymplecticPath.exponential(-A, 1, 2, initial=go.matrix_at(1))
    assert index.conley_zehnder(go.concat(back)) == 0


def test_winding_examples():
    assert index.winding_det_sq(LagrangianPath.constant(R)) == pytest.approx(0.0, abs=1e-12)
    assert index.winding_det_sq(turning(np.pi)) == pytest.approx(1.0, abs=1e-9)
    assert index.winding_det_sq(turning(-3 * np.pi)) == pytest.approx(-3.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_self_check_agrees(seed):
    rng = np.random.default_rng(100 + seed)
    n = 1 + seed % 3
    l0, l1 = _gen.pair(rng, n, 2.0)
    assert index.maslov_pair(l0, l1, self_check=True) == index.maslov_pair_winding(l0, l1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        index.maslov_pair(LagrangianPath.constant(R), LagrangianPath.constant(symcore.coordinate_frame(2)))

import numpy as np
import pytest

from maslovkit import monodromy as mono
from maslovkit.errors import MalformedData, NotALoop, NotQuasiHomogeneous
from maslovkit import symcore
from maslovkit.paths import LagrangianPath


def test_sigma_weighted_examples():
    e7 = mono.WeightedPoly((9, 6, 4), 18, ((2, 0, 0), (0, 3, 0), (0, 1, 3)))
    assert e7.weight_sum == pytest.approx(19 / 18)
    assert mono.sigma_weighted(e7) == -2
    for k in range(1, 5):
        for n in range(1, 4):
            p = mono.WeightedPoly((2,) + (k + 1,) * n, 2 * (k + 1))
            assert mono.sigma_weighted(p) == 2 * (2 * (k + 1) - 2 - n * (k + 1))
    assert mono.sigma_weighted(e7.scaled(3)) == 3 * mono.sigma_weighted(e7)


def test_quasi_homogeneity_is_enforced():
    with pytest.raises(NotQuasiHomogeneous, match=r"\(1, 1, 0\)"):
        mono.WeightedPoly((9, 6, 4), 18, ((2, 0, 0), (1, 1, 0)))
    with pytest.raises(NotQuasiHomogeneous):
        mono.fermat([1, 3])


def test_verdicts():
    assert mono.monodromy_verdict(mono.du_val("E7")) == "infinite-order"
    assert mono.monodromy_verdict(mono.fermat([4, 4, 4, 4])) == "inconclusive"
    for n in range(2, 6):
        assert mono.monodromy_verdict(mono.fermat([2] * (n + 1))) == "infinite-order"
    curve = mono.fermat([2, 3])
    assert mono.monodromy_verdict(curve) == "inconclusive"
    assert mono.monodromy_verdict(curve, allow_n1=True) == "infinite-order"


def test_verdict_is_scale_invariant():
    rng = np.random.default_rng(2)
    for _ in range(50):
        p = mono.WeightedPoly(tuple(int(x) for x in rng.integers(1, 9, size=int(rng.integers(2, 6)))),
                              int(rng.integers(1, 20)))
        c = int(rng.integers(2, 7))
        assert mono.monodromy_verdict(p.scaled(c)) == mono.monodromy_verdict(p)


@pytest.mark.parametrize("name, m, sigma", [
    ("S", 5, -8), ("CP", 3, -6), ("F4/Spin9", None, -22), ("RP", 4, -3), ("S", 2, -2)])
def test_geodesic_witnesses(name, m, sigma):
    assert mono.sigma_geodesic(mono.geodesic_witness(name, m)) == sigma


def test_table_and_hp_disagreement():
    for m in range(1, 9):
        table = mono.symmetric_space_table(m)
        for name, row in table.items():
            assert row["witness_sigma"] < 0
            assert row["agrees"] == (name != "HP")
        assert table["HP"]["witness_sigma"] == -4 * m - 2
        assert table["HP"]["sigma"] == -4 * m + 2
    # HP^1 is the round S^4
    assert mono.symmetric_space_table(1)["HP"]["witness_sigma"] == mono.symmetric_space_table(4)["S"]["sigma"]


def test_malformed_conjugate_data():
    with pytest.raises(MalformedData):
        mono.ConjugatePointData(3, ((0.5, 1),))
    with pytest.raises(MalformedData):
        mono.ConjugatePointData(3, ((1.5, 1), (1, 2)))
    with pytest.raises(MalformedData):
        mono.geodesic_witness("S", 1)


def test_loops():
    assert mono.sigma_from_loop(LagrangianPath.constant(symcore.coordinate_frame(2))) == 0
    rng = np.random.default_rng(5)
    for _ in range(10):
        m = [int(x) for x in rng.integers(-5, 6, size=int(rng.integers(1, 5)))]
        assert mono.sigma_from_loop(mono.diagonal_loop(m)) == -2 * sum(m)
    assert mono.sigma_from_loop(mono.weighted_loop(mono.du_val("E7"))) == -2


def test_open_path_is_rejected():
    with pytest.raises(NotALoop):
        mono.sigma_from_loop(mono.diagonal_loop([0.25]))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maslovkit import gradedcalc as gc
from maslovkit.errors import InvalidConfig, MalformedProfile, NoBoundingTriple, StuckRewrite, UnsupportedCase
from maslovkit.symcore import INF

Z2 = gc.DimVector.point


def test_shift_and_duality():
    d = gc.DimVector({0: 1, 3: 2})
    assert gc.shift_hf(d, 4, 4) == d
    assert gc.shift_hf(Z2(0), 3, 0) == Z2(3)
    assert gc.poincare_dual(Z2(0), 2) == Z2(2)
    assert gc.poincare_dual(gc.poincare_dual(d, 5), 5) == d
    assert gc.poincare_dual(gc.sphere_cohomology(4), 4) == gc.sphere_cohomology(4)
    assert gc.shift_hf(Z2(1, 4), 7, 0) == Z2(0, 4)


@given(st.integers(-20, 20), st.integers(-20, 20), st.sampled_from([INF, 3, 8]))
def test_label_shift_algebra(k, l, N):
    L = gc.GradedLabel(1, 0, N)
    assert L[k][l] == L[k + l]


@pytest.mark.parametrize("word, target, n, shift", [
    ("t2", 2, 2, -1),
    ("t1 t2 t1 t2 t1 t2", 2, 2, -2),
    ("t1 t2 t1 t2 t1 t2", 1, 5, -11),
])
def test_twist_examples(word, target, n, shift):
    cfg = gc.GradedConfig(n, 3, first=1)
    assert gc.twist_word_apply(cfg, word, target) == gc.GradedLabel(target, shift)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), max_size=8),
       st.integers(2, 6), st.integers(0, 3))
def test_word_then_inverse_is_trivial(word, n, target):
    cfg = gc.GradedConfig(n, 4)
    full = list(word) + gc.inverse_word(word)
    assert gc.twist_word_apply(cfg, full, target, reduce=True) == cfg.label(target)


def test_stuck_rewrite_is_reported():
    cfg = gc.GradedConfig(2, 3)
    with pytest.raises(StuckRewrite):
        gc.twist_word_apply(cfg, "t0 t1", 2)


def test_word_parsing():
    assert gc.parse_word("t1 t2^-1 t3^2") == [(1, 1), (2, -1), (3, 1), (3, 1)]
    assert gc.format_word(gc.parse_word("t_{2}^{-1}")) == "t2^-1"
    with pytest.raises(InvalidConfig):
        gc.parse_word("s1")


def test_knotted_examples():
    a, b = gc.knotted_signature("even", 2, 1)
    assert (a, b) == (Z2(0), Z2(-2))
    assert gc.knotted_signature("even", 3, 0) == (Z2(0), Z2(0))
    assert gc.knotted_signature("odd", 5, 2)[1] == Z2(-44)
    assert gc.knotted_verdict("even", 2, 1) == "distinct"
    assert gc.knotted_verdict("odd", 5, 0) == "indistinguishable"
    assert gc.knotted_verdict("odd", 5, -3) == "distinct"
    with pytest.raises(UnsupportedCase):
        gc.knotted_verdict("odd", 3, 1)


@pytest.mark.parametrize("family", gc.FAMILIES)
def test_knotted_verdict_ignores_common_regrading(family):
    rng = np.random.default_rng(4)
    for n in (2, 4, 6):
        base = gc.knotting_config(family, n)
        shifted = base.shifted_indices([int(x) for x in rng.integers(-5, 6, size=base.k)])
        for k in (-1, 0, 2):
            assert gc.knotted_verdict(family, n, k, shifted) == gc.knotted_verdict(family, n, k)


def test_picard_lefschetz_examples():
    Q = gc.GradedConfig(2, 2).homology()
    assert list(gc.picard_lefschetz([1, 0], 0, Q, 2)) == [-1, 0]
    assert gc.pl_order(Q, 0, 2) == 2
    Q3 = gc.GradedConfig(3, 2).homology()
    assert np.array_equal(gc.pl_g_squared(Q3, 0, 1, 3), np.eye(2, dtype=np.int64))
    assert gc.pl_order(Q3, 0, 3) == INF
    assert gc.pl_order(np.zeros((1, 1), dtype=np.int64), 0, 3) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_picard_lefschetz_preserves_form(n):
    rng = np.random.default_rng(n)
    for _ in range(20):
        size = int(rng.integers(1, 6))
        Q = gc.random_lattice(rng, size, n)
        l = int(rng.integers(0, size))
        c, d = rng.integers(-6, 7, size=(2, size))
        Tc, Td = gc.picard_lefschetz(c, l, Q, n), gc.picard_lefschetz(d, l, Q, n)
        assert Tc @ Q @ Td == c @ Q @ d


def test_cpn_examples():
    assert gc.cpn_check(2, [1, 0, 1])["reason"] == "gap not two-periodic"
    rp = gc.cpn_check(3, [1, 1, 1, 1], [2])
    assert rp["verdict"] == "admissible" and rp["forced"] == "b_i = 1 for all i"
    assert gc.cpn_check(2, [1, 2, 1], [2, 2])["verdict"] == "contradiction"
    with pytest.raises(MalformedProfile):
        gc.cpn_check(2, [1, 1, 1], [2, 2])
    with pytest.raises(MalformedProfile):
        gc.cpn_check(2, [0, 1, 1])


def test_cpn_periodicity_only_removes_admissibility():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(2, 7))
        g = int(rng.integers(1, 4))
        mid = [int(x) for x in rng.integers(0, 4, size=n - 1)]
        mid[0] = g
        profile = [1] + mid + [1]
        r = gc.cpn_check(n, profile, [2] * g)
        if r["verdict"] == "admissible":
            assert any(gc._two_periodic(p) for p in r["profiles"].values())
        # the stronger constraint H^1 = 0 never admits more
        assert gc.cpn_check(n, profile)["verdict"] == "contradiction"


def test_surface_rules_and_search():
    data = gc.genus2_pants(4)
    facts = gc.surface_rules(data)
    assert facts["rule_a"] and facts["boundary_sum"] == {"mod": 4, "val": 2}
    found = gc.surface_ungradable_search(data)
    assert found["nu"] == 1 and abs(found["pairing"]) == 1
    assert found["rotation_change"]["val"] != 0
    with pytest.raises(NoBoundingTriple):
        gc.surface_ungradable_search(gc.genus2_pants(4, (1, 0, 0)))
    assert gc.surface_ungradable_search(gc.genus2_pants(INF, (-2, 0, 0)))["nu"] == 1


def test_surface_twist_zero_pairing_and_inverse():
    a1, a2 = (1, 0, 0, 0), (0, 0, 1, 0)
    assert gc.surface_twist(a1, 3, a2, 1, 7) == (a2, 1)
    b1 = (0, 1, 0, 0)
    cls, R = gc.surface_twist(a1, 3, b1, 1, 7)
    assert gc.surface_twist(a1, 3, cls, R, 7, power=-1) == (b1, 1)

"""Shift numbers of boundary circle actions.

For a weighted homogeneous polynomial with weights ``beta_j`` and degree
``beta`` the shift number is ``2 (beta - sum beta_j)``; for a manifold all of
whose geodesics close up it is minus the total multiplicity of conjugate
points along one period.  Both can be cross-checked against the winding of
``det^2`` along an explicit loop of Lagrangian subspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import symcore
from .errors import MalformedData, NonIntegralWinding, NotQuasiHomogeneous
from .index import winding_det_sq
from .paths import LagrangianPath

WINDING_TOL = 1e-3


@dataclass(frozen=True)
class WeightedPoly:
    weights: tuple  # beta_0, ..., beta_n
    beta: int
    monomials: tuple = ()  # exponent vectors

    def __post_init__(self):
        w = tuple(int(b) for b in self.weights)
        if len(w) < 1 or any(b <= 0 for b in w) or int(self.beta) <= 0:
            raise NotQuasiHomogeneous("weights and degree must be positive integers")
        mons = tuple(tuple(int(a) for a in m) for m in self.monomials)
        for m in mons:
            if len(m) != len(w) or any(a < 0 for a in m):
                raise NotQuasiHomogeneous(f"monomial {m} does not match {len(w)} variables")
            if sum(a * b for a, b in zip(m, w)) != int(self.beta):
                raise NotQuasiHomogeneous(f"monomial {m} has weighted degree "
                                          f"{sum(a * b for a, b in zip(m, w))}, expected {self.beta}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "beta", int(self.beta))
        object.__setattr__(self, "monomials", mons)

    @property
    def n(self) -> int:
        """Complex dimension of the Milnor fibre (variables minus one)."""
        return len(self.weights) - 1

    @property
    def weight_sum(self):
        return sum(Fraction(b, self.beta) for b in self.weights)

    def scaled(self, c: int) -> "WeightedPoly":
        return WeightedPoly(tuple(c * b for b in self.weights), c * self.beta, self.monomials)


def sigma_weighted(p: WeightedPoly) -> int:
    return 2 * (p.beta - sum(p.weights))


def monodromy_verdict(p: WeightedPoly, allow_n1: bool = False) -> str:
    """'infinite-order' when the weights do not sum to one (and n >= 2), else 'inconclusive'."""
    if p.weight_sum != 1 and (p.n >= 2 or (allow_n1 and p.n == 1)):
        return "infinite-order"
    return "inconclusive"


def fermat(exponents) -> WeightedPoly:
    """x_0^{a_0} + ... + x_n^{a_n} with its minimal weights."""
    a = [int(x) for x in exponents]
    if any(x < 2 for x in a):
        raise NotQuasiHomogeneous("Fermat exponents must be at least 2")
    beta = math.lcm(*a)
    mons = []
    for j, e in enumerate(a):
        m = [0] * len(a)
        m[j] = e
        mons.append(tuple(m))
    return WeightedPoly(tuple(beta // e for e in a), beta, tuple(mons))


def du_val(kind: str, k: int | None = None) -> WeightedPoly:
    """Simple surface singularities A_k, D_k, E_6, E_7, E_8 in three variables."""
    kind = kind.upper()
    if kind == "A":
        if k is None or k < 1:
            raise NotQuasiHomogeneous("A_k needs k >= 1")
        return WeightedPoly((2, k + 1, k + 1), 2 * k + 2, ((k + 1, 0, 0), (0, 2, 0), (0, 0, 2)))
    if kind == "D":
        if k is None or k < 4:
            raise NotQuasiHomogeneous("D_k needs k >= 4")
        return WeightedPoly((2, k - 2, k - 1), 2 * k - 2, ((k - 1, 0, 0), (1, 2, 0), (0, 0, 2)))
    table = {
        "E6": ((4, 3, 6), 12, ((3, 0, 0), (0, 4, 0), (0, 0, 2))),
        "E7": ((6, 4, 9), 18, ((3, 0, 0), (1, 3, 0), (0, 0, 2))),
        "E8": ((10, 6, 15), 30, ((3, 0, 0), (0, 5, 0), (0, 0, 2))),
    }
    if kind not in table:
        raise NotQuasiHomogeneous(f"unknown simple singularity {kind}")
    w, b, m = table[kind]
    return WeightedPoly(w, b, m)


# ---------------------------------------------------------------------------
# periodic geodesic flows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConjugatePointData:
    dim: int
    points: tuple  # ((t, multiplicity), ...)

    def __post_init__(self):
        if self.dim < 2:
            raise MalformedData("manifold dimension must be at least 2")
        pts = []
        for t, m in self.points:
            t = Fraction(t).limit_denominator(10**6) if not isinstance(t, Fraction) else t
            if not 0 < t <= 1:
                raise MalformedData(f"conjugate time {t} outside (0, 1]")
            if int(m) <= 0:
                raise MalformedData("multiplicities must be positive")
            pts.append((t, int(m)))
        full = [m for t, m in pts if t == 1]
        if full != [self.dim - 1]:
            raise MalformedData(f"the full period must appear once with multiplicity {self.dim - 1}")
        object.__setattr__(self, "points", tuple(sorted(pts)))


def sigma_geodesic(d: ConjugatePointData) -> int:
    return -sum(m for _, m in d.points)


def geodesic_witness(name: str, m: int | None = None) -> ConjugatePointData:
    """Conjugate points along one period for the compact rank-one symmetric spaces.

    Half-period entries come from the antipodal (or cut-locus) focusing;
    the full-period entry is the dim - 1 Jacobi fields vanishing there.
    """
    half = 0.5
    if name == "F4/Spin9":
        return ConjugatePointData(16, ((half, 7), (1, 15)))
    if m is None:
        raise MalformedData(f"{name} needs a parameter m")
    if name == "S":
        if m < 2:
            raise MalformedData("S^m needs m >= 2")
        return ConjugatePointData(m, ((half, m - 1), (1, m - 1)))
    if name == "RP":
        if m < 2:
            raise MalformedData("RP^m needs m >= 2")
        return ConjugatePointData(m, ((1, m - 1),))
    if name == "CP":
        if m < 1:
            raise MalformedData("CP^m needs m >= 1")
        return ConjugatePointData(2 * m, ((half, 1), (1, 2 * m - 1)))
    if name == "HP":
        if m < 1:
            raise MalformedData("HP^m needs m >= 1")
        return ConjugatePointData(4 * m, ((half, 3), (1, 4 * m - 1)))
    raise MalformedData(f"unknown symmetric space {name}")


TABLE_FORMS = {
    "S": lambda m: 2 - 2 * m,
    "RP": lambda m: 1 - m,
    "CP": lambda m: -2 * m,
    "HP": lambda m: -4 * m + 2,
    "F4/Spin9": lambda m: -22,
}


def symmetric_space_table(m: int):
    """Tabulated shift numbers with their conjugate-point witnesses.

    ``sigma`` is the tabulated closed form; ``witness_sigma`` is what the
    witness data gives and ``agrees`` compares the two.  For HP^m the
    witness yields -4m - 2 (HP^1 = S^4 gives -6), which differs from the
    tabulated -4m + 2 by four, so ``agrees`` is False there.
    """
    out = {}
    for name, form in TABLE_FORMS.items():
        try:
            w = geodesic_witness(name, m)
        except MalformedData:
            continue
        ws = sigma_geodesic(w)
        out[name] = {"sigma": form(m), "witness": [[float(t), k] for t, k in w.points],
                     "witness_sigma": ws, "agrees": ws == form(m)}
    return out


# ---------------------------------------------------------------------------
# loops
# ---------------------------------------------------------------------------


def sigma_from_loop(loop: LagrangianPath) -> int:
    loop.require_loop()
    w = winding_det_sq(loop)
    k = round(w)
    if abs(w - k) > WINDING_TOL:
        raise NonIntegralWinding(f"winding {w} is not an integer")
    return -int(k)


def diagonal_loop(multiplicities) -> LagrangianPath:
    """t -> diag(exp(2 pi i m_j t)) R^n over [0, 1]."""
    m = np.asarray(multiplicities, dtype=float)
    G = symcore.realify(np.diag(2j * math.pi * m))
    return LagrangianPath.exponential(symcore.coordinate_frame(len(m)), G)


def weighted_loop(p: WeightedPoly) -> LagrangianPath:
    """Circle action with weights beta_j on the fibre, compensated by -beta on the normal line."""
    return diagonal_loop(list(p.weights) + [-p.beta])

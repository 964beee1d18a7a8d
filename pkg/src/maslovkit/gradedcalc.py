"""Symbolic calculus of graded Lagrangian spheres and Dehn twists.

Objects are graded isotopy classes.  A configuration is a chain of spheres
``L_i`` (consecutive ids meet once, others are disjoint) with reference
gradings ``L~_i`` and absolute indices ``I(i, i+1)`` at the intersection
points.  Words in the graded twists act on labels ``L~_j[s]`` through three
rewriting rules:

* self twist:   t_i^{+-1}(L~_i[s]) = L~_i[s +- (1 - n)]
* disjointness: t_i^{+-1}(X) = X when the sphere of ``i`` misses ``X``
* exchange:     t_a(L~_b)[s] = t_b^{-1}(L~_a)[s + 1 - I(a, b)]
                t_a^{-1}(L~_b)[s] = t_b(L~_a)[s + n - 1 - I(a, b)]

The exchange rule comes from the graded braiding isotopy, which holds when
the index at the intersection point equals 1; the shift in the rule is the
amount needed to reach that normalisation.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidConfig,
    MalformedProfile,
    ModulusMismatch,
    NoBoundingTriple,
    StuckRewrite,
    UnsupportedCase,
)
from .symcore import INF, ZModN, _check_modulus

# ---------------------------------------------------------------------------
# graded dimension vectors
# ---------------------------------------------------------------------------


def _red(d: int, modulus) -> int:
    return d if modulus == INF else d % modulus


@dataclass(frozen=True)
class DimVector:
    """Finitely supported map degree -> dimension, degrees in Z/N."""

    dims: tuple = ()
    modulus: float | int = INF

    def __post_init__(self):
        _check_modulus(self.modulus)
        acc: dict[int, int] = {}
        items = self.dims.items() if isinstance(self.dims, dict) else self.dims
        for d, m in items:
            if int(m) < 0:
                raise ValueError("dimensions must be nonnegative")
            if int(m):
                key = _red(int(d), self.modulus)
                acc[key] = acc.get(key, 0) + int(m)
        object.__setattr__(self, "dims", tuple(sorted(acc.items())))

    @classmethod
    def point(cls, degree: int, modulus=INF) -> "DimVector":
        return cls({degree: 1}, modulus)

    def as_dict(self) -> dict[int, int]:
        return dict(self.dims)

    def __getitem__(self, degree: int) -> int:
        return self.as_dict().get(_red(degree, self.modulus), 0)

    def __add__(self, other: "DimVector") -> "DimVector":
        if self.modulus != other.modulus:
            raise ModulusMismatch("graded groups with different moduli")
        return DimVector(self.dims + other.dims, self.modulus)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.dims)

    def to_json(self):
        return {str(d): m for d, m in self.dims}


def shift_hf(d: DimVector, k: int, l: int) -> DimVector:
    """Graded group of (L0[k], L1[l]) from that of (L0, L1): out(j) = in(j - k + l)."""
    for v in (k, l):
        if isinstance(v, ZModN) and v.modulus != d.modulus:
            raise ModulusMismatch("shift and group have different moduli")
    k = k.value if isinstance(k, ZModN) else int(k)
    l = l.value if isinstance(l, ZModN) else int(l)
    return DimVector({deg + k - l: m for deg, m in d.dims}, d.modulus)


def poincare_dual(d: DimVector, n: int) -> DimVector:
    """Graded group of the swapped pair: out(j) = in(n - j)."""
    return DimVector({n - deg: m for deg, m in d.dims}, d.modulus)


def sphere_cohomology(n: int, modulus=INF) -> DimVector:
    return DimVector({0: 1, n: 1}, modulus)


# ---------------------------------------------------------------------------
# configurations and labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GradedLabel:
    sphere: int
    shift: int = 0
    modulus: float | int = INF

    def __post_init__(self):
        object.__setattr__(self, "shift", _red(int(self.shift), self.modulus))

    def __getitem__(self, k: int) -> "GradedLabel":
        """``L[k][l] == L[k + l]``."""
        return GradedLabel(self.sphere, self.shift + int(k), self.modulus)

    def to_json(self):
        return {"sphere": self.sphere, "shift": ZModN(self.shift, self.modulus).to_json()}


@dataclass(frozen=True)
class GradedConfig:
    """A chain (A_k) of spheres ``first, ..., first + k - 1`` in dimension 2n."""

    n: int
    k: int
    first: int = 0
    modulus: float | int = INF
    indices: tuple = ()  # I(i, i+1) for consecutive pairs, default 0

    def __post_init__(self):
        _check_modulus(self.modulus)
        if self.n < 1 or self.k < 1:
            raise InvalidConfig("need n >= 1 and at least one sphere")
        idx = tuple(int(x) for x in self.indices) or (0,) * (self.k - 1)
        if len(idx) != self.k - 1:
            raise InvalidConfig(f"expected {self.k - 1} intersection indices, got {len(idx)}")
        object.__setattr__(self, "indices", idx)

    @property
    def spheres(self) -> list[int]:
        return list(range(self.first, self.first + self.k))

    def label(self, sphere: int, shift: int = 0) -> GradedLabel:
        self.check_sphere(sphere)
        return GradedLabel(sphere, shift, self.modulus)

    def check_sphere(self, i: int):
        if i not in self.spheres:
            raise InvalidConfig(f"sphere {i} is not in the configuration {self.spheres}")

    def adjacent(self, i: int, j: int) -> bool:
        return abs(i - j) == 1

    def index(self, i: int, j: int) -> int:
        """Absolute index I(L~_i, L~_j; x) of the reference gradings."""
        if not self.adjacent(i, j):
            raise InvalidConfig(f"spheres {i} and {j} do not intersect")
        if j == i + 1:
            return self.indices[i - self.first]
        return self.n - self.indices[j - self.first]

    def homology(self) -> np.ndarray:
        """Intersection matrix of the oriented sphere classes."""
        s = (-1) ** (self.n * (self.n - 1) // 2)
        Q = np.zeros((self.k, self.k), dtype=np.int64)
        for i in range(self.k):
            Q[i, i] = s * (1 + (-1) ** self.n)
            if i + 1 < self.k:
                Q[i, i + 1] = 1
                Q[i + 1, i] = (-1) ** self.n
        return Q

    def shifted_indices(self, deltas) -> "GradedConfig":
        """Configuration after regrading sphere ``first + i`` by ``[deltas[i]]``."""
        new = [self.indices[i] + deltas[i] - deltas[i + 1] for i in range(self.k - 1)]
        return GradedConfig(self.n, self.k, self.first, self.modulus, tuple(new))


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"^t_?\{?(-?\d+)\}?(?:\^\{?([+-]?\d+)\}?)?$")


def parse_word(text) -> list[tuple[int, int]]:
    """Parse ``"t1 t2^-1 t3^2"`` (or a list of such tokens) into letters ``(sphere, +-1)``."""
    tokens = text.split() if isinstance(text, str) else list(text)
    letters = []
    for tok in tokens:
        m = _TOKEN.match(str(tok).strip())
        if not m:
            raise InvalidConfig(f"cannot parse twist token {tok!r}")
        sphere = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        letters += [(sphere, 1 if e > 0 else -1)] * abs(e)
    return letters


def format_word(word) -> str:
    return " ".join(f"t{s}" if e == 1 else f"t{s}^-1" for s, e in word)


def inverse_word(word):
    return [(s, -e) for s, e in reversed(word)]


def word_power(word, k: int):
    base = list(word) if k >= 0 else inverse_word(word)
    return base * abs(k)


def free_reduce(word):
    out = []
    for letter in word:
        if out and out[-1] == (letter[0], -letter[1]):
            out.pop()
        else:
            out.append(letter)
    return out


@dataclass(frozen=True)
class _Twisted:
    """The object t_a^e(L~_b)[shift] with a, b adjacent."""

    a: int
    e: int
    b: int
    shift: int


def _exchange(cfg: GradedConfig, st: _Twisted) -> _Twisted:
    I = cfg.index(st.a, st.b)
    delta = 1 - I if st.e == 1 else cfg.n - 1 - I
    return _Twisted(st.b, -st.e, st.a, st.shift + delta)


def _act(cfg: GradedConfig, letter, state):
    c, f = letter
    n = cfg.n
    if isinstance(state, GradedLabel):
        j = state.sphere
        if c == j:
            return state[f * (1 - n)]
        if not cfg.adjacent(c, j):
            return state
        return _Twisted(c, f, j, state.shift)
    if c == state.a and f == -state.e:
        return GradedLabel(state.b, state.shift, cfg.modulus)
    if abs(c - state.a) >= 2 and abs(c - state.b) >= 2:
        return state
    alt = _exchange(cfg, state)
    if c == alt.a and f == -alt.e:
        return GradedLabel(alt.b, alt.shift, cfg.modulus)
    raise StuckRewrite(
        f"no rule applies to t{c}^{f:+d} acting on t{state.a}^{state.e:+d}(L{state.b})[{state.shift}]")


def twist_word_apply(cfg: GradedConfig, word, target: int | GradedLabel, reduce: bool = False) -> GradedLabel:
    """Apply a twist word (rightmost letter first) to a graded sphere."""
    word = parse_word(word) if isinstance(word, str) else [(int(s), int(e)) for s, e in word]
    for s, e in word:
        cfg.check_sphere(s)
        if e not in (1, -1):
            raise InvalidConfig("letters must have exponent +-1")
    if reduce:
        word = free_reduce(word)
    state = target if isinstance(target, GradedLabel) else cfg.label(target)
    cfg.check_sphere(state.sphere)
    for letter in reversed(word):
        state = _act(cfg, letter, state)
    if not isinstance(state, GradedLabel):
        raise StuckRewrite(f"word ends at the twisted object t{state.a}^{state.e:+d}(L{state.b}), not a sphere label")
    return state


def hf_labels(cfg: GradedConfig, x: GradedLabel, y: GradedLabel) -> DimVector:
    """Graded Floer group of two graded spheres of the configuration (Z/2 ranks)."""
    i, j = x.sphere, y.sphere
    p, q = x.shift, y.shift
    if i == j:
        return DimVector({p - q: 1, p - q + cfg.n: 1}, cfg.modulus)
    if cfg.adjacent(i, j):
        return DimVector.point(cfg.index(i, j) + p - q, cfg.modulus)
    return DimVector({}, cfg.modulus)


# ---------------------------------------------------------------------------
# knotted spheres
# ---------------------------------------------------------------------------

FAMILIES = ("even", "odd")


def knotting_word(family: str, k: int):
    if family == "even":
        return word_power([(2, 1)], 2 * k)
    if family == "odd":
        g = [(2, 1), (3, 1)] * 3
        return word_power(g, 2 * k)
    raise InvalidConfig(f"family must be one of {FAMILIES}")


def knotting_config(family: str, n: int, indices=(), modulus=INF) -> GradedConfig:
    if family not in FAMILIES:
        raise InvalidConfig(f"family must be one of {FAMILIES}")
    if n < 2:
        raise UnsupportedCase("the graded twist calculus needs n >= 2")
    return GradedConfig(n, 3 if family == "even" else 4, 0, modulus, tuple(indices))


def knotted_signature(family: str, n: int, k: int, cfg: GradedConfig | None = None):
    """(HF(L~_0, L~_1^(k)), HF(L~_1^(k), L~_2)) where L~_1^(k) = w(L~_1).

    Both groups are computed by moving ``w`` to the other side:
    HF(L0, w L1) = HF(w^-1 L0, L1) and HF(w L1, L2) = HF(L1, w^-1 L2).
    """
    cfg = knotting_config(family, n) if cfg is None else cfg
    w_inv = inverse_word(knotting_word(family, k))
    l0 = twist_word_apply(cfg, w_inv, 0)
    l2 = twist_word_apply(cfg, w_inv, 2)
    l1 = cfg.label(1)
    return hf_labels(cfg, l0, l1), hf_labels(cfg, l1, l2)


def knotted_closed_form(family: str, n: int, k: int) -> int:
    return 2 * k * (1 - n) if family == "even" else 2 * k * (4 - 3 * n)


def _candidate_shifts(a: DimVector, b: DimVector):
    out = set()
    for (da, _), (db, _) in itertools.product(a.dims, b.dims):
        out.add(db - da)
        out.add(da - db)
    return sorted(out) or [0]


def knotted_verdict(family: str, n: int, k: int, cfg: GradedConfig | None = None) -> str:
    """'distinct' when no regrading L~_1[r] matches both signatures of k = 0."""
    if family == "odd" and n == 3:
        raise UnsupportedCase("the odd family with n = 3 is an open case")
    cfg = knotting_config(family, n) if cfg is None else cfg
    a0, b0 = knotted_signature(family, n, 0, cfg)
    ak, bk = knotted_signature(family, n, k, cfg)
    for r in set(_candidate_shifts(a0, ak)) | set(_candidate_shifts(b0, bk)):
        if shift_hf(a0, 0, r) == ak and shift_hf(b0, r, 0) == bk:
            return "indistinguishable"
    return "distinct"


# ---------------------------------------------------------------------------
# Picard-Lefschetz
# ---------------------------------------------------------------------------


def pl_sign(n: int) -> int:
    return (-1) ** (n * (n - 1) // 2)


def pl_matrix(Q, l: int, n: int) -> np.ndarray:
    """Matrix of c -> c - s (c . e_l) e_l, with c . d = c^T Q d."""
    Q = np.asarray(Q, dtype=np.int64)
    T = np.eye(len(Q), dtype=np.int64)
    T[l, :] -= pl_sign(n) * Q[:, l]
    return T


def picard_lefschetz(c, l: int, Q, n: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.int64)
    return pl_matrix(Q, l, n) @ c


def pl_order(Q, l: int, n: int):
    """Order of the twist action: 2 for even n; 1 or infinity for odd n."""
    T = pl_matrix(Q, l, n)
    I = np.eye(len(T), dtype=np.int64)
    if n % 2 == 0:
        if not np.array_equal(T @ T, I):
            raise InvalidConfig("twist action is not an involution; check the intersection form")
        return 1 if np.array_equal(T, I) else 2
    return 1 if not np.any(np.asarray(Q)[:, l]) else INF


def pl_g_squared(Q, l1: int, l2: int, n: int) -> np.ndarray:
    """Matrix of g^2 with g = (T_{l1} T_{l2})^3."""
    T1 = pl_matrix(Q, l1, n)
    T2 = pl_matrix(Q, l2, n)
    g = np.linalg.matrix_power(T1 @ T2, 3)
    return g @ g


def random_lattice(rng, size: int, n: int, bound: int = 3) -> np.ndarray:
    """Random integer intersection form with the symmetry and diagonal of n-spheres."""
    s = pl_sign(n)
    eps = (-1) ** n
    Q = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        Q[i, i] = s * (1 + eps)
        for j in range(i + 1, size):
            v = int(rng.integers(-bound, bound + 1))
            Q[i, j] = v
            Q[j, i] = eps * v
    return Q


# ---------------------------------------------------------------------------
# Lagrangian embeddings into CP^n
# ---------------------------------------------------------------------------


def _two_periodic(profile: list[int]) -> bool:
    m = len(profile)
    return all(profile[i] == profile[(i + 2) % m] for i in range(m))


def cpn_check(n: int, profile, h1_mod=()):
    """Replay the grading argument for a Lagrangian L in CP^n.

    ``profile`` lists the mod 2 Betti numbers b_0..b_n of L and ``h1_mod``
    the orders of the cyclic summands of H^1(L; Z/(2n+2)) (empty for 0).
    Returns a dict with ``verdict`` in {admissible, contradiction}.
    """
    profile = [int(b) for b in profile]
    h1 = [int(x) for x in h1_mod]
    if n < 2:
        raise MalformedProfile("n must be at least 2")
    if len(profile) != n + 1 or any(b < 0 for b in profile):
        raise MalformedProfile(f"expected {n + 1} nonnegative Betti numbers")
    if profile[0] != 1 or profile[n] != 1:
        raise MalformedProfile("b_0 and b_n must be 1 for a closed connected manifold")
    M = 2 * n + 2
    if any(x < 2 or M % x for x in h1):
        raise MalformedProfile(f"cyclic summands must have orders dividing {M}")
    if not h1:
        gap = profile + [0] * (n + 1)
        ok = _two_periodic(gap)
        return {"verdict": "admissible" if ok else "contradiction",
                "reason": None if ok else "gap not two-periodic",
                "profiles": {"gap": gap}, "forced": None}
    if all(x == 2 for x in h1):
        g = len(h1)
        if profile[1] != g:
            raise MalformedProfile(f"H^1(L; Z/2) must have rank {g}, got b_1 = {profile[1]}")
        full = list(profile)
        trunc = [0] + profile[1:n] + [0]
        ok_full, ok_trunc = _two_periodic(full), _two_periodic(trunc)
        if ok_full or ok_trunc:
            forced = "b_i = 1 for all i" if ok_full else None
            return {"verdict": "admissible", "reason": None,
                    "profiles": {"full": full, "truncated": trunc}, "forced": forced}
        return {"verdict": "contradiction", "reason": "neither Floer profile is two-periodic",
                "profiles": {"full": full, "truncated": trunc}, "forced": None}
    return {"verdict": "admissible", "reason": None, "profiles": {}, "forced": None}


# ---------------------------------------------------------------------------
# surfaces: rotation numbers of curves
# ---------------------------------------------------------------------------


def surface_pairing(c, d) -> int:
    """Standard intersection form on Z^{2g}, basis (a_1, b_1, ..., a_g, b_g)."""
    c = [int(x) for x in c]
    d = [int(x) for x in d]
    if len(c) != len(d) or len(c) % 2:
        raise InvalidConfig("homology classes must have matching even length")
    return sum(c[2 * i] * d[2 * i + 1] - c[2 * i + 1] * d[2 * i] for i in range(len(c) // 2))


@dataclass(frozen=True)
class CurveData:
    genus: int
    modulus: int
    curves: tuple  # ((class tuple, R), ...)
    boundary: tuple = ()  # indices of curves bounding a subsurface
    chi: int = -1  # Euler characteristic of that subsurface

    def __post_init__(self):
        _check_modulus(self.modulus)
        if self.genus < 1:
            raise InvalidConfig("genus must be positive")
        curves = []
        for cls, R in self.curves:
            cls = tuple(int(x) for x in cls)
            if len(cls) != 2 * self.genus:
                raise InvalidConfig(f"class {cls} is not in Z^{2 * self.genus}")
            curves.append((cls, _red(int(R), self.modulus)))
        object.__setattr__(self, "curves", tuple(curves))
        for i in self.boundary:
            if not 0 <= i < len(curves):
                raise InvalidConfig(f"boundary index {i} out of range")

    def rotation(self, i: int) -> int:
        return self.curves[i][1]


def genus2_pants(modulus: int, rotations=(-2, 0, 0)) -> CurveData:
    """Curves a_1, a_2, -(a_1 + a_2) bounding a pair of pants in genus 2."""
    classes = [(1, 0, 0, 0), (0, 0, 1, 0), (-1, 0, -1, 0)]
    return CurveData(2, modulus, tuple(zip(classes, rotations)), (0, 1, 2), -1)


def surface_twist(c_L, R_L: int, c_other, R_other: int, modulus, power: int = 1):
    """Class and rotation number of t_L^power(L')."""
    p = surface_pairing(c_other, c_L)
    cls = tuple(int(x) - power * p * int(y) for x, y in zip(c_other, c_L))
    return cls, _red(int(R_other) - power * p * int(R_L), modulus)


def surface_rules(data: CurveData):
    """Rule-(a) bookkeeping for the declared boundary and gradability of each curve."""
    total = sum(data.rotation(i) for i in data.boundary)
    expected = 2 * data.chi
    return {
        "boundary_sum": ZModN(total, data.modulus).to_json(),
        "expected": ZModN(expected, data.modulus).to_json(),
        "rule_a": ZModN(total, data.modulus) == ZModN(expected, data.modulus),
        "gradable": [data.rotation(i) == 0 for i in range(len(data.curves))],
    }


def _bezout_partner(c) -> tuple[int, ...]:
    """An integer class d with c . d = 1 (c must be primitive)."""
    g = len(c) // 2
    f = []
    for i in range(g):  # d -> c . d = sum c_{a_i} d_{b_i} - c_{b_i} d_{a_i}
        f += [-c[2 * i + 1], c[2 * i]]
    cur, vec = 0, None
    for idx, a in enumerate(f):
        if a == 0:
            continue
        if vec is None:
            cur, vec = a, [0] * len(f)
            vec[idx] = 1
            continue
        g_, x, y = _egcd(cur, a)
        vec = [x * v for v in vec]
        vec[idx] += y
        cur = g_
    if vec is None or abs(cur) != 1:
        raise NoBoundingTriple(f"class {tuple(c)} is not primitive, no dual curve")
    coeffs = [cur * v for v in vec]  # cur = +-1
    return tuple(coeffs)


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def surface_ungradable_search(data: CurveData):
    """Find nu with R(L_nu) != 0 on the boundary and a dual curve L' (pairing +-1).

    Then t_{L_nu} changes the rotation number of L', so it admits no grading.
    """
    if data.genus < 2:
        raise UnsupportedCase("the search needs genus >= 2")
    if data.modulus != INF and data.modulus <= 2:
        raise UnsupportedCase("the search needs N > 2")
    facts = surface_rules(data)
    if len(data.boundary) == 0 or not facts["rule_a"]:
        raise NoBoundingTriple("boundary curves violate the rotation-sum rule")
    for pos, i in enumerate(data.boundary):
        cls, R = data.curves[i]
        if R != 0:
            partner = _bezout_partner(cls)
            pairing = surface_pairing(partner, cls)
            _, R_new = surface_twist(cls, R, partner, 0, data.modulus)
            return {"nu": pos + 1, "curve": i, "partner": list(partner), "pairing": pairing,
                    "rotation_change": ZModN(R_new, data.modulus).to_json()}
    return None

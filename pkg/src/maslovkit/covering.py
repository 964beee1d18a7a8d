"""Maslov coverings of the linear Lagrangian Grassmannian as phase lifts.

A point of the N-fold covering is a Lagrangian subspace ``Lambda`` together
with a real number ``theta`` (taken mod N) satisfying
``exp(2 pi i theta) = det^2(Lambda)``.  The deck transformation ``rho(k)``
adds ``k`` to ``theta``.  Graded unitary maps ``(U, t)`` with
``det(U_C)^2 = exp(2 pi i t)`` act by ``(Lambda, theta) -> (U Lambda, theta + t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import symcore
from .errors import (
    DegenerateFixedPoint,
    InconsistentStart,
    InvalidCurve,
    ModulusMismatch,
    NonIntegralIndex,
    NotSymplectic,
    NotTransverse,
)
from .index import conley_zehnder, det_sq_trace, maslov_pair, winding_det_sq
from .paths import LagrangianPath, SymplecticPath, unitary_connector
from .symcore import INF, HalfInt, ZModN

INTEGRALITY_TOL = 1e-6


def _reduce(theta: float, modulus) -> float:
    if modulus == INF:
        return float(theta)
    r = math.fmod(theta, modulus)
    return r + modulus if r < 0 else r


def _near_integer(x: float, what: str, err=NonIntegralIndex) -> int:
    k = round(x)
    if abs(x - k) > INTEGRALITY_TOL:
        raise err(f"{what} = {x!r} is not an integer")
    return int(k)


def _check_same_modulus(a, b):
    if a != b:
        raise ModulusMismatch(f"moduli {a} and {b} differ")


@dataclass(frozen=True)
class MaslovLift:
    frame: np.ndarray = field(repr=False)
    theta: float
    modulus: float | int = INF

    def __post_init__(self):
        symcore._check_modulus(self.modulus)
        F = symcore.check_lagrangian(self.frame)
        object.__setattr__(self, "frame", F)
        object.__setattr__(self, "theta", _reduce(float(self.theta), self.modulus))
        phase = np.exp(2j * math.pi * self.theta)
        if abs(phase - symcore.det_sq(F)) > max(symcore.tolerances().phase, 1e-7):
            raise InconsistentStart(f"exp(2 pi i theta) does not match det^2 of the frame (theta={self.theta})")

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    def deck(self, k: int) -> "MaslovLift":
        return MaslovLift(self.frame, self.theta + k, self.modulus)

    def shift(self, k: int) -> "MaslovLift":
        """Grading shift ``[k]``, which is the deck transformation rho(-k)."""
        return self.deck(-k)

    def same_point(self, other: "MaslovLift") -> bool:
        if self.modulus != other.modulus or not symcore.same_subspace(self.frame, other.frame, 1e-8):
            return False
        d = self.theta - other.theta
        if self.modulus != INF:
            d = _reduce(d + 0.5, self.modulus) - 0.5
        return abs(d) < 1e-6

    def to_json(self):
        return {"frame": self.frame.tolist(), "theta": self.theta,
                "modulus": "inf" if self.modulus == INF else self.modulus}


def standard_lift(n: int, imaginary: bool = False, theta: float = 0.0, modulus=INF) -> MaslovLift:
    return MaslovLift(symcore.coordinate_frame(n, imaginary), theta, modulus)


def lift_path(path: LagrangianPath, theta_start: float, modulus=INF):
    """Lift ``path`` starting at ``theta_start``; returns (end lift, (times, thetas))."""
    F0 = path.frame_at(path.start)
    if abs(np.exp(2j * math.pi * theta_start) - symcore.det_sq(F0)) > max(symcore.tolerances().phase, 1e-7):
        raise InconsistentStart("theta_start is not a phase of det^2 at the start of the path")
    ts, thetas = det_sq_trace(path, theta_start)
    end = MaslovLift(path.frame_at(path.end), thetas[-1], modulus)
    if modulus != INF:
        thetas = [_reduce(x, modulus) for x in thetas]
    return end, (np.asarray(ts), np.asarray(thetas))


# ---------------------------------------------------------------------------
# absolute Maslov index
# ---------------------------------------------------------------------------


def _phase_turns(H) -> float:
    """Change of arg det^2 (in turns) along exp(sH), s in [0, 1], H skew-Hermitian."""
    return float(np.trace(symcore.complexify(H)).imag / math.pi)


def _deck_loop_generator(F, m: int) -> np.ndarray:
    """Generator of a loop at span(F) whose det^2 lift gains exactly ``m``."""
    Z = symcore.unitary_frame(F)
    D = np.zeros((Z.shape[0], Z.shape[0]), dtype=complex)
    D[0, 0] = 1j * math.pi * m
    return symcore.realify(Z @ D @ Z.conj().T)


def _leg(F, theta, target: MaslovLift, waypoints):
    """Segments of a unitary path from (F, theta) through waypoints to ``target``."""
    segs = []
    for W in list(waypoints) + [target.frame]:
        H = unitary_connector(F, W)
        segs.append((H, 1.0))
        theta += _phase_turns(H)
        F = scipy.linalg.expm(H) @ F
    gap = target.theta - theta
    if target.modulus != INF:
        gap = _reduce(gap + target.modulus / 2, target.modulus) - target.modulus / 2
    m = _near_integer(gap, "deck mismatch")
    segs.append((_deck_loop_generator(F, m), 1.0))
    return segs


def connecting_paths(L0: MaslovLift, L1: MaslovLift, delta: float = math.pi / 8,
                     waypoints0=(), waypoints1=()):
    """Paths from the common base point (R^n, 0) to ``L0`` and ``L1``.

    Both first leave R^n in opposite rotational directions by ``delta``
    (so the start crossing is nondegenerate), then follow unitary geodesics
    through optional waypoint frames, and finish with a loop that fixes the
    integer deck mismatch.
    """
    n = L0.n
    R = symcore.coordinate_frame(n)
    J = symcore.j0(n)
    segs0 = [(delta * J, 1.0)]
    segs1 = [(-delta * J, 1.0)]
    F0 = scipy.linalg.expm(delta * J) @ R
    F1 = scipy.linalg.expm(-delta * J) @ R
    segs0 += _leg(F0, n * delta / math.pi, L0, waypoints0)
    segs1 += _leg(F1, -n * delta / math.pi, L1, waypoints1)
    zero = np.zeros((2 * n, 2 * n))
    while len(segs0) < len(segs1):
        segs0.append((zero, 1.0))
    while len(segs1) < len(segs0):
        segs1.append((zero, 1.0))
    return LagrangianPath(R, segs0), LagrangianPath(R, segs1)


def _check_pair(L0: MaslovLift, L1: MaslovLift):
    _check_same_modulus(L0.modulus, L1.modulus)
    if L0.n != L1.n:
        raise symcore.DimensionMismatch("lifts live in different dimensions")
    if symcore.intersection_dim(L0.frame, L1.frame) > 0:
        raise NotTransverse("the underlying subspaces intersect")


def abs_maslov(L0: MaslovLift, L1: MaslovLift, *, delta: float = math.pi / 8,
               waypoints0=(), waypoints1=(), self_check: bool = False) -> ZModN:
    """Absolute index n/2 - mu(lambda_0, lambda_1) in Z/N for a transverse pair."""
    _check_pair(L0, L1)
    l0, l1 = connecting_paths(L0, L1, delta, waypoints0, waypoints1)
    mu = maslov_pair(l0, l1, self_check=self_check)
    value = HalfInt.of(L0.n / 2) - mu
    if not value.is_integral():
        raise NonIntegralIndex(f"n/2 - mu = {value} is not an integer")
    return ZModN(int(value), L0.modulus)


def abs_maslov_closed_form(L0: MaslovLift, L1: MaslovLift) -> ZModN:
    """Path-free evaluation used as an independent check.

    With ``W = M M^T``, ``M = Z0^{-1} Z1`` for unitary frames, and eigenvalues
    ``exp(2 i alpha_j)``, ``alpha_j`` in (0, pi), the index equals
    ``n + (theta1 - theta0) - sum(alpha_j) / pi``.
    """
    _check_pair(L0, L1)
    Z0 = symcore.unitary_frame(L0.frame)
    Z1 = symcore.unitary_frame(L1.frame)
    M = Z0.conj().T @ Z1
    phis = np.angle(np.linalg.eigvals(M @ M.T)) % (2 * math.pi)
    value = L0.n + (L1.theta - L0.theta) - float(np.sum(phis)) / (2 * math.pi)
    return ZModN(_near_integer(value, "closed-form index"), L0.modulus)


def oriented_sign(L0: MaslovLift, L1: MaslovLift) -> int:
    """(-1)^{mu~} for a transverse pair of points of the double covering."""
    if L0.modulus != 2 or L1.modulus != 2:
        raise ModulusMismatch("oriented_sign needs the double covering (N = 2)")
    return -1 if abs_maslov(L0, L1).value % 2 else 1


def oriented_frame(L: MaslovLift) -> np.ndarray:
    """Orthonormal basis of the subspace oriented by the N = 2 lift.

    The orientation is the one for which ``det Z = exp(i pi theta)``.
    """
    if L.modulus != 2:
        raise ModulusMismatch("orientations correspond to N = 2 lifts")
    F = symcore.orthonormalize(L.frame)
    d = np.linalg.det(symcore.to_complex(F))
    if abs(d - np.exp(1j * math.pi * L.theta)) > 1e-6:
        F = F.copy()
        F[:, 0] *= -1
    return F


def symplectic_orientation_order(n: int) -> list[int]:
    """Coordinate order (u1, v1, u2, v2, ...) positively oriented for omega^n."""
    order = []
    for j in range(n):
        order += [j, n + j]
    return order


def intersection_sign(L0: MaslovLift, L1: MaslovLift) -> int:
    """Sign of det[F0 | F1] for oriented frames in the symplectic orientation."""
    F = np.hstack([oriented_frame(L0), oriented_frame(L1)])
    d = np.linalg.det(F[symplectic_orientation_order(L0.n), :])
    if abs(d) < 1e-9:
        raise NotTransverse("oriented subspaces do not span")
    return 1 if d > 0 else -1


# ---------------------------------------------------------------------------
# graded unitary and symplectic elements
# ---------------------------------------------------------------------------


def _is_unitary(U) -> bool:
    U = np.asarray(U, dtype=float)
    m = U.shape[0]
    return (np.allclose(U.T @ U, np.eye(m), atol=1e-9)
            and np.allclose(U @ symcore.j0(m // 2), symcore.j0(m // 2) @ U, atol=1e-9))


@dataclass(frozen=True)
class GradedUnitary:
    U: np.ndarray = field(repr=False)
    t: float
    modulus: float | int = INF

    def __post_init__(self):
        symcore._check_modulus(self.modulus)
        U = np.asarray(self.U, dtype=float)
        if U.ndim != 2 or U.shape[0] != U.shape[1] or U.shape[0] % 2:
            raise symcore.DimensionMismatch(f"bad matrix shape {U.shape}")
        if not _is_unitary(U):
            raise NotSymplectic("matrix is not unitary")
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "t", _reduce(float(self.t), self.modulus))
        d = np.linalg.det(symcore.complexify(U)) ** 2
        if abs(d - np.exp(2j * math.pi * self.t)) > 1e-7:
            raise InconsistentStart("exp(2 pi i t) does not match det(U)^2")

    @property
    def n(self) -> int:
        return self.U.shape[0] // 2

    @classmethod
    def central(cls, n: int, k: int, modulus=INF) -> "GradedUnitary":
        return cls(np.eye(2 * n), k, modulus)

    @classmethod
    def from_unitary(cls, U, modulus=INF) -> "GradedUnitary":
        """Lift with ``t`` in [0, 1)."""
        d = np.linalg.det(symcore.complexify(U)) ** 2
        return cls(U, (np.angle(d) / (2 * math.pi)) % 1.0, modulus)

    def inverse(self) -> "GradedUnitary":
        return GradedUnitary(self.U.T, -self.t, self.modulus)


def compose_graded(g1: GradedUnitary, g2: GradedUnitary) -> GradedUnitary:
    _check_same_modulus(g1.modulus, g2.modulus)
    if g1.n != g2.n:
        raise symcore.DimensionMismatch("graded elements act on different spaces")
    return GradedUnitary(g1.U @ g2.U, g1.t + g2.t, g1.modulus)


def act_graded(g: GradedUnitary, L: MaslovLift) -> MaslovLift:
    _check_same_modulus(g.modulus, L.modulus)
    if g.n != L.n:
        raise symcore.DimensionMismatch("graded element and lift live in different spaces")
    return MaslovLift(g.U @ L.frame, L.theta + g.t, L.modulus)


def split_double(g: GradedUnitary):
    """For N = 2, the pair (U, q / det(U_C)) with q = exp(i pi t); the sign is +-1."""
    if g.modulus != 2:
        raise ModulusMismatch("the splitting exists for N = 2")
    q = np.exp(1j * math.pi * g.t)
    s = q / np.linalg.det(symcore.complexify(g.U))
    return g.U, (1 if s.real > 0 else -1)


def _check_nondegenerate(Phi):
    Phi = np.asarray(Phi, dtype=float)
    sv = np.linalg.svd(np.eye(len(Phi)) - Phi, compute_uv=False)
    if sv[-1] < 1e-8:
        raise DegenerateFixedPoint("1 is an eigenvalue")


def abs_cz(phi: SymplecticPath, k: int, modulus=INF, self_check: bool = False) -> ZModN:
    """n - zeta(phi) - k for a path from (id, rho(k)) to a nondegenerate end."""
    if not np.allclose(phi.matrix_at(phi.start), np.eye(2 * phi.n), atol=1e-9):
        raise InconsistentStart("the path must start at the identity")
    _check_nondegenerate(phi.matrix_at(phi.end))
    z = conley_zehnder(phi, self_check=self_check)
    value = HalfInt(2 * phi.n) - z
    if not value.is_integral():
        raise NonIntegralIndex(f"Conley-Zehnder index {z} is not an integer")
    return ZModN(int(value) - int(k), modulus)


def canonical_cz_path(Phi, t: float):
    """Path from (id, rho(k)) to (Phi, t): first the positive polar part, then the
    unitary part along its principal logarithm.  Returns (path, k)."""
    Phi = symcore.check_symplectic(Phi)
    U, P = symcore.polar_parts(Phi)
    L = scipy.linalg.logm(P).real
    L = 0.5 * (L + L.T)
    Hc = scipy.linalg.logm(symcore.complexify(U))
    Hc = 0.5 * (Hc - Hc.conj().T)
    H = symcore.realify(Hc)
    n = len(Phi) // 2
    segs = [(L, 1.0)] if np.linalg.norm(L) > 1e-12 else []
    segs.append((H, 1.0))
    path = SymplecticPath(np.eye(2 * n), segs)
    k = _near_integer(t - _phase_turns(H), "start deck index", InconsistentStart)
    return path, k


def abs_cz_graded(Phi, t: float, modulus=INF, self_check: bool = False) -> ZModN:
    """Absolute Conley-Zehnder index of the graded element (Phi, t).

    ``t`` is the lift of the phase of det^2 of the unitary polar factor.
    """
    _check_nondegenerate(Phi)
    path, k = canonical_cz_path(Phi, t)
    return abs_cz(path, k, modulus, self_check)


def abs_cz_unitary(g: GradedUnitary, self_check: bool = False) -> ZModN:
    return abs_cz_graded(g.U, g.t, g.modulus, self_check)


# ---------------------------------------------------------------------------
# handle grading and the local Dehn twist computation
# ---------------------------------------------------------------------------


def _smoothstep(s):
    return 3 * s**2 - 2 * s**3


def _dsmoothstep(s):
    return 6 * s - 6 * s**2


@dataclass(frozen=True)
class HandleCurve:
    n: int
    t: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    dgamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidCurve("dimension must be positive")
        t, g = np.asarray(self.t), np.asarray(self.gamma)
        lo, hi = t <= -0.5, t >= 0.5
        if not (np.allclose(g[lo], t[lo], atol=1e-12) and np.allclose(g[hi], 1j * t[hi], atol=1e-12)):
            raise InvalidCurve("curve must equal t for t <= -1/2 and it for t >= 1/2")
        if not lo.any() or not hi.any():
            raise InvalidCurve("samples must cover both clamped ranges")
        if np.min(np.abs(g[:, None] + g[None, :])) < 1e-6:
            raise InvalidCurve("curve meets its reflection -gamma")

    @classmethod
    def default(cls, n: int, samples: int = 2048, bump: float = 0.1) -> "HandleCurve":
        t = np.linspace(-1.0, 1.0, samples)
        inner = np.abs(t) < 0.5
        s = t[inner] + 0.5
        ti = t[inner]
        h = bump * (1 - 4 * ti**2) ** 3
        dh = bump * 3 * (1 - 4 * ti**2) ** 2 * (-8 * ti)
        r = np.sqrt(ti**2 + h)
        dr = (2 * ti + dh) / (2 * r)
        ang = math.pi - 0.5 * math.pi * _smoothstep(s)
        dang = -0.5 * math.pi * _dsmoothstep(s)
        gamma = np.where(t <= -0.5, t + 0j, 1j * t)
        dgamma = np.where(t <= -0.5, 1 + 0j, 1j + 0 * t)
        gamma[inner] = r * np.exp(1j * ang)
        dgamma[inner] = (dr + 1j * r * dang) * np.exp(1j * ang)
        return cls(n, t, gamma, dgamma)


def handle_grading(curve: HandleCurve):
    """Continuous alpha(t) with exp(2 pi i alpha) = phase of gamma'^2 gamma^(2n-2).

    Returns (t, alpha, end value) with alpha = 0 on the left clamped range;
    the end value is the HalfInt reached on the right clamped range.
    """
    w = curve.dgamma**2 * curve.gamma ** (2 * curve.n - 2)
    ph = np.unwrap(np.angle(w))
    if np.max(np.abs(np.diff(ph))) > 1.0:
        raise InvalidCurve("curve is sampled too coarsely to track the phase")
    alpha = (ph - ph[0]) / (2 * math.pi)
    end = float(alpha[-1])
    twice = round(2 * end)
    if abs(2 * end - twice) > 1e-6 or np.ptp(alpha[curve.t >= 0.5]) > 1e-9:
        raise InvalidCurve("phase is not constant half-integral on the right clamped range")
    return curve.t, alpha, HalfInt(int(twice))


def handle_endpoint_lifts(n: int, curve: HandleCurve | None = None, modulus=INF):
    """Lifts of the handle's tangent spaces at the two clamped ends: (R^n, 0) and (iR^n, alpha_end)."""
    curve = HandleCurve.default(n) if curve is None else curve
    _, _, end = handle_grading(curve)
    return standard_lift(n, False, 0.0, modulus), standard_lift(n, True, float(end), modulus)


def dehn_loop(n: int) -> LagrangianPath:
    """Loop exp(-2 pi i t) R^n + exp(2 pi i t) R inside C^{n+1}."""
    angles = np.full(n + 1, -2 * math.pi)
    angles[-1] = 2 * math.pi
    G = symcore.realify(np.diag(1j * angles))
    return LagrangianPath.exponential(symcore.coordinate_frame(n + 1), G)


def dehn_local_shift(n: int) -> int:
    """The integer k = -(winding of det^2 around the local loop) = 2n - 2."""
    if n < 1:
        raise ValueError("n must be positive")
    loop = dehn_loop(n)
    loop.require_loop()
    return -_near_integer(winding_det_sq(loop), "winding")

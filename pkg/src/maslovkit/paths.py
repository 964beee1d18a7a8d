"""Piecewise-exponential paths of Lagrangian frames and symplectic matrices.

A path is an initial value ``X0`` together with segments ``(G_k, d_k)``;
on the k-th segment ``X(t) = exp((t - t_k) G_k) P_{k-1} X0`` where
``P_{k-1}`` is the product of the earlier full-segment exponentials.
Sampled paths are converted to this form by interpolating consecutive
samples with the shortest unitary (Lagrangian case) or logarithmic
(symplectic case) step.
"""

from __future__ import annotations

import bisect
import math

import numpy as np
import scipy.linalg

from . import symcore
from .errors import DimensionMismatch, NotALoop, NotSymplectic, PathTooCoarse

DENSITY_GUARD = math.pi / 8


class _Segment:
    __slots__ = ("G", "duration", "_eig", "_zero", "_norm")

    def __init__(self, G, duration):
        self.G = np.asarray(G, dtype=float)
        self.duration = float(duration)
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")
        self._eig = None
        self._zero = not np.any(self.G)
        self._norm = None

    def exp(self, tau: float) -> np.ndarray:
        if self._zero:
            return np.eye(self.G.shape[0])
        if self._eig is None:
            w, V = np.linalg.eig(self.G)
            if np.linalg.cond(V) < 1e6:
                self._eig = (w, V, np.linalg.inv(V))
            else:
                self._eig = False
        if self._eig is False:
            return scipy.linalg.expm(tau * self.G)
        w, V, Vi = self._eig
        return ((V * np.exp(tau * w)) @ Vi).real

    @property
    def norm(self) -> float:
        if self._norm is None:
            self._norm = float(np.linalg.norm(self.G, 2))
        return self._norm


class _ExpPath:
    def __init__(self, initial, segments, start: float = 0.0):
        self.initial = np.array(initial, dtype=float)
        self.start = float(start)
        segs = []
        for G, d in segments:
            G = np.asarray(G, dtype=float)
            if G.shape != (self.initial.shape[0],) * 2:
                raise DimensionMismatch(f"generator shape {G.shape} does not match {self.initial.shape}")
            segs.append(_Segment(G, d))
        if not segs:
            raise ValueError("a path needs at least one segment")
        self.segments = segs
        self.knots = [self.start]
        for s in segs:
            self.knots.append(self.knots[-1] + s.duration)
        self._prefix = [np.eye(self.initial.shape[0])]
        for s in segs[:-1]:
            self._prefix.append(s.exp(s.duration) @ self._prefix[-1])

    @property
    def end(self) -> float:
        return self.knots[-1]

    @property
    def interval(self) -> tuple[float, float]:
        return (self.start, self.end)

    def _locate(self, t: float) -> int:
        if t < self.start - 1e-12 or t > self.end + 1e-12:
            raise ValueError(f"t={t} outside [{self.start}, {self.end}]")
        k = bisect.bisect_right(self.knots, t) - 1
        return min(max(k, 0), len(self.segments) - 1)

    def propagator(self, t: float) -> np.ndarray:
        k = self._locate(t)
        return self.segments[k].exp(t - self.knots[k]) @ self._prefix[k]

    def value_at(self, t: float) -> np.ndarray:
        return self.propagator(t) @ self.initial

    def generator_at(self, t: float) -> np.ndarray:
        return self.segments[self._locate(t)].G

    def speed_bound(self, k: int) -> float:
        return self.segments[k].norm

    def speed_at(self, t: float) -> float:
        """Operator norm of the generator in force at ``t``."""
        return self.segments[self._locate(t)].norm

    def _pieces(self, a: float, b: float):
        """Yield (generator, duration) for the part of the path inside [a, b]."""
        for k, seg in enumerate(self.segments):
            lo = max(a, self.knots[k])
            hi = min(b, self.knots[k + 1])
            if hi - lo > 1e-15:
                yield seg.G, hi - lo

    def _with(self, initial, segments, start):
        return type(self)(initial, segments, start)

    def restrict(self, a: float, b: float):
        if not (self.start - 1e-12 <= a < b <= self.end + 1e-12):
            raise ValueError("restriction interval must lie inside the path interval")
        return self._with(self.value_at(a), list(self._pieces(a, b)), a)

    def concat(self, other):
        if abs(other.start - self.end) > 1e-9:
            other = other.shifted(self.end - other.start)
        segs = [(s.G, s.duration) for s in self.segments] + [(s.G, s.duration) for s in other.segments]
        return self._with(self.initial, segs, self.start)

    def shifted(self, dt: float):
        return self._with(self.initial, [(s.G, s.duration) for s in self.segments], self.start + dt)

    def reparametrized(self, weights) -> "_ExpPath":
        """Same image, each segment's speed rescaled by the given factors."""
        segs = []
        for s, w in zip(self.segments, weights):
            segs.append((s.G / w, s.duration * w))
        return self._with(self.initial, segs, self.start)

    def with_detour(self, H, duration: float, at: float | None = None):
        """Insert the out-and-back excursion exp(sH), exp(-sH) at time ``at``.

        The result is homotopic to the original rel endpoints and covers an
        interval longer by ``2 * duration``.
        """
        at = 0.5 * (self.start + self.end) if at is None else at
        first = list(self._pieces(self.start, at))
        rest = list(self._pieces(at, self.end))
        H = np.asarray(H, dtype=float)
        return self._with(self.initial, first + [(H, duration), (-H, duration)] + rest, self.start)

    def transformed(self, M):
        """Apply a fixed linear map: X(t) -> M X(t)."""
        M = np.asarray(M, dtype=float)
        Mi = np.linalg.inv(M)
        segs = [(M @ s.G @ Mi, s.duration) for s in self.segments]
        return self._with(M @ self.initial, segs, self.start)

    def sample_times(self, max_step_angle: float = 0.15) -> np.ndarray:
        ts = [self.start]
        for k, seg in enumerate(self.segments):
            m = max(2, int(math.ceil(seg.duration * seg.norm / max_step_angle)))
            ts.extend(np.linspace(self.knots[k], self.knots[k + 1], m + 1)[1:])
        return np.asarray(ts)


class LagrangianPath(_ExpPath):
    """A path of Lagrangian subspaces of R^{2n}, held as 2n x n frames."""

    def __init__(self, initial, segments, start: float = 0.0):
        super().__init__(symcore.check_lagrangian(initial), segments, start)
        for s in self.segments:
            if not symcore.is_hamiltonian(s.G):
                raise NotSymplectic("generator does not exponentiate to symplectic matrices")

    @property
    def n(self) -> int:
        return self.initial.shape[1]

    def frame_at(self, t: float) -> np.ndarray:
        return self.value_at(t)

    @classmethod
    def constant(cls, frame, a: float = 0.0, b: float = 1.0) -> "LagrangianPath":
        frame = np.asarray(frame, dtype=float)
        m = frame.shape[0]
        return cls(frame, [(np.zeros((m, m)), b - a)], a)

    @classmethod
    def exponential(cls, frame, generator, a: float = 0.0, b: float = 1.0) -> "LagrangianPath":
        return cls(frame, [(generator, b - a)], a)

    @classmethod
    def from_samples(cls, times, frames) -> "LagrangianPath":
        times = [float(t) for t in times]
        if len(times) < 2 or any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing (at least two)")
        frames = [symcore.check_lagrangian(F) for F in frames]
        segs = []
        for (t0, F0), (t1, F1) in zip(zip(times, frames), zip(times[1:], frames[1:])):
            if symcore.principal_angles(F0, F1).max() >= DENSITY_GUARD:
                raise PathTooCoarse(f"samples at t={t0} and t={t1} are too far apart")
            segs.append((_unitary_step(F0, F1) / (t1 - t0), t1 - t0))
        return cls(frames[0], segs, times[0])

    def is_loop(self, tol: float | None = None) -> bool:
        return symcore.same_subspace(self.frame_at(self.start), self.frame_at(self.end), tol)

    def require_loop(self):
        if not self.is_loop(max(symcore.tolerances().frame, 1e-8)):
            raise NotALoop("path endpoints span different subspaces")

    def direct_sum(self, other: "LagrangianPath") -> "LagrangianPath":
        """Block path in C^{n1 + n2}; both paths must share the interval."""
        if abs(self.start - other.start) > 1e-12 or abs(self.end - other.end) > 1e-9:
            raise ValueError("direct sum needs a common parameter interval")
        n1, n2 = self.n, other.n
        knots = sorted(set(np.round(self.knots + other.knots, 14)))
        segs = []
        for a, b in zip(knots, knots[1:]):
            mid = 0.5 * (a + b)
            segs.append((embed_pair(self.generator_at(mid), other.generator_at(mid), n1, n2), b - a))
        F = embed_pair(self.initial, other.initial, n1, n2, square=False)
        return LagrangianPath(F, segs, self.start)


def _unitary_step(F0, F1) -> np.ndarray:
    """Real generator H of the shortest unitary motion carrying span F0 to span F1."""
    Z0 = symcore.unitary_frame(F0)
    Z1 = symcore.unitary_frame(F1)
    A = (Z0.conj().T @ Z1).real
    Uu, _, Vt = np.linalg.svd(A)
    R = Vt.T @ Uu.T
    M = Z1 @ R @ Z0.conj().T
    H = scipy.linalg.logm(M)
    H = 0.5 * (H - H.conj().T)
    return symcore.realify(H)


def unitary_connector(F_from, F_to) -> np.ndarray:
    """Skew-Hermitian generator (real form) with exp(H) span(F_from) = span(F_to)."""
    return _unitary_step(F_from, F_to)


def embed_pair(A, B, n1: int, n2: int, square: bool = True) -> np.ndarray:
    """Block-embed data on R^{2 n1} and R^{2 n2} into R^{2(n1 + n2)}.

    Coordinates are reordered to (u1, u2, v1, v2).
    """
    n = n1 + n2
    idx1 = list(range(n1)) + list(range(n, n + n1))
    idx2 = list(range(n1, n)) + list(range(n + n1, 2 * n))
    if square:
        out = np.zeros((2 * n, 2 * n))
        out[np.ix_(idx1, idx1)] = A
        out[np.ix_(idx2, idx2)] = B
        return out
    k1, k2 = A.shape[1], B.shape[1]
    out = np.zeros((2 * n, k1 + k2))
    out[idx1, :k1] = A
    out[idx2, k1:] = B
    return out


class SymplecticPath(_ExpPath):
    """A path of symplectic matrices ``phi(t) = (product of exps) phi(a)``."""

    def __init__(self, initial, segments, start: float = 0.0):
        initial = symcore.check_symplectic(initial)
        super().__init__(initial, segments, start)
        for s in self.segments:
            if not symcore.is_hamiltonian(s.G):
                raise NotSymplectic("generator is not Hamiltonian")

    @property
    def n(self) -> int:
        return self.initial.shape[0] // 2

    def matrix_at(self, t: float) -> np.ndarray:
        return self.value_at(t)

    @classmethod
    def exponential(cls, generator, a: float = 0.0, b: float = 1.0, initial=None) -> "SymplecticPath":
        G = np.asarray(generator, dtype=float)
        initial = np.eye(G.shape[0]) if initial is None else initial
        return cls(initial, [(G, b - a)], a)

    @classmethod
    def from_samples(cls, times, matrices) -> "SymplecticPath":
        times = [float(t) for t in times]
        if len(times) < 2 or any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing (at least two)")
        mats = [symcore.check_symplectic(M) for M in matrices]
        segs = []
        for (t0, A), (t1, B) in zip(zip(times, mats), zip(times[1:], mats[1:])):
            step = B @ np.linalg.inv(A)
            if np.linalg.norm(step - np.eye(len(step)), 2) >= DENSITY_GUARD:
                raise PathTooCoarse(f"samples at t={t0} and t={t1} are too far apart")
            L = scipy.linalg.logm(step).real
            S = symcore.j0(len(L) // 2) @ L
            L = -symcore.j0(len(L) // 2) @ (0.5 * (S + S.T))
            segs.append((L / (t1 - t0), t1 - t0))
        return cls(mats[0], segs, times[0])

    def inverse(self) -> "SymplecticPath":
        """Pointwise inverse path t -> phi(t)^{-1}, again in left-exponential form."""
        segs = []
        for k, s in enumerate(self.segments):
            P = self._prefix[k] @ self.initial
            Pi = np.linalg.inv(P)
            segs.append((-Pi @ s.G @ P, s.duration))
        return SymplecticPath(np.linalg.inv(self.initial), segs, self.start)

    def conjugated(self, Psi) -> "SymplecticPath":
        Psi = symcore.check_symplectic(Psi)
        Pi = np.linalg.inv(Psi)
        segs = [(Psi @ s.G @ Pi, s.duration) for s in self.segments]
        return SymplecticPath(Psi @ self.initial @ Pi, segs, self.start)

    def graph_path(self) -> LagrangianPath:
        """Graph of phi(t) as a Lagrangian path in standard R^{4n}.

        (V + V, -omega + omega) is identified with (R^{4n}, omega_0) through
        :func:`symcore.product_to_standard`.
        """
        n = self.n
        T = symcore.product_to_standard(n)
        Ti = np.linalg.inv(T)
        Z = np.zeros((2 * n, 2 * n))
        segs = [(T @ np.block([[Z, Z], [Z, s.G]]) @ Ti, s.duration) for s in self.segments]
        return LagrangianPath(T @ symcore.graph_frame(self.initial), segs, self.start)

    def diagonal_path(self) -> LagrangianPath:
        n = self.n
        T = symcore.product_to_standard(n)
        return LagrangianPath.constant(T @ symcore.graph_frame(np.eye(2 * n)), self.start, self.end)

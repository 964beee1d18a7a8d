"""Robbin-Salamon Maslov index for pairs of Lagrangian paths, and the
Conley-Zehnder index of symplectic paths.

The primary route locates crossings through the singular values of
``S(t) = Im(Z0(t)^* Z1(t))`` (unitary frames ``Z0``, ``Z1``) and sums
signatures of the relative crossing form.  An independent route counts
eigenvalues of the unitary comparison matrix ``W = (Z0^* Z1)(Z0^* Z1)^T``
passing through 1; with ``self_check=True`` the two must agree exactly.

Sign convention: the crossing form of ``lambda`` at ``v`` is
``d/dt omega_0(v, w(t))``, which makes counterclockwise rotation positive
and gives ``mu(graph(tA), Lambda) = sign(B)/2`` at the start of a graph
path, so the absolute index of a graph path is the Morse index of ``B``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import symcore
from .errors import CrossCheckFailure, DegenerateCrossing, DimensionMismatch, PathTooCoarse
from .paths import LagrangianPath, SymplecticPath
from .symcore import HalfInt

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FORM_TOL = 1e-6
MIN_CELL = 1e-4
GRID_STEP = 0.5  # rotation angle between seed points of the subdivision
PERTURBATION_EPS = 1e-6


@dataclass(frozen=True)
class Crossing:
    t: float
    kernel_dim: int
    positive: int
    negative: int
    endpoint: bool = False

    @property
    def signature(self) -> int:
        return self.positive - self.negative

    def to_json(self):
        return {"t": self.t, "kernel_dim": self.kernel_dim,
                "signature": [self.positive, self.negative], "endpoint": self.endpoint}


def _unitary(F) -> np.ndarray:
    return symcore.to_complex(symcore.orthonormalize(F))


def _comparison(F0, F1):
    Z0 = _unitary(F0)
    Z1 = _unitary(F1)
    return Z0, Z1, (Z0.conj().T @ Z1)


def _sigma_min(l0: LagrangianPath, l1: LagrangianPath, t: float) -> float:
    # Im(Z0^* Z1) written in real blocks; column signs of the QR factors do
    # not affect singular values, so no sign normalisation is needed here.
    n = l0.n
    Q0 = np.linalg.qr(l0.value_at(t))[0]
    Q1 = np.linalg.qr(l1.value_at(t))[0]
    S = Q0[:n].T @ Q1[n:] - Q0[n:].T @ Q1[:n]
    return float(np.linalg.svd(S, compute_uv=False)[-1])


def _check_pair(l0: LagrangianPath, l1: LagrangianPath):
    if l0.n != l1.n:
        raise DimensionMismatch(f"paths live in R^{2 * l0.n} and R^{2 * l1.n}")
    if abs(l0.start - l1.start) > 1e-9 or abs(l0.end - l1.end) > 1e-9:
        raise ValueError("paths must share their parameter interval")


def _pair_grid(l0: LagrangianPath, l1: LagrangianPath) -> np.ndarray:
    ts = np.union1d(l0.sample_times(GRID_STEP), l1.sample_times(GRID_STEP))
    ts = ts[(ts >= l0.start) & (ts <= l0.end)]
    # merge near-duplicates coming from the two knot sets
    keep = [ts[0]]
    for t in ts[1:]:
        if t - keep[-1] > 1e-12:
            keep.append(t)
    keep[-1] = l0.end
    return np.asarray(keep)


def _golden_min(f, a: float, b: float, eps: float, lip: float = math.inf, floor: float = -math.inf):
    """Golden-section minimum of ``f`` on [a, b] to width ``eps``.

    With a Lipschitz constant ``lip`` the search stops early, returning
    ``None``, once the bracket provably stays above ``floor``.
    """
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > eps:
        if min(fc, fd) - lip * (b - a) > floor:
            return None
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def _v_min(f, a: float, fa: float, b: float, fb: float, eps: float,
           lip: float = math.inf, floor: float = -math.inf, max_iter: int = 60):
    """Minimum of a V-shaped function on [a, b], to width ``eps``.

    Near a regular crossing sigma_min(t) is c |t - t*| up to second order.
    Of the two one-sided slopes through the midpoint, the larger one is taken
    on a single branch of the V, which places the apex in one secant step.
    Falls back to golden-section search if the iteration does not settle.
    """
    m = 0.5 * (a + b)
    fm = f(m)
    width = b - a
    for _ in range(max_iter):
        if min(fa, fm, fb) - lip * (b - a) > floor:
            return None
        if b - a <= eps:
            return m, fm
        if b - a > 0.7 * width:
            # the secant step did not pay off: take a golden-section step
            u = m + (1 - _GOLDEN) * (b - m) if b - m > m - a else m - (1 - _GOLDEN) * (m - a)
        else:
            sl = (fa - fm) / (m - a)
            sr = (fb - fm) / (b - m)
            if sl >= sr:
                u = b - fb / sl if sl > 0 else 0.5 * (m + b)
            else:
                u = a + fa / sr if sr > 0 else 0.5 * (a + m)
        width = b - a
        u = min(max(u, a + eps / 4), b - eps / 4)
        if abs(u - m) < eps / 2:
            lo, hi = max(a, m - eps / 2), min(b, m + eps / 2)
            flo, fhi = f(lo), f(hi)
            if flo >= fm and fhi >= fm:
                return m, fm
            if flo < fhi:
                b, fb, m, fm = m, fm, lo, flo
            else:
                a, fa, m, fm = m, fm, hi, fhi
            continue
        fu = f(u)
        if fu < fm:
            if u < m:
                b, fb = m, fm
            else:
                a, fa = m, fm
            m, fm = u, fu
        elif u < m:
            a, fa = u, fu
        else:
            b, fb = u, fu
    return _golden_min(f, a, b, eps, lip, floor)


def _crossing_form(l0: LagrangianPath, l1: LagrangianPath, t: float, kernel_tol: float) -> Crossing | None:
    F1 = l1.frame_at(t)
    Q1 = symcore.orthonormalize(F1)
    _, _, U = _comparison(l0.frame_at(t), F1)
    _, s, Vt = np.linalg.svd(U.imag)
    k = int(np.sum(s < kernel_tol))
    if k == 0:
        return None
    X = Vt[-k:].T
    V = Q1 @ X
    n = l0.n
    J = symcore.j0(n)
    A = J.T @ (l0.generator_at(t) - l1.generator_at(t))
    G = V.T @ (0.5 * (A + A.T)) @ V
    ev = np.linalg.eigvalsh(0.5 * (G + G.T))
    scale = max(1.0, float(np.max(np.abs(ev))))
    if np.any(np.abs(ev) < FORM_TOL * scale):
        raise DegenerateCrossing(f"crossing form at t={t:.12g} is singular (eigenvalues {ev})")
    return Crossing(float(t), k, int(np.sum(ev > 0)), int(np.sum(ev < 0)))


def _candidate_minima(l0, l1, ts, g, f, eps: float, kernel_tol: float):
    """Times where sigma_min(t) drops below ``kernel_tol``.

    A cell ``[a, b]`` can only contain a zero of sigma_min when
    ``g(a) + g(b) <= L (b - a)``, where ``L`` bounds the speed of sigma_min;
    such cells are bisected down to ``MIN_CELL`` and then searched with a
    V-shaped secant search (:func:`_v_min`).

    The bound: in the horizontal gauge an orthonormal frame of exp(tG) F moves
    with velocity (1 - P) G Q, of norm at most |G|; the comparison block
    S = Q0^T J Q1 therefore moves at speed at most |G0| + |G1|, and sigma_min
    is 1-Lipschitz in S.
    """
    out = []
    stack = [(ts[i], g[i], ts[i + 1], g[i + 1]) for i in range(len(ts) - 1)][::-1]
    while stack:
        a, ga, b, gb = stack.pop()
        mid = 0.5 * (a + b)
        speed = l0.speed_at(mid) + l1.speed_at(mid)
        if ga + gb > speed * (b - a) + 2 * kernel_tol:
            continue
        if b - a > MIN_CELL:
            gm = f(mid)
            if b - a < 4 * MIN_CELL and max(ga, gm, gb) < kernel_tol:
                raise DegenerateCrossing(f"crossings are not isolated near t={mid:.6g}")
            stack.append((mid, gm, b, gb))
            stack.append((a, ga, mid, gm))
            continue
        hit = _v_min(f, a, ga, b, gb, eps, speed, kernel_tol)
        if hit is not None and hit[1] < kernel_tol:
            out.append(hit[0])
    return out


def _raw_crossings(l0: LagrangianPath, l1: LagrangianPath, eps: float) -> list[Crossing]:
    tol = symcore.tolerances()
    kernel_tol = tol.kernel
    ts = _pair_grid(l0, l1)
    g = np.array([_sigma_min(l0, l1, t) for t in ts])
    a, b = ts[0], ts[-1]
    found: list[float] = []
    endpoints = []
    if g[0] < kernel_tol:
        endpoints.append(a)
    if g[-1] < kernel_tol:
        endpoints.append(b)
    f = lambda t: _sigma_min(l0, l1, t)

    def same_crossing(u, v):
        # Neighbouring leaf cells can both report one crossing.  Between two
        # distinct crossings sigma_min rises; on a single V it does not.
        if abs(u - v) >= MIN_CELL:
            return False
        return f(0.5 * (u + v)) <= max(f(u), f(v))

    for t_star in sorted(_candidate_minima(l0, l1, ts, g, f, eps, kernel_tol)):
        if any(same_crossing(t_star, e) for e in endpoints):
            continue
        if found and same_crossing(found[-1], t_star):
            if f(t_star) < f(found[-1]):
                found[-1] = t_star
            continue
        found.append(t_star)
    out = []
    for t in endpoints:
        c = _crossing_form(l0, l1, t, kernel_tol)
        if c is not None:
            out.append(Crossing(c.t, c.kernel_dim, c.positive, c.negative, endpoint=True))
    for t in found:
        c = _crossing_form(l0, l1, t, max(kernel_tol, 1e3 * eps))
        if c is not None:
            out.append(c)
    return sorted(out, key=lambda c: c.t)


def _perturbation_generator(n: int) -> np.ndarray:
    seed = int(os.environ.get("MASLOVKIT_SEED", "0"))
    rng = np.random.default_rng(seed)
    C = rng.standard_normal((2 * n, 2 * n))
    return symcore.j0(n) @ (C + C.T)


def crossings(l0: LagrangianPath, l1: LagrangianPath, eps: float | None = None) -> list[Crossing]:
    """All crossings of the pair with their crossing-form signatures."""
    _check_pair(l0, l1)
    eps = symcore.tolerances().crossing_eps if eps is None else eps
    return _raw_crossings(l0, l1, eps)


def _twice_mu(cs: list[Crossing]) -> int:
    return sum(c.signature if c.endpoint else 2 * c.signature for c in cs)


def maslov_pair(l0: LagrangianPath, l1: LagrangianPath, self_check: bool = False) -> HalfInt:
    """Robbin-Salamon index mu(l0, l1) in (1/2)Z.

    Degenerate crossings trigger two retries with ``l1`` replaced by
    ``exp(eps S) l1`` (eps = 1e-6 and 5e-7); the retries must agree.
    """
    _check_pair(l0, l1)
    try:
        result = HalfInt(_twice_mu(crossings(l0, l1)))
    except DegenerateCrossing:
        S = _perturbation_generator(l0.n)
        values = []
        for eps in (PERTURBATION_EPS, PERTURBATION_EPS / 2):
            shifted = l1.transformed(scipy.linalg.expm(eps * S))
            values.append(_twice_mu(crossings(l0, shifted)))
        if values[0] != values[1]:
            raise DegenerateCrossing("perturbed retries disagree")
        result = HalfInt(values[0])
    if self_check:
        other = maslov_pair_winding(l0, l1)
        if other != result:
            raise CrossCheckFailure(f"crossing form gives {result}, eigenvalue winding gives {other}")
    return result


# ---------------------------------------------------------------------------
# phase tracking
# ---------------------------------------------------------------------------


def _lift_phases(values_at, ts, max_jump: float = 0.5, depth: int = 24) -> list[float]:
    """Continuous lift of arg(c(t)) along ``ts``, refining cells with large jumps."""
    out = []
    prev_t = ts[0]
    prev_c = values_at(prev_t)
    acc = float(np.angle(prev_c))
    out.append(acc)

    def walk(t0, c0, t1, c1, d):
        step = float(np.angle(c1 / c0))
        if abs(step) <= max_jump or d == 0:
            if abs(step) > 2.5:
                raise PathTooCoarse("phase changes too fast to track")
            return step
        tm = 0.5 * (t0 + t1)
        cm = values_at(tm)
        return walk(t0, c0, tm, cm, d - 1) + walk(tm, cm, t1, c1, d - 1)

    for t in ts[1:]:
        c = values_at(t)
        acc += walk(prev_t, prev_c, t, c, depth)
        out.append(acc)
        prev_t, prev_c = t, c
    return out


def winding_det_sq(path: LagrangianPath) -> float:
    """Total increment of the continuous lift of arg det^2(path(t)) / 2pi."""
    ts = path.sample_times()
    phases = _lift_phases(lambda t: symcore.det_sq_unchecked(path.frame_at(t)), ts)
    return (phases[-1] - phases[0]) / (2 * math.pi)


def det_sq_trace(path: LagrangianPath, theta_start: float = 0.0):
    """Times and continuous det^2 phase lift (in turns) starting at ``theta_start``."""
    ts = path.sample_times()
    phases = _lift_phases(lambda t: symcore.det_sq_unchecked(path.frame_at(t)), ts)
    base = phases[0]
    return ts, [theta_start + (p - base) / (2 * math.pi) for p in phases]


def _endpoint_angle_sum(F0, F1, kernel_tol: float) -> float:
    _, _, U = _comparison(F0, F1)
    W = U @ U.T
    phis = np.angle(np.linalg.eigvals(W)) % (2 * math.pi)
    total = 0.0
    for phi in phis:
        if abs(math.sin(phi / 2)) < kernel_tol:
            total += math.pi / 2
        else:
            total += phi / 2
    return total


def maslov_pair_winding(l0: LagrangianPath, l1: LagrangianPath) -> HalfInt:
    """mu(l0, l1) from the eigenvalues of W = (Z0^* Z1)(Z0^* Z1)^T.

    Counterclockwise passages of an eigenvalue through 1 count -1; an
    eigenvalue sitting at 1 at an endpoint is given angle pi/2, which yields
    the half weights.
    """
    _check_pair(l0, l1)
    kernel_tol = symcore.tolerances().kernel
    ts = _pair_grid(l0, l1)

    def det_w(t):
        _, _, U = _comparison(l0.frame_at(t), l1.frame_at(t))
        d = np.linalg.det(U) ** 2
        return d / abs(d)

    phases = _lift_phases(det_w, ts)
    rel_turns = (phases[-1] - phases[0]) / (2 * math.pi)
    s_a = _endpoint_angle_sum(l0.frame_at(ts[0]), l1.frame_at(ts[0]), kernel_tol)
    s_b = _endpoint_angle_sum(l0.frame_at(ts[-1]), l1.frame_at(ts[-1]), kernel_tol)
    mu = -rel_turns + (s_b - s_a) / math.pi
    twice = round(2 * mu)
    if abs(2 * mu - twice) > 1e-5:
        raise PathTooCoarse(f"eigenvalue winding is not half-integral ({mu})")
    return HalfInt(int(twice))


# ---------------------------------------------------------------------------
# Conley-Zehnder
# ---------------------------------------------------------------------------


def conley_zehnder(phi: SymplecticPath, self_check: bool = False) -> HalfInt:
    """zeta(phi) = mu(graph(phi), diagonal) in (V + V, -omega + omega)."""
    return maslov_pair(phi.graph_path(), phi.diagonal_path(), self_check=self_check)

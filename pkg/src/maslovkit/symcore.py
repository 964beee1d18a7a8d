"""Linear-algebra kernel for the standard symplectic space (R^{2n}, omega_0).

Coordinates are block coordinates ``(u, v)`` with ``z = u + i v`` in C^n,
``J0(u, v) = (-v, u)`` and ``omega_0(a, b) = <J0 a, b>``.  A Lagrangian
subspace is held as a real ``2n x n`` frame whose columns span it.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from functools import total_ordering

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    ModulusMismatch,
    NotLagrangian,
    NotSymplectic,
    RankDeficient,
)

INF = math.inf


# ---------------------------------------------------------------------------
# tolerances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerances:
    frame: float = 1e-9
    phase: float = 1e-7
    kernel: float = 1e-7
    crossing_eps: float = 1e-10


_TOL = contextvars.ContextVar("maslovkit_tolerances", default=Tolerances())


def tolerances() -> Tolerances:
    return _TOL.get()


@contextlib.contextmanager
def override_tolerances(**kwargs):
    """Temporarily replace tolerance fields, e.g. ``override_tolerances(frame=1e-8)``."""
    token = _TOL.set(Tolerances(**{**_TOL.get().__dict__, **kwargs}))
    try:
        yield _TOL.get()
    finally:
        _TOL.reset(token)


# ---------------------------------------------------------------------------
# exact index values
# ---------------------------------------------------------------------------


@total_ordering
class HalfInt:
    """An exact element of (1/2)Z stored as twice its value."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        if isinstance(twice, bool) or not isinstance(twice, (int, np.integer)):
            raise TypeError(f"HalfInt needs an integer numerator, got {twice!r}")
        self.twice = int(twice)

    @classmethod
    def of(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(2 * int(value))
        twice = 2 * value
        if twice != int(twice):
            raise ValueError(f"{value!r} is not a half-integer")
        return cls(int(twice))

    @classmethod
    def parse(cls, text: str | int) -> "HalfInt":
        if isinstance(text, int):
            return cls(2 * text)
        text = text.strip()
        if text.endswith("/2"):
            return cls(int(text[:-2]))
        return cls(2 * int(text))

    def is_integral(self) -> bool:
        return self.twice % 2 == 0

    def __int__(self):
        if not self.is_integral():
            raise ValueError(f"{self} is not an integer")
        return self.twice // 2

    def __float__(self):
        return self.twice / 2

    def __add__(self, other):
        other = HalfInt.of(other)
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __neg__(self):
        return HalfInt(-self.twice)

    def __sub__(self, other):
        return self + (-HalfInt.of(other))

    def __rsub__(self, other):
        return HalfInt.of(other) - self

    def __eq__(self, other):
        try:
            return self.twice == HalfInt.of(other).twice
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.twice < HalfInt.of(other).twice

    def __hash__(self):
        return hash(("HalfInt", self.twice))

    def __repr__(self):
        return f"HalfInt({self})"

    def __str__(self):
        return str(self.twice // 2) if self.is_integral() else f"{self.twice}/2"

    def to_json(self):
        return self.twice // 2 if self.is_integral() else f"{self.twice}/2"


def _check_modulus(modulus):
    if modulus == INF or modulus == "inf":
        return INF
    if isinstance(modulus, bool) or int(modulus) != modulus or modulus < 1:
        raise ValueError(f"modulus must be a positive integer or infinity, got {modulus!r}")
    return int(modulus)


class ZModN:
    """A residue in Z/N; ``N = INF`` means plain integers."""

    __slots__ = ("modulus", "value")

    def __init__(self, value: int, modulus=INF):
        self.modulus = _check_modulus(modulus)
        if isinstance(value, HalfInt):
            value = int(value)
        value = int(value)
        self.value = value if self.modulus == INF else value % self.modulus

    def _coerce(self, other) -> "ZModN":
        if isinstance(other, ZModN):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"Z/{self.modulus} vs Z/{other.modulus}")
            return other
        return ZModN(other, self.modulus)

    def __add__(self, other):
        return ZModN(self.value + self._coerce(other).value, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return ZModN(-self.value, self.modulus)

    def __sub__(self, other):
        return ZModN(self.value - self._coerce(other).value, self.modulus)

    def __rsub__(self, other):
        return ZModN(self._coerce(other).value - self.value, self.modulus)

    def __mul__(self, k: int):
        return ZModN(self.value * int(k), self.modulus)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, ZModN):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self == ZModN(other, self.modulus)
        return NotImplemented

    def __hash__(self):
        return hash(("ZModN", self.modulus, self.value))

    def __repr__(self):
        mod = "inf" if self.modulus == INF else self.modulus
        return f"ZModN({self.value}, {mod})"

    def to_json(self):
        return {"mod": "inf" if self.modulus == INF else self.modulus, "val": self.value}


# ---------------------------------------------------------------------------
# standard structures
# ---------------------------------------------------------------------------


def j0(n: int) -> np.ndarray:
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, -I], [I, Z]])


def omega(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(j0(a.shape[0] // 2).dot(a).dot(b))


def omega_matrix(A, B) -> np.ndarray:
    """Matrix of omega_0 between the columns of ``A`` and of ``B``."""
    n = A.shape[0] // 2
    return (j0(n) @ A).T @ B


def to_complex(F) -> np.ndarray:
    """Read a real ``2n x k`` array as an ``n x k`` complex array (z = u + iv)."""
    F = np.asarray(F)
    n = F.shape[0] // 2
    return F[:n] + 1j * F[n:]


def to_real(Z) -> np.ndarray:
    Z = np.asarray(Z)
    return np.vstack([Z.real, Z.imag])


def realify(U) -> np.ndarray:
    """Real ``2n x 2n`` form of a complex-linear map of C^n."""
    U = np.asarray(U, dtype=complex)
    A, B = U.real, U.imag
    return np.block([[A, -B], [B, A]])


def complexify(M) -> np.ndarray:
    """Inverse of :func:`realify`; assumes ``M`` commutes with J0."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0] // 2
    return M[:n, :n] + 1j * M[n:, :n]


def _check_frame_shape(F) -> np.ndarray:
    F = np.asarray(F, dtype=float)
    if F.ndim != 2 or F.shape[0] != 2 * F.shape[1] or F.shape[1] == 0:
        raise DimensionMismatch(f"expected a 2n x n frame, got shape {F.shape}")
    return F


def _check_square_even(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise DimensionMismatch(f"expected a 2n x 2n matrix, got shape {M.shape}")
    return M


def orthonormalize(F) -> np.ndarray:
    """Orthonormal basis of the column span, keeping the orientation of each flag.

    This is the Gram-Schmidt result, computed through a Householder QR whose
    column signs are fixed so that R has a positive diagonal.
    """
    F = np.asarray(F, dtype=float)
    Q, R = np.linalg.qr(F)
    d = np.diag(R)
    if np.any(np.abs(d) <= tolerances().frame):
        raise RankDeficient("frame columns are linearly dependent")
    return Q * np.sign(d)


def is_lagrangian(F) -> bool:
    F = _check_frame_shape(F)
    tol = tolerances().frame
    if np.linalg.svd(F, compute_uv=False)[-1] <= tol:
        return False
    return bool(np.max(np.abs(omega_matrix(F, F))) <= tol)


def check_lagrangian(F) -> np.ndarray:
    F = _check_frame_shape(F)
    if not is_lagrangian(F):
        raise NotLagrangian("frame is rank deficient or not omega-isotropic")
    return F


def is_symplectic(M, tol: float | None = None) -> bool:
    M = _check_square_even(M)
    J = j0(M.shape[0] // 2)
    tol = tolerances().frame if tol is None else tol
    return bool(np.max(np.abs(M.T @ J @ M - J)) <= tol * max(1.0, np.linalg.norm(M) ** 2))


def check_symplectic(M) -> np.ndarray:
    M = _check_square_even(M)
    if not is_symplectic(M):
        raise NotSymplectic("M^T J0 M differs from J0")
    return M


def is_hamiltonian(G, tol: float = 1e-9) -> bool:
    """True when exp(tG) is symplectic, i.e. J0 G is symmetric."""
    G = _check_square_even(G)
    S = j0(G.shape[0] // 2) @ G
    return bool(np.max(np.abs(S - S.T)) <= tol * max(1.0, np.linalg.norm(G)))


def unitary_retraction(Phi) -> np.ndarray:
    """Unitary polar factor U of a symplectic matrix, ``Phi = U P``.

    ``P`` is symmetric positive definite and symplectic, so the path
    ``U exp(s log P)`` stays symplectic; U commutes with J0.
    """
    Phi = check_symplectic(Phi)
    if np.linalg.svd(Phi, compute_uv=False)[-1] <= tolerances().frame:
        raise RankDeficient("matrix is singular")
    U, _ = scipy.linalg.polar(Phi, side="right")
    return U


def polar_parts(Phi) -> tuple[np.ndarray, np.ndarray]:
    U, P = scipy.linalg.polar(np.asarray(Phi, dtype=float), side="right")
    return U, P


def unitary_frame(F) -> np.ndarray:
    """Complex ``n x n`` unitary matrix whose real span is the subspace of F."""
    return to_complex(orthonormalize(_check_frame_shape(F)))


def det_sq(F) -> complex:
    """Squared complex determinant of an orthonormal frame of the subspace."""
    F = check_lagrangian(F)
    d = np.linalg.det(unitary_frame(F))
    d2 = d * d
    return complex(d2 / abs(d2))


def det_sq_unchecked(F) -> complex:
    Z = to_complex(F)
    d2 = np.linalg.det(Z) ** 2
    return complex(d2 / abs(d2))


def coordinate_frame(n: int, imaginary: bool = False) -> np.ndarray:
    """Frame of R^n (or iR^n when ``imaginary``)."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.vstack([Z, I]) if imaginary else np.vstack([I, Z])


def rotation(angles) -> np.ndarray:
    """Real form of diag(exp(i * angles))."""
    return realify(np.diag(np.exp(1j * np.asarray(angles, dtype=float))))


def graph_frame(Phi) -> np.ndarray:
    """The ``4n x 2n`` frame {(x, Phi x)} of graph(Phi) in V + V.

    It is Lagrangian for the product form -omega + omega
    (see :func:`product_form`).
    """
    Phi = _check_square_even(Phi)
    m = Phi.shape[0]
    return np.vstack([np.eye(m), Phi])


def product_form(n: int) -> np.ndarray:
    """Gram matrix of -omega_0 + omega_0 on R^{2n} + R^{2n}."""
    J = j0(n)
    Z = np.zeros_like(J)
    return np.block([[-J, Z], [Z, J]])


def product_to_standard(n: int) -> np.ndarray:
    """Linear symplectomorphism (V + V, -omega + omega) -> (R^{4n}, omega_0).

    The first factor is complex-conjugated; coordinates are reordered so the
    result is in standard block form for C^{2n}.
    """
    T = np.zeros((4 * n, 4 * n))
    I = np.eye(n)
    # x = (ux, vx), y = (uy, vy)  ->  (ux, uy, -vx, vy)
    T[0:n, 0:n] = I
    T[n:2 * n, 2 * n:3 * n] = I
    T[2 * n:3 * n, n:2 * n] = -I
    T[3 * n:4 * n, 3 * n:4 * n] = I
    return T


def principal_angles(F0, F1) -> np.ndarray:
    Q0 = orthonormalize(F0)
    Q1 = orthonormalize(F1)
    s = np.clip(np.linalg.svd(Q0.T @ Q1, compute_uv=False), -1.0, 1.0)
    return np.arccos(s)[::-1]


def same_subspace(F0, F1, tol: float | None = None) -> bool:
    tol = tolerances().frame if tol is None else tol
    Q0 = orthonormalize(F0)
    Q1 = orthonormalize(F1)
    return bool(np.linalg.norm(Q0 @ Q0.T - Q1 @ Q1.T) <= max(tol, 1e-8))


def intersection_dim(F0, F1, tol: float | None = None) -> int:
    tol = tolerances().kernel if tol is None else tol
    S = (to_complex(orthonormalize(F0)).conj().T @ to_complex(orthonormalize(F1))).imag
    return int(np.sum(np.linalg.svd(S, compute_uv=False) < tol))

# npspec/services/harmonics.py
"""
Complex spherical and solid harmonics.

u_{k,l} = r^k Y_{k,l} is evaluated from its monomial triple sum in
w = x + iy, conj(w) = x - iy and z:

    u_{k,l} = C_{k,l} sum_{p+q+s=k, p-q=l} (-w/2)^p (conj(w)/2)^q z^s / (p! q! s!)

with C_{k,l} = sqrt((2k+1)/(4 pi) (k+l)! (k-l)!). This normalization carries
the phase conj(Y_{k,l}) = (-1)^l Y_{k,-l}. Cartesian gradients use the closed
forms of the Wirtinger derivatives, which lower the degree by one.

Basis vectors are ordered by degree, then order: column k^2 + k + l.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import gammaln

from npspec.models.shape import MAX_DEGREE, HarmonicIndex
from npspec.services.base import DegreeOverflowError, DomainError

logger = logging.getLogger(__name__)

IndexLike = HarmonicIndex | tuple[int, int]


@dataclass(frozen=True)
class SpherePoint:
    """A point on the unit sphere, stored as unit Cartesian coordinates."""

    x: float
    y: float
    z: float

    @classmethod
    def from_cartesian(cls, x: float, y: float, z: float) -> "SpherePoint":
        norm = float(np.sqrt(x * x + y * y + z * z))
        if norm == 0.0:
            raise DomainError("the origin is not a point of the sphere")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "SpherePoint":
        """theta in [0, pi] from the north pole, phi in [0, 2 pi)."""
        st = np.sin(theta)
        return cls(float(st * np.cos(phi)), float(st * np.sin(phi)), float(np.cos(theta)))

    @property
    def xyz(self) -> NDArray[np.float64]:
        return np.array([self.x, self.y, self.z])

    @property
    def theta(self) -> float:
        return float(np.arccos(np.clip(self.z, -1.0, 1.0)))

    @property
    def phi(self) -> float:
        return float(np.mod(np.arctan2(self.y, self.x), 2.0 * np.pi))


def as_points(points: ArrayLike | SpherePoint) -> tuple[NDArray[np.float64], bool]:
    """Coerce a point or an (n, 3) array of points; report whether a single point was given."""
    if isinstance(points, SpherePoint):
        return points.xyz[None, :], True
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    return arr, False


def basis_size(degree: int) -> int:
    """Number of harmonics with k <= degree."""
    return (degree + 1) ** 2


def position(k: int, l: int) -> int:  # noqa: E741
    return k * k + k + l


@lru_cache(maxsize=None)
def basis_indices(degree: int) -> tuple[tuple[int, int], ...]:
    """All (k, l) with k <= degree in basis order."""
    return tuple((k, l) for k in range(degree + 1) for l in range(-k, k + 1))  # noqa: E741


@lru_cache(maxsize=None)
def basis_degrees(degree: int) -> NDArray[np.int64]:
    """Degree k of every basis column."""
    return np.array([k for k, _ in basis_indices(degree)])


@lru_cache(maxsize=None)
def basis_orders(degree: int) -> NDArray[np.int64]:
    """Order l of every basis column."""
    return np.array([l for _, l in basis_indices(degree)])  # noqa: E741


def _check_degree(k: int) -> None:
    if k > MAX_DEGREE:
        raise DegreeOverflowError(f"degree {k} exceeds the supported cap {MAX_DEGREE}")


def _unpack(idx: IndexLike) -> tuple[int, int]:
    if not isinstance(idx, HarmonicIndex):
        idx = HarmonicIndex(k=idx[0], l=idx[1])
    k, l = idx.k, idx.l  # noqa: E741
    _check_degree(k)
    return k, l


def _log_norm_constant(k: int, l: int) -> float:  # noqa: E741
    return 0.5 * (np.log((2 * k + 1) / (4.0 * np.pi)) + gammaln(k + l + 1) + gammaln(k - l + 1))


def norm_constant(idx: IndexLike) -> float:
    """C_{k,l}, evaluated through log-gamma to stay finite up to the degree cap."""
    k, l = _unpack(idx)  # noqa: E741
    return float(np.exp(_log_norm_constant(k, l)))


def solid_harmonics(points: ArrayLike, degree: int) -> NDArray[np.complex128]:
    """
    Evaluate every u_{k,l}, k <= degree, at an (n, 3) array of points.

    Returns an (n, (degree+1)^2) complex array in basis order.
    """
    _check_degree(degree)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    n = pts.shape[0]

    minus_half_w = -(x + 1j * y) / 2.0
    half_wbar = (x - 1j * y) / 2.0
    pw = np.ones((degree + 1, n), dtype=complex)
    pwbar = np.ones((degree + 1, n), dtype=complex)
    pz = np.ones((degree + 1, n), dtype=float)
    for e in range(1, degree + 1):
        pw[e] = pw[e - 1] * minus_half_w
        pwbar[e] = pwbar[e - 1] * half_wbar
        pz[e] = pz[e - 1] * z

    out = np.zeros((n, basis_size(degree)), dtype=complex)
    for k in range(degree + 1):
        for l in range(-k, k + 1):  # noqa: E741
            log_c = _log_norm_constant(k, l)
            acc = np.zeros(n, dtype=complex)
            # p = q + l >= 0 and s = k - 2q - l >= 0
            for q in range(max(0, -l), (k - l) // 2 + 1):
                p = q + l
                s = k - p - q
                coef = np.exp(log_c - gammaln(p + 1) - gammaln(q + 1) - gammaln(s + 1))
                acc += coef * pw[p] * pwbar[q] * pz[s]
            out[:, position(k, l)] = acc
    return out


def _lowering_coefficients(k: int, l: int) -> tuple[float, float, float]:  # noqa: E741
    """Factors of the d/dw, d/dconj(w) and d/dz closed forms for u_{k,l}."""
    root = np.sqrt(2 * k - 1)
    dw = -np.sqrt((k + l - 1) * (k + l) * (2 * k + 1)) / (2.0 * root)
    dwbar = np.sqrt((k - l - 1) * (k - l) * (2 * k + 1)) / (2.0 * root)
    dz = np.sqrt((k + l) * (k - l) * (2 * k + 1)) / root
    return dw, dwbar, dz


def solid_harmonic_gradients(
    points: ArrayLike,
    degree: int,
    lowered: NDArray[np.complex128] | None = None,
) -> NDArray[np.complex128]:
    """
    Cartesian gradients of every u_{k,l}, k <= degree.

    Returns an (n, (degree+1)^2, 3) complex array. `lowered` may carry
    solid_harmonics(points, degree - 1) when the caller already has it.
    """
    _check_degree(degree)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    grads = np.zeros((n, basis_size(degree), 3), dtype=complex)
    if degree == 0:
        return grads
    if lowered is None:
        lowered = solid_harmonics(pts, degree - 1)

    for k in range(1, degree + 1):
        for l in range(-k, k + 1):  # noqa: E741
            cw, cwbar, cz = _lowering_coefficients(k, l)
            d_w = cw * lowered[:, position(k - 1, l - 1)] if abs(l - 1) <= k - 1 else 0.0
            d_wbar = cwbar * lowered[:, position(k - 1, l + 1)] if abs(l + 1) <= k - 1 else 0.0
            d_z = cz * lowered[:, position(k - 1, l)] if abs(l) <= k - 1 else 0.0
            j = position(k, l)
            grads[:, j, 0] = d_w + d_wbar
            grads[:, j, 1] = 1j * (d_w - d_wbar)
            grads[:, j, 2] = d_z
    return grads


def surface_gradients(
    points: ArrayLike,
    degree: int,
    values: NDArray[np.complex128] | None = None,
    gradients: NDArray[np.complex128] | None = None,
) -> NDArray[np.complex128]:
    """
    Tangential gradients on S^2 of every Y_{k,l}: grad u - k u w (Euler's relation).

    Points must lie on the unit sphere.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if values is None:
        values = solid_harmonics(pts, degree)
    if gradients is None:
        gradients = solid_harmonic_gradients(pts, degree)
    radial = values * basis_degrees(degree)[None, :]
    return gradients - radial[:, :, None] * pts[:, None, :]


@lru_cache(maxsize=None)
def real_to_complex_matrix(degree: int) -> NDArray[np.complex128]:
    """
    Matrix T with Y^real = Y @ T, columns in basis order.

    Convention (used everywhere in the package):
      Y^real_{k,0}  = Y_{k,0}
      Y^real_{k,m}  = sqrt(2) (-1)^m Re Y_{k,m}    for m > 0
      Y^real_{k,-m} = sqrt(2) (-1)^m Im Y_{k,m}    for m > 0
    Real-basis coefficients alpha map to complex-basis coefficients T @ alpha.
    """
    size = basis_size(degree)
    t = np.zeros((size, size), dtype=complex)
    s = 1.0 / np.sqrt(2.0)
    for k in range(degree + 1):
        t[position(k, 0), position(k, 0)] = 1.0
        for m in range(1, k + 1):
            sign = (-1) ** m
            # cos-type column
            t[position(k, m), position(k, m)] = sign * s
            t[position(k, -m), position(k, m)] = s
            # sin-type column
            t[position(k, m), position(k, -m)] = sign * s / 1j
            t[position(k, -m), position(k, -m)] = -s / 1j
    t.setflags(write=False)
    return t


def real_harmonics(points: ArrayLike, degree: int) -> NDArray[np.float64]:
    """Evaluate every Y^real_{k,l}, k <= degree, at unit points."""
    return (solid_harmonics(points, degree) @ real_to_complex_matrix(degree)).real


def eval_solid(idx: IndexLike, p: ArrayLike) -> complex | NDArray[np.complex128]:
    """u_{k,l}(p) for a point or an (n, 3) array of points in R^3."""
    k, l = _unpack(idx)  # noqa: E741
    pts, single = as_points(p)
    values = solid_harmonics(pts, k)[:, position(k, l)]
    return complex(values[0]) if single else values


def eval_y(idx: IndexLike, omega: ArrayLike | SpherePoint) -> complex | NDArray[np.complex128]:
    """Y_{k,l}(omega): the solid harmonic restricted to the unit sphere."""
    return eval_solid(idx, omega.xyz if isinstance(omega, SpherePoint) else omega)


def eval_real_y(idx: IndexLike, omega: ArrayLike | SpherePoint) -> float | NDArray[np.float64]:
    """Y^real_{k,l}(omega) in the convention of real_to_complex_matrix."""
    k, l = _unpack(idx)  # noqa: E741
    pts, single = as_points(omega)
    values = real_harmonics(pts, k)[:, position(k, l)]
    return float(values[0]) if single else values


def grad_solid(idx: IndexLike, p: ArrayLike) -> NDArray[np.complex128]:
    """Cartesian gradient (d/dx, d/dy, d/dz) of u_{k,l}; zero vector for k = 0."""
    k, l = _unpack(idx)  # noqa: E741
    pts, single = as_points(p)
    grads = solid_harmonic_gradients(pts, k)[:, position(k, l), :]
    return grads[0] if single else grads


def unsold_sum(k: int, omega: ArrayLike | SpherePoint) -> float | NDArray[np.float64]:
    """sum_l |Y_{k,l}(omega)|^2, which equals (2k+1)/(4 pi) on the sphere."""
    _check_degree(k)
    pts, single = as_points(omega)
    block = slice(k * k, (k + 1) ** 2)
    total = np.sum(np.abs(solid_harmonics(pts, k)[:, block]) ** 2, axis=1)
    return float(total[0]) if single else total


def grad_sum(k: int, omega: ArrayLike | SpherePoint) -> float | NDArray[np.float64]:
    """sum_l |grad u_{k,l}(omega)|^2, which equals k (2k+1)^2 / (4 pi) on the sphere."""
    if k < 1:
        raise DomainError("grad_sum needs k >= 1")
    _check_degree(k)
    pts, single = as_points(omega)
    block = slice(k * k, (k + 1) ** 2)
    grads = solid_harmonic_gradients(pts, k)[:, block, :]
    total = np.sum(np.abs(grads) ** 2, axis=(1, 2))
    return float(total[0]) if single else total

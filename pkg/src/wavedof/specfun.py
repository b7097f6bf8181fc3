"""Scalar special functions underlying the wave-mode basis.

Spherical Bessel functions j_n, cylindrical Bessel functions J_n,
Legendre polynomials, associated Legendre functions and fully
orthonormal complex spherical harmonics.

Conventions
-----------
* ``assoc_legendre`` returns the unnormalized Ferrers function P_n^m
  including the Condon-Shortley phase, e.g. P_1^1(u) = -sqrt(1 - u^2).
* ``sph_harm`` is orthonormal on the unit sphere:
  Y_n^m(theta, phi) = sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(cos theta) e^{i m phi},
  so that integral of Y_n^m conj(Y_n'^m') over the sphere is a double delta.
* Bessel functions use upward recurrence where it is stable (n <= x) and
  a normalized downward (Miller) recurrence otherwise; upward recurrence
  loses all accuracy once the order exceeds the argument.

All functions are pure and carry no state; they are safe to call
concurrently.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * math.pi

# Magnitude guard for the unnormalized downward recurrence.
_RESCALE_LIMIT = 1e250
_RESCALE = 1e-250


@dataclass(frozen=True)
class Angle:
    """Direction on the sphere: colatitude theta in [0, pi], azimuth phi.

    phi is reduced modulo 2*pi on construction.
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not (-1e-12 <= self.theta <= math.pi + 1e-12):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi))
        object.__setattr__(self, "phi", self.phi % (2.0 * math.pi))


def _check_order(n: int, x: float) -> None:
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if x < 0:
        raise ValueError(f"argument must be >= 0, got {x}")


def _j0(x: float) -> float:
    return math.sin(x) / x


def _j1(x: float) -> float:
    if x < 0.5:
        # sin x/x^2 - cos x/x cancels catastrophically near zero.
        x2 = x * x
        term, total = x / 3.0, x / 3.0
        k = 1
        while True:
            term *= -x2 / (2 * k * (2 * k + 3))
            total += term
            k += 1
            if abs(term) < 1e-18 * abs(total):
                return total
    return math.sin(x) / (x * x) - math.cos(x) / x


def _miller_start(n: int, x: float) -> int:
    # Enough head-room above both the order and the turning point k ~ x;
    # the Airy transition zone is O(x^(1/3)) wide.
    return max(n, int(x)) + 32 + int(10.0 * x ** (1.0 / 3.0))


def spherical_bessel_j(n: int, x: float) -> float:
    """Spherical Bessel function j_n(x) for n >= 0, x >= 0."""
    _check_order(n, x)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if n == 0:
        return _j0(x)
    if n == 1:
        return _j1(x)
    if n <= x:
        jm, jc = _j0(x), _j1(x)
        for k in range(1, n):
            jm, jc = jc, (2 * k + 1) / x * jc - jm
        return jc
    return _sph_downward(n, x)


def _sph_downward(n: int, x: float) -> float:
    m = _miller_start(n, x)
    jp = 0.0       # unnormalized j_{k+1}
    jc = 1e-30     # unnormalized j_k
    jn_u = j1_u = j0_u = 0.0
    scale_n = 1.0
    for k in range(m, 0, -1):
        jm = (2 * k + 1) / x * jc - jp
        jp, jc = jc, jm
        if k - 1 == n:
            jn_u, scale_n = jc, 1.0
        if abs(jc) > _RESCALE_LIMIT:
            jp *= _RESCALE
            jc *= _RESCALE
            scale_n *= _RESCALE
    j0_u, j1_u = jc, jp
    # Anchor on whichever closed form is farther from a zero.
    j0t, j1t = _j0(x), _j1(x)
    if abs(j0t) >= abs(j1t):
        ratio = j0t / j0_u
    else:
        ratio = j1t / j1_u
    return jn_u * scale_n * ratio


def bessel_J(n: int, x: float) -> float:
    """Cylindrical Bessel function J_n(x) for integer n >= 0, x >= 0.

    Downward (Miller) recurrence normalized through
    J_0(x) + 2 sum_k J_{2k}(x) = 1, which fixes both scale and sign.
    """
    _check_order(n, x)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    m = _miller_start(n, x)
    if m % 2:
        m += 1
    jp = 0.0
    jc = 1e-30
    jn_u = 0.0
    scale_n = 1.0
    total = 0.0
    for k in range(m, 0, -1):
        jm = 2 * k / x * jc - jp
        jp, jc = jc, jm
        if k % 2 == 0:
            total += 2.0 * jp   # jp now holds the value at even index k
        if k - 1 == n:
            jn_u, scale_n = jc, 1.0
        if abs(jc) > _RESCALE_LIMIT:
            jp *= _RESCALE
            jc *= _RESCALE
            total *= _RESCALE
            scale_n *= _RESCALE
    total += jc  # J_0 term
    if n == 0:
        return jc / total
    return jn_u * scale_n / total


def legendre_p(n: int, u: float) -> float:
    """Legendre polynomial P_n(u)."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if n == 0:
        return 1.0
    pm, pc = 1.0, u
    for k in range(1, n):
        pm, pc = pc, ((2 * k + 1) * u * pc - k * pm) / (k + 1)
    return pc


def _check_u(u: float) -> float:
    if abs(u) > 1.0 + 1e-12:
        raise ValueError(f"argument must lie in [-1, 1], got {u}")
    return min(max(u, -1.0), 1.0)


def assoc_legendre(n: int, m: int, u: float) -> float:
    """Ferrers associated Legendre function P_n^m(u), Condon-Shortley phase.

    Accepts -n <= m <= n; rejects |m| > n.
    """
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if abs(m) > n:
        raise ValueError(f"|m| must be <= n, got m={m}, n={n}")
    u = _check_u(u)
    mm = abs(m)
    # P_mm^mm = (-1)^mm (2 mm - 1)!! (1-u^2)^(mm/2), then upward in degree.
    pmm = 1.0
    if mm > 0:
        s = math.sqrt((1.0 - u) * (1.0 + u))
        fact = 1.0
        for _ in range(mm):
            pmm *= -fact * s
            fact += 2.0
    if n == mm:
        val = pmm
    else:
        pm1 = u * (2 * mm + 1) * pmm
        if n == mm + 1:
            val = pm1
        else:
            for k in range(mm + 2, n + 1):
                pmm, pm1 = pm1, ((2 * k - 1) * u * pm1 - (k + mm - 1) * pmm) / (k - mm)
            val = pm1
    if m >= 0:
        return val
    # P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m
    for k in range(n - mm + 1, n + mm + 1):
        val /= k
    return val if mm % 2 == 0 else -val


def _norm_mm(m: int) -> float:
    # sqrt((2m+1)/(4 pi) * prod_{k<=m} (2k-1)/(2k)) with Condon-Shortley sign.
    a = 1.0 / FOUR_PI
    for k in range(1, m + 1):
        a *= (2 * k + 1) / (2 * k)
    return math.sqrt(a) * (-1 if m % 2 else 1)


def norm_assoc_legendre(n: int, m: int, u: float) -> float:
    """Orthonormalized associated Legendre, the theta factor of sph_harm.

    Equals sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!) P_n^m(u) for m >= 0, evaluated
    by a recurrence that is stable and overflow-free for large degrees.
    """
    if n < 0 or not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got n={n}, m={m}")
    u = _check_u(u)
    s = math.sqrt((1.0 - u) * (1.0 + u))
    pmm = _norm_mm(m) * s**m
    if n == m:
        return pmm
    pm1 = math.sqrt(2 * m + 3) * u * pmm
    if n == m + 1:
        return pm1
    for k in range(m + 2, n + 1):
        a = math.sqrt((4 * k * k - 1) / (k * k - m * m))
        b = math.sqrt((2 * k + 1) * ((k - 1) ** 2 - m * m) / ((2 * k - 3) * (k * k - m * m)))
        pmm, pm1 = pm1, a * u * pm1 - b * pmm
    return pm1


def sph_harm(n: int, m: int, angle: Angle) -> complex:
    """Orthonormal complex spherical harmonic Y_n^m(theta, phi)."""
    if abs(m) > n:
        raise ValueError(f"|m| must be <= n, got m={m}, n={n}")
    mm = abs(m)
    p = norm_assoc_legendre(n, mm, math.cos(angle.theta))
    y = p * cmath.exp(1j * mm * angle.phi)
    if m >= 0:
        return y
    y = y.conjugate()
    return y if mm % 2 == 0 else -y


def norm_assoc_legendre_table(n_max: int, u) -> np.ndarray:
    """Table of orthonormalized associated Legendre values.

    Returns an array of shape (n_max+1, n_max+1, len(u)) with entry
    [n, m] holding the theta factor of Y_n^m for 0 <= m <= n, evaluated
    at every u; entries with m > n stay zero.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(np.abs(u) > 1.0 + 1e-12):
        raise ValueError("arguments must lie in [-1, 1]")
    u = np.clip(u, -1.0, 1.0)
    s = np.sqrt((1.0 - u) * (1.0 + u))
    out = np.zeros((n_max + 1, n_max + 1, u.size))
    for m in range(n_max + 1):
        out[m, m] = _norm_mm(m) * s**m
        if m + 1 <= n_max:
            out[m + 1, m] = math.sqrt(2 * m + 3) * u * out[m, m]
        for k in range(m + 2, n_max + 1):
            a = math.sqrt((4 * k * k - 1) / (k * k - m * m))
            b = math.sqrt((2 * k + 1) * ((k - 1) ** 2 - m * m) / ((2 * k - 3) * (k * k - m * m)))
            out[k, m] = a * u * out[k - 1, m] - b * out[k - 2, m]
    return out

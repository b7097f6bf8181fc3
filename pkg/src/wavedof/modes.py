"""Enumeration and evaluation of the space-time-frequency mode basis.

A mode is indexed by (i, n, m): frequency bin i (frequency i/T), degree
n and order m. In 3D the spatial factor is j_n(k r) Y_n^m(rhat); in 2D
it is J_m(k r) e^{i m theta} with n fixed at 0. The time factor is
exp(+2j pi i t / T) / sqrt(T) throughout, so bin frequencies are exact
integer multiples of 1/T.

The default 2D order range is m = 0..N(i), matching the counted set;
``two_sided=True`` switches to the full circular-harmonic range
m = -N(i)..N(i), which is what a physical field actually excites.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import specfun
from .bounds import (ConfigError, Dimension, PhysicalConfig,
                     frequency_bins)

DEFAULT_MODE_CAP = 10_000_000


class ModeCapError(RuntimeError):
    """Requested enumeration exceeds the configured mode cap."""


class ProjectionRankError(RuntimeError):
    """The projection normal system is rank deficient (grid under-resolved)."""


class ModeIndex(NamedTuple):
    """Identity of one basis function."""

    i: int
    n: int
    m: int
    dim: Dimension


@dataclass(frozen=True)
class WaveVector:
    """Propagation direction, frequency and scalar wave-number.

    ``k_hat`` must be a unit vector (2 or 3 components); ``k`` must equal
    2*pi*f/c for the wave speed in use.
    """

    k_hat: tuple
    f: float
    k: float

    def __post_init__(self):
        kh = np.asarray(self.k_hat, dtype=float)
        if kh.shape not in ((2,), (3,)):
            raise ValueError("k_hat must have 2 or 3 components")
        if abs(np.linalg.norm(kh) - 1.0) > 1e-12:
            raise ValueError("k_hat must be a unit vector")
        object.__setattr__(self, "k_hat", tuple(kh))

    @classmethod
    def from_frequency(cls, f: float, direction, c: float) -> "WaveVector":
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        return cls(k_hat=tuple(d), f=f, k=2.0 * math.pi * f / c)

    @property
    def dim(self) -> Dimension:
        return Dimension.TWO_D if len(self.k_hat) == 2 else Dimension.THREE_D


@dataclass(frozen=True)
class PlaneWaveSet:
    """A reproducible superposition of plane waves.

    ``directions`` has shape (n, 2 or 3) with unit rows, ``frequencies``
    and ``amplitudes`` shape (n,). ``prng`` records the generator
    algorithm so the set can be regenerated from ``seed``.
    """

    directions: np.ndarray
    frequencies: np.ndarray
    amplitudes: np.ndarray
    c: float
    seed: int
    prng: str = "numpy-pcg64"

    def __post_init__(self):
        if len(self.directions) == 0:
            raise ValueError("a plane-wave set must be nonempty")

    def __len__(self) -> int:
        return len(self.amplitudes)

    def wavevectors(self) -> list[WaveVector]:
        return [WaveVector.from_frequency(f, d, self.c)
                for f, d in zip(self.frequencies, self.directions)]


@dataclass(frozen=True)
class CoefficientVector:
    """Least-squares expansion coefficients plus the relative L2 remainder."""

    coefficients: np.ndarray
    residual: float


def mode_count(dim: Dimension, cfg: PhysicalConfig, two_sided: bool = False) -> int:
    """Number of modes enumerate_modes would produce."""
    total = 0
    for b in frequency_bins(cfg):
        if dim is Dimension.THREE_D:
            total += (b.degree + 1) ** 2
        elif two_sided:
            total += 2 * b.degree + 1
        else:
            total += b.degree + 1
    return total


def enumerate_modes(dim: Dimension, cfg: PhysicalConfig, *,
                    two_sided: bool = False,
                    cap: int = DEFAULT_MODE_CAP) -> list[ModeIndex]:
    """All mode indices for a configuration, ordered by (i, n, m).

    Raises :class:`ModeCapError` when the count exceeds ``cap``.
    """
    total = mode_count(dim, cfg, two_sided)
    if total > cap:
        raise ModeCapError(f"{total} modes exceed the cap of {cap}")
    out: list[ModeIndex] = []
    for b in frequency_bins(cfg):
        if dim is Dimension.THREE_D:
            for n in range(b.degree + 1):
                for m in range(-n, n + 1):
                    out.append(ModeIndex(b.i, n, m, dim))
        else:
            lo = -b.degree if two_sided else 0
            for m in range(lo, b.degree + 1):
                out.append(ModeIndex(b.i, 0, m, dim))
    return out


def mode_wavenumber(i: int, cfg: PhysicalConfig) -> tuple[float, float]:
    """Frequency and wave-number of bin i: (i/T, 2*pi*i/(c*T))."""
    if cfg.T <= 0:
        raise ConfigError("mode_wavenumber requires T > 0")
    f = i / cfg.T
    return f, 2.0 * math.pi * i / (cfg.c * cfg.T)


def _time_factor(i: int, t: float, T: float) -> complex:
    return cmath.exp(2j * math.pi * i * t / T) / math.sqrt(T)


def evaluate_mode(index: ModeIndex, position, t: float,
                  cfg: PhysicalConfig) -> complex:
    """Value of one basis function at a point of the observation region."""
    pos = np.asarray(position, dtype=float)
    want = 3 if index.dim is Dimension.THREE_D else 2
    if pos.shape != (want,):
        raise ValueError(f"position must have {want} components")
    r = float(np.linalg.norm(pos))
    if r > cfg.R * (1.0 + 1e-9) + 1e-300:
        raise ValueError(f"position norm {r} outside region of radius {cfg.R}")
    if not (-1e-9 * cfg.T <= t <= cfg.T * (1.0 + 1e-9)):
        raise ValueError(f"time {t} outside observation window [0, {cfg.T}]")
    _, k = mode_wavenumber(index.i, cfg)
    tf = _time_factor(index.i, t, cfg.T)
    if index.dim is Dimension.THREE_D:
        if r == 0.0:
            # j_n(0) kills every degree but zero.
            return tf / math.sqrt(specfun.FOUR_PI) if index.n == 0 else 0.0 + 0.0j
        radial = specfun.spherical_bessel_j(index.n, k * r)
        ang = specfun.sph_harm(index.n, index.m,
                               specfun.Angle(math.acos(min(max(pos[2] / r, -1.0), 1.0)),
                                             math.atan2(pos[1], pos[0])))
        return radial * ang * tf
    if r == 0.0:
        return tf if index.m == 0 else 0.0 + 0.0j
    radial = specfun.bessel_J(abs(index.m), k * r)
    if index.m < 0 and index.m % 2:
        radial = -radial
    theta = math.atan2(pos[1], pos[0])
    return radial * cmath.exp(1j * index.m * theta) * tf


def plane_wave(wv: WaveVector, position, t: float) -> complex:
    """exp(j(k . r + c k t)), written with the exact phase k(khat.r) + 2 pi f t."""
    pos = np.asarray(position, dtype=float)
    phase = wv.k * float(pos @ np.asarray(wv.k_hat)) + 2.0 * math.pi * wv.f * t
    return cmath.exp(1j * phase)


def jacobi_anger_partial(wv: WaveVector, position, N: int) -> complex:
    """Degree-N partial sum of the harmonic expansion of exp(j k . r).

    3D: 4 pi sum_{n<=N} j^n j_n(k r) sum_m Y_n^m(rhat) conj(Y_n^m(khat)).
    2D: sum_{|m|<=N} j^m J_m(k r) e^{j m (theta_r - theta_k)}.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    pos = np.asarray(position, dtype=float)
    r = float(np.linalg.norm(pos))
    if wv.dim is Dimension.TWO_D:
        if r == 0.0:
            return 1.0 + 0.0j
        dtheta = math.atan2(pos[1], pos[0]) - math.atan2(wv.k_hat[1], wv.k_hat[0])
        total = specfun.bessel_J(0, wv.k * r) + 0.0j
        for m in range(1, N + 1):
            jm = specfun.bessel_J(m, wv.k * r)
            # +m and -m terms combined; J_{-m} = (-1)^m J_m.
            total += (1j**m) * jm * cmath.exp(1j * m * dtheta)
            total += (1j**-m) * ((-1) ** m) * jm * cmath.exp(-1j * m * dtheta)
        return total
    if r == 0.0:
        return 1.0 + 0.0j
    ra = specfun.Angle(math.acos(min(max(pos[2] / r, -1.0), 1.0)),
                       math.atan2(pos[1], pos[0]))
    ka = specfun.Angle(math.acos(min(max(wv.k_hat[2], -1.0), 1.0)),
                       math.atan2(wv.k_hat[1], wv.k_hat[0]))
    total = 0.0 + 0.0j
    for n in range(N + 1):
        inner = 0.0 + 0.0j
        for m in range(-n, n + 1):
            inner += specfun.sph_harm(n, m, ra) * specfun.sph_harm(n, m, ka).conjugate()
        total += (1j**n) * specfun.spherical_bessel_j(n, wv.k * r) * inner
    return specfun.FOUR_PI * total


def jacobi_anger_values(wv: WaveVector, points: np.ndarray, N: int) -> np.ndarray:
    """Vectorized counterpart of :func:`jacobi_anger_partial`.

    Evaluates the same degree-N partial sum at every row of ``points``;
    used where per-point scalar evaluation would dominate the runtime.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    pts = np.asarray(points, dtype=float)
    r = np.linalg.norm(pts, axis=-1)
    r_uni, r_inv = np.unique(r, return_inverse=True)
    safe_r = np.where(r > 0, r, 1.0)
    out = np.zeros(len(pts), dtype=complex)
    if wv.dim is Dimension.TWO_D:
        dtheta = np.arctan2(pts[:, 1], pts[:, 0]) - math.atan2(wv.k_hat[1], wv.k_hat[0])
        for m in range(-N, N + 1):
            rad = np.array([specfun.bessel_J(abs(m), wv.k * rv) for rv in r_uni])[r_inv]
            if m < 0 and m % 2:
                rad = -rad
            out += (1j**m) * rad * np.exp(1j * m * dtheta)
        out[r == 0] = 1.0
        return out
    mu_r = np.clip(pts[:, 2] / safe_r, -1.0, 1.0)
    phi_r = np.arctan2(pts[:, 1], pts[:, 0])
    mu_uni, mu_inv = np.unique(mu_r, return_inverse=True)
    mu_k = min(max(wv.k_hat[2], -1.0), 1.0)
    phi_k = math.atan2(wv.k_hat[1], wv.k_hat[0])
    plm_r = specfun.norm_assoc_legendre_table(N, mu_uni)
    plm_k = specfun.norm_assoc_legendre_table(N, np.array([mu_k]))[:, :, 0]
    for n in range(N + 1):
        rad = np.array([specfun.spherical_bessel_j(n, wv.k * rv) for rv in r_uni])[r_inv]
        # m-sum: the +/-m pairs conjugate each other, so only m >= 0 is needed.
        msum = plm_r[n, 0][mu_inv] * plm_k[n, 0] + 0.0j
        for m in range(1, n + 1):
            msum += 2.0 * plm_r[n, m][mu_inv] * plm_k[n, m] * np.cos(m * (phi_r - phi_k))
        out += (1j**n) * rad * msum
    out *= specfun.FOUR_PI
    out[r == 0] = 1.0
    return out


def synthesize_field(dim: Dimension, cfg: PhysicalConfig, num_waves: int,
                     seed: int) -> PlaneWaveSet:
    """Random band-limited superposition of plane waves.

    Directions are isotropic (normalized Gaussian vectors), frequencies
    uniform over [F0 - W, F0 + W], amplitudes unit-variance complex
    Gaussian. The draw order is fixed, so a seed pins the whole set.
    """
    if num_waves < 1:
        raise ValueError("num_waves must be >= 1")
    d = 3 if dim is Dimension.THREE_D else 2
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(num_waves, d))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    freqs = rng.uniform(cfg.f0 - cfg.W, cfg.f0 + cfg.W, num_waves)
    amps = (rng.standard_normal(num_waves)
            + 1j * rng.standard_normal(num_waves)) / math.sqrt(2.0)
    return PlaneWaveSet(directions=dirs, frequencies=freqs, amplitudes=amps,
                        c=cfg.c, seed=seed)


def field_values(pws: PlaneWaveSet, positions: np.ndarray,
                 times: np.ndarray) -> np.ndarray:
    """Evaluate a plane-wave set at sample points (vectorized)."""
    k = 2.0 * math.pi * pws.frequencies / pws.c
    phase = (positions @ pws.directions.T) * k[None, :] \
        + 2.0 * math.pi * pws.frequencies[None, :] * np.asarray(times)[:, None]
    return np.exp(1j * phase) @ pws.amplitudes


def mode_matrix(modes: Sequence[ModeIndex], grid, cfg: PhysicalConfig) -> np.ndarray:
    """Matrix of mode values over grid points, shape (points, modes).

    Exploits the tensor-product structure of the grid: radial, angular
    and time factors are evaluated once per distinct node and combined
    through index arrays.
    """
    ax = grid.axes
    sqrt_t = math.sqrt(cfg.T)
    P = len(grid.weights)
    A = np.empty((P, len(modes)), dtype=complex)
    t_nodes = ax["t_nodes"]
    it = ax["t_index"]
    ir = ax["r_index"]
    r_nodes = ax["r_nodes"]
    if grid.dim is Dimension.TWO_D:
        theta = ax["phi_nodes"]
        ith = ax["phi_index"]
        for j, md in enumerate(modes):
            _, k = mode_wavenumber(md.i, cfg)
            rad = np.array([specfun.bessel_J(abs(md.m), k * r) for r in r_nodes])
            if md.m < 0 and md.m % 2:
                rad = -rad
            ang = np.exp(1j * md.m * theta)
            tf = np.exp(2j * math.pi * md.i * t_nodes / cfg.T) / sqrt_t
            A[:, j] = rad[ir] * ang[ith] * tf[it]
        return A
    mu = ax["mu_nodes"]
    phi = ax["phi_nodes"]
    imu = ax["mu_index"]
    iphi = ax["phi_index"]
    n_max = max(md.n for md in modes)
    plm = specfun.norm_assoc_legendre_table(n_max, mu)
    for j, md in enumerate(modes):
        _, k = mode_wavenumber(md.i, cfg)
        rad = np.array([specfun.spherical_bessel_j(md.n, k * r) for r in r_nodes])
        mm = abs(md.m)
        ylm_mu = plm[md.n, mm]
        ang = ylm_mu[imu] * np.exp(1j * md.m * phi[iphi])
        if md.m < 0 and mm % 2:
            ang = -ang
        tf = np.exp(2j * math.pi * md.i * t_nodes / cfg.T) / sqrt_t
        A[:, j] = rad[ir] * ang * tf[it]
    return A


def project_field(samples: np.ndarray, modes: Sequence[ModeIndex], grid,
                  cfg: PhysicalConfig, rcond: float = 1e-10) -> CoefficientVector:
    """Weighted least-squares projection of sampled field values onto modes.

    ``samples`` must align with ``grid`` points and there must be at
    least as many points as modes. Raises :class:`ProjectionRankError`
    when the weighted design matrix is numerically rank deficient.
    """
    y = np.asarray(samples, dtype=complex)
    if y.shape != (len(grid.weights),):
        raise ValueError("samples must align with grid points")
    if len(modes) > len(y):
        raise ValueError("more modes than grid points")
    A = mode_matrix(modes, grid, cfg)
    sw = np.sqrt(grid.weights)
    coeffs, _, rank, _ = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=rcond)
    if rank < len(modes):
        raise ProjectionRankError(
            f"design matrix rank {rank} < {len(modes)} modes; grid under-resolved")
    resid = np.linalg.norm((A @ coeffs - y) * sw)
    denom = np.linalg.norm(y * sw)
    return CoefficientVector(coefficients=coeffs,
                             residual=float(resid / denom) if denom > 0 else 0.0)

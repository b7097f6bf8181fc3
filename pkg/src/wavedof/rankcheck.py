"""Numerical verification of mode counts via quadrature and eigen-spectra.

Builds Gauss-Legendre product grids over ball x time, assembles Gram and
ensemble covariance matrices, and reduces Hermitian spectra to two
effective-rank readouts:

* threshold rank: eigenvalues >= epsilon * lambda_max,
* energy rank: smallest leading set capturing an eta fraction of the trace.

Both policies are configuration-exposed through :class:`RankPolicy`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .bounds import Dimension, PhysicalConfig
from .modes import ModeIndex, PlaneWaveSet, field_values, mode_matrix


class ResolutionError(RuntimeError):
    """Grid resolution below the documented minimum for the request."""


class GridError(ValueError):
    """Zero-measure or malformed grid request."""


@dataclass(frozen=True)
class RankPolicy:
    """Effective-rank thresholds: relative eigenvalue cut and energy fraction."""

    epsilon: float = 1e-3
    eta: float = 0.99

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")


@dataclass(frozen=True)
class SpectrumReport:
    """Descending Hermitian eigenvalues plus effective-rank readouts."""

    eigenvalues: np.ndarray
    trace: float
    rank_threshold: int
    rank_energy: int
    epsilon: float
    eta: float

    def cumulative_fractions(self) -> np.ndarray:
        total = float(np.sum(self.eigenvalues))
        if total == 0.0:
            return np.zeros_like(self.eigenvalues)
        return np.cumsum(self.eigenvalues) / total


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Quadrature points and weights over (ball of radius R) x [0, T].

    ``points`` has shape (P, 2 or 3) in meters, ``times`` shape (P,) in
    seconds, ``weights`` shape (P,) carrying the full measure (volume x
    time). ``axes`` keeps the tensor-product node arrays and per-point
    index arrays so mode evaluation can factorize.
    """

    dim: Dimension
    points: np.ndarray
    times: np.ndarray
    weights: np.ndarray
    resolution: tuple
    axes: dict = field(repr=False)

    def __len__(self) -> int:
        return len(self.weights)


def build_grid(dim: Dimension, cfg: PhysicalConfig,
               resolution: tuple) -> SpaceTimeGrid:
    """Gauss-Legendre grid over the observation region and time window.

    ``resolution`` is (n_radial, n_angular, n_time). In 3D the angular
    nodes are n_angular Gauss-Legendre points in cos(theta) crossed with
    2*n_angular uniform azimuths; in 2D they are n_angular uniform
    azimuths. Radial weights carry r^2 (3D) or r (2D).
    """
    n_r, n_ang, n_t = resolution
    if min(n_r, n_ang, n_t) < 1:
        raise GridError("all resolution counts must be >= 1")
    if cfg.R <= 0 or cfg.T <= 0:
        raise GridError("grids need R > 0 and T > 0")
    xr, wxr = leggauss(n_r)
    r = cfg.R * (xr + 1.0) / 2.0
    xt, wxt = leggauss(n_t)
    t = cfg.T * (xt + 1.0) / 2.0
    wt = wxt * cfg.T / 2.0
    if dim is Dimension.TWO_D:
        wr = wxr * cfg.R / 2.0 * r
        phi = 2.0 * math.pi * np.arange(n_ang) / n_ang
        wphi = np.full(n_ang, 2.0 * math.pi / n_ang)
        ir, ip, it = np.meshgrid(np.arange(n_r), np.arange(n_ang),
                                 np.arange(n_t), indexing="ij")
        ir, ip, it = ir.ravel(), ip.ravel(), it.ravel()
        pts = np.stack([r[ir] * np.cos(phi[ip]), r[ir] * np.sin(phi[ip])], axis=-1)
        w = wr[ir] * wphi[ip] * wt[it]
        axes = {"r_nodes": r, "r_index": ir, "phi_nodes": phi, "phi_index": ip,
                "t_nodes": t, "t_index": it}
        return SpaceTimeGrid(dim, pts, t[it], w, tuple(resolution), axes)
    wr = wxr * cfg.R / 2.0 * r * r
    mu, wmu = leggauss(n_ang)
    n_phi = 2 * n_ang
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    wphi = np.full(n_phi, 2.0 * math.pi / n_phi)
    ir, im, ip, it = np.meshgrid(np.arange(n_r), np.arange(n_ang),
                                 np.arange(n_phi), np.arange(n_t), indexing="ij")
    ir, im, ip, it = ir.ravel(), im.ravel(), ip.ravel(), it.ravel()
    st = np.sqrt(1.0 - mu**2)
    pts = np.stack([r[ir] * st[im] * np.cos(phi[ip]),
                    r[ir] * st[im] * np.sin(phi[ip]),
                    r[ir] * mu[im]], axis=-1)
    w = wr[ir] * wmu[im] * wphi[ip] * wt[it]
    axes = {"r_nodes": r, "r_index": ir, "mu_nodes": mu, "mu_index": im,
            "phi_nodes": phi, "phi_index": ip, "t_nodes": t, "t_index": it}
    return SpaceTimeGrid(dim, pts, t[it], w, tuple(resolution), axes)


def check_gram_resolution(modes: Sequence[ModeIndex], grid: SpaceTimeGrid,
                          cfg: PhysicalConfig) -> None:
    """Enforce the sampling minimums for Gram assembly.

    Time must oversample the highest band frequency (>= 4(F0+W)T + 8
    nodes) and the angular count must exceed twice the highest degree or
    order present.
    """
    n_t_min = 4.0 * (cfg.f0 + cfg.W) * cfg.T + 8.0
    max_deg = max((md.n if md.dim is Dimension.THREE_D else abs(md.m))
                  for md in modes)
    n_ang_min = 2 * max_deg + 1
    _, n_ang, n_t = grid.resolution
    if n_t < n_t_min or n_ang < n_ang_min:
        raise ResolutionError(
            f"grid resolution {grid.resolution} below minimum: "
            f"need n_time >= {math.ceil(n_t_min)} and n_angular >= {n_ang_min}")


def _mirror_upper(g: np.ndarray) -> np.ndarray:
    # Exact Hermitian symmetry: strict upper triangle mirrored, real diagonal.
    strict = np.triu(g, 1)
    return strict + strict.conj().T + np.diag(np.real(np.diag(g)))


def gram_of_modes(modes: Sequence[ModeIndex], grid: SpaceTimeGrid,
                  cfg: PhysicalConfig) -> np.ndarray:
    """Weighted Gram matrix G[p, q] = sum_s w_s mode_p(s) conj(mode_q(s))."""
    check_gram_resolution(modes, grid, cfg)
    A = mode_matrix(modes, grid, cfg)
    g = (A.conj() * grid.weights[:, None]).T @ A
    return _mirror_upper(g.conj())


def diagonal_normalize(g: np.ndarray) -> np.ndarray:
    """Scale a Gram matrix to unit diagonal (scale-free independence test)."""
    d = np.real(np.diag(g))
    if np.any(d <= 0):
        raise ValueError("Gram diagonal must be positive")
    s = 1.0 / np.sqrt(d)
    return g * np.outer(s, s)


def ensemble_covariance(fields: Sequence[PlaneWaveSet],
                        grid: SpaceTimeGrid) -> np.ndarray:
    """Weighted second-moment matrix of an ensemble over grid points.

    C[s, s'] = (1/F) sum_f sqrt(w_s) x_f(s) conj(x_f(s')) sqrt(w_s'),
    a Hermitian positive-semidefinite matrix of size (points, points).
    """
    if len(fields) == 0:
        raise ValueError("ensemble must be nonempty")
    xw = _weighted_field_rows(fields, grid)
    c = xw.conj().T @ xw / len(fields)
    return _mirror_upper(c)


def _weighted_field_rows(fields: Sequence[PlaneWaveSet],
                         grid: SpaceTimeGrid) -> np.ndarray:
    sw = np.sqrt(grid.weights)
    xw = np.empty((len(fields), len(grid.weights)), dtype=complex)
    for row, pws in enumerate(fields):
        xw[row] = field_values(pws, grid.points, grid.times) * sw
    return xw


def ensemble_spectrum(fields: Sequence[PlaneWaveSet], grid: SpaceTimeGrid,
                      policy: RankPolicy = RankPolicy()) -> SpectrumReport:
    """Spectrum of the ensemble covariance, computed through its dual.

    The F x F matrix (1/F) Xw Xw^H shares every nonzero eigenvalue and
    the trace with the (points x points) covariance, so rank readouts
    are identical while the eigenproblem stays small.
    """
    if len(fields) == 0:
        raise ValueError("ensemble must be nonempty")
    xw = _weighted_field_rows(fields, grid)
    dual = _mirror_upper(xw @ xw.conj().T / len(fields))
    return eigen_spectrum(dual, policy)


def eigen_spectrum(matrix: np.ndarray,
                   policy: RankPolicy = RankPolicy()) -> SpectrumReport:
    """Descending eigenvalues and rank readouts of a Hermitian matrix.

    Rejects matrices whose Hermitian defect exceeds 1e-10 relative to
    the largest entry; verifies the eigendecomposition reconstructs the
    input to 1e-8 relative in Frobenius norm.
    """
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.conj().T))) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian within 1e-10")
    evals, evecs = np.linalg.eigh(m)
    recon = (evecs * evals) @ evecs.conj().T
    mnorm = float(np.linalg.norm(m))
    if mnorm > 0 and float(np.linalg.norm(m - recon)) > 1e-8 * mnorm:
        raise RuntimeError("eigendecomposition failed to reconstruct input")
    evals = evals[::-1].copy()
    rank_t, rank_e = effective_rank(evals, policy)
    return SpectrumReport(eigenvalues=evals, trace=float(np.sum(evals)),
                          rank_threshold=rank_t, rank_energy=rank_e,
                          epsilon=policy.epsilon, eta=policy.eta)


def effective_rank(spectrum, policy: RankPolicy = RankPolicy()) -> tuple[int, int]:
    """(threshold rank, energy rank) of a descending eigenvalue sequence.

    Accepts a :class:`SpectrumReport` or a raw eigenvalue array.
    """
    evals = np.asarray(getattr(spectrum, "eigenvalues", spectrum), dtype=float)
    if evals.size == 0:
        raise ValueError("empty spectrum")
    lam_max = evals[0]
    if lam_max <= 0:
        return 0, 0
    rank_t = int(np.sum(evals >= policy.epsilon * lam_max))
    pos = np.clip(evals, 0.0, None)
    total = float(np.sum(pos))
    cum = np.cumsum(pos)
    rank_e = int(np.searchsorted(cum, policy.eta * total) + 1)
    return rank_t, min(rank_e, evals.size)


def ball_grid(dim: Dimension, radius: float,
              resolution: tuple) -> tuple[np.ndarray, np.ndarray]:
    """Spatial-only quadrature over a ball (3D) or disc (2D).

    Returns (points, weights); ``resolution`` is (n_radial, n_angular).
    """
    n_r, n_ang = resolution
    if min(n_r, n_ang) < 1:
        raise GridError("resolution counts must be >= 1")
    if radius <= 0:
        raise GridError("radius must be > 0")
    xr, wxr = leggauss(n_r)
    r = radius * (xr + 1.0) / 2.0
    if dim is Dimension.TWO_D:
        wr = wxr * radius / 2.0 * r
        phi = 2.0 * math.pi * np.arange(n_ang) / n_ang
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        w = (wr[:, None] * np.full(n_ang, 2.0 * math.pi / n_ang)[None, :]).ravel()
        pts = np.stack([rr.ravel() * np.cos(pp.ravel()),
                        rr.ravel() * np.sin(pp.ravel())], axis=-1)
        return pts, w
    wr = wxr * radius / 2.0 * r * r
    mu, wmu = leggauss(n_ang)
    n_phi = 2 * n_ang
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    rr, mm, pp = np.meshgrid(r, mu, phi, indexing="ij")
    w = (wr[:, None, None] * wmu[None, :, None]
         * np.full(n_phi, 2.0 * math.pi / n_phi)[None, None, :]).ravel()
    st = np.sqrt(1.0 - mm.ravel()**2)
    pts = np.stack([rr.ravel() * st * np.cos(pp.ravel()),
                    rr.ravel() * st * np.sin(pp.ravel()),
                    rr.ravel() * mm.ravel()], axis=-1)
    return pts, w


def truncation_error(wv, radius: float, N: int,
                     resolution: tuple = (24, 24)) -> float:
    """Ball-averaged relative L2 error of the degree-N harmonic partial sum
    against the plane-wave spatial factor exp(j k . r)."""
    from .modes import jacobi_anger_values

    if N < 0:
        raise ValueError("N must be >= 0")
    pts, w = ball_grid(wv.dim, radius, resolution)
    kh = np.asarray(wv.k_hat)
    exact = np.exp(1j * wv.k * (pts @ kh))
    approx = jacobi_anger_values(wv, pts, N)
    err = float(np.sum(w * np.abs(exact - approx) ** 2))
    return math.sqrt(err / float(np.sum(w)))

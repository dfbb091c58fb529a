"""Estimators for isotropic processes on ball (and, for the pcf, box)
windows: Bartlett's isotropic estimator, kernel pair-correlation
estimation with translation edge correction, and two Hankel-transform
routes from an estimated pcf to the structure factor (double
exponential quadrature and the discrete Hankel transform).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sps
from scipy.spatial.distance import pdist

from .core import Ball, Box, estimate_intensity
from .errors import ValidationError
from .specfun import bessel_j, bessel_j_zeros, bessel_y
from .spectral import SpectralEstimate

STOYAN_BANDWIDTH_FACTOR = 0.15
DEFAULT_PCF_GRID_SIZE = 128

# per-pair chunk for kernel-vs-wavenumber products (memory bound)
_PAIR_CHUNK = 1 << 19


def _sphere_surface(dim):
    # surface area of the unit (dim-1)-sphere
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def bartlett_isotropic(pattern, ks, self_normalized=False):
    """Isotropic estimator from pairwise distances only.

    1 + (2 pi)^{d/2} / (rho |W| omega_{d-1}) sum_{i != j}
        J_{d/2-1}(k r_ij) / (k r_ij)^{d/2-1},
    the d=2 kernel being plain J_0.  Self-normalization replaces
    rho |W| by N.  Ball windows only; the matching bias-free
    wavenumbers are scaled Bessel zeros.
    """
    if not isinstance(pattern.window, Ball):
        raise ValidationError(
            "bartlett_isotropic: ball windows only; use the spectral module for boxes")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if ks.ndim != 1 or ks.size == 0 or np.any(ks <= 0):
        raise ValidationError("bartlett_isotropic: wavenumbers must be positive")
    d = pattern.dim
    nu = d / 2.0 - 1.0
    rho = pattern.intensity
    values = np.ones_like(ks)
    if len(pattern) >= 2:
        rho = estimate_intensity(pattern)
        denom = float(len(pattern)) if self_normalized else rho * pattern.window.volume
        prefactor = (2.0 * math.pi) ** (d / 2.0) / (_sphere_surface(d) * denom)
        dists = pdist(pattern.points)
        for start in range(0, len(dists), _PAIR_CHUNK):
            block = dists[start:start + _PAIR_CHUNK]
            x = np.multiply.outer(ks, block)
            kernel = bessel_j(nu, x)
            if nu != 0.0:
                kernel = kernel / x ** nu
            # i != j counts every unordered pair twice
            values += prefactor * 2.0 * kernel.sum(axis=1)
    meta = {"estimator": "bartlett_isotropic", "self_normalized": bool(self_normalized),
            "rho": rho, "rho_source": "declared" if pattern.intensity is not None else "estimated"}
    return SpectralEstimate(ks, values, meta=meta)


# -- pair correlation function ------------------------------------------------

@dataclass(frozen=True, eq=False)
class PcfEstimate:
    """Kernel pcf on a radial grid; values below bandwidth/2 are
    flagged unreliable and skipped by the interpolator."""

    radii: np.ndarray
    values: np.ndarray
    r_max: float
    bandwidth: float
    reliable: np.ndarray
    method: str = "epanechnikov-translation"

    def __len__(self):
        return len(self.radii)


def default_r_max(window):
    if isinstance(window, Ball):
        return window.radius / 2.0
    if isinstance(window, Box):
        return min(window.lengths) / 4.0
    raise ValidationError("unsupported window type")


def _box_overlaps(window, diffs):
    lengths = np.asarray(window.lengths)
    edges = lengths - np.abs(diffs)
    return np.prod(np.clip(edges, 0.0, None), axis=-1)


def _ball_overlaps(window, dists):
    # volume of the lens between two radius-R balls at the given distances
    r = window.radius
    d = window.dim
    x = 1.0 - (dists / (2.0 * r)) ** 2
    return window.volume * _sps.betainc((d + 1) / 2.0, 0.5, np.clip(x, 0.0, 1.0))


def estimate_pcf_kernel(pattern, r_grid=None, bandwidth=None):
    """Epanechnikov-kernel pcf with translation edge correction.

    g-hat(r) = sum_{i != j} K_b(r - r_ij) / |W cap (W - v_ij)|
               / (rho^2 omega_{d-1} r^{d-1}),
    with Stoyan's bandwidth 0.15 / sqrt(rho) by default.  Both rho
    factors use the empirical rate N/|W|, which cancels the count
    fluctuation out of the ratio (a declared intensity is ignored
    here, unlike in the spectral estimators).  The grid must stay
    within (0, R/2] for balls, (0, min L / 4] for boxes.
    """
    if len(pattern) < 2:
        raise ValidationError("estimate_pcf_kernel: need at least 2 points")
    window = pattern.window
    d = pattern.dim
    rho = len(pattern) / window.volume
    r_hi = default_r_max(window)
    if r_grid is None:
        r_grid = r_hi * np.arange(1, DEFAULT_PCF_GRID_SIZE + 1) / DEFAULT_PCF_GRID_SIZE
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.ndim != 1 or r_grid.size == 0 or np.any(np.diff(r_grid) <= 0):
        raise ValidationError("estimate_pcf_kernel: r_grid must be strictly increasing")
    if r_grid[0] <= 0 or r_grid[-1] > r_hi * (1 + 1e-12):
        raise ValidationError(
            f"estimate_pcf_kernel: r_grid must lie in (0, {r_hi:.6g}] to keep the "
            "window overlap well conditioned")
    b = float(bandwidth) if bandwidth is not None else STOYAN_BANDWIDTH_FACTOR / math.sqrt(rho)
    if not b > 0:
        raise ValidationError("estimate_pcf_kernel: bandwidth must be positive")

    dists = pdist(pattern.points)
    keep = dists <= r_grid[-1] + b
    if isinstance(window, Box):
        ii, jj = np.triu_indices(len(pattern), k=1)
        diffs = pattern.points[ii[keep]] - pattern.points[jj[keep]]
        overlaps = _box_overlaps(window, diffs)
    else:
        overlaps = _ball_overlaps(window, dists[keep])
    dists = dists[keep]
    if np.any(overlaps <= 0):
        raise ValidationError("estimate_pcf_kernel: degenerate window overlap in range")
    pair_weights = 2.0 / overlaps  # i != j: each unordered pair twice

    order = np.argsort(dists)
    dists = dists[order]
    pair_weights = pair_weights[order]
    values = np.empty_like(r_grid)
    surface = _sphere_surface(d)
    for m, r in enumerate(r_grid):
        lo = np.searchsorted(dists, r - b, side="left")
        hi = np.searchsorted(dists, r + b, side="right")
        u = (r - dists[lo:hi]) / b
        kern = 0.75 * (1.0 - u * u) / b
        total = float(np.sum(kern * pair_weights[lo:hi]))
        values[m] = total / (rho * rho * surface * r ** (d - 1))
    reliable = r_grid >= 0.5 * b
    return PcfEstimate(radii=r_grid, values=values, r_max=float(r_grid[-1]),
                       bandwidth=b, reliable=reliable)


class PcfInterpolant:
    """Linear interpolation of a cleaned pcf estimate.

    Clamps below the first node, and is exactly 1 beyond r_max (no
    correlation information there).
    """

    def __init__(self, radii, values, r_max):
        self.radii = np.asarray(radii, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.r_max = float(r_max)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.interp(r, self.radii, self.values)
        return np.where(r > self.r_max, 1.0, out)


def interpolate_pcf(estimate):
    """Callable from a PcfEstimate, dropping non-finite and unreliable nodes."""
    keep = np.isfinite(estimate.values) & estimate.reliable
    if keep.sum() < 2:
        raise ValidationError("interpolate_pcf: fewer than 2 usable nodes")
    return PcfInterpolant(estimate.radii[keep], estimate.values[keep], estimate.r_max)


# -- Hankel-transform routes --------------------------------------------------

@dataclass(frozen=True)
class OgataParams:
    h: float = 0.01
    n_nodes: int = 300

    def __post_init__(self):
        if not self.h > 0:
            raise ValidationError("OgataParams: h must be positive")
        if int(self.n_nodes) < 1:
            raise ValidationError("OgataParams: n_nodes must be >= 1")
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "n_nodes", int(self.n_nodes))


def _psi(t):
    return t * np.tanh(0.5 * math.pi * np.sinh(t))


def _dpsi(t):
    u = 0.5 * math.pi * np.sinh(t)
    # beyond u ~ 30 both factors saturate to 1 and cosh overflows
    safe = np.minimum(u, 30.0)
    out = np.tanh(safe) + t * 0.5 * math.pi * np.cosh(t) / np.cosh(safe) ** 2
    return np.where(u > 30.0, 1.0, out)


def _r_max_of(g):
    return getattr(g, "r_max", None)


def _as_pcf_callable(g):
    if isinstance(g, PcfEstimate):
        return interpolate_pcf(g)
    if callable(g):
        return g
    raise ValidationError("g must be callable or a PcfEstimate")


def hankel_ogata(g, rho, dim, ks, params=None, r_max=None):
    """Structure factor via double exponential quadrature of the
    order-(d/2-1) Hankel transform of r^nu (g(r) - 1).

    Wavenumbers below roughly (last quadrature node) / r_max
    undersample g; they are flagged in meta, not rejected.
    """
    params = params or OgataParams()
    if not rho > 0:
        raise ValidationError("hankel_ogata: rho must be positive")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    if np.any(ks <= 0):
        raise ValidationError("hankel_ogata: wavenumbers must be positive")
    gfun = _as_pcf_callable(g)
    d = int(dim)
    nu = d / 2.0 - 1.0
    zeros = bessel_j_zeros(nu, params.n_nodes)
    t = params.h * zeros / math.pi
    x = (math.pi / params.h) * _psi(t)
    weights = bessel_y(nu, zeros) / bessel_j(nu + 1.0, zeros)
    base = math.pi * weights * bessel_j(nu, x) * _dpsi(t) * x ** (nu + 1.0)

    values = np.empty_like(ks)
    for i, k in enumerate(ks):
        integrand = np.asarray(gfun(x / k), dtype=float) - 1.0
        values[i] = 1.0 + rho * (2.0 * math.pi) ** (d / 2.0) * k ** (-d) * float(
            np.sum(base * integrand))

    meta = {"estimator": "hankel_ogata", "h": params.h, "n_nodes": params.n_nodes}
    reach = r_max if r_max is not None else _r_max_of(g)
    if reach is not None:
        k_min = float(x[-1] / reach)
        meta["k_min"] = k_min
        meta["n_below_k_min"] = int(np.sum(ks < k_min))
    return SpectralEstimate(ks, values, meta=meta)


@dataclass(frozen=True, eq=False)
class DhtGrid:
    """Fixed radial/frequency grids of the discrete Hankel transform.

    With eta the first n zeros of J_order: r_j = eta_j r_max / eta_n,
    k_m = eta_m / r_max for j, m = 1..n-1, and k_max = eta_n / r_max.
    """

    order: float
    r_max: float
    n: int
    zeros: np.ndarray
    r_nodes: np.ndarray
    k_nodes: np.ndarray
    k_max: float

    @classmethod
    def build(cls, order, r_max, n):
        if not r_max > 0:
            raise ValidationError("DhtGrid: r_max must be positive")
        n = int(n)
        if n < 2:
            raise ValidationError("DhtGrid: n must be >= 2")
        zeros = bessel_j_zeros(float(order), n)
        last = zeros[-1]
        return cls(order=float(order), r_max=float(r_max), n=n, zeros=zeros,
                   r_nodes=zeros[:-1] * (r_max / last),
                   k_nodes=zeros[:-1] / r_max,
                   k_max=last / r_max)


def hankel_dht(g, rho, dim, grid):
    """Structure factor via the discrete Hankel transform on the
    grid's mandated nodes; output wavenumbers are exactly grid.k_nodes.
    """
    if not rho > 0:
        raise ValidationError("hankel_dht: rho must be positive")
    d = int(dim)
    nu = d / 2.0 - 1.0
    if abs(grid.order - nu) > 1e-12:
        raise ValidationError(f"hankel_dht: grid order {grid.order} != d/2-1 = {nu}")
    gfun = _as_pcf_callable(g)
    eta = grid.zeros
    last = eta[-1]
    h_tilde = grid.r_nodes ** nu * (np.asarray(gfun(grid.r_nodes), dtype=float) - 1.0)
    scale = 2.0 * grid.r_max ** 2 / last ** 2
    jsq = bessel_j(nu + 1.0, eta[:-1]) ** 2
    kernel = bessel_j(nu, np.multiply.outer(eta[:-1], eta[:-1]) / last)
    transform = scale * (kernel @ (h_tilde / jsq))
    values = 1.0 + rho * (2.0 * math.pi) ** (d / 2.0) * grid.k_nodes ** (-nu) * transform
    meta = {"estimator": "hankel_dht", "r_max": grid.r_max, "n": grid.n,
            "k_min": float(grid.k_nodes[0]), "k_max": grid.k_max}
    return SpectralEstimate(grid.k_nodes, values, meta=meta)

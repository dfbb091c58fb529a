"""Observation windows, point patterns and wavevector grids.

Windows are centered at the origin.  Wavevector grids implement the
bias-free evaluation sets: the restricted grid quantizes every
coordinate to multiples of 2 pi / L_j, the full grid requires at least
one quantized coordinate, and ball windows get radial wavenumbers at
scaled Bessel zeros.  Vectors with norm at or below
pi / (sqrt(d) max_j L_j) are never emitted: below that scale the
window-induced bias dominates any signal.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .specfun import bessel_j_zeros

DEFAULT_FREE_GRID_SIZE = 64


@dataclass(frozen=True)
class Box:
    """Axis-aligned box prod_j [-L_j/2, L_j/2]."""

    lengths: tuple

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(np.asarray(self.lengths, dtype=float)))
        if len(lengths) < 1 or any(v <= 0 for v in lengths):
            raise ValidationError("Box: side lengths must be positive")
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self):
        return len(self.lengths)

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    def contains(self, points):
        pts = np.asarray(points, dtype=float)
        half = 0.5 * np.asarray(self.lengths)
        return np.all(np.abs(pts) <= half, axis=-1)


@dataclass(frozen=True)
class Ball:
    """Centered ball of given radius."""

    radius: float
    dim: int = 2

    def __post_init__(self):
        if self.radius <= 0:
            raise ValidationError("Ball: radius must be positive")
        if int(self.dim) < 1:
            raise ValidationError("Ball: dimension must be >= 1")
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def volume(self):
        d = self.dim
        return math.pi ** (d / 2.0) * self.radius ** d / math.gamma(d / 2.0 + 1.0)

    def contains(self, points):
        pts = np.asarray(points, dtype=float)
        return np.linalg.norm(pts, axis=-1) <= self.radius


def window_contains(outer, inner):
    """Geometric containment test between centered windows."""
    if outer.dim != inner.dim:
        return False
    if isinstance(outer, Box) and isinstance(inner, Box):
        return all(li <= lo for li, lo in zip(inner.lengths, outer.lengths))
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        return inner.radius <= outer.radius
    if isinstance(outer, Box) and isinstance(inner, Ball):
        return 2.0 * inner.radius <= min(outer.lengths)
    if isinstance(outer, Ball) and isinstance(inner, Box):
        half_diag = 0.5 * math.sqrt(sum(l * l for l in inner.lengths))
        return half_diag <= outer.radius
    raise ValidationError("window_contains: unsupported window types")


@dataclass(frozen=True, eq=False)
class PointPattern:
    """A finite point configuration observed in a centered window.

    ``intensity`` is the declared intensity of the underlying process;
    when absent, estimators fall back to N / |W|.
    """

    points: np.ndarray
    window: object
    intensity: float = None
    meta: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = np.empty((0, self.window.dim))
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise ValidationError("PointPattern: points must be an (N, d) array")
        if pts.shape[1] != self.window.dim:
            raise ValidationError(
                f"PointPattern: point dimension {pts.shape[1]} != window dimension {self.window.dim}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("PointPattern: non-finite coordinates")
        inside = self.window.contains(pts)
        if not np.all(inside):
            bad = int(np.flatnonzero(~inside)[0])
            raise ValidationError(f"PointPattern: point {bad} lies outside the window")
        if len(pts) > 1 and len(np.unique(pts, axis=0)) != len(pts):
            raise ValidationError("PointPattern: duplicate points")
        if self.intensity is not None and not self.intensity > 0:
            raise ValidationError("PointPattern: declared intensity must be positive")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.intensity is not None:
            object.__setattr__(self, "intensity", float(self.intensity))

    def __len__(self):
        return len(self.points)

    @property
    def dim(self):
        return self.window.dim


def estimate_intensity(pattern):
    """Declared intensity if present, otherwise N / |W|."""
    if pattern.intensity is not None:
        return pattern.intensity
    n = len(pattern)
    if n == 0:
        raise ValidationError("estimate_intensity: empty pattern with no declared intensity")
    return n / pattern.window.volume


def restrict_to_window(pattern, window):
    """Intersection of a pattern with a contained sub-window.

    The declared intensity (if any) carries over unchanged; restriction
    to the pattern's own window is the identity.
    """
    if not window_contains(pattern.window, window):
        raise ValidationError("restrict_to_window: target window is not contained in the pattern window")
    mask = window.contains(pattern.points)
    return PointPattern(pattern.points[mask], window, pattern.intensity)


@dataclass(frozen=True, eq=False)
class WaveGrid:
    """Evaluation grid in Fourier space.

    Either explicit wavevectors with their norms, or (for isotropic
    estimators on balls) wavenumbers alone.
    """

    wavenumbers: np.ndarray
    wavevectors: np.ndarray = None

    def __post_init__(self):
        k = np.asarray(self.wavenumbers, dtype=float)
        if k.ndim != 1 or k.size == 0:
            raise ValidationError("WaveGrid: wavenumbers must be a non-empty 1-d array")
        if np.any(k <= 0):
            raise ValidationError("WaveGrid: wavenumbers must be positive (zero vector excluded)")
        object.__setattr__(self, "wavenumbers", k)
        if self.wavevectors is not None:
            vec = np.asarray(self.wavevectors, dtype=float)
            if vec.ndim != 2 or vec.shape[0] != k.shape[0]:
                raise ValidationError("WaveGrid: wavevectors must be (Q, d) matching wavenumbers")
            if not np.allclose(np.linalg.norm(vec, axis=1), k, rtol=1e-10, atol=1e-12):
                raise ValidationError("WaveGrid: wavenumbers are not the norms of the wavevectors")
            object.__setattr__(self, "wavevectors", vec)

    @classmethod
    def from_vectors(cls, wavevectors):
        vec = np.atleast_2d(np.asarray(wavevectors, dtype=float))
        return cls(np.linalg.norm(vec, axis=1), vec)

    def __len__(self):
        return len(self.wavenumbers)


def min_wavenumber_floor(window):
    """Hard floor pi / (sqrt(d) max_j L_j) under which no grid point is emitted."""
    if isinstance(window, Box):
        return math.pi / (math.sqrt(window.dim) * max(window.lengths))
    raise ValidationError("min_wavenumber_floor: box windows only")


def _quantized_axis(length, k_max):
    n_max = int(math.floor(k_max * length / (2.0 * math.pi)))
    if n_max < 1:
        return np.empty(0)
    n = np.arange(1, n_max + 1)
    vals = 2.0 * math.pi * n / length
    return np.concatenate([-vals[::-1], vals])


def allowed_wavevectors(window, k_max, restricted=True, free_grid=None, n_free=DEFAULT_FREE_GRID_SIZE):
    """Bias-free wavevector grid for a box window.

    restricted=True quantizes every coordinate to nonzero multiples of
    2 pi / L_j.  restricted=False additionally admits vectors with at
    least one quantized coordinate, the remaining coordinates drawn
    from ``free_grid`` (default: ``n_free`` equispaced values between
    the hard floor and ``k_max``).  Norms are kept in
    (pi / (sqrt(d) max L_j), k_max].
    """
    if not isinstance(window, Box):
        raise ValidationError("allowed_wavevectors: box windows only; see allowed_wavenumbers_ball")
    if k_max <= 0:
        raise ValidationError("allowed_wavevectors: k_max must be positive")
    d = window.dim
    floor = min_wavenumber_floor(window)
    axes = [_quantized_axis(L, k_max) for L in window.lengths]

    parts = []
    if all(len(a) for a in axes):
        mesh = np.meshgrid(*axes, indexing="ij")
        parts.append(np.stack([m.ravel() for m in mesh], axis=-1))

    if not restricted:
        if free_grid is None:
            n_free = int(n_free)
            if n_free < 1:
                raise ValidationError("allowed_wavevectors: n_free must be >= 1")
            step = (k_max - floor) / n_free
            if step <= 0:
                raise ValidationError("allowed_wavevectors: k_max is below the minimum representable wavenumber")
            free = floor + step * np.arange(1, n_free + 1)
        else:
            free = np.asarray(free_grid, dtype=float).ravel()
            if free.size == 0 or np.any(free == 0.0) or not np.all(np.isfinite(free)):
                raise ValidationError("allowed_wavevectors: free grid must be finite and nonzero")
        for j in range(d):
            if len(axes[j]) == 0:
                continue
            other = [free] * d
            other[j] = axes[j]
            mesh = np.meshgrid(*other, indexing="ij")
            parts.append(np.stack([m.ravel() for m in mesh], axis=-1))

    if not parts:
        raise ValidationError("allowed_wavevectors: k_max is below the minimum representable wavenumber")
    vecs = np.unique(np.concatenate(parts, axis=0), axis=0)
    norms = np.linalg.norm(vecs, axis=1)
    keep = (norms <= k_max * (1.0 + 1e-12)) & (norms > floor)
    vecs = vecs[keep]
    if len(vecs) == 0:
        raise ValidationError("allowed_wavevectors: no wavevectors in range; increase k_max")
    return WaveGrid.from_vectors(vecs)


def allowed_wavenumbers_ball(window, n):
    """First ``n`` bias-free wavenumbers of a ball window: zeros of J_{d/2} over R."""
    if not isinstance(window, Ball):
        raise ValidationError("allowed_wavenumbers_ball: ball windows only")
    zeros = bessel_j_zeros(window.dim / 2.0, n)
    return WaveGrid(zeros / window.radius)


def min_allowed_wavevector(window):
    """Smallest bias-free evaluation point for the window.

    Boxes: the vector (2 pi / L_1, ..., 2 pi / L_d).  Balls: the first
    zero of J_{d/2} divided by R (wavenumber only).
    """
    if isinstance(window, Box):
        vec = 2.0 * math.pi / np.asarray(window.lengths)
        return WaveGrid.from_vectors(vec[None, :])
    if isinstance(window, Ball):
        return allowed_wavenumbers_ball(window, 1)
    raise ValidationError("min_allowed_wavevector: unsupported window type")

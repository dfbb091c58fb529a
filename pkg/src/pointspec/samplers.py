"""Benchmark point-process samplers and pattern file I/O.

Samplers cover the standard test bed: homogeneous Poisson, Thomas
cluster, independent thinning, and the Ginibre ensemble (eigenvalues
of a complex Gaussian matrix).  All samplers are deterministic given
(parameters, seed).  Closed-form structure factors and pair
correlation functions for these processes live here too, as reference
curves for benchmarks.
"""

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .core import Ball, Box, PointPattern, restrict_to_window, window_contains
from .errors import ResourceError, ValidationError
from .kvio import read_kv, write_kv

GINIBRE_EDGE_MARGIN = 0.85
GINIBRE_N_MAX = 6000


def as_rng(seed):
    """Coerce an integer seed (or None, or a Generator) to a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_rng(seed, index):
    """Independent per-replication stream derived from a base seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(index),)))


def _uniform_in(window, n, rng):
    if isinstance(window, Box):
        half = 0.5 * np.asarray(window.lengths)
        return rng.uniform(-half, half, size=(n, window.dim))
    if isinstance(window, Ball):
        d = window.dim
        direction = rng.standard_normal((n, d))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radii = window.radius * rng.random(n) ** (1.0 / d)
        return direction * radii[:, None]
    raise ValidationError("unsupported window type")


def sample_poisson(window, intensity, seed=None):
    """Homogeneous Poisson process of the given intensity on the window."""
    if not intensity > 0:
        raise ValidationError("sample_poisson: intensity must be positive")
    rng = as_rng(seed)
    n = rng.poisson(intensity * window.volume)
    return PointPattern(_uniform_in(window, n, rng), window, intensity=intensity)


def _dilate(window, margin):
    if isinstance(window, Box):
        return Box(tuple(length + 2.0 * margin for length in window.lengths))
    if isinstance(window, Ball):
        return Ball(window.radius + margin, window.dim)
    raise ValidationError("unsupported window type")


def sample_thomas(window, parent_intensity, offspring_mean, sigma, seed=None):
    """Thomas cluster process.

    Parents are Poisson(parent_intensity) on the window dilated by
    6 sigma in every direction (Gaussian mass beyond that is < 1e-8),
    each spawning Poisson(offspring_mean) children displaced by
    centered isotropic Gaussians with scale sigma.  Children outside
    the window are discarded.  The declared intensity is
    parent_intensity * offspring_mean.
    """
    if not (parent_intensity > 0 and offspring_mean > 0 and sigma > 0):
        raise ValidationError("sample_thomas: all parameters must be positive")
    rng = as_rng(seed)
    outer = _dilate(window, 6.0 * sigma)
    n_parents = rng.poisson(parent_intensity * outer.volume)
    parents = _uniform_in(outer, n_parents, rng)
    counts = rng.poisson(offspring_mean, size=n_parents)
    total = int(counts.sum())
    offspring = np.repeat(parents, counts, axis=0) + sigma * rng.standard_normal((total, window.dim))
    offspring = offspring[window.contains(offspring)]
    return PointPattern(offspring, window, intensity=parent_intensity * offspring_mean)


def thin(pattern, retain_prob, seed=None):
    """Independent Bernoulli thinning; intensity rescales to p * rho."""
    if not 0.0 < retain_prob < 1.0:
        raise ValidationError("thin: retain_prob must lie in (0, 1)")
    rng = as_rng(seed)
    keep = rng.random(len(pattern)) < retain_prob
    intensity = None if pattern.intensity is None else retain_prob * pattern.intensity
    return PointPattern(pattern.points[keep], pattern.window, intensity=intensity)


def sample_ginibre(radius, seed=None, n_max=GINIBRE_N_MAX):
    """Ginibre ensemble restricted to the centered disk of given radius.

    Eigenvalues of an n x n matrix of i.i.d. standard complex Gaussian
    entries fill a disk of radius ~ sqrt(n) with intensity 1/pi.  The
    matrix size n = ceil((radius / 0.85)^2) keeps the requested window
    away from the spectral edge.
    """
    if not radius > 0:
        raise ValidationError("sample_ginibre: radius must be positive")
    n = int(math.ceil((radius / GINIBRE_EDGE_MARGIN) ** 2))
    if n > n_max:
        raise ResourceError(
            f"sample_ginibre: radius {radius} needs a {n}x{n} eigenproblem (limit {n_max})")
    rng = as_rng(seed)
    mat = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * math.sqrt(0.5)
    eig = np.linalg.eigvals(mat)
    window = Ball(float(radius), 2)
    pts = np.column_stack([eig.real, eig.imag])
    pts = pts[window.contains(pts)]
    return PointPattern(pts, window, intensity=1.0 / math.pi)


# -- closed-form reference curves ------------------------------------------

def structure_factor_poisson(k):
    return np.ones_like(np.asarray(k, dtype=float))


def pcf_poisson(r):
    return np.ones_like(np.asarray(r, dtype=float))


def structure_factor_ginibre(k):
    k = np.asarray(k, dtype=float)
    return 1.0 - np.exp(-0.25 * k * k)


def pcf_ginibre(r):
    r = np.asarray(r, dtype=float)
    return 1.0 - np.exp(-r * r)


def structure_factor_thomas(k, offspring_mean=20.0, sigma=2.0):
    k = np.asarray(k, dtype=float)
    return 1.0 + offspring_mean * np.exp(-((sigma * k) ** 2))


def pcf_thomas(r, parent_intensity=1.0 / (20.0 * math.pi), sigma=2.0, dim=2):
    r = np.asarray(r, dtype=float)
    amp = 1.0 / (parent_intensity * (4.0 * math.pi * sigma * sigma) ** (dim / 2.0))
    return 1.0 + amp * np.exp(-r * r / (4.0 * sigma * sigma))


def thinned_structure_factor(s, retain_prob):
    """Structure factor of a p-thinned process given the parent's S values."""
    return retain_prob * np.asarray(s, dtype=float) + (1.0 - retain_prob)


def exact_curves(process, params=None):
    """(S, g) callables for a named benchmark process.

    Parameters default to the benchmark configuration: Ginibre at
    intensity 1/pi, Thomas with parent_intensity 1/(20 pi),
    offspring_mean 20, sigma 2, thinned Ginibre with retain_prob p.
    """
    params = dict(params or {})
    if process == "poisson":
        return structure_factor_poisson, pcf_poisson
    if process == "ginibre":
        return structure_factor_ginibre, pcf_ginibre
    if process == "thomas":
        mu = float(params.get("offspring_mean", 20.0))
        sigma = float(params.get("sigma", 2.0))
        rho_p = float(params.get("parent_intensity", 1.0 / (20.0 * math.pi)))
        dim = int(params.get("dim", 2))
        return (lambda k: structure_factor_thomas(k, mu, sigma),
                lambda r: pcf_thomas(r, rho_p, sigma, dim))
    if process == "thinned_ginibre":
        p = float(params.get("retain_prob", 0.5))
        return (lambda k: thinned_structure_factor(structure_factor_ginibre(k), p),
                pcf_ginibre)
    raise ValidationError(f"exact_curves: unknown process {process!r}")


@dataclass(frozen=True)
class ProcessSampler:
    """Picklable pattern source: maps (window, seed) to a pattern.

    Ginibre draws are native to balls; for a box window the sampler
    draws on the circumscribed ball and restricts.
    """

    process: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.process not in ("poisson", "thomas", "ginibre", "thinned_ginibre"):
            raise ValidationError(f"ProcessSampler: unknown process {self.process!r}")
        object.__setattr__(self, "params", dict(self.params))

    def intensity(self):
        p = self.params
        if self.process == "poisson":
            return float(p.get("intensity", 1.0 / math.pi))
        if self.process == "thomas":
            return (float(p.get("parent_intensity", 1.0 / (20.0 * math.pi)))
                    * float(p.get("offspring_mean", 20.0)))
        if self.process == "ginibre":
            return 1.0 / math.pi
        return float(p.get("retain_prob", 0.5)) / math.pi

    def _ginibre_on(self, window, rng, n_max):
        if isinstance(window, Ball):
            if window.dim != 2:
                raise ValidationError("ProcessSampler: Ginibre is planar")
            return sample_ginibre(window.radius, rng, n_max=n_max)
        half_diag = 0.5 * math.sqrt(sum(l * l for l in window.lengths))
        full = sample_ginibre(half_diag, rng, n_max=n_max)
        return restrict_to_window(full, window)

    def __call__(self, window, seed=None):
        p = self.params
        rng = as_rng(seed)
        if self.process == "poisson":
            return sample_poisson(window, float(p.get("intensity", 1.0 / math.pi)), rng)
        if self.process == "thomas":
            return sample_thomas(window,
                                 float(p.get("parent_intensity", 1.0 / (20.0 * math.pi))),
                                 float(p.get("offspring_mean", 20.0)),
                                 float(p.get("sigma", 2.0)), rng)
        n_max = int(p.get("n_max", GINIBRE_N_MAX))
        if self.process == "ginibre":
            return self._ginibre_on(window, rng, n_max)
        pattern = self._ginibre_on(window, rng, n_max)
        return thin(pattern, float(p.get("retain_prob", 0.5)), rng)


# -- pattern file I/O --------------------------------------------------------

def _window_to_kv(window):
    if isinstance(window, Box):
        return {"window.type": "box", "window.lengths": list(window.lengths),
                "window.dim": window.dim}
    if isinstance(window, Ball):
        return {"window.type": "ball", "window.radius": window.radius,
                "window.dim": window.dim}
    raise ValidationError("unsupported window type")


def _window_from_kv(meta, path):
    kind = meta.get("window.type")
    if kind == "box":
        raw = meta.get("window.lengths")
        if raw is None:
            raise ValidationError(f"{path}: missing window.lengths")
        try:
            return Box(tuple(float(v) for v in str(raw).split(",")))
        except ValueError:
            raise ValidationError(f"{path}: malformed window.lengths {raw!r}") from None
    if kind == "ball":
        if "window.radius" not in meta:
            raise ValidationError(f"{path}: missing window.radius")
        return Ball(float(meta["window.radius"]), int(meta.get("window.dim", 2)))
    raise ValidationError(f"{path}: window.type must be 'box' or 'ball', got {kind!r}")


def save_pattern(pattern, path, seed=None):
    """Write points as CSV (header x1..xd) plus a key-value sidecar at path + '.meta'."""
    path = str(path)
    d = pattern.dim
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{j + 1}" for j in range(d)])
        for row in pattern.points:
            writer.writerow([repr(float(v)) for v in row])
    meta = _window_to_kv(pattern.window)
    if pattern.intensity is not None:
        meta["intensity"] = pattern.intensity
    if seed is not None:
        meta["seed"] = int(seed)
    write_kv(path + ".meta", meta)


def load_pattern(path):
    """Read a pattern saved by save_pattern, validating every row."""
    path = str(path)
    if not os.path.exists(path + ".meta"):
        raise ValidationError(f"{path}: missing sidecar {path}.meta")
    meta = read_kv(path + ".meta")
    window = _window_from_kv(meta, path + ".meta")
    d = window.dim
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != [f"x{j + 1}" for j in range(d)]:
            raise ValidationError(f"{path}: expected header x1,...,x{d}, got {header}")
        for idx, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d:
                raise ValidationError(f"{path}: row {idx}: expected {d} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValidationError(f"{path}: row {idx}: non-numeric coordinate") from None
    pts = np.asarray(rows, dtype=float).reshape(-1, d)
    inside = window.contains(pts)
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise ValidationError(f"{path}: row {bad + 2}: point outside the declared window")
    intensity = float(meta["intensity"]) if "intensity" in meta else None
    pattern_meta = {"path": path}
    if "seed" in meta:
        pattern_meta["seed"] = int(meta["seed"])
    return PointPattern(pts, window, intensity=intensity, meta=pattern_meta)

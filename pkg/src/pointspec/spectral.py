"""Structure-factor estimators for stationary (not necessarily
isotropic) point processes, plus wavenumber binning.

All estimators reduce to weighted complex exponential sums over the
pattern.  On the allowed wavevector grid the window bias vanishes
exactly and the plain scattering intensity is unbiased as the window
grows; off the grid, tapering and debiasing control the bias.
"""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .core import WaveGrid, estimate_intensity
from .errors import ValidationError

DEFAULT_BIN_COUNT = 50


@dataclass(frozen=True, eq=False)
class BinnedProfile:
    """Radial summary: per-bin center, mean, std-of-mean, count."""

    k_bin: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    count: np.ndarray

    def __len__(self):
        return len(self.k_bin)


@dataclass(frozen=True, eq=False)
class SpectralEstimate:
    """Estimated structure-factor values on a wavevector grid.

    Values may be negative for the undirectly debiased variant.  meta
    records intensity provenance and estimator options.
    """

    wavenumbers: np.ndarray
    values: np.ndarray
    wavevectors: np.ndarray = None
    bins: BinnedProfile = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        k = np.asarray(self.wavenumbers, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or v.shape != k.shape:
            raise ValidationError("SpectralEstimate: wavenumbers and values must be congruent 1-d arrays")
        object.__setattr__(self, "wavenumbers", k)
        object.__setattr__(self, "values", v)
        if self.wavevectors is not None:
            vec = np.asarray(self.wavevectors, dtype=float)
            if vec.ndim != 2 or vec.shape[0] != k.shape[0]:
                raise ValidationError("SpectralEstimate: wavevectors must be (Q, d)")
            object.__setattr__(self, "wavevectors", vec)

    def __len__(self):
        return len(self.wavenumbers)


def _resolve_rho(pattern):
    rho = estimate_intensity(pattern)
    source = "declared" if pattern.intensity is not None else "estimated"
    return rho, source


def fourier_sum(points, wavevectors, weights=None):
    """sum_j w_j exp(-i <k, x_j>) for every row k, chunked over k.

    numpy's pairwise summation keeps the cancellation error near small
    wavenumbers at the round-off level for N up to 1e5.
    """
    pts = np.asarray(points, dtype=float)
    ks = np.atleast_2d(np.asarray(wavevectors, dtype=float))
    if pts.size == 0:
        return np.zeros(len(ks), dtype=complex)
    out = np.empty(len(ks), dtype=complex)
    chunk = max(1, (1 << 21) // max(1, len(pts)))
    for start in range(0, len(ks), chunk):
        phases = ks[start:start + chunk] @ pts.T
        terms = np.exp(-1j * phases)
        if weights is not None:
            terms = terms * weights
        out[start:start + chunk] = terms.sum(axis=1)
    return out


def _grid_arrays(grid):
    if isinstance(grid, WaveGrid):
        if grid.wavevectors is None:
            raise ValidationError("this estimator needs explicit wavevectors, not bare wavenumbers")
        return grid.wavevectors, grid.wavenumbers
    vec = np.atleast_2d(np.asarray(grid, dtype=float))
    return vec, np.linalg.norm(vec, axis=1)


def scattering_intensity(pattern, grid, self_normalized=False):
    """|sum_j exp(-i<k, x_j>)|^2 / (rho |W|), or / N when self-normalized.

    The two normalizations differ by the exact factor rho |W| / N.
    """
    if len(pattern) == 0:
        raise ValidationError("scattering_intensity: empty pattern")
    vecs, ks = _grid_arrays(grid)
    if vecs.shape[1] != pattern.dim:
        raise ValidationError("scattering_intensity: wavevector dimension mismatch")
    rho, source = _resolve_rho(pattern)
    raw = np.abs(fourier_sum(pattern.points, vecs)) ** 2
    denom = len(pattern) if self_normalized else rho * pattern.window.volume
    meta = {"estimator": "scattering_intensity", "self_normalized": bool(self_normalized),
            "rho": rho, "rho_source": source}
    return SpectralEstimate(ks, raw / denom, wavevectors=vecs, meta=meta)


def tapered(pattern, grid, taper, debias="none"):
    """Tapered estimator with optional debiasing.

    none:     (1/rho) |sum_j t(x_j) e^{-i<k,x_j>}|^2
    undirect: subtract rho |Ft(k)|^2 afterwards (may go negative)
    direct:   (1/rho) |sum_j t(x_j) e^{-i<k,x_j>} - rho Ft(k)|^2 (>= 0)
    """
    if debias not in ("none", "direct", "undirect"):
        raise ValidationError(f"tapered: debias must be none|direct|undirect, got {debias!r}")
    vecs, ks = _grid_arrays(grid)
    if vecs.shape[1] != pattern.dim:
        raise ValidationError("tapered: wavevector dimension mismatch")
    if len(pattern) == 0 and pattern.intensity is None:
        raise ValidationError("tapered: empty pattern with no declared intensity")
    rho, source = _resolve_rho(pattern)
    weights = taper.eval(pattern.points, pattern.window) if len(pattern) else None
    total = fourier_sum(pattern.points, vecs, weights)
    if debias == "direct":
        total = total - rho * taper.ft(vecs, pattern.window)
        values = np.abs(total) ** 2 / rho
    elif debias == "undirect":
        values = np.abs(total) ** 2 / rho - rho * np.abs(taper.ft(vecs, pattern.window)) ** 2
    else:
        values = np.abs(total) ** 2 / rho
    meta = {"estimator": "tapered", "taper": taper.descriptor, "debias": debias,
            "rho": rho, "rho_source": source}
    return SpectralEstimate(ks, values, wavevectors=vecs, meta=meta)


def multitaper(pattern, grid, tapers, debias="none"):
    """Arithmetic mean of the tapered estimator over a taper family."""
    tapers = list(tapers)
    if not tapers:
        raise ValidationError("multitaper: need at least one taper")
    parts = [tapered(pattern, grid, t, debias=debias) for t in tapers]
    values = np.mean([p.values for p in parts], axis=0)
    meta = {"estimator": "multitaper", "tapers": [t.descriptor for t in tapers],
            "debias": debias, "rho": parts[0].meta["rho"],
            "rho_source": parts[0].meta["rho_source"]}
    return SpectralEstimate(parts[0].wavenumbers, values,
                            wavevectors=parts[0].wavevectors, meta=meta)


def bin_by_wavenumber(estimate, n_bins=DEFAULT_BIN_COUNT):
    """Linear wavenumber bins over [min k, max k]; empty bins dropped.

    Returns a copy of the estimate with the binned profile attached.
    Per-bin std is the standard deviation of the mean (ddof=1), zero
    for singleton bins.
    """
    n_bins = int(n_bins)
    if n_bins < 1:
        raise ValidationError("bin_by_wavenumber: n_bins must be >= 1")
    k = estimate.wavenumbers
    v = estimate.values
    lo, hi = float(k.min()), float(k.max())
    if hi == lo:
        edges = np.array([lo, hi])
        n_bins = 1
    else:
        edges = np.linspace(lo, hi, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, k, side="right") - 1, 0, n_bins - 1)
    centers, means, stds, counts = [], [], [], []
    for b in range(n_bins):
        sel = idx == b
        n = int(sel.sum())
        if n == 0:
            continue
        vals = v[sel]
        centers.append(0.5 * (edges[b] + edges[b + 1]))
        means.append(vals.mean())
        stds.append(vals.std(ddof=1) / np.sqrt(n) if n > 1 else 0.0)
        counts.append(n)
    bins = BinnedProfile(np.asarray(centers), np.asarray(means),
                         np.asarray(stds), np.asarray(counts, dtype=int))
    return SpectralEstimate(estimate.wavenumbers, estimate.values,
                            wavevectors=estimate.wavevectors, bins=bins,
                            meta=dict(estimate.meta, n_bins=n_bins))


def save_estimate(estimate, path):
    """CSV `k[,k1..kd],s_hat`; binned companion at path + '.bins' when present."""
    path = str(path)
    d = 0 if estimate.wavevectors is None else estimate.wavevectors.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k"] + [f"k{j + 1}" for j in range(d)] + ["s_hat"])
        for i in range(len(estimate)):
            row = [repr(float(estimate.wavenumbers[i]))]
            row += [repr(float(c)) for c in (estimate.wavevectors[i] if d else ())]
            row.append(repr(float(estimate.values[i])))
            writer.writerow(row)
    if estimate.bins is not None:
        with open(path + ".bins", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["k_bin", "mean", "std", "count"])
            for i in range(len(estimate.bins)):
                writer.writerow([repr(float(estimate.bins.k_bin[i])),
                                 repr(float(estimate.bins.mean[i])),
                                 repr(float(estimate.bins.std[i])),
                                 int(estimate.bins.count[i])])


def load_estimate(path):
    path = str(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "k" or header[-1] != "s_hat":
            raise ValidationError(f"{path}: expected header k[,k1..kd],s_hat, got {header}")
        d = len(header) - 2
        ks, vecs, vals = [], [], []
        for idx, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}: row {idx}: expected {len(header)} fields")
            try:
                ks.append(float(row[0]))
                vecs.append([float(c) for c in row[1:1 + d]])
                vals.append(float(row[-1]))
            except ValueError:
                raise ValidationError(f"{path}: row {idx}: non-numeric field") from None
    wavevectors = np.asarray(vecs) if d else None
    bins = _load_bins(path + ".bins") if os.path.exists(path + ".bins") else None
    return SpectralEstimate(np.asarray(ks), np.asarray(vals), wavevectors=wavevectors,
                            bins=bins, meta={"path": path})


def _load_bins(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["k_bin", "mean", "std", "count"]:
            raise ValidationError(f"{path}: expected header k_bin,mean,std,count")
        cols = ([], [], [], [])
        for idx, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError(f"{path}: row {idx}: expected 4 fields")
            try:
                for col, cell in zip(cols[:3], row[:3]):
                    col.append(float(cell))
                cols[3].append(int(row[3]))
            except ValueError:
                raise ValidationError(f"{path}: row {idx}: non-numeric field") from None
    return BinnedProfile(np.asarray(cols[0]), np.asarray(cols[1]),
                         np.asarray(cols[2]), np.asarray(cols[3]))

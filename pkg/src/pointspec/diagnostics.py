"""Hyperuniformity diagnostics and estimator comparison.

Three diagnostics: extrapolation of the estimated structure factor to
k = 0 (H-index), log-log regression of the small-k decay exponent, and
an asymptotically valid multiscale test built on a randomized
telescoping (coupled-sum) debiasing of capped estimates at the
smallest accessible wavenumber of a growing window schedule.  The
comparison harness (integrated MSE + paired t-tests) reproduces the
estimator benchmark tables.
"""

import concurrent.futures
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special, stats

from .core import Ball, Box, min_allowed_wavevector, restrict_to_window, window_contains
from .errors import ValidationError
from .isotropic import bartlett_isotropic
from .spectral import scattering_intensity

EFFECTIVE_HYPERUNIFORMITY_THRESHOLD = 1e-3
OVERFLOW_TOLERANCE = 1e-4


# -- zero-extrapolation diagnostics -----------------------------------------

@dataclass(frozen=True)
class HIndexReport:
    h: float
    s0: float
    k_peak: float  # None when no interior peak exists
    s_peak: float
    fit_k_max: float
    n_fit: int

    @property
    def effectively_hyperuniform(self):
        return self.h < EFFECTIVE_HYPERUNIFORMITY_THRESHOLD


def _profile_arrays(estimate):
    if estimate.bins is not None:
        k, v = estimate.bins.k_bin, estimate.bins.mean
    else:
        k, v = estimate.wavenumbers, estimate.values
    order = np.argsort(k, kind="stable")
    return np.asarray(k)[order], np.asarray(v)[order]


def h_index(estimate, fit_k_max):
    """Extrapolated S at zero over the first dominant peak.

    S(0) is the intercept of the least-squares line through the points
    with k < fit_k_max.  The peak is the smallest k whose value
    exceeds 1 and strictly exceeds both neighbors; without one the
    denominator is 1.
    """
    if not fit_k_max > 0:
        raise ValidationError("h_index: fit_k_max must be positive")
    k, v = _profile_arrays(estimate)
    sel = k < fit_k_max
    if sel.sum() < 2:
        raise ValidationError("h_index: need at least 2 estimate points below fit_k_max")
    slope, intercept = np.polyfit(k[sel], v[sel], 1)
    k_peak, s_peak = None, 1.0
    for i in range(1, len(k) - 1):
        if v[i] > 1.0 and v[i] > v[i - 1] and v[i] > v[i + 1]:
            k_peak, s_peak = float(k[i]), float(v[i])
            break
    return HIndexReport(h=float(intercept) / s_peak, s0=float(intercept),
                        k_peak=k_peak, s_peak=s_peak,
                        fit_k_max=float(fit_k_max), n_fit=int(sel.sum()))


def fit_alpha(estimate, fit_k_max):
    """Decay exponent: slope of log S-hat against log k for k < fit_k_max."""
    if not fit_k_max > 0:
        raise ValidationError("fit_alpha: fit_k_max must be positive")
    k, v = _profile_arrays(estimate)
    sel = k < fit_k_max
    if sel.sum() < 2:
        raise ValidationError("fit_alpha: need at least 2 estimate points below fit_k_max")
    k, v = k[sel], v[sel]
    bad = v <= 0
    if np.any(bad):
        offending = ", ".join(f"{kk:.6g}" for kk in k[bad][:20])
        raise ValidationError(
            f"fit_alpha: nonpositive estimate values in the fit range at k = {offending}")
    slope = np.polyfit(np.log(k), np.log(v), 1)[0]
    return float(slope)


# -- coupled-sum estimator and the multiscale test ---------------------------

@dataclass(frozen=True)
class CoupledSumDraw:
    """One randomized-truncation draw: scale count M, capped estimates, Z."""

    m: int
    y: tuple
    z: float


@dataclass(frozen=True)
class TestReport:
    z_bar: float
    sigma_bar: float
    ci_lo: float
    ci_hi: float
    reject: bool
    z: float
    a: int
    lam: float = None
    estimator: str = None
    schedule: str = None

    def to_kv(self):
        out = {"z_bar": self.z_bar, "sigma_bar": self.sigma_bar,
               "ci_lo": self.ci_lo, "ci_hi": self.ci_hi,
               "reject": bool(self.reject), "A": self.a, "z": self.z}
        if self.lam is not None:
            out["lambda"] = self.lam
        if self.estimator is not None:
            out["estimator"] = self.estimator
        if self.schedule is not None:
            out["schedule"] = self.schedule
        return out


def truncation_weights(n, lam):
    """P(M >= j) for j = 1..n with M = 1 + Poisson(lam).

    Identical under the truncated and untruncated laws for j up to the
    truncation point.
    """
    j = np.arange(1, n + 1)
    out = np.ones(n)
    out[1:] = stats.poisson.sf(j[1:] - 2, lam)
    return out


def size_lambda(n_scales, overflow=OVERFLOW_TOLERANCE):
    """Largest Poisson mean whose overflow probability stays below the bound.

    Overflow means M = 1 + Poisson(lam) exceeding the schedule length.
    """
    if n_scales < 2:
        raise ValidationError("size_lambda: need at least 2 scales")
    def excess(lam):
        return stats.poisson.sf(n_scales - 1, lam) - overflow
    lo, hi = 1e-12, float(n_scales)
    if excess(hi) < 0:
        return hi
    lam = optimize.brentq(excess, lo, hi, xtol=1e-10)
    while stats.poisson.sf(n_scales - 1, lam) >= overflow:
        lam = np.nextafter(lam, 0.0)
    return float(lam)


def _min_k_value(pattern, estimator):
    window = pattern.window
    if callable(estimator):
        return float(estimator(pattern))
    if estimator in ("si", "si_self"):
        if not isinstance(window, Box):
            raise ValidationError("estimator 'si' needs box windows")
        if len(pattern) == 0:
            return 0.0
        grid = min_allowed_wavevector(window)
        est = scattering_intensity(pattern, grid, self_normalized=estimator == "si_self")
        return float(est.values[0])
    if estimator in ("bartlett", "bartlett_self"):
        if not isinstance(window, Ball):
            raise ValidationError("estimator 'bartlett' needs ball windows")
        grid = min_allowed_wavevector(window)
        est = bartlett_isotropic(pattern, grid.wavenumbers,
                                 self_normalized=estimator == "bartlett_self")
        return float(est.values[0])
    raise ValidationError(f"unknown estimator {estimator!r}")


def _validate_schedule(windows):
    if len(windows) < 1:
        raise ValidationError("window schedule is empty")
    for smaller, larger in zip(windows, windows[1:]):
        if not (window_contains(larger, smaller) and larger.volume > smaller.volume):
            raise ValidationError("window schedule must be strictly increasing and nested")


def coupled_sum_draw(sampler, estimator, windows, lam, seed=None, truncated=True):
    """One coupled-sum draw from a single pattern realization.

    Draws M = 1 + Poisson(lam) (truncated to the schedule length by
    default), samples ONE pattern on the largest needed window, and
    restricts it progressively to the nested sub-windows.  Y_j is the
    estimate at the smallest accessible wavenumber of window j, capped
    into [0, 1]; Z telescopes the increments with inverse tail
    weights, so E[Z] equals E[Y] at the truncation point.
    """
    from .samplers import as_rng
    _validate_schedule(windows)
    if not lam > 0:
        raise ValidationError("coupled_sum_draw: lam must be positive")
    n = len(windows)
    overflow = stats.poisson.sf(n - 1, lam)
    if overflow >= OVERFLOW_TOLERANCE:
        raise ValidationError(
            f"coupled_sum_draw: overflow probability {overflow:.2e} exceeds "
            f"{OVERFLOW_TOLERANCE}; shrink lam or extend the schedule")
    rng = as_rng(seed)
    m = 1 + int(rng.poisson(lam))
    if truncated:
        m = min(m, n)
    elif m > n:
        raise ValidationError("coupled_sum_draw: untruncated M exceeded the schedule")
    pattern = sampler(windows[m - 1], rng)
    weights = truncation_weights(m, lam)
    ys = np.empty(m)
    for j in range(m):
        restricted = restrict_to_window(pattern, windows[j])
        ys[j] = min(1.0, max(0.0, _min_k_value(restricted, estimator)))
    increments = np.diff(ys, prepend=0.0)
    z = float(np.sum(increments / weights))
    return CoupledSumDraw(m=m, y=tuple(ys), z=z)


def multiscale_test(draws, z=3.0, lam=None, estimator=None, schedule=None):
    """Asymptotic confidence interval for E[Z]; reject when 0 lies outside."""
    zs = np.asarray([d.z for d in draws], dtype=float)
    a = len(zs)
    if a < 2:
        raise ValidationError("multiscale_test: need at least 2 draws")
    z_bar = float(zs.mean())
    sigma_bar = float(zs.std(ddof=1))
    half = z * sigma_bar / math.sqrt(a)
    ci_lo, ci_hi = z_bar - half, z_bar + half
    reject = ci_lo > 0.0 or ci_hi < 0.0
    return TestReport(z_bar=z_bar, sigma_bar=sigma_bar, ci_lo=ci_lo, ci_hi=ci_hi,
                      reject=reject, z=float(z), a=a, lam=lam, estimator=estimator,
                      schedule=schedule)


def _draw_job(args):
    sampler, estimator, windows, lam, child_seed, truncated = args
    return coupled_sum_draw(sampler, estimator, windows, lam,
                            seed=np.random.default_rng(child_seed), truncated=truncated)


def run_multiscale_test(sampler, estimator, windows, lam, a, seed=None, z=3.0,
                        truncated=True, jobs=None):
    """A independent coupled-sum draws (parallel) reduced to a TestReport."""
    a = int(a)
    if a < 2:
        raise ValidationError("run_multiscale_test: a must be >= 2")
    children = np.random.SeedSequence(seed).spawn(a)
    args = [(sampler, estimator, windows, lam, child, truncated) for child in children]
    jobs = os.cpu_count() if jobs is None else int(jobs)
    jobs = max(1, min(jobs, a))
    if jobs == 1:
        draws = [_draw_job(arg) for arg in args]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            draws = list(pool.map(_draw_job, args, chunksize=1))
    schedule = f"{type(windows[0]).__name__.lower()} x{len(windows)}"
    name = estimator if isinstance(estimator, str) else getattr(estimator, "__name__", "custom")
    return multiscale_test(draws, z=z, lam=lam, estimator=name, schedule=schedule)


# -- estimator comparison harness --------------------------------------------

def poisson_si_second_moment(rho, window):
    """Exact second moment of the scattering intensity at the minimal
    restricted wavevector under a Poisson process: 1/(rho |W|) + 2."""
    if not isinstance(window, Box):
        raise ValidationError("poisson_si_second_moment: box windows only")
    if not rho > 0:
        raise ValidationError("poisson_si_second_moment: rho must be positive")
    return 1.0 / (rho * window.volume) + 2.0


def _curve(estimate):
    if estimate.bins is not None:
        return np.asarray(estimate.bins.k_bin), np.asarray(estimate.bins.mean)
    return np.asarray(estimate.wavenumbers), np.asarray(estimate.values)


def imse(estimates, exact, k_lo, k_hi):
    """Per-seed trapezoid integral of (S-hat - S)^2 over [k_lo, k_hi].

    All estimates must share one wavenumber subdivision.  Returns the
    per-seed values, their mean with a 3-standard-error confidence
    interval, and the integrated variance around the pointwise
    seed-mean curve.
    """
    if len(estimates) < 1:
        raise ValidationError("imse: need at least one estimate")
    k0, _ = _curve(estimates[0])
    curves = []
    for e in estimates:
        k, v = _curve(e)
        if not np.array_equal(k, k0):
            raise ValidationError("imse: estimates use mismatched wavenumber grids")
        curves.append(v)
    sel = (k0 >= k_lo) & (k0 <= k_hi)
    if sel.sum() < 2:
        raise ValidationError("imse: fewer than 2 grid points in the integration range")
    k = k0[sel]
    if np.any(np.diff(k) <= 0):
        raise ValidationError("imse: wavenumber grid must be strictly increasing; bin first")
    curves = np.asarray(curves)[:, sel]
    target = exact(k)
    per_seed = np.trapezoid((curves - target) ** 2, k, axis=1)
    mean = float(per_seed.mean())
    se = float(per_seed.std(ddof=1) / math.sqrt(len(per_seed))) if len(per_seed) > 1 else 0.0
    pointwise_var = curves.var(axis=0, ddof=1) if len(curves) > 1 else np.zeros_like(k)
    ivar = float(np.trapezoid(pointwise_var, k))
    return {"per_seed": per_seed, "mean": mean,
            "ci_lo": mean - 3.0 * se, "ci_hi": mean + 3.0 * se, "ivar": ivar}


def paired_t_test(a, b, one_sided=True):
    """Paired Student t-test of mean(a - b) against zero.

    One-sided p is the lower tail (alternative: a below b).  Zero
    variance with zero mean difference returns the p = 0.5 convention.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValidationError("paired_t_test: need two equal-length vectors of length >= 2")
    diff = a - b
    n = len(diff)
    sd = diff.std(ddof=1)
    mean = diff.mean()
    if sd == 0.0:
        if mean == 0.0:
            return {"t": 0.0, "p": 0.5, "df": n - 1}
        t = math.inf if mean > 0 else -math.inf
        lower = 1.0 if mean > 0 else 0.0
    else:
        t = mean / (sd / math.sqrt(n))
        lower = float(special.stdtr(n - 1, t))
    p = lower if one_sided else 2.0 * min(lower, 1.0 - lower)
    return {"t": float(t), "p": float(p), "df": n - 1}

"""Tapers on box windows with exact Fourier transforms.

A taper is a square-integrable weight supported on the observation
window, normalized so the squared weight integrates to 1.  The
indicator taper reproduces the plain scattering intensity; the
sinusoidal family provides pairwise-orthogonal tapers whose transforms
are known in closed form, which is what the debiased estimators need.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import Box
from .errors import ValidationError

# i^(p+1) for integer p; exact, unlike complex exponentiation
_I_POW = (1.0 + 0.0j, 0.0 + 1.0j, -1.0 + 0.0j, 0.0 - 1.0j)


def _require_box(window):
    if not isinstance(window, Box):
        raise ValidationError("tapers support box windows only")


def _sinc_half(c, length):
    # sin(c L / 2) / c with the removable singularity filled by L/2
    c = np.asarray(c, dtype=float)
    small = np.abs(c) < 1e-300
    safe = np.where(small, 1.0, c)
    return np.where(small, 0.5 * length, np.sin(0.5 * safe * length) / safe)


def _sine_ft_1d(k, p, length):
    """Transform of sqrt(2/L) sin(pi p (x + L/2) / L) on [-L/2, L/2].

    Exact closed form (convention integral of t(x) e^{-ikx} dx):
    -i^{p+1} sqrt(2/L) [ sin((k-a)L/2)/(k-a) - (-1)^p sin((k+a)L/2)/(k+a) ]
    with a = pi p / L; each sinc takes its limit L/2 at the
    removable singularity k = +-a.
    """
    a = math.pi * p / length
    s1 = _sinc_half(np.asarray(k, dtype=float) - a, length)
    s2 = _sinc_half(np.asarray(k, dtype=float) + a, length)
    sign = -1.0 if p % 2 else 1.0
    return -_I_POW[(p + 1) % 4] * math.sqrt(2.0 / length) * (s1 - sign * s2)


@dataclass(frozen=True)
class IndicatorTaper:
    """t0 = 1_W / sqrt(|W|); its transform vanishes on the allowed grid."""

    @property
    def descriptor(self):
        return "indicator"

    def eval(self, x, window):
        _require_box(window)
        x = np.asarray(x, dtype=float)
        inside = window.contains(x)
        return np.where(inside, 1.0 / math.sqrt(window.volume), 0.0)

    def ft(self, k, window):
        from .specfun import ft_indicator_box
        _require_box(window)
        value = ft_indicator_box(k, window.lengths) / math.sqrt(window.volume)
        return np.asarray(value, dtype=complex)


@dataclass(frozen=True)
class SineTaper:
    """Sinusoidal taper with integer index vector p (every p_j >= 1)."""

    index: tuple

    def __post_init__(self):
        idx = tuple(int(p) for p in np.atleast_1d(self.index))
        if len(idx) == 0 or any(p < 1 for p in idx):
            raise ValidationError("SineTaper: every index entry must be a positive integer")
        object.__setattr__(self, "index", idx)

    @property
    def descriptor(self):
        return "sine" + "".join(str(p) for p in self.index)

    def _check_dim(self, window):
        _require_box(window)
        if window.dim != len(self.index):
            raise ValidationError(
                f"SineTaper: index has {len(self.index)} entries, window is {window.dim}-d")

    def eval(self, x, window):
        self._check_dim(window)
        x = np.asarray(x, dtype=float)
        lengths = np.asarray(window.lengths)
        phases = math.pi * np.asarray(self.index) * (x + 0.5 * lengths) / lengths
        value = np.prod(np.sqrt(2.0 / lengths) * np.sin(phases), axis=-1)
        return np.where(window.contains(x), value, 0.0)

    def ft(self, k, window):
        self._check_dim(window)
        k = np.asarray(k, dtype=float)
        if k.shape[-1] != window.dim:
            raise ValidationError("SineTaper.ft: wavevector dimension mismatch")
        out = np.ones(k.shape[:-1], dtype=complex)
        for j, (p, length) in enumerate(zip(self.index, window.lengths)):
            out = out * _sine_ft_1d(k[..., j], p, length)
        return out


def indicator_taper():
    return IndicatorTaper()


def sine_taper(index):
    return SineTaper(tuple(np.atleast_1d(index)))


def sine_taper_family(count, dim):
    """First ``count`` sine tapers, row-major over {1..s}^dim.

    s is the smallest side with s^dim >= count, so count=4 in 2-d
    enumerates (1,1), (1,2), (2,1), (2,2).
    """
    count = int(count)
    if count < 1:
        raise ValidationError("sine_taper_family: count must be >= 1")
    if int(dim) < 1:
        raise ValidationError("sine_taper_family: dim must be >= 1")
    side = 1
    while side ** dim < count:
        side += 1
    import itertools
    indices = itertools.product(range(1, side + 1), repeat=int(dim))
    return [SineTaper(idx) for idx, _ in zip(indices, range(count))]

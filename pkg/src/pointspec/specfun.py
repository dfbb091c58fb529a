"""Bessel functions, their zeros, and window Fourier kernels.

Bessel evaluation uses the classical two-branch scheme: the ascending
power series below ``x = |nu| + 12`` and Hankel's large-argument
expansion above.  With at most 40 series terms both branches stay
within ~1e-10 relative for the moderate orders (|nu| <= 6) needed
here; large orders are out of scope.  Zeros come from McMahon's
asymptotic guess polished by a safeguarded Newton iteration and are
cached per order.
"""

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_SERIES_TERMS = 40
_SWITCH_OFFSET = 12.0
_EULER_GAMMA = 0.5772156649015329


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def _j_series(nu, x):
    """Ascending series sum_m (-1)^m (x/2)^(nu+2m) / (m! Gamma(nu+m+1)).

    Valid for any real order that is not a negative integer.  The term
    recursion keeps the signs of Gamma at negative arguments correct.
    """
    xh = 0.5 * x
    q = xh * xh
    gam = math.gamma(nu + 1.0)
    at_zero = x == 0.0
    lead = np.power(np.where(at_zero, 1.0, xh), nu) / gam
    term = lead.copy()
    total = lead.copy()
    for m in range(1, _SERIES_TERMS + 1):
        term = term * (-q) / (m * (nu + m))
        total = total + term
    return np.where(at_zero, _lead_at_zero(nu), total)


def _lead_at_zero(nu):
    if nu == 0.0:
        return 1.0
    return 0.0 if nu > 0 else np.inf


def _jy_asymptotic(nu, x, terms=30):
    """Hankel's expansion for J and Y together (NIST 10.17).

    Accurate to ~1e-12 for x >= |nu| + 12 when |nu| <= 6; the term
    magnitudes decrease throughout the 30 terms used on that domain.
    Past x = 40 the tail dies so fast that 12 terms already truncate
    below 1e-14, so callers may lower ``terms`` there.
    """
    mu = 4.0 * nu * nu
    ex = 8.0 * x
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, terms + 1):
        term = term * (mu - (2.0 * k - 1.0) ** 2) / (k * ex)
        sign = 1.0 if k % 4 in (0, 1) else -1.0
        if k % 2 == 1:
            q = q + sign * term
        else:
            p = p + sign * term
    omega = x - (0.5 * nu + 0.25) * np.pi
    amp = np.sqrt(2.0 / (np.pi * x))
    c, s = np.cos(omega), np.sin(omega)
    return amp * (p * c - q * s), amp * (p * s + q * c)


def _bessel_j_any(nu, x):
    """J_nu for any real order, x >= 0 array. No public-domain checks."""
    if nu < 0 and float(nu).is_integer():
        val = _bessel_j_any(-nu, x)
        return val if int(-nu) % 2 == 0 else -val
    out = np.empty_like(x)
    small = x < abs(nu) + _SWITCH_OFFSET
    if small.any():
        out[small] = _j_series(nu, x[small])
    mid = ~small & (x < 40.0)
    if mid.any():
        out[mid] = _jy_asymptotic(nu, x[mid])[0]
    far = ~small & ~mid
    if far.any():
        out[far] = _jy_asymptotic(nu, x[far], terms=12)[0]
    return out


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x).

    Parameters
    ----------
    nu : float
        Order, nu >= -1/2.
    x : float or array_like
        Argument(s).  Negative arguments are accepted for integer
        orders only (parity reflection).
    """
    nu = float(nu)
    if nu < -0.5:
        raise ValidationError(f"bessel_j: order {nu} below -1/2")
    xa, scalar = _as_array(x)
    if np.any(xa < 0):
        if not nu.is_integer():
            raise ValidationError("bessel_j: negative argument with non-integer order")
        sign = 1.0 if int(nu) % 2 == 0 else -1.0
        res = np.where(xa < 0, sign, 1.0) * _bessel_j_any(nu, np.abs(xa))
        return _ret(res, scalar)
    return _ret(_bessel_j_any(nu, xa), scalar)


def _y_int_series(n, x):
    """Y_n for integer n >= 0 at small x via the logarithmic series."""
    xh = 0.5 * x
    q = xh * xh
    ln = np.log(xh)
    jn = _j_series(float(n), x)
    # finite part: -(x/2)^{-n}/pi * sum_{m<n} (n-m-1)!/m! q^m
    finite = np.zeros_like(x)
    if n > 0:
        coef = np.power(xh, -float(n)) / np.pi
        acc = np.zeros_like(x)
        qpow = np.ones_like(x)
        for m in range(n):
            acc = acc + math.factorial(n - m - 1) / math.factorial(m) * qpow
            qpow = qpow * q
        finite = -coef * acc
    # tail: -(x/2)^n/pi * sum_m (psi(m+1)+psi(n+m+1)) (-q)^m / (m!(n+m)!)
    psi_a = -_EULER_GAMMA           # psi(1)
    psi_b = -_EULER_GAMMA + sum(1.0 / i for i in range(1, n + 1))  # psi(n+1)
    term = np.power(xh, float(n)) / math.factorial(n)
    tail = (psi_a + psi_b) * term
    for m in range(1, _SERIES_TERMS + 1):
        term = term * (-q) / (m * (n + m))
        psi_a += 1.0 / m
        psi_b += 1.0 / (n + m)
        tail = tail + (psi_a + psi_b) * term
    return finite + (2.0 / np.pi) * ln * jn - tail / np.pi


def _y_half_integer(nu, x):
    """Y for half-integer order via the closed trigonometric forms."""
    amp = np.sqrt(2.0 / (np.pi * x))
    y_prev = amp * np.sin(x)       # Y_{-1/2}
    y_cur = -amp * np.cos(x)       # Y_{+1/2}
    if nu == -0.5:
        return y_prev
    order = 0.5
    while order < nu:
        y_prev, y_cur = y_cur, (2.0 * order / x) * y_cur - y_prev
        order += 1.0
    return y_cur


def _bessel_y_small(nu, x):
    if nu >= 0 and nu.is_integer():
        n = int(nu)
        if n <= 1:
            return _y_int_series(n, x)
        y0 = _y_int_series(0, x)
        y1 = _y_int_series(1, x)
        for k in range(1, n):
            y0, y1 = y1, (2.0 * k / x) * y1 - y0
        return y1
    if (nu * 2.0).is_integer():
        return _y_half_integer(nu, x)
    # reflection formula; degrades near (but off) integer orders
    s, c = math.sin(nu * np.pi), math.cos(nu * np.pi)
    return (_j_series(nu, x) * c - _j_series(-nu, x)) / s


def bessel_y(nu, x):
    """Bessel function of the second kind Y_nu(x), x > 0.

    Integer orders use the logarithmic series plus upward recurrence,
    half-integer orders the closed trigonometric forms, and other real
    orders the reflection formula (small x) or Hankel's expansion.
    Target accuracy is 1e-8 relative away from zeros.
    """
    nu = float(nu)
    if nu < -0.5:
        raise ValidationError(f"bessel_y: order {nu} below -1/2")
    xa, scalar = _as_array(x)
    if np.any(xa <= 0):
        raise ValidationError("bessel_y: argument must be positive")
    out = np.empty_like(xa)
    small = xa < abs(nu) + _SWITCH_OFFSET
    if small.any():
        out[small] = _bessel_y_small(nu, xa[small])
    big = ~small
    if big.any():
        out[big] = _jy_asymptotic(nu, xa[big])[1]
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# zeros

_zero_cache: dict = {}
_zero_lock = threading.Lock()


def _mcmahon_guess(nu, j):
    beta = (j + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    b8 = 8.0 * beta
    return beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 ** 3)


def _dj(nu, x):
    # J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x); avoids orders below -1/2
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


def _polish_zero(nu, guess, lo, hi):
    f_lo = bessel_j(nu, lo)
    f_hi = bessel_j(nu, hi)
    widen = 0
    while f_lo * f_hi > 0 and widen < 8:
        lo = max(lo - 0.25 * math.pi, 1e-8)
        hi = hi + 0.25 * math.pi
        f_lo = bessel_j(nu, lo)
        f_hi = bessel_j(nu, hi)
        widen += 1
    if f_lo * f_hi > 0:
        raise ValidationError(f"bessel_j_zeros: no sign change near {guess} for order {nu}")
    x = min(max(guess, lo), hi)
    for _ in range(80):
        f = bessel_j(nu, x)
        if f == 0.0:
            return x
        if f * f_lo < 0:
            hi = x
        else:
            lo, f_lo = x, f
        d = _dj(nu, x)
        step = f / d if d != 0 else hi - lo
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < 1e-14 * max(1.0, x):
            return x_new
        x = x_new
    return x


def _compute_zeros(nu, n):
    # one Newton sweep over the whole table; McMahon guesses are within
    # a few 1e-3 past the first zeros, so steps stay tiny and clamped
    js = np.arange(1, n + 1, dtype=float)
    beta = (js + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    b8 = 8.0 * beta
    x = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 ** 3)
    for _ in range(40):
        f = _bessel_j_any(nu, x)
        d = (nu / x) * f - _bessel_j_any(nu + 1.0, x)
        step = np.where(d != 0.0, f / np.where(d != 0.0, d, 1.0), 0.0)
        step = np.clip(step, -1.0, 1.0)
        x = x - step
        if np.max(np.abs(step)) < 1e-14 * max(1.0, float(x[-1])):
            break
    zeros = x
    # polish any straggler the sweep left misconverged or out of order
    ok = np.abs(_bessel_j_any(nu, zeros)) < 1e-12
    ok &= np.concatenate(([zeros[0] > 0], np.diff(zeros) > 0))
    prev = 0.0
    for j in range(1, n + 1):
        if not ok[j - 1] or zeros[j - 1] <= prev:
            guess = _mcmahon_guess(nu, j)
            half = 0.5 * math.pi
            lo = max(guess - half, prev + 1e-10, 1e-8)
            hi = guess + half
            zeros[j - 1] = _polish_zero(nu, guess, lo, hi)
        if zeros[j - 1] <= prev:
            raise ValidationError(f"bessel_j_zeros: ordering failure at zero {j} for order {nu}")
        prev = zeros[j - 1]
    return zeros


def bessel_j_zeros(nu, n):
    """First ``n`` positive zeros of J_nu, strictly increasing.

    Tables are cached per order and grow monotonically; insertion is
    serialized by a lock so concurrent readers are safe.
    """
    nu = float(nu)
    if nu < -0.5:
        raise ValidationError(f"bessel_j_zeros: order {nu} below -1/2")
    n = int(n)
    if n < 1:
        raise ValidationError("bessel_j_zeros: need n >= 1")
    with _zero_lock:
        table = _zero_cache.get(nu)
        if table is None or len(table) < n:
            table = _compute_zeros(nu, n)
            _zero_cache[nu] = table
        return table[:n].copy()


# ---------------------------------------------------------------------------
# window Fourier kernels

def ft_indicator_box(k, lengths):
    """Fourier transform of a centered box indicator.

    prod_j sin(k_j L_j / 2) / (k_j / 2), with the k_j = 0 limit L_j.
    ``k`` has shape (..., d).
    """
    ka = np.asarray(k, dtype=float)
    L = np.asarray(lengths, dtype=float)
    if ka.shape[-1] != L.shape[0]:
        raise ValidationError("ft_indicator_box: dimension mismatch")
    half = 0.5 * ka
    with np.errstate(divide="ignore", invalid="ignore"):
        factors = np.where(ka == 0.0, L, np.sin(half * L) / np.where(half == 0.0, 1.0, half))
    return np.prod(factors, axis=-1)


def ft_alpha0_ball(k, radius, dim):
    """Radial transform of the scaled ball self-intersection volume.

    2^d pi^{d/2} Gamma(1 + d/2) J_{d/2}(kR)^2 / k^d for k > 0.  The
    k -> 0 limit equals the ball volume but is out of domain here.
    """
    ka, scalar = _as_array(k)
    if np.any(ka <= 0.0):
        raise ValidationError("ft_alpha0_ball: wavenumbers must be positive")
    if radius <= 0:
        raise ValidationError("ft_alpha0_ball: radius must be positive")
    d = int(dim)
    const = 2.0 ** d * np.pi ** (d / 2.0) * math.gamma(1.0 + d / 2.0)
    val = const * bessel_j(d / 2.0, ka * radius) ** 2 / ka ** d
    return _ret(val, scalar)

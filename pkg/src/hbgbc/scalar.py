"""Scalar building blocks for Gaussian channel rate calculations.

Provides:
    cap(x)         Gaussian capacity in bits per channel use
    disp_shell(x)  dispersion of equal-power (spherical) codebooks
    disp_iid(x)    dispersion of i.i.d. Gaussian codebooks
    q(x)           Gaussian tail probability
    q_inv(p)       inverse of q

All rates are in bits, so every formula carries the log2(e) conversion
factor at full double precision.  cap, disp_shell, disp_iid and q accept
numpy arrays as well as scalars.
"""

import numpy as np
from scipy.special import erfc

LOG2E = float(np.log2(np.e))

_SQRT2 = float(np.sqrt(2.0))
_INV_SQRT_2PI = float(1.0 / np.sqrt(2.0 * np.pi))


def _checked_snr(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("snr must be finite")
    if np.any(x < 0.0):
        raise ValueError("snr must be >= 0")
    return x


def cap(x):
    """Gaussian capacity C(x) = log2(1 + x) / 2 in bits per channel use."""
    x = _checked_snr(x)
    return 0.5 * np.log2(1.0 + x)


def disp_shell(x):
    """Dispersion of codebooks drawn on the power shell, in bits^2.

    Vanishes at x = 0 and saturates at log2(e)^2 / 2 for large x.  Never
    exceeds disp_iid(x).
    """
    x = _checked_snr(x)
    return 0.5 * LOG2E**2 * x * (x + 2.0) / (x + 1.0) ** 2


def disp_iid(x):
    """Dispersion of i.i.d. Gaussian codebooks, in bits^2."""
    x = _checked_snr(x)
    return LOG2E**2 * x / (x + 1.0)


def q(x):
    """Gaussian tail probability Q(x) = erfc(x / sqrt(2)) / 2."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("q needs a finite argument")
    return 0.5 * erfc(x / _SQRT2)


def _phi(x):
    # standard normal density
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def q_inv(p: float) -> float:
    """Inverse Gaussian tail function.

    Solves q(x) = p with a bracketed Newton iteration on log q, which
    stays well conditioned for p all the way down to the smallest
    positive doubles.  The iteration stops once q(x) matches p to 1e-12
    relative (or the bracket is exhausted at machine precision).

    Args:
        p: tail probability, 0 < p < 1.

    Returns:
        The x with q(x) = p.  q_inv(0.5) = 0, and probabilities above
        one half give the mirrored negative root.
    """
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0):
        raise ValueError(f"tail probability must be in (0, 1), got {p!r}")
    p = float(p)
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -q_inv(1.0 - p)

    # Root is positive.  q(40) underflows to zero, so the bracket always
    # starts with a sign change.
    lo, hi = 0.0, 40.0
    x = min(max(np.sqrt(max(-2.0 * np.log(2.5 * p), 0.1)), 0.1), 39.0)
    lnp = np.log(p)
    for _ in range(200):
        fx = float(q(x))
        if fx == 0.0:
            hi = x
            x = 0.5 * (lo + hi)
            continue
        if abs(fx / p - 1.0) <= 1e-12:
            return float(x)
        if fx > p:
            lo = x
        else:
            hi = x
        # Newton step on log q; fall back to bisection when it leaves
        # the bracket.
        step = (np.log(fx) - lnp) * fx / _phi(x)
        xn = x + step
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 1e-15 * max(1.0, abs(x)):
            return float(xn)
        x = xn
    return float(x)

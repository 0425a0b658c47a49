"""Finite-blocklength time sharing between two operating points.

Splitting a length-n block into sub-blocks of alpha*n and (1-alpha)*n
uses does not mix rates linearly: the second-order debit scales with the
square roots of the sub-block lengths, and sqrt(alpha) + sqrt(1-alpha)
exceeds one strictly inside (0, 1).  The time-sharing curve therefore
sags below the chord between its endpoints, and more so for smaller n.
"""

import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple

from .scalar import cap, disp_iid, q_inv


@dataclass(frozen=True)
class SecondOrderRatePair:
    """Rate pair in coefficient form: user-k rate at blocklength n is
    fo_k - so_k / sqrt(n)."""
    fo1: float
    fo2: float
    so1: float
    so2: float

    def __post_init__(self):
        if self.fo1 < 0.0 or self.fo2 < 0.0:
            raise ValueError("first-order rates must be >= 0")
        if not (math.isfinite(self.so1) and math.isfinite(self.so2)):
            raise ValueError("second-order coefficients must be finite")


def pair_rates(pt: SecondOrderRatePair, n: int) -> Tuple[float, float]:
    """Evaluate a coefficient pair at blocklength n, in bits per use."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rn = math.sqrt(n)
    return (pt.fo1 - pt.so1 / rn, pt.fo2 - pt.so2 / rn)


def solo_rate_pair(user: int, h: float, power: float, eps: float) -> SecondOrderRatePair:
    """Corner point where one user gets the whole channel.

    The busy user's coefficients are the Gaussian-approximation pair for
    a point-to-point link at snr h*power; the idle user sits at zero.
    """
    if not (h > 0.0 and power > 0.0):
        raise ValueError(f"h and power must be > 0, got ({h}, {power})")
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    fo = float(cap(h * power))
    so = math.sqrt(float(disp_iid(h * power))) * q_inv(eps)
    if user == 1:
        return SecondOrderRatePair(fo1=fo, fo2=0.0, so1=so, so2=0.0)
    if user == 2:
        return SecondOrderRatePair(fo1=0.0, fo2=fo, so1=0.0, so2=so)
    raise ValueError(f"user must be 1 or 2, got {user}")


def ts_rates(a: SecondOrderRatePair, b: SecondOrderRatePair, alpha: float,
             n: int) -> Tuple[float, float]:
    """Rates from spending an alpha fraction of the block at point a and
    the rest at point b.

    At alpha in {0, 1} this reproduces pair_rates of the respective
    endpoint exactly (same arithmetic, term by term).
    """
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    sa = math.sqrt(alpha)
    sb = math.sqrt(1.0 - alpha)
    rn = math.sqrt(n)
    r1 = alpha * a.fo1 + (1.0 - alpha) * b.fo1 - (sa * a.so1 + sb * b.so1) / rn
    r2 = alpha * a.fo2 + (1.0 - alpha) * b.fo2 - (sa * a.so2 + sb * b.so2) / rn
    return (r1, r2)


def ts_region(a: SecondOrderRatePair, b: SecondOrderRatePair, n: int,
              alpha_grid: Iterable[float]) -> List[Tuple[float, float]]:
    """Sweep ts_rates over a grid of alpha values."""
    grid = list(alpha_grid)
    if not grid:
        raise ValueError("alpha_grid must not be empty")
    return [ts_rates(a, b, alpha, n) for alpha in grid]

"""Early-decoding feasibility and achievable message sizes.

The stronger user decodes the weaker user's codeword from the first n2
received symbols, cancels it, and then decodes its own message.  That
works once n2 clears an SNR-dependent threshold; everything here
revolves around that threshold and the message-size pairs it unlocks.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .scalar import cap, disp_shell, disp_iid, q_inv
from .scenario import ChannelScenario
from .shell import k_tilde


class InfeasibleError(ValueError):
    """Raised when no early-decoding configuration meets the request."""


@dataclass(frozen=True)
class ErrorAllocation:
    """Split of the error budget across the three decoding steps.

    eps1 is the weak user's own decode, eps_sic1 the strong user's early
    decode of the weak user's message, eps_sic2 the strong user's decode
    of its own message after cancellation.
    """
    eps1: float
    eps_sic1: float
    eps_sic2: float

    def __post_init__(self):
        for name in ("eps1", "eps_sic1", "eps_sic2"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must be in (0, 1), got {v}")

    @property
    def total(self) -> float:
        return self.eps1 + self.eps_sic1 + self.eps_sic2

    def check_budget(self, eps_total: float):
        if self.total > eps_total * (1.0 + 1e-12):
            raise ValueError(
                f"allocation sums to {self.total}, exceeding the budget {eps_total}"
            )


@dataclass(frozen=True)
class EffectiveGains:
    """Channel gains once user 2's (slightly backed-off) signal is noise."""
    g1: float
    g2: float
    p_bar2: float
    delta: float


def effective_gains(s: ChannelScenario, delta: Optional[float] = None) -> EffectiveGains:
    """Gains seen while user 2's signal, at power P2 - delta, is treated
    as extra noise.  delta defaults to 5% of P2."""
    p1, p2 = s.user_powers
    if delta is None:
        delta = 0.05 * p2
    if not (0.0 < delta < p2):
        raise ValueError(f"delta must be in (0, P2) = (0, {p2}), got {delta}")
    p_bar2 = p2 - delta
    return EffectiveGains(
        g1=s.h1 / (1.0 + s.h1 * p_bar2),
        g2=s.h2 / (1.0 + s.h2 * p_bar2),
        p_bar2=p_bar2,
        delta=delta,
    )


@dataclass(frozen=True)
class EdResult:
    """Feasible early-decoding outcome: the blocklength floor and the
    message sizes (bits) it supports."""
    n2_min: int
    log_m1: float
    log_m2: float
    c_bar1: float
    v_bar1: float


def _ed_threshold_real(log_m1: float, g2p1: float, eps_sic1: float,
                       include_log_k: bool) -> Tuple[float, float, float, float]:
    # Returns (real-valued root, c, v, target); root is the continuous n2
    # at which n*c - sqrt(n*v)*qinv == target.
    if not (log_m1 > 0.0):
        raise ValueError(f"log_m1 must be > 0 bits, got {log_m1}")
    if not (0.0 < eps_sic1 < 1.0):
        raise ValueError(f"eps_sic1 must be in (0, 1), got {eps_sic1}")
    if eps_sic1 >= 0.5:
        warnings.warn(
            "eps_sic1 >= 0.5 puts the dispersion term on the wrong side; "
            "the threshold is still well defined but unusually optimistic",
            stacklevel=3,
        )
    c = float(cap(g2p1))
    if c <= 0.0:
        raise ValueError(f"g2p1 must be > 0, got {g2p1}")
    v = float(disp_shell(g2p1))
    target = log_m1
    if include_log_k:
        target += math.log2(k_tilde(g2p1))
    qv = q_inv(eps_sic1)
    a = math.sqrt(v) * qv / (2.0 * c)
    root = (a + math.sqrt(a * a + target / c)) ** 2
    return root, c, v, target


def ed_min_blocklength(log_m1: float, g2p1: float, eps_sic1: float,
                       include_log_k: bool = False) -> int:
    """Smallest early-decoding blocklength supporting log_m1 bits.

    Solves n*C - sqrt(n*V)*Qinv(eps_sic1) >= log_m1 for integer n via
    the quadratic's closed-form root, then settles onto the exact
    integer threshold so that the returned n satisfies the inequality
    and n - 1 does not.
    """
    root, c, v, target = _ed_threshold_real(log_m1, g2p1, eps_sic1, include_log_k)
    qv = q_inv(eps_sic1)

    def ok(n: int) -> bool:
        return n * c - math.sqrt(n * v) * qv >= target

    n = max(1, math.ceil(root))
    # Floating-point noise at the boundary can shift ceil by one either
    # way; the inequality itself is authoritative.
    while not ok(n):
        n += 1
    while n > 1 and ok(n - 1):
        n -= 1
    return n


def ed_achievable(s: ChannelScenario, alloc: ErrorAllocation,
                  delta: Optional[float] = None) -> EdResult:
    """Achievable message-size pair for an early-decoding scenario.

    Needs the per-user power split.  log_m1 rides the full block with a
    blended capacity (user 2's signal is noise only over the shared
    prefix); log_m2 gets the clean channel after cancellation, with the
    i.i.d. Gaussian dispersion.  Raises InfeasibleError when s.n2 sits
    below the early-decoding floor for this log_m1 or a message size
    comes out nonpositive.
    """
    alloc.check_budget(s.eps)
    p1, _ = s.user_powers
    g = effective_gains(s, delta)
    p = s.p
    c_bar1 = p * float(cap(g.g1 * p1)) + (1.0 - p) * float(cap(s.h1 * p1))
    v_bar1 = p * float(disp_shell(g.g1 * p1)) + (1.0 - p) * float(disp_shell(s.h1 * p1))
    log_m1 = s.n1 * c_bar1 - math.sqrt(s.n1 * v_bar1) * q_inv(alloc.eps1)
    if log_m1 <= 0.0:
        raise InfeasibleError(
            f"user 1 supports no message at n1={s.n1}: "
            f"log_m1={log_m1:.3f} bits"
        )
    n2_min = ed_min_blocklength(log_m1, g.g2 * p1, alloc.eps_sic1)
    if s.n2 < n2_min:
        raise InfeasibleError(
            f"n2={s.n2} is below the early-decoding floor {n2_min} "
            f"(short by {n2_min - s.n2} channel uses)"
        )
    snr2 = s.h2 * g.p_bar2
    log_m2 = (
        s.n2 * float(cap(snr2))
        - math.sqrt(s.n2 * float(disp_iid(snr2))) * q_inv(alloc.eps_sic2)
    )
    if log_m2 <= 0.0:
        raise InfeasibleError(
            f"user 2 supports no message at n2={s.n2}: "
            f"log_m2={log_m2:.3f} bits"
        )
    return EdResult(n2_min=n2_min, log_m1=log_m1, log_m2=log_m2,
                    c_bar1=c_bar1, v_bar1=v_bar1)


def _alloc_grid(eps2: float, points: int = 240):
    # Cluster candidates at both ends: tiny eps_sic1 and eps_sic1 near
    # the full budget are where the objective and the guard fight.
    half = points // 2
    low = np.geomspace(eps2 * 1e-12, eps2 * 0.5, half)
    high = eps2 * (1.0 - np.geomspace(1e-12, 0.5, half))
    grid = np.unique(np.concatenate([low, high]))
    return grid[(grid > 0.0) & (grid < eps2)]


def ed_best_allocation(s: ChannelScenario, eps_budgets: Tuple[float, float],
                       log_m1: float, include_log_k: bool = False,
                       eps_sic2_fixed: Optional[float] = None,
                       delta: Optional[float] = None) -> ErrorAllocation:
    """Error split minimizing the early-decoding blocklength floor.

    eps_budgets is (eps1, eps2): user 1's own budget plus the total
    user-2 budget to divide between the two SIC steps.  Larger eps_sic1
    always shrinks the floor, but starves eps_sic2 until user 2's
    message size dies; candidates where that happens (log_m2 <= 0 at the
    candidate's own floor) are infeasible.  Grid search over a
    boundary-clustered logarithmic grid, refined by golden section on
    the continuous threshold, deterministic for fixed inputs.  Ties at
    equal floor go to the smallest eps_sic1, leaving user 2 more budget.
    """
    eps1, eps2 = eps_budgets
    if not (0.0 < eps2 < 1.0):
        raise ValueError(f"user-2 budget must be in (0, 1), got {eps2}")
    p1, _ = s.user_powers
    g = effective_gains(s, delta)
    g2p1 = g.g2 * p1
    snr2 = s.h2 * g.p_bar2
    c2 = float(cap(snr2))
    v2 = float(disp_iid(snr2))

    def sic2_of(e1: float) -> float:
        if eps_sic2_fixed is not None:
            return eps_sic2_fixed if e1 + eps_sic2_fixed <= eps2 else -1.0
        return eps2 - e1

    def floor_of(e1: float) -> Optional[int]:
        e2 = sic2_of(e1)
        if not (0.0 < e2 < 1.0):
            return None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            n2m = ed_min_blocklength(log_m1, g2p1, e1, include_log_k)
        if n2m * c2 - math.sqrt(n2m * v2) * q_inv(e2) <= 0.0:
            return None
        return n2m

    def real_of(e1: float) -> float:
        e2 = sic2_of(e1)
        if not (0.0 < e2 < 1.0):
            return math.inf
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            root, c, v, target = _ed_threshold_real(
                log_m1, g2p1, e1, include_log_k)
        n2m = max(1, math.ceil(root))
        if n2m * c2 - math.sqrt(n2m * v2) * q_inv(e2) <= 0.0:
            return math.inf
        return root

    grid = _alloc_grid(eps2)
    vals = [(floor_of(float(e1)), float(e1)) for e1 in grid]
    feas = [(n, e1) for n, e1 in vals if n is not None]
    if not feas:
        raise InfeasibleError(
            f"no split of the user-2 budget {eps2} supports log_m1={log_m1} bits"
        )
    best_n = min(n for n, _ in feas)
    best_e1 = min(e1 for n, e1 in feas if n == best_n)

    # Golden-section pass on the continuous (pre-ceiling) threshold in a
    # bracket around the best grid point; it can shave one more channel
    # use when the grid straddles an integer step.
    idx = int(np.searchsorted(grid, best_e1))
    lo = float(grid[max(0, idx - 1)])
    hi = float(grid[min(len(grid) - 1, idx + 1)])
    if hi > lo:
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        x1 = b - invphi * (b - a)
        x2 = a + invphi * (b - a)
        f1, f2 = real_of(x1), real_of(x2)
        for _ in range(80):
            if f1 <= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - invphi * (b - a)
                f1 = real_of(x1)
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + invphi * (b - a)
                f2 = real_of(x2)
        for cand in (x1, x2, 0.5 * (a + b)):
            n = floor_of(cand)
            if n is not None and (n < best_n or (n == best_n and cand < best_e1)):
                best_n, best_e1 = n, cand

    e2 = sic2_of(best_e1)
    return ErrorAllocation(eps1=eps1, eps_sic1=best_e1, eps_sic2=e2)

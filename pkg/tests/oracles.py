"""Independent reference implementations for the test suite.

Everything here is coded straight from the defining formulas using scipy
primitives, deliberately not calling into hbgbc, so that agreement
between the two is evidence rather than tautology.  Quantile evaluation
goes through scipy.stats.norm.isf; the package has its own Newton-based
q_inv.
"""

import math

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

LN2 = math.log(2.0)
LOG2E = 1.0 / LN2


def qinv(p: float) -> float:
    return float(norm.isf(p))


def cap_bits(x: float) -> float:
    return 0.5 * math.log1p(x) / LN2


def disp_shell_bits2(x: float) -> float:
    # spherical-codebook dispersion, bits^2
    return 0.5 * LOG2E * LOG2E * x * (x + 2.0) / ((1.0 + x) * (1.0 + x))


def disp_iid_bits2(x: float) -> float:
    # i.i.d. Gaussian-input dispersion, bits^2
    return LOG2E * LOG2E * x / (1.0 + x)


def normal_approx_bits(n, snr, eps, order="halflogn", dispersion="shell"):
    first = n * cap_bits(snr)
    if order == "first":
        return first
    v = disp_shell_bits2(snr) if dispersion == "shell" else disp_iid_bits2(snr)
    out = first - math.sqrt(n * v) * qinv(eps)
    if order == "halflogn":
        out += 0.5 * math.log2(n)
    return out


def single_user_oracle(s, user, order="halflogn"):
    h, n = (s.h1, s.n1) if user == 1 else (s.h2, s.n2)
    return normal_approx_bits(n, h * s.sum_power, s.eps, order)


def coop_capacity_oracle(p: float, h1: float, h2: float, P: float) -> float:
    x1, x2 = h1 * P, h2 * P
    lead = p * cap_bits(x2) + (1.0 - p) * cap_bits(x1)
    slope = h2 / (1.0 + x2) - h1 / (1.0 + x1)
    return lead + (1.0 - p) * (LOG2E / 2.0) * slope * P


def coop_dispersion_oracle(p: float, h1: float, h2: float, P: float) -> float:
    x1, x2 = h1 * P, h2 * P
    v = (LOG2E * LOG2E / 4.0) * (
        (2.0 * p * x2 * x2 + 4.0 * x2) / (1.0 + x2) ** 2
        + 2.0 * (1.0 - p) * (x1 / (1.0 + x1)) ** 2
    )
    if P * P * h1 * h2 < 1.0:
        v += (1.0 - p) * LOG2E * LOG2E * (
            x1 / (1.0 + x1) ** 2 - x2 / (1.0 + x2) ** 2
        )
    return v


def sato_het_sum_oracle(s, order="halflogn"):
    p = s.n2 / s.n1
    c = coop_capacity_oracle(p, s.h1, s.h2, s.sum_power)
    out = s.n1 * c
    if order == "first":
        return out
    v = coop_dispersion_oracle(p, s.h1, s.h2, s.sum_power)
    out -= math.sqrt(s.n1 * v) * qinv(2.0 * s.eps)
    if order == "halflogn":
        out += 0.5 * math.log2(s.n1)
    return out


def sato_hom_sum_oracle(s, order="halflogn"):
    x = s.h2 * s.sum_power
    out = s.n1 * cap_bits(x)
    if order == "first":
        return out
    out -= math.sqrt(s.n1 * disp_shell_bits2(x)) * qinv(2.0 * s.eps)
    if order == "halflogn":
        out += 0.5 * math.log2(s.n1)
    return out


def k_tilde_oracle(P: float) -> float:
    # density-ratio cap for composite shell outputs, closed form
    return 729.0 * math.pi * (1.0 + P) ** 2 / (8.0 * (1.0 + 2.0 * P))


def ed_floor_scan(log_m1, g2p1, eps_sic1, include_log_k=False) -> int:
    """Brute-force integer scan for the early-decoding blocklength floor.

    Smallest n with n*C - sqrt(n*V)*Qinv(eps) >= target, found by direct
    evaluation over 1..n_hi rather than by solving the quadratic.
    """
    c = cap_bits(g2p1)
    v = disp_shell_bits2(g2p1)
    z = qinv(eps_sic1)
    target = log_m1 + (math.log2(k_tilde_oracle(g2p1)) if include_log_k else 0.0)
    n_hi = 4
    while n_hi * c - math.sqrt(n_hi * v) * z < target:
        n_hi *= 2
        if n_hi > 1 << 34:
            raise RuntimeError("scan window blew up; inputs look degenerate")
    ns = np.arange(1, n_hi + 1, dtype=np.float64)
    ok = ns * c - np.sqrt(ns * v) * z >= target
    return int(ns[ok][0])


def ed_achievable_oracle(s, alloc, delta=None):
    """(floor, log_m1, log_m2) recomputed from scratch."""
    p1, p2 = s.user_powers
    d = 0.05 * p2 if delta is None else delta
    pb2 = p2 - d
    g1 = s.h1 / (1.0 + s.h1 * pb2)
    g2 = s.h2 / (1.0 + s.h2 * pb2)
    p = s.n2 / s.n1
    cbar = p * cap_bits(g1 * p1) + (1.0 - p) * cap_bits(s.h1 * p1)
    vbar = p * disp_shell_bits2(g1 * p1) + (1.0 - p) * disp_shell_bits2(s.h1 * p1)
    lm1 = s.n1 * cbar - math.sqrt(s.n1 * vbar) * qinv(alloc.eps1)
    floor = ed_floor_scan(lm1, g2 * p1, alloc.eps_sic1)
    x2 = s.h2 * pb2
    lm2 = s.n2 * cap_bits(x2) - math.sqrt(s.n2 * disp_iid_bits2(x2)) * qinv(alloc.eps_sic2)
    return floor, lm1, lm2


def shell_surface_oracle(n: int, r: float) -> float:
    # log of the surface area of the radius-r sphere in R^n
    return math.log(2.0) + 0.5 * n * math.log(math.pi) - float(gammaln(0.5 * n)) \
        + (n - 1) * math.log(r)


def ratio_exponent_oracle(power, t_i, t_ii, p):
    """Exponent of the per-segment density-ratio envelope, vectorized."""
    t_i = np.asarray(t_i, dtype=np.float64)
    t_ii = np.asarray(t_ii, dtype=np.float64)
    P = float(power)
    t = p * t_i + (1.0 - p) * t_ii
    r_i = np.sqrt(1.0 + 4.0 * P * t_i)
    r_ii = np.sqrt(1.0 + 4.0 * P * t_ii)
    return (
        (1.0 + P)
        - math.log(2.0 * (1.0 + P))
        + t * P / (1.0 + P)
        - p * r_i
        - (1.0 - p) * r_ii
        + p * np.log1p(r_i)
        + (1.0 - p) * np.log1p(r_ii)
    )


def ts_rates_oracle(a, b, alpha, n):
    sa, sb = math.sqrt(alpha), math.sqrt(1.0 - alpha)
    r1 = alpha * a.fo1 + (1.0 - alpha) * b.fo1 - (sa * a.so1 + sb * b.so1) / math.sqrt(n)
    r2 = alpha * a.fo2 + (1.0 - alpha) * b.fo2 - (sa * a.so2 + sb * b.so2) / math.sqrt(n)
    return r1, r2


def random_scenario(rng, make):
    """Random valid sum-power scenario.  make is the ChannelScenario class."""
    h1 = float(10.0 ** rng.uniform(-1.0, 1.3))
    h2 = h1 * float(1.0 + rng.uniform(0.0, 9.0))
    n1 = int(rng.integers(64, 4001))
    n2 = max(1, min(n1, int(round(float(rng.uniform(0.3, 1.0)) * n1))))
    eps = float(10.0 ** rng.uniform(-8.0, math.log10(0.2)))
    power = float(10.0 ** rng.uniform(-1.0, 1.5))
    return make(h1=h1, h2=h2, n1=n1, n2=n2, eps=eps, power_sum=power)

"""Outer bounds on the two-user downlink rate region.

Provides:
    normal_approx        generic n*C - sqrt(n*V)*Qinv(eps) evaluation
    single_user_bound    point-to-point converse for one user
    sato_het             cooperative sum-rate bound, heterogeneous blocklengths
    sato_hom             cooperative sum-rate bound, common blocklength
    sum_rate_bound_rho   the same bound before optimizing the noise correlation
    effective_gain       single-user gain of the correlated-noise channel
    rho_star             correlation minimizing that gain

The cooperative bounds follow the usual recipe: give both messages to the
stronger receiver, then tighten over the correlation rho of the two noise
processes.  With unequal blocklengths the second user's message only
occupies a prefix of the block, which shows up as the n2/n1 weighting in
the capacity and dispersion terms below.
"""

import math
from dataclasses import dataclass

from .scalar import LOG2E, cap, disp_shell, disp_iid, q_inv
from .scenario import (
    ChannelScenario,
    ORDER_FIRST,
    ORDER_SECOND,
    ORDER_HALFLOGN,
    check_order,
)


def normal_approx(n: int, snr: float, eps: float, order: str = ORDER_HALFLOGN,
                  dispersion: str = "shell") -> float:
    """Normal-approximation log message size in bits for a point-to-point link.

    order "first" gives n*C, "second" subtracts sqrt(n*V)*Qinv(eps) and
    "halflogn" adds the log2(n)/2 correction on top of that.
    """
    check_order(order)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = n * float(cap(snr))
    if order == ORDER_FIRST:
        return c
    if dispersion == "shell":
        v = float(disp_shell(snr))
    elif dispersion == "iid":
        v = float(disp_iid(snr))
    else:
        raise ValueError(f"dispersion must be 'shell' or 'iid', got {dispersion!r}")
    out = c - math.sqrt(n * v) * q_inv(eps)
    if order == ORDER_HALFLOGN:
        out += 0.5 * math.log2(n)
    return out


def single_user_bound(s: ChannelScenario, user: int,
                      order: str = ORDER_HALFLOGN) -> float:
    """Converse on one user's log message size, ignoring the other user.

    Grants the full power budget to the chosen user, so it is an outer
    bound for any split.  Uses the shell dispersion and the scenario's
    eps as-is.
    """
    if user == 1:
        h, n = s.h1, s.n1
    elif user == 2:
        h, n = s.h2, s.n2
    else:
        raise ValueError(f"user must be 1 or 2, got {user}")
    return normal_approx(n, h * s.sum_power, s.eps, order)


def effective_gain(rho: float, h1: float, h2: float) -> float:
    """Gain of the channel a fully informed receiver sees when the two
    noise processes have correlation rho.

    h_rho = (h1 + h2 - 2*rho*sqrt(h1*h2)) / (1 - rho^2), minimized over
    rho in [0, 1) at rho_star where it equals h2.
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    return (h1 + h2 - 2.0 * rho * math.sqrt(h1 * h2)) / (1.0 - rho * rho)


def rho_star(h1: float, h2: float) -> float:
    """Noise correlation that minimizes effective_gain: sqrt(h1 / h2)."""
    if not (0.0 < h1 <= h2):
        raise ValueError(f"need 0 < h1 <= h2, got ({h1}, {h2})")
    return math.sqrt(h1 / h2)


@dataclass(frozen=True)
class RhoQuantities:
    """First- and second-order coefficients of the cooperative bound at a
    fixed noise correlation.

    c_rho1 and v_rho1 are the blocklength-proportional parts; c_rho2 and
    v_rho2 multiply the fraction of transmit energy in the tail of the
    block (they vanish when n2 = n1).
    """
    h_rho: float
    c_rho1: float
    c_rho2: float
    v_rho1: float
    v_rho2: float


def _coop_terms(p: float, h_lo: float, h_hi: float, P: float):
    # Shared algebra for the cooperative capacity/dispersion pair: user-1
    # segments see gain h_lo for the last (1-p) fraction of the block and
    # the combined gain h_hi elsewhere.
    a_hi = h_hi / (1.0 + h_hi * P)
    a_lo = h_lo / (1.0 + h_lo * P)
    c = (
        p * float(cap(h_hi * P))
        + (1.0 - p) * float(cap(h_lo * P))
        + (1.0 - p) * 0.5 * LOG2E * (a_hi - a_lo) * P
    )
    v = 0.25 * LOG2E**2 * (
        (p * 2.0 * (h_hi * P) ** 2 + 4.0 * h_hi * P) / (1.0 + h_hi * P) ** 2
        + (1.0 - p) * 2.0 * (h_lo * P) ** 2 / (1.0 + h_lo * P) ** 2
    )
    return c, v


def rho_quantities(s: ChannelScenario, rho: float) -> RhoQuantities:
    """Evaluate the cooperative-bound coefficients at noise correlation rho."""
    h_rho = effective_gain(rho, s.h1, s.h2)
    P = s.sum_power
    p = s.p
    c1, v1 = _coop_terms(p, s.h1, h_rho, P)
    a_rho = h_rho / (1.0 + h_rho * P)
    a_1 = s.h1 / (1.0 + s.h1 * P)
    c2 = 0.5 * LOG2E * (a_1 - a_rho)
    v2 = 0.25 * LOG2E**2 * (
        4.0 * s.h1 / (1.0 + s.h1 * P) ** 2 - 4.0 * h_rho / (1.0 + h_rho * P) ** 2
    )
    return RhoQuantities(h_rho=h_rho, c_rho1=c1, c_rho2=c2, v_rho1=v1, v_rho2=v2)


def sum_rate_bound_rho(s: ChannelScenario, rho: float,
                       order: str = ORDER_HALFLOGN) -> float:
    """Cooperative bound on log(M1*M2) in bits at a fixed noise correlation.

    The tail-energy term c_rho2 is nonpositive, so dropping it keeps the
    bound valid; the dispersion picks up the matching v_rho2 correction
    only where it enlarges the bound (the transmitter could concentrate
    tail energy there).  Uses the scenario's eps verbatim: callers that
    need the sum-error doubling pass it in through the scenario.
    """
    check_order(order)
    rq = rho_quantities(s, rho)
    P = s.sum_power
    n1 = s.n1
    first = n1 * rq.c_rho1
    if order == ORDER_FIRST:
        return first
    v = rq.v_rho1
    if P * P * s.h1 * rq.h_rho < 1.0:
        v = v + rq.v_rho2 * (1.0 - s.p) * P
    out = first - math.sqrt(n1 * v) * q_inv(s.eps)
    if order == ORDER_HALFLOGN:
        out += 0.5 * math.log2(n1)
    return out


def sato_sum_capacity(s: ChannelScenario) -> float:
    """First-order coefficient of the heterogeneous sum-rate bound, in
    bits per (user-1) channel use.  Never exceeds cap(h2 * P)."""
    c, _ = _coop_terms(s.p, s.h1, s.h2, s.sum_power)
    return c


def sato_sum_dispersion(s: ChannelScenario) -> float:
    """Second-order coefficient of the heterogeneous sum-rate bound."""
    P = s.sum_power
    p = s.p
    _, v_main = _coop_terms(p, s.h1, s.h2, P)
    if P * P * s.h1 * s.h2 < 1.0:
        v_adj = 0.25 * LOG2E**2 * (
            4.0 * s.h1 * P / (1.0 + s.h1 * P) ** 2
            - 4.0 * s.h2 * P / (1.0 + s.h2 * P) ** 2
        )
        v_main = v_main + (1.0 - p) * v_adj
    return v_main


@dataclass(frozen=True)
class RateBounds:
    """Outer bound evaluation: individual and sum limits in bits."""
    family: str
    order: str
    log_m1_bits: float
    log_m2_bits: float
    sum_bits: float


def sato_het(s: ChannelScenario, order: str = ORDER_HALFLOGN) -> RateBounds:
    """Sum-rate outer bound honoring the two blocklengths.

    The sum constraint is evaluated at twice the scenario eps (a union
    bound moves from per-user to sum error), the individual constraints
    at eps itself.
    """
    check_order(order)
    n1 = s.n1
    c = sato_sum_capacity(s)
    total = n1 * c
    if order != ORDER_FIRST:
        v = sato_sum_dispersion(s)
        total -= math.sqrt(n1 * v) * q_inv(2.0 * s.eps)
        if order == ORDER_HALFLOGN:
            total += 0.5 * math.log2(n1)
    return RateBounds(
        family="sato_het",
        order=order,
        log_m1_bits=single_user_bound(s, 1, order),
        log_m2_bits=single_user_bound(s, 2, order),
        sum_bits=total,
    )


def sato_hom(s: ChannelScenario, order: str = ORDER_HALFLOGN) -> RateBounds:
    """Sum-rate outer bound that pads user 2 out to the full block.

    Equivalent to sato_het at n2 = n1; kept separate because it is the
    natural baseline when comparing against equal-blocklength systems.
    """
    check_order(order)
    n1 = s.n1
    snr = s.h2 * s.sum_power
    total = n1 * float(cap(snr))
    if order != ORDER_FIRST:
        total -= math.sqrt(n1 * float(disp_shell(snr))) * q_inv(2.0 * s.eps)
        if order == ORDER_HALFLOGN:
            total += 0.5 * math.log2(n1)
    return RateBounds(
        family="sato_hom",
        order=order,
        log_m1_bits=single_user_bound(s, 1, order),
        log_m2_bits=single_user_bound(s, 2, order),
        sum_bits=total,
    )

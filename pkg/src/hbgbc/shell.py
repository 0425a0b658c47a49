"""Composite shell codewords and output-density ratio machinery.

A composite shell codeword splits the block at n2: the first n2 symbols
are drawn uniformly on the radius-sqrt(n2*P) sphere, the tail on the
radius-sqrt((n1-n2)*P) sphere.  The functions below also evaluate the
closed forms that control how far the induced output density can sit
above the i.i.d. Gaussian reference: a ratio exponent that is nonnegative
and vanishes only at normalized output powers (1+P, 1+P), and the
prefactor whose value there, k_tilde, caps the density ratio.

All surface areas and densities are handled in log domain; block lengths
in the hundreds overflow the linear forms.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

_C_SQUARED = 729.0 * math.pi / 8.0


@dataclass(frozen=True)
class CompositeShellCodeword:
    """One codeword with per-segment equal-power property."""
    symbols: np.ndarray
    split: int
    power: float

    def __post_init__(self):
        n1 = self.symbols.shape[0]
        if not (1 <= self.split <= n1):
            raise ValueError(f"split must be in [1, {n1}], got {self.split}")
        if not (self.power > 0.0):
            raise ValueError(f"power must be > 0, got {self.power}")
        head = float(np.dot(self.symbols[:self.split], self.symbols[:self.split]))
        want = self.split * self.power
        if abs(head - want) > 1e-9 * want:
            raise ValueError("first segment is off its power shell")
        tail_n = n1 - self.split
        if tail_n > 0:
            tail = float(np.dot(self.symbols[self.split:], self.symbols[self.split:]))
            want = tail_n * self.power
            if abs(tail - want) > 1e-9 * want:
                raise ValueError("second segment is off its power shell")


def _shell_rows(rng: np.random.Generator, m: int, n: int, radius: float) -> np.ndarray:
    """m independent uniform draws on the radius-r sphere in R^n."""
    x = rng.standard_normal((m, n))
    norms = np.linalg.norm(x, axis=1)
    # A zero draw has probability zero but would poison the normalization.
    while np.any(norms == 0.0):
        bad = norms == 0.0
        x[bad] = rng.standard_normal((int(np.count_nonzero(bad)), n))
        norms = np.linalg.norm(x, axis=1)
    return x * (radius / norms)[:, None]


def composite_shell_rows(rng: np.random.Generator, m: int, n1: int, n2: int,
                         power: float) -> np.ndarray:
    """m composite shell codewords as rows of an (m, n1) array."""
    if not (1 <= n2 <= n1):
        raise ValueError(f"need 1 <= n2 <= n1, got n2={n2}, n1={n1}")
    if not (power > 0.0):
        raise ValueError(f"power must be > 0, got {power}")
    out = np.empty((m, n1))
    out[:, :n2] = _shell_rows(rng, m, n2, math.sqrt(n2 * power))
    if n1 > n2:
        out[:, n2:] = _shell_rows(rng, m, n1 - n2, math.sqrt((n1 - n2) * power))
    return out


def sample_composite_shell(n1: int, n2: int, power: float,
                           seed) -> CompositeShellCodeword:
    """Draw one composite shell codeword.

    seed is either an integer or an already-built numpy Generator; an
    integer gets its own fresh default_rng stream.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    row = composite_shell_rows(rng, 1, n1, n2, power)[0]
    return CompositeShellCodeword(symbols=row, split=n2, power=power)


def shell_surface(n: int, r: float) -> float:
    """Log surface area of the radius-r sphere in R^n."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValueError(f"n must be an integer >= 1, got {n!r}")
    if not (r > 0.0):
        raise ValueError(f"r must be > 0, got {r}")
    return (
        math.log(2.0)
        + 0.5 * n * math.log(math.pi)
        - float(gammaln(0.5 * n))
        + (n - 1) * math.log(r)
    )


@dataclass(frozen=True)
class RatioPoint:
    """Normalized output powers of the two segments plus the mixing data."""
    t_i: float
    t_ii: float
    p: float
    power: float

    def __post_init__(self):
        if self.t_i < 0.0 or self.t_ii < 0.0:
            raise ValueError(
                f"normalized output powers must be >= 0, got "
                f"({self.t_i}, {self.t_ii})"
            )
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"p must be in (0, 1], got {self.p}")
        if not (self.power > 0.0):
            raise ValueError(f"power must be > 0, got {self.power}")


def ratio_exponent_at(power, t_i, t_ii, p):
    """Vectorized exponent of the output-density ratio bound.

    Nonnegative everywhere and zero exactly at t_i = t_ii = 1 + power.
    The ratio of the composite-shell output density to the i.i.d.
    Gaussian reference decays like exp(-n1 * f / 2) away from that point,
    which is what confines the ratio below k_tilde.
    """
    P = float(power)
    if not (P > 0.0):
        raise ValueError(f"power must be > 0, got {power}")
    t_i = np.asarray(t_i, dtype=float)
    t_ii = np.asarray(t_ii, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(t_i < 0.0) or np.any(t_ii < 0.0):
        raise ValueError("normalized output powers must be >= 0")
    if np.any(p <= 0.0) or np.any(p > 1.0):
        raise ValueError("p must be in (0, 1]")
    t = p * t_i + (1.0 - p) * t_ii
    r_i = np.sqrt(1.0 + 4.0 * P * t_i)
    r_ii = np.sqrt(1.0 + 4.0 * P * t_ii)
    val = (
        (1.0 + P)
        - math.log(2.0 * (1.0 + P))
        + t * P / (1.0 + P)
        - p * r_i
        - (1.0 - p) * r_ii
        + p * np.log1p(r_i)
        + (1.0 - p) * np.log1p(r_ii)
    )
    if val.ndim == 0:
        return float(val)
    return val


def ratio_exponent(pt: RatioPoint) -> float:
    """Exponent of the density-ratio bound at one point."""
    return float(ratio_exponent_at(pt.power, pt.t_i, pt.t_ii, pt.p))


def k1_prefactor(power: float, t_i: float, t_ii: float) -> float:
    """Subexponential prefactor of the output-density ratio bound.

    Symmetric in (t_i, t_ii); equals k_tilde(power) at the exponent's
    minimizer t_i = t_ii = 1 + power.
    """
    if not (power > 0.0):
        raise ValueError(f"power must be > 0, got {power}")
    if not (t_i > 0.0 and t_ii > 0.0):
        raise ValueError(f"t_i, t_ii must be > 0, got ({t_i}, {t_ii})")
    out = 0.25 * _C_SQUARED
    for t in (t_i, t_ii):
        r = math.sqrt(1.0 + 4.0 * power * t)
        out *= (1.0 + r) / (1.0 + 4.0 * power * t) ** 0.25
    return out


def k_tilde(power: float) -> float:
    """Uniform cap on the shell-output to Gaussian density ratio."""
    if not (power > 0.0):
        raise ValueError(f"power must be > 0, got {power}")
    return _C_SQUARED * (1.0 + power) ** 2 / (1.0 + 2.0 * power)


def output_ratio_samples(n1: int, n2: int, power: float, n_outputs: int,
                         n_mixture: int, seed: int) -> np.ndarray:
    """Empirical output-density ratio at sampled channel outputs.

    Draws outputs y = x + z from the composite-shell input distribution,
    then estimates dP_Y/dQ_Y at each y with an n_mixture-term mixture
    estimate of P_Y and the exact Gaussian reference Q_Y.  Returns the
    linear-domain ratio estimates; quantiles of these should stay below
    k_tilde(power) once n1 is large enough for the bound to bite.
    """
    if n_outputs < 1 or n_mixture < 1:
        raise ValueError("n_outputs and n_mixture must be >= 1")
    rng = np.random.default_rng(seed)
    xk = composite_shell_rows(rng, n_mixture, n1, n2, power)
    n1p = n1 * power
    log_ratio = np.empty(n_outputs)
    chunk = 1024
    done = 0
    while done < n_outputs:
        b = min(chunk, n_outputs - done)
        x = composite_shell_rows(rng, b, n1, n2, power)
        y = x + rng.standard_normal((b, n1))
        ysq = np.einsum("ij,ij->i", y, y)
        # ||y - x_k||^2 = ||y||^2 + n1*P - 2 y.x_k  (every codeword has
        # squared norm exactly n1*P)
        cross = y @ xk.T
        log_p = (
            logsumexp(-0.5 * (ysq[:, None] + n1p - 2.0 * cross), axis=1)
            - math.log(n_mixture)
            - 0.5 * n1 * math.log(2.0 * math.pi)
        )
        log_q = (
            -0.5 * n1 * math.log(2.0 * math.pi * (1.0 + power))
            - ysq / (2.0 * (1.0 + power))
        )
        log_ratio[done:done + b] = log_p - log_q
        done += b
    return np.exp(log_ratio)

"""Monte Carlo verification of the distributional claims behind the bounds.

Three moment checks (information densities seen by the SIC step, by the
weak user, and by the fully informed cooperative receiver), a tiny-scale
threshold-decoder simulation against its own union bound, and an exact
inclusion-exclusion identity on shared error paths.

Determinism: trials are cut into fixed-size batches, each batch drawing
from its own counter-based substream keyed by (seed, batch index), and
cross-batch reductions use exact summation.  Identical (seed, config)
therefore gives bit-identical reports no matter how batches are
scheduled.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .scalar import LOG2E, cap, disp_shell, disp_iid
from .scenario import ChannelScenario
from .bounds import rho_quantities
from .early_decoding import effective_gains
from .shell import composite_shell_rows, _shell_rows, k_tilde

BATCH = 4096
_SIM_BATCH = 512
_X_STREAM = 1 << 32


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for one batch of one run."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _batches(trials: int, batch: int):
    done, idx = 0, 0
    while done < trials:
        b = min(batch, trials - done)
        yield idx, b
        done += b
        idx += 1


@dataclass(frozen=True)
class McConfig:
    """Settings for one verification run.

    n1 and n2 are the simulated blocklengths; they override the
    scenario's own (which may be far beyond desk scale).
    """
    trials: int
    seed: int
    n1: int
    n2: int
    scenario: ChannelScenario
    confidence_sigmas: float = 4.0

    def __post_init__(self):
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not (isinstance(self.n1, int) and isinstance(self.n2, int)
                and 1 <= self.n2 <= self.n1):
            raise ValueError(
                f"need integers 1 <= n2 <= n1, got n1={self.n1!r}, n2={self.n2!r}"
            )
        if not (self.confidence_sigmas > 0.0):
            raise ValueError(
                f"confidence_sigmas must be > 0, got {self.confidence_sigmas}"
            )

    @property
    def p(self) -> float:
        return self.n2 / self.n1


@dataclass(frozen=True)
class McReport:
    """Outcome of one check; moments are per channel use."""
    check: str
    empirical_mean: Optional[float]
    empirical_var: Optional[float]
    target_mean: Optional[float]
    target_var: Optional[float]
    std_error: dict
    passed: bool
    trials_used: int
    details: dict = field(default_factory=dict)
    warnings: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "empirical_mean": self.empirical_mean,
            "empirical_var": self.empirical_var,
            "target_mean": self.target_mean,
            "target_var": self.target_var,
            "std_error": dict(self.std_error),
            "pass": self.passed,
            "trials_used": self.trials_used,
            "details": dict(self.details),
            "warnings": list(self.warnings),
        }


class _MomentTally:
    """Centered power sums, accumulated batch by batch.

    Centering on the target mean keeps the power sums small, so the
    shifted-moment recombination below loses nothing to cancellation at
    desk scales.
    """

    def __init__(self, target_mean: float):
        self.t = float(target_mean)
        self.n = 0
        self._parts = ([], [], [], [])

    def add(self, x: np.ndarray):
        c = x - self.t
        c2 = c * c
        self.n += x.size
        self._parts[0].append(float(np.sum(c)))
        self._parts[1].append(float(np.sum(c2)))
        self._parts[2].append(float(np.sum(c2 * c)))
        self._parts[3].append(float(np.sum(c2 * c2)))

    def summarize(self):
        n = self.n
        s1, s2, s3, s4 = (math.fsum(p) for p in self._parts)
        m1 = s1 / n
        mean = self.t + m1
        mu2 = s2 / n - m1 * m1
        var = (s2 - n * m1 * m1) / (n - 1) if n > 1 else 0.0
        mu4 = (s4 / n - 4.0 * m1 * (s3 / n) + 6.0 * m1 * m1 * (s2 / n)
               - 3.0 * m1 ** 4)
        se_mean = math.sqrt(max(var, 0.0) / n)
        se_var = math.sqrt(max(mu4 - mu2 * mu2, 0.0) / n)
        return mean, var, se_mean, se_var


def _power_warning(cfg: McConfig):
    if cfg.trials < 1000:
        msg = (f"{cfg.trials} trials give little statistical power; "
               f"moment checks want >= 1000")
        warnings.warn(msg, stacklevel=3)
        return (msg,)
    return ()


def _moment_report(check: str, cfg: McConfig, tally: _MomentTally,
                   target_mean: float, target_var: float,
                   details: dict, warns: tuple) -> McReport:
    mean, var, se_mean, se_var = tally.summarize()
    k = cfg.confidence_sigmas
    ok = (abs(mean - target_mean) <= k * se_mean
          and abs(var - target_var) <= k * se_var)
    return McReport(
        check=check,
        empirical_mean=mean,
        empirical_var=var,
        target_mean=target_mean,
        target_var=target_var,
        std_error={"mean": se_mean, "var": se_var},
        passed=bool(ok),
        trials_used=cfg.trials,
        details=details,
        warnings=warns,
    )


def verify_sic1_density(cfg: McConfig) -> McReport:
    """First and second moment of the early-decoding information density.

    Simulates the prefix channel the strong user sees while the weak
    user's codeword is still buried in interference: shell input at the
    weak user's power, effective gain g2, i.i.d. Gaussian reference
    output.  Targets are cap(g2*P1) and disp_shell(g2*P1)/n2 per use.
    """
    warns = _power_warning(cfg)
    s = cfg.scenario
    p1, _ = s.user_powers
    g = effective_gains(s)
    snr = g.g2 * p1
    n2 = cfg.n2
    half_log = 0.5 * math.log1p(snr)
    qvar = 1.0 + snr
    t_mean = float(cap(snr))
    t_var = float(disp_shell(snr)) / n2
    tally = _MomentTally(t_mean)
    root = math.sqrt(snr / p1) if p1 > 0 else 0.0
    for idx, b in _batches(cfg.trials, BATCH):
        rng = substream(cfg.seed, idx)
        x = _shell_rows(rng, b, n2, math.sqrt(n2 * p1))
        z = rng.standard_normal((b, n2))
        y = root * x + z
        val = (n2 * half_log
               - 0.5 * np.einsum("ij,ij->i", z, z)
               + np.einsum("ij,ij->i", y, y) / (2.0 * qvar))
        tally.add(LOG2E * val / n2)
    return _moment_report(
        "sic1_density", cfg, tally, t_mean, t_var,
        details={"snr": snr, "n2": n2}, warns=warns,
    )


def verify_rx1_density(cfg: McConfig) -> McReport:
    """Moments of the weak user's full-block information density.

    The first n2 uses carry interference (noise variance 1 + h1*P_bar2),
    the tail is clean; the codeword is composite shell at the weak
    user's power.  Mean target is the blended capacity, variance the
    blended shell dispersion, both per channel use.
    """
    warns = _power_warning(cfg)
    s = cfg.scenario
    p1, _ = s.user_powers
    g = effective_gains(s)
    n1, n2 = cfg.n1, cfg.n2
    p = cfg.p
    sig2_a = 1.0 + s.h1 * g.p_bar2
    snr_a = g.g1 * p1
    snr_b = s.h1 * p1
    qvar_a = s.h1 * p1 + sig2_a
    qvar_b = 1.0 + s.h1 * p1
    t_mean = p * float(cap(snr_a)) + (1.0 - p) * float(cap(snr_b))
    t_var = (n2 * float(disp_shell(snr_a))
             + (n1 - n2) * float(disp_shell(snr_b))) / n1**2
    tally = _MomentTally(t_mean)
    root_h1 = math.sqrt(s.h1)
    sig_a = math.sqrt(sig2_a)
    const = n2 * 0.5 * math.log1p(snr_a) + (n1 - n2) * 0.5 * math.log1p(snr_b)
    for idx, b in _batches(cfg.trials, BATCH):
        rng = substream(cfg.seed, idx)
        x = composite_shell_rows(rng, b, n1, n2, p1)
        z = rng.standard_normal((b, n1))
        z[:, :n2] *= sig_a
        y = root_h1 * x + z
        za, zb = z[:, :n2], z[:, n2:]
        ya, yb = y[:, :n2], y[:, n2:]
        val = (const
               - np.einsum("ij,ij->i", za, za) / (2.0 * sig2_a)
               + np.einsum("ij,ij->i", ya, ya) / (2.0 * qvar_a)
               - 0.5 * np.einsum("ij,ij->i", zb, zb)
               + np.einsum("ij,ij->i", yb, yb) / (2.0 * qvar_b))
        tally.add(LOG2E * val / n1)
    return _moment_report(
        "rx1_density", cfg, tally, t_mean, t_var,
        details={"snr_prefix": snr_a, "snr_tail": snr_b, "n1": n1, "n2": n2},
        warns=warns,
    )


def verify_coop_density(cfg: McConfig, rho: float,
                        x: Optional[np.ndarray] = None) -> McReport:
    """Moments of the cooperative receiver's density at a fixed input.

    Both outputs are observed over the first n2 uses, only the weak
    user's over the tail; the noise pair has correlation rho.  The
    closed-form targets hold for any input with total energy n1 * P, so
    that is validated; the default input is a composite shell draw from
    a reserved substream.
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    warns = _power_warning(cfg)
    s = cfg.scenario
    P = s.sum_power
    n1, n2 = cfg.n1, cfg.n2
    if x is None:
        x = composite_shell_rows(substream(cfg.seed, _X_STREAM), 1, n1, n2, P)[0]
    else:
        x = np.asarray(x, dtype=float)
        if x.shape != (n1,):
            raise ValueError(f"x must have shape ({n1},), got {x.shape}")
    energy = float(np.dot(x, x))
    if abs(energy - n1 * P) > 1e-9 * n1 * P:
        raise ValueError(
            f"targets need total input energy n1*P = {n1 * P}, got {energy}"
        )
    rq = rho_quantities(s.with_blocklengths(n1, n2), rho)
    tail_energy = float(np.dot(x[n2:], x[n2:]))
    t_mean = rq.c_rho1 + rq.c_rho2 * tail_energy / n1
    t_var = rq.v_rho1 / n1 + rq.v_rho2 * tail_energy / n1**2

    rh1, rh2 = math.sqrt(s.h1), math.sqrt(s.h2)
    omr = 1.0 - rho * rho
    # Output covariance of the joint pair under the i.i.d. reference:
    # noise covariance plus P * v v^T with v = (sqrt(h1), sqrt(h2)).
    sy = np.array([[1.0 + P * s.h1, rho + P * rh1 * rh2],
                   [rho + P * rh1 * rh2, 1.0 + P * s.h2]])
    syi = np.linalg.inv(sy)
    # det ratio collapses: det(Sy)/det(Sz) = 1 + P * h_rho
    log_det_ratio = math.log1p(P * rq.h_rho)
    qvar_tail = 1.0 + s.h1 * P
    const = (0.5 * n2 * log_det_ratio
             + 0.5 * (n1 - n2) * math.log(qvar_tail))
    xa, xb = x[:n2], x[n2:]
    tally = _MomentTally(t_mean)
    for idx, b in _batches(cfg.trials, BATCH):
        rng = substream(cfg.seed, idx)
        u = rng.standard_normal((b, 2, n1))
        z1 = u[:, 0, :]
        z2 = rho * u[:, 0, :n2] + math.sqrt(omr) * u[:, 1, :n2]
        y1 = rh1 * x[None, :] + z1
        y2 = rh2 * xa[None, :] + z2
        y1a = y1[:, :n2]
        q_y = (syi[0, 0] * y1a * y1a + 2.0 * syi[0, 1] * y1a * y2
               + syi[1, 1] * y2 * y2)
        z1a = z1[:, :n2]
        q_z = (z1a * z1a - 2.0 * rho * z1a * z2 + z2 * z2) / omr
        y1b = y1[:, n2:]
        z1b = z1[:, n2:]
        val = (const
               + 0.5 * np.sum(q_y - q_z, axis=1)
               - 0.5 * np.einsum("ij,ij->i", z1b, z1b)
               + np.einsum("ij,ij->i", y1b, y1b) / (2.0 * qvar_tail))
        tally.add(LOG2E * val / n1)
    return _moment_report(
        "coop_density", cfg, tally, t_mean, t_var,
        details={"rho": rho, "h_rho": rq.h_rho, "tail_energy": tail_energy,
                 "n1": n1, "n2": n2},
        warns=warns,
    )


def simulate_dt_decoder(cfg: McConfig, m: int) -> McReport:
    """Threshold decoding over random composite-shell codebooks.

    Per trial: fresh m-codeword codebook, uniform true message, decode
    the smallest index whose density against the received block clears
    log2(k_tilde * m).  The empirical error rate must sit below the
    union bound estimated on the same run: outage plus k_tilde * m
    times the confusion probability of an independent output.
    """
    if cfg.n1 > 64:
        raise ValueError(f"decoder simulation is capped at n1 = 64, got {cfg.n1}")
    if not (1 <= m <= 256):
        raise ValueError(f"m must be in [1, 256], got {m}")
    s = cfg.scenario
    if s.power_1 is not None:
        power = s.power_1
        g = effective_gains(s)
        gain = g.g2
    else:
        power = s.power_sum
        gain = s.h2
    snr = gain * power
    n1, n2 = cfg.n1, cfg.n2
    kt = k_tilde(snr)
    thr = math.log2(kt) + math.log2(m)
    qvar = 1.0 + snr
    const = 0.5 * n1 * math.log1p(snr)
    rg = math.sqrt(gain)
    gnp = gain * n1 * power

    t_err = _MomentTally(0.0)
    t_out = _MomentTally(0.0)
    t_conf = _MomentTally(0.0)
    for idx, b in _batches(cfg.trials, _SIM_BATCH):
        rng = substream(cfg.seed, idx)
        books = composite_shell_rows(rng, b * m, n1, n2, power).reshape(b, m, n1)
        w = rng.integers(0, m, size=b)
        z = rng.standard_normal((b, n1))
        y = rg * books[np.arange(b), w, :] + z
        ysq = np.einsum("ij,ij->i", y, y)
        cross = np.einsum("bn,bmn->bm", y, books)
        dens = LOG2E * (const - 0.5 * (ysq[:, None] - 2.0 * rg * cross + gnp)
                        + ysq[:, None] / (2.0 * qvar))
        hits = dens >= thr
        first = np.argmax(hits, axis=1)
        any_hit = hits.any(axis=1)
        err = ~(any_hit & (first == w))
        out = dens[np.arange(b), w] < thr
        # Independent output for the confusion term: the bound pits the
        # codebook against a block the transmitter never touched.
        ybar = rng.standard_normal((b, n1)) * math.sqrt(qvar)
        ybsq = np.einsum("ij,ij->i", ybar, ybar)
        crossb = np.einsum("bn,bmn->bm", ybar, books)
        densb = LOG2E * (const - 0.5 * (ybsq[:, None] - 2.0 * rg * crossb + gnp)
                         + ybsq[:, None] / (2.0 * qvar))
        conf = np.mean(densb > thr, axis=1)
        t_err.add(err.astype(float))
        t_out.add(out.astype(float))
        t_conf.add(conf.astype(float))

    err_rate, _, se_err, _ = t_err.summarize()
    out_rate, _, se_out, _ = t_out.summarize()
    conf_rate, _, se_conf, _ = t_conf.summarize()
    rhs = out_rate + kt * m * conf_rate
    se = math.sqrt(se_err**2 + se_out**2 + (kt * m * se_conf)**2)
    ok = err_rate <= rhs + cfg.confidence_sigmas * se
    return McReport(
        check="dt_decoder",
        empirical_mean=err_rate,
        empirical_var=None,
        target_mean=rhs,
        target_var=None,
        std_error={"error": se_err, "outage": se_out, "confusion": se_conf,
                   "combined": se},
        passed=bool(ok),
        trials_used=cfg.trials,
        details={"outage_rate": out_rate, "confusion_rate": conf_rate,
                 "k_tilde": kt, "threshold_bits": thr, "m": m, "snr": snr},
    )


def error_decomposition(err1: np.ndarray, err2: np.ndarray) -> dict:
    """Inclusion-exclusion tally of two error masks on shared trials."""
    err1 = np.asarray(err1, dtype=bool)
    err2 = np.asarray(err2, dtype=bool)
    if err1.shape != err2.shape:
        raise ValueError("error masks must share their shape")
    c1 = int(np.count_nonzero(err1))
    c2 = int(np.count_nonzero(err2))
    cboth = int(np.count_nonzero(err1 & err2))
    ceither = int(np.count_nonzero(err1 | err2))
    return {"n": int(err1.size), "count_1": c1, "count_2": c2,
            "count_both": cboth, "count_either": ceither}


def verify_error_decomposition(cfg: McConfig, m1: int = 8, m2: int = 4) -> McReport:
    """Two-user superposition run checking the error identity path-by-path.

    The weak user threshold-decodes its own message through the
    interference; the strong user early-decodes the weak message,
    cancels it, and decodes its own against an i.i.d. Gaussian codebook.
    On the shared sample paths, Pr[either error] must equal
    eps1 + eps2 - eps_both as an integer-count identity, and the joint
    error can never exceed either marginal.
    """
    if cfg.n1 > 64:
        raise ValueError(f"decomposition run is capped at n1 = 64, got {cfg.n1}")
    if not (1 <= m1 <= 256 and 1 <= m2 <= 256):
        raise ValueError(f"message counts must be in [1, 256], got ({m1}, {m2})")
    s = cfg.scenario
    p1, _ = s.user_powers
    g = effective_gains(s)
    n1, n2 = cfg.n1, cfg.n2
    pb2 = g.p_bar2
    rh1, rh2 = math.sqrt(s.h1), math.sqrt(s.h2)

    sig2_r1 = 1.0 + s.h1 * pb2
    qvar_r1a = s.h1 * p1 + sig2_r1
    qvar_r1b = 1.0 + s.h1 * p1
    thr1 = math.log2(k_tilde(s.h1 * p1)) + math.log2(m1)
    const1 = (0.5 * n2 * math.log(qvar_r1a / sig2_r1)
              + 0.5 * (n1 - n2) * math.log(qvar_r1b))

    sig2_ed = 1.0 + s.h2 * pb2
    qvar_ed = s.h2 * p1 + sig2_ed
    thr_ed = math.log2(k_tilde(g.g2 * p1)) + math.log2(m1)
    const_ed = 0.5 * n2 * math.log(qvar_ed / sig2_ed)

    qvar_2 = 1.0 + s.h2 * pb2
    thr2 = math.log2(m2)
    const2 = 0.5 * n2 * math.log(qvar_2)

    n_err1 = 0
    n_err2 = 0
    n_both = 0
    n_either = 0
    for idx, b in _batches(cfg.trials, _SIM_BATCH):
        rng = substream(cfg.seed, idx)
        c1 = composite_shell_rows(rng, b * m1, n1, n2, p1).reshape(b, m1, n1)
        c2 = rng.standard_normal((b, m2, n2)) * math.sqrt(pb2)
        w1 = rng.integers(0, m1, size=b)
        w2 = rng.integers(0, m2, size=b)
        rows = np.arange(b)
        x = c1[rows, w1, :].copy()
        x[:, :n2] += c2[rows, w2, :]
        y1 = rh1 * x + rng.standard_normal((b, n1))
        y2 = rh2 * x[:, :n2] + rng.standard_normal((b, n2))

        # weak user: two-segment density against every own codeword
        y1a, y1b = y1[:, :n2], y1[:, n2:]
        y1asq = np.einsum("ij,ij->i", y1a, y1a)
        y1bsq = np.einsum("ij,ij->i", y1b, y1b)
        ca, cb = c1[:, :, :n2], c1[:, :, n2:]
        za = (y1asq[:, None]
              - 2.0 * rh1 * np.einsum("bn,bmn->bm", y1a, ca)
              + s.h1 * n2 * p1)
        zb = (y1bsq[:, None]
              - 2.0 * rh1 * np.einsum("bn,bmn->bm", y1b, cb)
              + s.h1 * (n1 - n2) * p1)
        dens1 = LOG2E * (const1
                         - za / (2.0 * sig2_r1)
                         + y1asq[:, None] / (2.0 * qvar_r1a)
                         - 0.5 * zb
                         + y1bsq[:, None] / (2.0 * qvar_r1b))
        hits1 = dens1 >= thr1
        first1 = np.argmax(hits1, axis=1)
        got1 = hits1.any(axis=1)
        err1 = ~(got1 & (first1 == w1))

        # strong user, step 1: early-decode the weak message from the prefix
        y2sq = np.einsum("ij,ij->i", y2, y2)
        zed = (y2sq[:, None]
               - 2.0 * rh2 * np.einsum("bn,bmn->bm", y2, ca)
               + s.h2 * n2 * p1)
        dens_ed = LOG2E * (const_ed
                           - zed / (2.0 * sig2_ed)
                           + y2sq[:, None] / (2.0 * qvar_ed))
        hits_ed = dens_ed >= thr_ed
        first_ed = np.argmax(hits_ed, axis=1)
        got_ed = hits_ed.any(axis=1)

        # step 2: cancel whatever was decoded, then a matched i.i.d. decode
        yt = y2 - rh2 * ca[rows, first_ed, :]
        ytsq = np.einsum("ij,ij->i", yt, yt)
        c2sq = np.einsum("bmn,bmn->bm", c2, c2)
        z2 = (ytsq[:, None]
              - 2.0 * rh2 * np.einsum("bn,bmn->bm", yt, c2)
              + s.h2 * c2sq)
        dens2 = LOG2E * (const2 - 0.5 * z2 + ytsq[:, None] / (2.0 * qvar_2))
        hits2 = dens2 >= thr2
        first2 = np.argmax(hits2, axis=1)
        got2 = hits2.any(axis=1)
        err2 = ~got_ed | ~(got2 & (first2 == w2))

        n_err1 += int(np.count_nonzero(err1))
        n_err2 += int(np.count_nonzero(err2))
        n_both += int(np.count_nonzero(err1 & err2))
        n_either += int(np.count_nonzero(err1 | err2))

    n = cfg.trials
    identity = (n_either == n_err1 + n_err2 - n_both)
    joint_ok = (n_both <= min(n_err1, n_err2))
    either = n_either / n
    se = math.sqrt(max(either * (1.0 - either), 0.0) / n)
    return McReport(
        check="error_decomposition",
        empirical_mean=either,
        empirical_var=None,
        target_mean=(n_err1 + n_err2 - n_both) / n,
        target_var=None,
        std_error={"either": se},
        passed=bool(identity and joint_ok),
        trials_used=n,
        details={"count_1": n_err1, "count_2": n_err2, "count_both": n_both,
                 "count_either": n_either, "m1": m1, "m2": m2,
                 "rate_1": n_err1 / n, "rate_2": n_err2 / n,
                 "rate_both": n_both / n},
    )

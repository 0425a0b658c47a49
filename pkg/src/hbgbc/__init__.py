"""Rate bounds, early-decoding latency and Monte Carlo checks for the
two-user Gaussian broadcast channel with per-user blocklengths."""

from .scalar import LOG2E, cap, disp_iid, disp_shell, q, q_inv
from .scenario import (
    ChannelScenario,
    ORDER_FIRST,
    ORDER_HALFLOGN,
    ORDER_SECOND,
)
from .bounds import (
    RateBounds,
    RhoQuantities,
    effective_gain,
    normal_approx,
    rho_quantities,
    rho_star,
    sato_het,
    sato_hom,
    sato_sum_capacity,
    sato_sum_dispersion,
    single_user_bound,
    sum_rate_bound_rho,
)
from .early_decoding import (
    EdResult,
    EffectiveGains,
    ErrorAllocation,
    InfeasibleError,
    ed_achievable,
    ed_best_allocation,
    ed_min_blocklength,
    effective_gains,
)
from .shell import (
    CompositeShellCodeword,
    RatioPoint,
    k1_prefactor,
    k_tilde,
    ratio_exponent,
    ratio_exponent_at,
    sample_composite_shell,
    shell_surface,
)
from .mc import (
    McConfig,
    McReport,
    error_decomposition,
    simulate_dt_decoder,
    verify_coop_density,
    verify_error_decomposition,
    verify_rx1_density,
    verify_sic1_density,
)
from .timesharing import (
    SecondOrderRatePair,
    pair_rates,
    solo_rate_pair,
    ts_rates,
    ts_region,
)
from .scenario_file import RunSpec, SweepSpec, load_run, parse_run

__version__ = "0.1.0"

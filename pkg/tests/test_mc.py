"""Monte Carlo verification reports: determinism, 4-sigma bands, guards."""

import json

import numpy as np
import pytest

from hbgbc.scenario import ChannelScenario
from hbgbc.shell import sample_composite_shell
from hbgbc.mc import (
    McConfig,
    error_decomposition,
    simulate_dt_decoder,
    substream,
    verify_coop_density,
    verify_error_decomposition,
    verify_rx1_density,
    verify_sic1_density,
)

PAIR = ChannelScenario(h1=1.0, h2=4.0, n1=400, n2=300, eps=2e-6,
                       power_1=1.5, power_2=0.4)
SUMP = ChannelScenario(h1=1.0, h2=4.0, n1=400, n2=300, eps=2e-6,
                       power_sum=1.9)
LOW_SNR = ChannelScenario(h1=0.3, h2=0.5, n1=32, n2=24, eps=1e-3,
                          power_1=2.2, power_2=0.4)


def _cfg(scenario, trials=30000, seed=1701, n1=400, n2=300, **kw):
    return McConfig(trials=trials, seed=seed, n1=n1, n2=n2,
                    scenario=scenario, **kw)


def test_substream_keying():
    a = substream(7, 0).standard_normal(8)
    b = substream(7, 0).standard_normal(8)
    c = substream(7, 1).standard_normal(8)
    d = substream(8, 0).standard_normal(8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(trials=0, seed=1, n1=100, n2=50, scenario=PAIR)
    with pytest.raises(ValueError):
        McConfig(trials=100, seed=1, n1=50, n2=100, scenario=PAIR)
    with pytest.raises(ValueError):
        McConfig(trials=100, seed=1, n1=100, n2=50, scenario=PAIR,
                 confidence_sigmas=0.0)


def test_sic1_density_passes_and_is_deterministic():
    cfg = _cfg(PAIR)
    rep = verify_sic1_density(cfg)
    assert rep.passed
    assert rep.trials_used == cfg.trials
    assert rep.std_error["mean"] > 0.0
    assert abs(rep.empirical_mean - rep.target_mean) <= 4.0 * rep.std_error["mean"]
    again = verify_sic1_density(cfg)
    assert rep == again


def test_rx1_density_passes():
    rep = verify_rx1_density(_cfg(PAIR))
    assert rep.passed
    assert rep.details["n1"] == 400 and rep.details["n2"] == 300
    # blended mean sits strictly between the prefix and tail capacities
    assert rep.target_mean > 0.0


def test_coop_density_passes():
    rep = verify_coop_density(_cfg(SUMP), rho=0.5)
    assert rep.passed
    assert rep.details["rho"] == 0.5
    assert rep.details["tail_energy"] > 0.0


def test_coop_density_explicit_input():
    cfg = _cfg(SUMP, trials=20000)
    x = sample_composite_shell(400, 300, 1.9, seed=42).symbols
    rep = verify_coop_density(cfg, rho=0.3, x=x)
    assert rep.passed
    with pytest.raises(ValueError, match="energy"):
        verify_coop_density(cfg, rho=0.3, x=np.ones(400))
    with pytest.raises(ValueError, match="shape"):
        verify_coop_density(cfg, rho=0.3, x=np.ones(37))
    with pytest.raises(ValueError, match="rho"):
        verify_coop_density(cfg, rho=1.0)


def test_moment_checks_stable_across_seeds():
    for seed in (1, 2, 3):
        rep = verify_sic1_density(_cfg(PAIR, trials=20000, seed=seed))
        assert rep.passed, seed


def test_power_warning_on_tiny_trials():
    cfg = _cfg(PAIR, trials=500)
    with pytest.warns(UserWarning, match="statistical power"):
        rep = verify_sic1_density(cfg)
    assert rep.warnings
    assert "statistical power" in rep.warnings[0]


def test_report_json_form():
    rep = verify_sic1_density(_cfg(PAIR, trials=2000))
    d = rep.to_json_dict()
    assert d["pass"] is True or d["pass"] is False
    assert set(d) >= {"check", "empirical_mean", "target_mean", "std_error",
                      "trials_used", "details"}
    json.dumps(d)


def test_dt_decoder_guards():
    with pytest.raises(ValueError, match="64"):
        simulate_dt_decoder(_cfg(LOW_SNR, n1=128, n2=64), m=8)
    cfg = _cfg(LOW_SNR, n1=32, n2=24)
    with pytest.raises(ValueError, match="m must"):
        simulate_dt_decoder(cfg, m=0)
    with pytest.raises(ValueError, match="m must"):
        simulate_dt_decoder(cfg, m=300)


def test_dt_decoder_bound_holds_with_real_errors():
    cfg = _cfg(LOW_SNR, trials=4000, n1=32, n2=24, seed=77)
    rep = simulate_dt_decoder(cfg, m=16)
    assert rep.passed
    # low snr makes the events actually occur, so the check has teeth
    assert rep.empirical_mean > 0.05
    rhs = rep.target_mean
    se = rep.std_error["combined"]
    assert rep.empirical_mean <= rhs + 4.0 * se
    assert rep.details["k_tilde"] > 1.0


def test_dt_decoder_sum_power_route():
    s = ChannelScenario(h1=0.2, h2=0.3, n1=32, n2=24, eps=1e-3, power_sum=2.0)
    rep = simulate_dt_decoder(_cfg(s, trials=2000, n1=32, n2=24), m=8)
    assert rep.details["snr"] == pytest.approx(0.6)
    assert rep.passed


def test_dt_decoder_deterministic():
    cfg = _cfg(LOW_SNR, trials=2000, n1=32, n2=24, seed=5)
    assert simulate_dt_decoder(cfg, m=16) == simulate_dt_decoder(cfg, m=16)


def test_error_decomposition_helper_counts():
    e1 = np.array([True, True, False, False, True])
    e2 = np.array([True, False, True, False, False])
    d = error_decomposition(e1, e2)
    assert d == {"n": 5, "count_1": 3, "count_2": 2, "count_both": 1,
                 "count_either": 4}
    with pytest.raises(ValueError):
        error_decomposition(e1, e2[:3])


def test_error_decomposition_identity_on_sim():
    cfg = _cfg(LOW_SNR, trials=4000, n1=24, n2=16, seed=909)
    rep = verify_error_decomposition(cfg, m1=8, m2=4)
    assert rep.passed
    d = rep.details
    assert d["count_either"] == d["count_1"] + d["count_2"] - d["count_both"]
    assert d["count_both"] <= min(d["count_1"], d["count_2"])
    # both decoders see enough noise to fail sometimes at this scale
    assert d["count_either"] > 0
    assert rep.empirical_mean == rep.target_mean

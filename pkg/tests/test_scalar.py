"""Scalar building blocks: capacity, dispersions, Q and its inverse."""

import math

import numpy as np
import pytest
from scipy.stats import norm

from hbgbc.scalar import LOG2E, cap, disp_iid, disp_shell, q, q_inv


def test_log2e_constant():
    assert LOG2E == 1.0 / math.log(2.0)


def test_cap_spot_values():
    assert cap(0.0) == 0.0
    assert abs(cap(1.0) - 0.5) < 1e-15
    assert abs(cap(3.0) - 1.0) < 1e-15
    assert abs(cap(100.0) - 0.5 * math.log2(101.0)) < 1e-15


def test_cap_monotone_and_concave():
    xs = np.linspace(0.0, 50.0, 400)
    ys = cap(xs)
    assert np.all(np.diff(ys) > 0.0)
    assert np.all(np.diff(ys, 2) < 1e-12)


def test_dispersions_vanish_at_zero_and_stay_positive():
    assert disp_shell(0.0) == 0.0
    assert disp_iid(0.0) == 0.0
    xs = np.geomspace(1e-6, 1e6, 200)
    assert np.all(disp_shell(xs) > 0.0)
    assert np.all(disp_iid(xs) > 0.0)


def test_shell_dispersion_below_iid():
    # ratio (x+2)/(2(1+x)) < 1 for every x > 0
    xs = np.geomspace(1e-9, 1e9, 300)
    assert np.all(disp_shell(xs) < disp_iid(xs))


def test_dispersion_high_snr_limits():
    assert abs(disp_shell(1e12) - 0.5 * LOG2E**2) < 1e-9
    assert abs(disp_iid(1e12) - LOG2E**2) < 1e-9


def test_q_matches_erfc_form():
    xs = np.linspace(-8.0, 8.0, 161)
    ref = norm.sf(xs)
    got = q(xs)
    assert np.allclose(got, ref, rtol=1e-13, atol=1e-300)


def test_q_inv_matches_scipy_isf():
    # the package's own Newton solver against scipy's quantile
    ps = np.concatenate([
        np.geomspace(1e-12, 0.4999, 600),
        1.0 - np.geomspace(1e-12, 0.4999, 600),
        [0.5],
    ])
    for p in ps:
        want = norm.isf(float(p))
        got = q_inv(float(p))
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), (p, got, want)


def test_q_inv_round_trip():
    rng = np.random.default_rng(20240817)
    for _ in range(300):
        p = float(10.0 ** rng.uniform(-11.0, -0.31))
        assert abs(q(q_inv(p)) - p) <= 1e-10 * p


def test_q_inv_symmetry_and_center():
    assert q_inv(0.5) == 0.0
    # dyadic p so that 1 - p is exact in binary
    for p in (0.25, 0.125, 0.0625, 0.375):
        assert abs(q_inv(p) + q_inv(1.0 - p)) < 1e-12


def test_q_inv_rejects_out_of_range():
    for bad in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            q_inv(bad)


def test_snr_domain_checks():
    with pytest.raises(ValueError):
        cap(-0.5)
    with pytest.raises(ValueError):
        disp_shell(-1e-9)

"""Composite shell codebooks and the output density-ratio machinery."""

import math

import numpy as np
import pytest

import oracles
from hbgbc.shell import (
    CompositeShellCodeword,
    RatioPoint,
    composite_shell_rows,
    k1_prefactor,
    k_tilde,
    output_ratio_samples,
    ratio_exponent,
    ratio_exponent_at,
    sample_composite_shell,
    shell_surface,
)


def test_sampled_codeword_segment_norms():
    cw = sample_composite_shell(n1=96, n2=60, power=3.0, seed=91)
    x = cw.symbols
    assert x.shape == (96,)
    assert cw.split == 60
    head = float(np.dot(x[:60], x[:60]))
    tail = float(np.dot(x[60:], x[60:]))
    assert head == pytest.approx(60 * 3.0, rel=1e-12)
    assert tail == pytest.approx(36 * 3.0, rel=1e-12)


def test_sampling_deterministic_in_seed():
    a = sample_composite_shell(48, 30, 1.5, seed=7)
    b = sample_composite_shell(48, 30, 1.5, seed=7)
    c = sample_composite_shell(48, 30, 1.5, seed=8)
    assert np.array_equal(a.symbols, b.symbols)
    assert not np.array_equal(a.symbols, c.symbols)


def test_sampling_accepts_generator():
    rng = np.random.default_rng(1234)
    a = sample_composite_shell(48, 30, 1.5, seed=rng)
    rng = np.random.default_rng(1234)
    b = sample_composite_shell(48, 30, 1.5, seed=rng)
    assert np.array_equal(a.symbols, b.symbols)


def test_codebook_rows_all_on_shell():
    rng = np.random.default_rng(5)
    rows = composite_shell_rows(rng, m=32, n1=40, n2=24, power=2.0)
    assert rows.shape == (32, 40)
    head = np.sum(rows[:, :24] ** 2, axis=1)
    tail = np.sum(rows[:, 24:] ** 2, axis=1)
    assert np.allclose(head, 48.0, rtol=1e-12)
    assert np.allclose(tail, 32.0, rtol=1e-12)


def test_codeword_validation_rejects_off_shell():
    # all-ones satisfies the power-1 shell but not the power-2 one
    x = np.ones(10)
    CompositeShellCodeword(symbols=x, split=6, power=1.0)
    with pytest.raises(ValueError):
        CompositeShellCodeword(symbols=x, split=6, power=2.0)


def test_shell_surface_matches_gamma_form():
    rng = np.random.default_rng(77)
    for _ in range(200):
        n = int(rng.integers(1, 600))
        r = float(10.0 ** rng.uniform(-2.0, 3.0))
        got = shell_surface(n, r)
        want = oracles.shell_surface_oracle(n, r)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_shell_surface_small_dimensions():
    # n = 1: two points; n = 2: circumference 2 pi r; n = 3: 4 pi r^2
    assert shell_surface(1, 2.5) == pytest.approx(math.log(2.0))
    assert shell_surface(2, 2.5) == pytest.approx(math.log(2.0 * math.pi * 2.5))
    assert shell_surface(3, 2.5) == pytest.approx(math.log(4.0 * math.pi * 2.5**2))


def test_ratio_exponent_nonnegative_on_grids():
    for P in (0.5, 1.0, 10.0):
        for p in (0.1, 0.5, 0.9):
            ts = np.geomspace(1e-3 * (1.0 + P), 8.0 * (1.0 + P), 80)
            ti, tii = np.meshgrid(ts, ts)
            f = ratio_exponent_at(P, ti, tii, p)
            assert np.all(f >= -1e-12), (P, p, float(f.min()))


def test_ratio_exponent_zero_at_stationary_point():
    for P in (0.5, 1.0, 10.0):
        for p in (0.1, 0.5, 0.9):
            pt = RatioPoint(t_i=1.0 + P, t_ii=1.0 + P, p=p, power=P)
            assert abs(ratio_exponent(pt)) <= 1e-12
            # any small perturbation moves uphill
            for da, db in ((1e-4, 0.0), (0.0, 1e-4), (-1e-4, 1e-4)):
                f = ratio_exponent_at(P, 1.0 + P + da, 1.0 + P + db, p)
                assert float(f) >= 0.0


def test_ratio_exponent_matches_oracle():
    rng = np.random.default_rng(31133)
    for _ in range(200):
        P = float(10.0 ** rng.uniform(-1.0, 1.5))
        p = float(rng.uniform(0.05, 0.95))
        ti = float(10.0 ** rng.uniform(-2.0, 1.5))
        tii = float(10.0 ** rng.uniform(-2.0, 1.5))
        got = float(ratio_exponent_at(P, ti, tii, p))
        want = float(oracles.ratio_exponent_oracle(P, ti, tii, p))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)


def test_prefactor_at_stationary_point_equals_k_tilde():
    for P in (0.2, 1.0, 10.0, 40.0):
        assert k1_prefactor(P, 1.0 + P, 1.0 + P) == pytest.approx(k_tilde(P), rel=1e-12)


def test_k_tilde_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(50):
        P = float(10.0 ** rng.uniform(-1.5, 2.0))
        assert k_tilde(P) == pytest.approx(oracles.k_tilde_oracle(P), rel=1e-13)
    assert k_tilde(10.0) == pytest.approx(1649.5044427410837, abs=1e-9)


def test_output_ratio_samples_behaved():
    vals = output_ratio_samples(n1=24, n2=16, power=1.0, n_outputs=2000,
                                n_mixture=2048, seed=99)
    assert vals.shape == (2000,)
    assert np.all(np.isfinite(vals))
    assert np.all(vals > 0.0)
    # unbiased against the i.i.d. Gaussian reference, so the sample mean
    # hovers near one; the cap holds with room at this dimension
    assert 0.5 < float(vals.mean()) < 2.0
    assert float(vals.max()) < k_tilde(1.0)


def test_output_ratio_samples_deterministic():
    a = output_ratio_samples(16, 10, 1.0, 64, 256, seed=4)
    b = output_ratio_samples(16, 10, 1.0, 64, 256, seed=4)
    assert np.array_equal(a, b)

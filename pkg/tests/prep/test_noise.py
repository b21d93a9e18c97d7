import math

import numpy as np
import pytest
from scipy import stats

from snrgsim.errors import DomainError
from snrgsim.prep import noise as nz

B = 2 * math.pi * 42e3
TAU_C = 230e-6
P = nz.OuParams(b=B, tau_c=TAU_C)


def test_zero_coupling_gives_zero_trace():
    tr = nz.ou_trace(nz.OuParams(b=0.0, tau_c=TAU_C), dt=1e-6, n=100, seed=0)
    assert len(tr) == 100
    assert not tr.values.any()
    assert tr.t[-1] == pytest.approx(99e-6)


def test_ou_ensemble_is_stationary_with_exponential_correlation():
    x = nz.ou_ensemble(P, dt=TAU_C / 10, n=21, count=20_000, seed=1)
    for k in (0, 10, 20):
        assert np.var(x[:, k]) == pytest.approx(B**2, rel=0.05)
    rho = np.mean(x[:, 0] * x[:, 10]) / B**2
    assert rho == pytest.approx(math.exp(-1), abs=0.03)


def test_exact_recursion_matches_euler_maruyama():
    t_end, count = TAU_C / 2, 5_000
    exact = nz.ou_ensemble(P, dt=t_end, n=2, count=count, seed=2)[:, -1]

    rng = np.random.default_rng(3)
    steps = 500
    h = t_end / steps
    x = B * rng.standard_normal(count)
    for _ in range(steps):
        x += -x / TAU_C * h + B * math.sqrt(2 * h / TAU_C) * rng.standard_normal(count)
    assert stats.ks_2samp(exact, x).pvalue > 1e-3


def test_traces_are_reproducible():
    a = nz.ou_trace(P, dt=1e-6, n=50, seed=5)
    b = nz.ou_trace(P, dt=1e-6, n=50, seed=5)
    c = nz.ou_trace(P, dt=1e-6, n=50, seed=6)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_invalid_trace_arguments():
    with pytest.raises(DomainError):
        nz.ou_trace(P, dt=0.0, n=10, seed=0)
    with pytest.raises(DomainError):
        nz.ou_trace(P, dt=1e-6, n=0, seed=0)
    with pytest.raises(DomainError):
        nz.NoiseTrace(dt=1e-6, values=np.array([0.0, np.inf]))


def test_parameter_validation():
    with pytest.raises(DomainError):
        nz.OuParams(b=-1.0, tau_c=TAU_C)
    with pytest.raises(DomainError):
        nz.OuParams(b=B, tau_c=0.0)
    with pytest.raises(DomainError):
        nz.DdImperfection(sigma=-0.1)


def test_quasi_static_moments():
    x = np.array([nz.quasi_static_sample(P, seed) for seed in range(5_000)])
    assert abs(x.mean()) < 4 * B / math.sqrt(len(x))
    assert x.std() == pytest.approx(B, rel=0.05)


def test_perturb_pi():
    rng = nz.make_rng(0)
    assert nz.perturb_pi(nz.DdImperfection(0.0), rng) == math.pi
    angles = nz.perturb_pi(nz.DdImperfection(0.085), rng, size=100_000)
    assert angles.shape == (100_000,)
    assert np.mean(angles) == pytest.approx(math.pi, rel=1e-3)
    assert np.std(angles) / math.pi == pytest.approx(0.085, rel=0.02)
    assert abs(stats.skew(angles)) < 0.05


def test_shot_streams_are_reproducible_and_independent():
    s1, s2 = nz.shot_streams(11, 4), nz.shot_streams(11, 4)
    assert s1.bath.standard_normal(5).tolist() == s2.bath.standard_normal(5).tolist()
    s = nz.shot_streams(11, 4)
    assert s.bath.standard_normal(5).tolist() != s.pulses.standard_normal(5).tolist()
    assert (
        nz.shot_streams(11, 5).bath.standard_normal()
        != nz.shot_streams(11, 4).bath.standard_normal()
    )


def test_free_induction_decay_gives_measured_t2_star():
    times = np.arange(0, 301) * 0.05e-6
    coherence = nz.free_induction_decay(P, times, count=4_000, seed=0)
    assert coherence[0] == pytest.approx(1.0)
    t2 = nz.t2_star(times, coherence)
    assert 4e-6 <= t2 <= 6e-6
    assert t2 == pytest.approx(math.sqrt(2) / B, rel=0.05)


def test_t2_star_needs_a_decay():
    times = np.linspace(0, 1e-6, 11)
    with pytest.raises(DomainError):
        nz.t2_star(times, np.ones_like(times))

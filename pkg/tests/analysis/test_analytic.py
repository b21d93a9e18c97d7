import math

import numpy as np
import pytest

from snrgsim.analysis import analytic as an
from snrgsim.core import spincore as sc
from snrgsim.errors import DomainError, NoCrossingError, OnResonanceFailure

OMEGA = 2 * math.pi * 54e3


def test_transfer_probability():
    t_pi = math.pi / OMEGA
    assert an.transfer_probability(OMEGA, 0.0, t_pi) == pytest.approx(1.0)
    assert an.transfer_probability(OMEGA, OMEGA, t_pi) == pytest.approx(0.3166, abs=1e-4)
    assert an.transfer_probability(OMEGA, 0.0, 0.0) == 0
    p = an.transfer_probability(OMEGA, np.array([-1.0, 1.0]) * OMEGA, t_pi)
    assert p[0] == p[1]


def test_transfer_probability_rejects_bad_arguments():
    with pytest.raises(DomainError):
        an.transfer_probability(0.0, 0.0, 1e-6)
    with pytest.raises(DomainError):
        an.transfer_probability(OMEGA, 0.0, -1e-6)


def test_ideal_pi_fidelity():
    assert an.ideal_pi_fidelity(0.0) == pytest.approx(1.0)
    assert an.ideal_pi_fidelity(1.0) == pytest.approx(0.1002, abs=1e-4)
    assert an.ideal_pi_fidelity(5.0) == pytest.approx(1.4e-3, abs=0.2e-3)
    assert an.ideal_pi_fidelity(1.0) == pytest.approx(
        an.transfer_probability(OMEGA, OMEGA, math.pi / OMEGA) ** 2
    )


def test_ideal_bandwidth_is_the_rabi_frequency():
    r = an.bandwidth_from_curve(an.FidelityCurve.ideal(), rtol=1e-6)
    assert 1.0 < r < 1.01
    assert an.ideal_pi_fidelity(r) == pytest.approx(an.BANDWIDTH_THRESHOLD, abs=1e-5)


def test_bandwidth_on_sampled_curve_interpolates():
    c = an.FidelityCurve(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.0]))
    assert c(1.5) == pytest.approx(0.25)
    assert an.bandwidth_from_curve(c, threshold=0.25, rtol=1e-9) == pytest.approx(1.5)


def test_bandwidth_failures():
    with pytest.raises(OnResonanceFailure):
        an.bandwidth_from_curve(an.FidelityCurve(np.array([0.0, 1.0]), np.array([0.05, 0.0])))
    with pytest.raises(NoCrossingError):
        an.bandwidth_from_curve(an.FidelityCurve(np.array([0.0, 1.0]), np.array([1.0, 0.9])))


def test_fidelity_curve_validation():
    with pytest.raises(DomainError):
        an.FidelityCurve(np.array([0.0]), np.array([1.0]))
    with pytest.raises(DomainError):
        an.FidelityCurve(np.array([1.0, 0.0]), np.array([1.0, 0.5]))
    with pytest.raises(DomainError):
        an.FidelityCurve(np.array([0.0, 1.0]), np.array([1.0, 1.5]))


def test_bisect_crossing():
    r = an.bisect_crossing(lambda x: 1 - x, 0.0, 1.0, threshold=0.25, rtol=1e-6)
    assert r == pytest.approx(0.75, rel=1e-5)


def test_transfer_probability_matches_propagator():
    rng = np.random.default_rng(11)
    for _ in range(200):
        omega = rng.uniform(0.1, 5) * OMEGA
        delta = rng.normal(0, 3) * OMEGA
        t = rng.uniform(0, 50e-6)
        u = sc.propagator(sc.DriveParams(omega=omega, delta=delta, duration=t))
        assert an.transfer_probability(omega, delta, t) == pytest.approx(
            sc.transfer_matrix_element(u), abs=1e-10
        )


def test_ideal_pi_fidelity_is_even_and_below_its_envelope():
    r = np.linspace(0, 20, 2001)
    f = an.ideal_pi_fidelity(r)
    assert np.array_equal(f, an.ideal_pi_fidelity(-r))
    assert np.all(f <= 1 / (1 + r**2) ** 2 + 1e-15)
    assert np.all(f >= 0)

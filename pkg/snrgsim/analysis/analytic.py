"""Closed-form figures of merit of a detuned pi gate and the bandwidth rule."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from snrgsim.errors import DomainError, NoCrossingError, OnResonanceFailure

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

BANDWIDTH_THRESHOLD = 0.1


def transfer_probability(omega: float, delta: float, t: float) -> float:
    """Generalized Rabi formula: population of |-1> after driving |0> for time `t`.

    Args:
        omega: Rabi frequency in rad/s.
        delta: Detuning in rad/s.
        t: Drive time in s.
    """
    if omega <= 0:
        raise DomainError(f"Rabi frequency must be positive, got {omega}")
    if np.any(np.asarray(t) < 0):
        raise DomainError("Drive time must be non-negative.")
    rho2 = omega**2 + np.square(delta)
    return omega**2 / rho2 * (1 - np.cos(np.sqrt(rho2) * t)) / 2


def ideal_pi_fidelity(r):
    """Fidelity of a pi pulse of a spin detuned by r = delta / omega, the squared transfer
    probability."""
    x = 1 + np.square(r)
    return ((1 - np.cos(np.pi * np.sqrt(x))) / (2 * x)) ** 2


@dataclass(frozen=True)
class FidelityCurve:
    """Fidelity over the detuning ratio r = delta / omega.

    `evaluator` optionally computes f at any r; bandwidth refinement then bisects on it instead
    of on the linear interpolant of the points.
    """

    r: np.ndarray
    f: np.ndarray
    evaluator: Optional[Callable[[float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if r.shape != f.shape or r.ndim != 1 or len(r) < 2:
            raise DomainError("A fidelity curve needs two equally long 1-D arrays of >= 2 points.")
        if np.any(np.diff(r) <= 0):
            raise DomainError("Detuning ratios must be strictly increasing.")
        if np.any((f < 0) | (f > 1)):
            raise DomainError("Fidelities must lie in [0, 1].")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "f", f)

    @classmethod
    def ideal(cls, r_max: float = 6.0, n: int = 601) -> FidelityCurve:
        r = np.linspace(0, r_max, n)
        return cls(r, ideal_pi_fidelity(r), evaluator=ideal_pi_fidelity)

    def __call__(self, r: float) -> float:
        if self.evaluator is not None:
            return float(self.evaluator(r))
        return float(np.interp(r, self.r, self.f))


def bisect_crossing(
    func: Callable[[float], float], lo: float, hi: float, threshold: float, rtol: float = 1e-3
) -> float:
    """Bisects [lo, hi] with func(lo) >= threshold > func(hi) down to a relative width `rtol`."""
    assert lo < hi, "empty bracket"
    while hi - lo > rtol * hi:
        mid = (lo + hi) / 2
        if func(mid) < threshold:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def bandwidth_from_curve(
    c: FidelityCurve, threshold: float = BANDWIDTH_THRESHOLD, rtol: float = 1e-3
) -> float:
    """Returns the first detuning ratio r at which the fidelity drops below `threshold`.

    Multiply by the Rabi frequency to get the bandwidth in rad/s.
    """
    if c.f[0] <= threshold:
        raise OnResonanceFailure(
            f"On-resonance fidelity {c.f[0]:.4g} is not above the threshold {threshold}."
        )
    below = np.flatnonzero(c.f < threshold)
    if len(below) == 0:
        raise NoCrossingError(f"Fidelity stays above {threshold} up to r = {c.r[-1]:.4g}.")
    i = below[0]
    return bisect_crossing(c, c.r[i - 1], c.r[i], threshold=threshold, rtol=rtol)

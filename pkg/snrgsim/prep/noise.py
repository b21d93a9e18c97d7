"""Stochastic inputs: Ornstein-Uhlenbeck bath detuning and DD pulse angle errors.

All randomness comes from numpy `Generator(PCG64(...))` instances seeded through
`SeedSequence`. A shot's streams derive from `SeedSequence([master_seed, shot_index])` so any
shot can be reproduced on its own, independent of how shots are distributed over workers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from snrgsim.errors import DomainError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)


@dataclass(frozen=True)
class OuParams:
    """Bath coupling `b` (rad/s) and correlation time `tau_c` (s) of the detuning process with
    autocorrelation b^2 exp(-t / tau_c)."""

    b: float
    tau_c: float

    def __post_init__(self):
        if self.b < 0:
            raise DomainError(f"Bath coupling must be non-negative, got {self.b}")
        if self.tau_c <= 0:
            raise DomainError(f"Correlation time must be positive, got {self.tau_c}")


@dataclass(frozen=True)
class NoiseTrace:
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) < 1:
            raise DomainError("A noise trace holds at least one sample.")
        if not np.all(np.isfinite(values)):
            raise DomainError("Noise trace contains non-finite values.")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self)) * self.dt


@dataclass(frozen=True)
class DdImperfection:
    """Relative standard deviation `sigma` of the DD pulse rotation angle.

    With `per_shot` one error is shared by all pulses of a shot, otherwise each pulse draws its
    own.
    """

    sigma: float = 0.0
    per_shot: bool = False

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError(f"Pulse imperfection must be non-negative, got {self.sigma}")


class ShotStreams(NamedTuple):
    bath: np.random.Generator
    pulses: np.random.Generator


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.PCG64(ss))


def shot_streams(master_seed: int, shot_index: int) -> ShotStreams:
    """Independent bath and pulse generators of one Monte Carlo shot."""
    root = np.random.SeedSequence([master_seed, shot_index])
    ss_bath, ss_pulses = root.spawn(2)
    return ShotStreams(bath=make_rng(ss_bath), pulses=make_rng(ss_pulses))


def ou_recursion(xi: np.ndarray, dts: np.ndarray, p: OuParams) -> np.ndarray:
    """Exact discretization of the stationary OU process.

    Args:
        xi: Standard normal draws, shape (..., n). The first column seeds the stationary start.
        dts: The n - 1 step widths between consecutive samples.
        p: Process parameters.

    Returns:
        Samples of shape (..., n) with delta_0 = b xi_0 and
        delta_k = delta_{k-1} exp(-dt/tau_c) + b sqrt(1 - exp(-2 dt/tau_c)) xi_k.
    """
    xi = np.asarray(xi, dtype=float)
    dts = np.asarray(dts, dtype=float)
    assert xi.shape[-1] == len(dts) + 1, "need one step width less than draws"
    decay = np.exp(-dts / p.tau_c)
    scale = p.b * np.sqrt(-np.expm1(-2 * dts / p.tau_c))
    out = np.empty_like(xi)
    out[..., 0] = p.b * xi[..., 0]
    for k in range(1, xi.shape[-1]):
        out[..., k] = out[..., k - 1] * decay[k - 1] + scale[k - 1] * xi[..., k]
    return out


def ou_trace(p: OuParams, dt: float, n: int, seed: int) -> NoiseTrace:
    if dt <= 0:
        raise DomainError(f"Sampling step must be positive, got {dt}")
    if n < 1:
        raise DomainError(f"A trace needs at least one sample, got n={n}")
    xi = make_rng(seed).standard_normal(n)
    return NoiseTrace(dt=dt, values=ou_recursion(xi, np.full(n - 1, dt), p))


def ou_ensemble(p: OuParams, dt: float, n: int, count: int, seed: int) -> np.ndarray:
    """Returns `count` independent traces of length `n` as array of shape (count, n)."""
    if dt <= 0:
        raise DomainError(f"Sampling step must be positive, got {dt}")
    xi = make_rng(seed).standard_normal((count, n))
    return ou_recursion(xi, np.full(n - 1, dt), p)


def quasi_static_sample(p: OuParams, seed: int) -> float:
    return float(p.b * make_rng(seed).standard_normal())


def perturb_pi(
    imp: DdImperfection, rng: np.random.Generator, size: Optional[int] = None
) -> Union[float, np.ndarray]:
    """Returns pi (1 + eta) with eta ~ N(0, sigma^2); one draw per requested pulse."""
    eta = imp.sigma * rng.standard_normal(size)
    return math.pi * (1 + eta)


def free_induction_decay(
    p: OuParams, times: np.ndarray, count: int = 10_000, seed: int = 0
) -> np.ndarray:
    """Coherence |<exp(i int_0^t delta dt')>| of a freely precessing spin on an equidistant grid
    `times` starting at 0."""
    times = np.asarray(times, dtype=float)
    dt = times[1] - times[0]
    assert times[0] == 0 and np.allclose(np.diff(times), dt), "need an equidistant grid from 0"
    traces = ou_ensemble(p, dt=dt, n=len(times), count=count, seed=seed)
    # trapezoidal phase integral
    phase = np.zeros_like(traces)
    phase[:, 1:] = np.cumsum((traces[:, 1:] + traces[:, :-1]) * dt / 2, axis=1)
    return np.abs(np.exp(1j * phase).mean(axis=0))


def t2_star(times: np.ndarray, coherence: np.ndarray) -> float:
    """Returns the first time at which `coherence` drops below 1/e, linearly interpolated."""
    below = np.flatnonzero(coherence < math.exp(-1))
    if len(below) == 0:
        raise DomainError("Coherence stays above 1/e on the given time grid.")
    i = below[0]
    assert i > 0, "coherence must start at 1"
    t0, t1, c0, c1 = times[i - 1], times[i], coherence[i - 1], coherence[i]
    return float(t0 + (c0 - math.exp(-1)) * (t1 - t0) / (c0 - c1))

"""Exact two-level spin algebra.

The qubit basis is (|m_s=0>, |m_s=-1>) and the spin operators are S_k = sigma_k / 2. A drive of
Rabi frequency `omega` along the azimuth `phi` together with a z detuning `delta` gives

    H = omega * (cos(phi) S_x + sin(phi) S_y) + delta * S_z,

and a segment of length `duration` evolves with U = exp(-i * duration * H).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

import numpy as np

from snrgsim.errors import DomainError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

ArrayLike = Union[float, np.ndarray]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class SpinState:
    amp0: complex
    amp1: complex

    def __post_init__(self):
        norm = abs(self.amp0) ** 2 + abs(self.amp1) ** 2
        if abs(norm - 1) > 1e-12:
            raise DomainError(f"State is not normalized: |amp0|^2 + |amp1|^2 = {norm}")

    @classmethod
    def ground(cls) -> SpinState:
        """Returns |m_s=0>."""
        return cls(1.0 + 0j, 0j)

    @classmethod
    def from_vector(cls, v: np.ndarray) -> SpinState:
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)

    @property
    def p1(self) -> float:
        """Population of |m_s=-1>."""
        return abs(self.amp1) ** 2


@dataclass(frozen=True, eq=False)
class Propagator:
    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        assert u.shape == (2, 2), f"Propagator needs a 2x2 matrix, got shape {u.shape}"
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def dagger(self) -> Propagator:
        return Propagator(self.u.conj().T)

    def __matmul__(self, other: Propagator) -> Propagator:
        return Propagator(self.u @ other.u)


@dataclass(frozen=True)
class DriveParams:
    omega: float
    phi: float = 0.0
    delta: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise DomainError(f"Rabi frequency must be non-negative, got {self.omega}")
        if self.duration < 0:
            raise DomainError(f"Duration must be non-negative, got {self.duration}")

    @property
    def theta(self) -> float:
        return self.omega * self.duration


def su2_rotation(angle: ArrayLike, phi: ArrayLike, z_angle: ArrayLike) -> np.ndarray:
    """Closed-form SU(2) matrices for rotation products.

    `angle` is omega * duration, `z_angle` is delta * duration. All arguments broadcast against
    each other and the result has shape (*broadcast_shape, 2, 2). A vanishing total angle gives
    the identity.
    """
    angle, phi, z_angle = np.broadcast_arrays(
        np.asarray(angle, dtype=float), np.asarray(phi, dtype=float), np.asarray(z_angle, float)
    )
    rho = np.hypot(angle, z_angle)
    half = rho / 2
    c = np.cos(half)
    with np.errstate(invalid="ignore", divide="ignore"):
        s_over_rho = np.where(rho > 0, np.sin(half) / np.where(rho > 0, rho, 1.0), 0.0)
    nx = angle * np.cos(phi) * s_over_rho
    ny = angle * np.sin(phi) * s_over_rho
    nz = z_angle * s_over_rho

    u = np.empty(angle.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c - 1j * nz
    u[..., 0, 1] = -1j * nx - ny
    u[..., 1, 0] = -1j * nx + ny
    u[..., 1, 1] = c + 1j * nz
    return u


def propagator(p: DriveParams) -> Propagator:
    return Propagator(su2_rotation(p.omega * p.duration, p.phi, p.delta * p.duration))


def rotation(angle: float, phi: float = 0.0, z_angle: float = 0.0) -> Propagator:
    """Propagator of a rotation by `angle` about the equatorial axis `phi`, e.g. pi_X or pi_Y."""
    return Propagator(su2_rotation(angle, phi, z_angle))


def apply(u: Propagator, s: SpinState) -> SpinState:
    return SpinState.from_vector(u.u @ s.vector)


def compose(us: Iterable[Propagator]) -> Propagator:
    """Returns the product of `us` where the first element acts first."""
    us = list(us)
    if not us:
        raise DomainError("Cannot compose an empty list of propagators.")
    return Propagator(reduce(lambda acc, u: u.u @ acc, us[1:], us[0].u))


def sz_expectation(s: SpinState) -> float:
    return (abs(s.amp0) ** 2 - abs(s.amp1) ** 2) / 2


def population_p1(s: SpinState) -> float:
    return s.p1


def distance_mod_phase(u: Propagator, v: Propagator) -> float:
    """Returns min over alpha of the operator norm of U - exp(i alpha) V.

    With W = V^dagger U and eigenphases b1, b2 of W, the minimum is 2 sin(|b1 - b2| / 4) where
    |b1 - b2| is taken on the shorter arc.
    """
    w = v.u.conj().T @ u.u
    lam = np.linalg.eigvals(w)
    spread = abs(np.angle(lam[0] / lam[1]))
    return float(2 * np.sin(spread / 4))


def transfer_matrix_element(u: Propagator) -> float:
    """|<-1|U|0>|^2."""
    return float(abs(u.u[1, 0]) ** 2)

"""Timelines of the Rabi, DPG and SNRG control schemes.

A `Sequence` is an ordered tuple of `Segment`s. Drive segments rotate the spin about the drive
axis, DD pulses are pi rotations about X or Y, and wait segments only precess. Every segment
carries the sign with which the gradient detuning `delta_z` acts during it.

XY-8 timelines track the toggling frame of the pulses applied so far with two signs: `fx`
flips at every pi_Y (the drive phase is inverted while it is -1) and `fz` flips at every pulse
(the gradient follows it in SNRG). In this frame every drive piece of an SNRG sequence is the
same rotation about +x with detuning +delta_z, so the gate composes to one detuned rotation.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from snrgsim.core import spincore as sc
from snrgsim.errors import DomainError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

X_AXIS = 0.0
Y_AXIS = math.pi / 2
XY8_AXES = (X_AXIS, Y_AXIS, X_AXIS, Y_AXIS, Y_AXIS, X_AXIS, Y_AXIS, X_AXIS)


class SegmentKind(enum.Enum):
    DRIVE = "drive"
    DD_PULSE = "dd_pulse"
    WAIT = "wait"


class Scheme(enum.Enum):
    RABI = "rabi"
    DPG_CPMG = "dpg_cpmg"
    DPG_XY8 = "dpg_xy8"
    SNRG_XY8 = "snrg"


@dataclass(frozen=True)
class Segment:
    """One piecewise-constant interval of a sequence.

    `angle` is the nominal rotation angle (omega * duration for drives, pi for DD pulses, which
    may be instantaneous with duration 0). `frame_sign` is the toggling-frame sign of the drive
    axis during the segment.
    """

    kind: SegmentKind
    omega: float
    phi: float
    detuning_sign: int
    duration: float
    angle: float
    frame_sign: int = 1

    def __post_init__(self):
        if self.detuning_sign not in (-1, 0, 1):
            raise DomainError(f"Detuning sign must be -1, 0 or +1, got {self.detuning_sign}")
        if self.duration < 0 or (self.kind is SegmentKind.DRIVE and self.duration <= 0):
            raise DomainError(f"Infeasible {self.kind.value} duration {self.duration}")

    @classmethod
    def drive(
        cls, omega: float, duration: float, phi: float = 0.0, sign: int = 1, frame_sign: int = 1
    ) -> Segment:
        return cls(SegmentKind.DRIVE, omega, phi, sign, duration, omega * duration, frame_sign)

    @classmethod
    def pulse(cls, axis: float, eps: float, sign: int = 0) -> Segment:
        omega = math.pi / eps if eps > 0 else math.inf
        return cls(SegmentKind.DD_PULSE, omega, axis, sign, eps, math.pi)

    @classmethod
    def wait(cls, duration: float, sign: int = 1) -> Segment:
        return cls(SegmentKind.WAIT, 0.0, 0.0, sign, duration, 0.0)

    def ideal_propagator(self, delta_z: float) -> sc.Propagator:
        return sc.rotation(self.angle, self.phi, delta_z * self.detuning_sign * self.duration)


@dataclass(frozen=True)
class Sequence:
    segments: Tuple[Segment, ...]
    n_cycles: int
    scheme: Scheme
    total_theta: float
    omega: float
    delta_z: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise DomainError("A sequence needs at least one segment.")
        assert abs(self.accumulated_theta - self.total_theta) < 1e-9 * max(1, self.total_theta), (
            f"drive segments accumulate {self.accumulated_theta}, expected {self.total_theta}"
        )

    def __len__(self):
        return len(self.segments)

    @property
    def accumulated_theta(self) -> float:
        """Rotation accumulated about the target axis in the toggling frame."""
        return sum(
            s.frame_sign * math.cos(s.phi - self.phi) * s.angle
            for s in self.segments
            if s.kind is SegmentKind.DRIVE
        )

    @property
    def wall_time(self) -> float:
        return math.fsum(s.duration for s in self.segments)

    @property
    def drive_time(self) -> float:
        return math.fsum(s.duration for s in self.segments if s.kind is SegmentKind.DRIVE)

    @property
    def pulse_count(self) -> int:
        return sum(s.kind is SegmentKind.DD_PULSE for s in self.segments)

    def boundaries(self) -> np.ndarray:
        """Start times of all segments followed by the end time."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def extended(self, tail: float) -> Sequence:
        """Appends a plain drive of length `tail` in the laboratory frame, valid after complete
        DD cycles."""
        if tail <= 0:
            return self
        seg = Segment.drive(self.omega, tail, phi=self.phi)
        return replace(
            self, segments=self.segments + (seg,), total_theta=self.total_theta + seg.angle
        )

    def __repr__(self):
        return (
            f"<Sequence {self.scheme.value}: {len(self)} segments, {self.pulse_count} pulses, "
            f"N={self.n_cycles}, theta={self.total_theta:.4g}, wall time={self.wall_time:.4g} s>"
        )


def compile_sequence(seq: Sequence, delta_z: Optional[float] = None) -> sc.Propagator:
    """Noise-free propagator of the whole sequence, optionally at another gradient detuning."""
    dz = seq.delta_z if delta_z is None else delta_z
    return sc.compose(s.ideal_propagator(dz) for s in seq.segments)


def _check_gate(theta: float, omega: float):
    if omega <= 0:
        raise DomainError(f"Rabi frequency must be positive, got {omega}")
    if theta <= 0:
        raise DomainError(f"Rotation angle must be positive, got {theta}")


def _check_cycles(n: int, eps: float):
    if n < 1:
        raise DomainError(f"Need at least one cycle, got n={n}")
    if eps < 0:
        raise DomainError(f"Pulse duration must be non-negative, got {eps}")


def build_rabi(omega: float, theta: float, phi: float = 0.0, delta_z: float = 0.0) -> Sequence:
    _check_gate(theta, omega)
    seg = Segment.drive(omega, theta / omega, phi=phi)
    return Sequence((seg,), 1, Scheme.RABI, theta, omega, delta_z=delta_z, phi=phi)


def build_dpg_cpmg(
    n: int, theta: float, omega: float, eps: float, phi: float = 0.0, delta_z: float = 0.0
) -> Sequence:
    """N repetitions of [drive theta/2N, pi_X, drive theta/2N, pi_X] with a constant gradient."""
    _check_gate(theta, omega)
    _check_cycles(n, eps)
    tau_bar = theta / (2 * n * omega)
    segments: List[Segment] = []
    for _ in range(2 * n):
        segments.append(Segment.drive(omega, tau_bar, phi=phi))
        segments.append(Segment.pulse(phi + X_AXIS, eps, sign=1))
    return Sequence(segments, n, Scheme.DPG_CPMG, theta, omega, delta_z=delta_z, phi=phi)


def _xy8_segments(
    n: int,
    theta: float,
    omega: float,
    eps: float,
    spacing: Optional[float],
    alternate_gradient: bool,
    phi: float,
) -> List[Segment]:
    tau_bar = theta / (8 * n * omega)
    gap = tau_bar if spacing is None else spacing
    if spacing is not None and (spacing <= eps or tau_bar > spacing * (1 + 1e-12)):
        raise DomainError(
            f"Drive of {tau_bar:.4g} s per gap does not fit a pulse spacing of {spacing:.4g} s "
            f"with {eps:.4g} s pulses."
        )
    fill = tau_bar / gap
    if fill > 1 - 1e-12:
        fill = 1.0
    n_pulses = 8 * n
    gaps = [gap / 2] + [gap] * (n_pulses - 1) + [gap / 2]

    segments: List[Segment] = []
    fx, fz = 1, 1
    for j, g in enumerate(gaps):
        sign = fz if alternate_gradient else 1
        drive_phi = phi if fx > 0 else phi + math.pi
        idle = g * (1 - fill) / 2
        if idle > 0:
            segments.append(Segment.wait(idle, sign=sign))
        segments.append(Segment.drive(omega, g * fill, phi=drive_phi, sign=sign, frame_sign=fx))
        if idle > 0:
            segments.append(Segment.wait(idle, sign=sign))
        if j == n_pulses:
            break
        axis = XY8_AXES[j % 8]
        segments.append(Segment.pulse(phi + axis, eps, sign=0 if alternate_gradient else 1))
        fz = -fz
        if axis == Y_AXIS:
            fx = -fx
    assert fx == 1 and fz == 1, "XY-8 cycles must restore the laboratory frame"
    return segments


def build_dpg_xy8(
    n: int,
    theta: float,
    omega: float,
    eps: float,
    spacing: float,
    phi: float = 0.0,
    delta_z: float = 0.0,
) -> Sequence:
    """Symmetric XY-8 cycles interleaved with the drive under a constant gradient.

    Each gap between pulses lasts `spacing`; the drive of theta/8N occupies its center and the
    rest of the gap is idle.
    """
    _check_gate(theta, omega)
    _check_cycles(n, eps)
    segments = _xy8_segments(n, theta, omega, eps, spacing, alternate_gradient=False, phi=phi)
    return Sequence(segments, n, Scheme.DPG_XY8, theta, omega, delta_z=delta_z, phi=phi)


def build_snrg(
    n: int,
    theta: float,
    omega: float,
    eps: float,
    delta_z: float,
    phi: float = 0.0,
    spacing: Optional[float] = None,
) -> Sequence:
    """Symmetric XY-8 cycles whose gradient sign flips at every pulse and vanishes during pulses.

    Without `spacing` the drive fills the gaps completely (tau_bar = theta / 8N Omega).
    """
    _check_gate(theta, omega)
    _check_cycles(n, eps)
    segments = _xy8_segments(n, theta, omega, eps, spacing, alternate_gradient=True, phi=phi)
    return Sequence(segments, n, Scheme.SNRG_XY8, theta, omega, delta_z=delta_z, phi=phi)


@dataclass(frozen=True)
class Timings:
    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t[0] != 0 or np.any(np.diff(t) < 0):
            raise DomainError("Switching times must start at 0 and must not decrease.")
        object.__setattr__(self, "t", t)

    def __len__(self):
        return len(self.t)

    @property
    def end(self) -> float:
        return float(self.t[-1])


def switching_times(n: int, tau_bar: float, eps: float) -> Timings:
    """Gradient switching times of a symmetric SNRG gate with 8N pulses.

    Odd i ends a drive piece: T_i = tau_bar i/2 + eps (i-1)/2.
    Even i ends a pulse: T_i = tau_bar (i-1)/2 + eps i/2.
    The last entry T_{16N+1} = 8N (tau_bar + eps) ends the closing half segment.

    The opening and closing drive pieces are half segments, so T_2 = tau_bar/2 + eps and every
    piece and pulse boundary gets an entry. This departs from the commonly printed closed form
    with 8N+2 entries and T_2 = tau_bar + eps, which does not describe the symmetric timeline.
    """
    if tau_bar <= 0:
        raise DomainError(f"Drive segment duration must be positive, got {tau_bar}")
    _check_cycles(n, eps)
    i = np.arange(16 * n + 1)
    odd = i % 2 == 1
    t = np.where(odd, tau_bar * i / 2 + eps * (i - 1) / 2, tau_bar * (i - 1) / 2 + eps * i / 2)
    t[0] = 0.0
    return Timings(np.append(t, 8 * n * (tau_bar + eps)))


_PULSE_TRAIN = (1, 0, -1, 0)


def pulse_train_u(t: float, tm: Timings) -> int:
    """Gradient pulse train value on the interval [T_i, T_i+1) containing `t`: +1, 0, -1, 0
    repeating. The end point belongs to the last interval."""
    if t < 0 or t > tm.end:
        raise DomainError(f"t = {t} lies outside [0, {tm.end}]")
    i = int(np.searchsorted(tm.t, t, side="right")) - 1
    i = min(i, len(tm) - 2)
    return _PULSE_TRAIN[i % 4]

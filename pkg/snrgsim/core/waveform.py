"""Frequency-modulated drive synthesis for piecewise-constant longitudinal fields.

The drive follows the spin resonance: its accumulated phase is 2 pi gamma int_0^t B_z(s) ds, so a
switched gradient changes the carrier frequency without a phase jump. For a segment k starting
at t_k the carrier reads cos(2 pi f_k t - phi_k) with f_k = gamma B_k and
phi_k = 2 pi sum_{j<k} (f_k - f_j) T_j.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence as Seq, Tuple, Union

import numpy as np
import pandas as pd

from snrgsim import helper as hp
from snrgsim.core.sequences import Segment, SegmentKind, Sequence
from snrgsim.errors import DomainError, UndersamplingError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

OVERSAMPLING = 10
CHANNELS = {"t": "s", "gradient": "G", "drive_I": "G", "drive_Q": "G", "marker": "1"}


def fm_params(bz_segments: Seq[Tuple[float, float]], gamma: float) -> List[Tuple[float, float]]:
    """Per-segment carrier frequency (Hz) and phase offset (rad) of a continuous FM drive.

    Args:
        bz_segments: (field, duration) pairs.
        gamma: Gyromagnetic ratio in Hz per field unit.
    """
    if len(bz_segments) == 0:
        raise DomainError("Need at least one field segment.")
    freqs = [gamma * b for b, _ in bz_segments]
    res = []
    for k, f in enumerate(freqs):
        steps = zip(freqs[:k], bz_segments)
        offset = 2 * math.pi * math.fsum((f - fj) * tj for fj, (_, tj) in steps)
        res.append((f, offset))
    return res


def carrier_phase(bz_segments: Seq[Tuple[float, float]], gamma: float, t: np.ndarray) -> np.ndarray:
    """Accumulated phase 2 pi gamma int_0^t B_z at the times `t`."""
    t = np.asarray(t, dtype=float)
    params = fm_params(bz_segments, gamma)
    starts = np.concatenate([[0.0], np.cumsum([d for _, d in bz_segments])[:-1]])
    k = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(starts) - 1)
    freqs = np.array([f for f, _ in params])
    offsets = np.array([o for _, o in params])
    return 2 * math.pi * freqs[k] * t - offsets[k]


@dataclass(frozen=True)
class Waveform:
    t: np.ndarray
    gradient: np.ndarray
    drive_i: np.ndarray
    drive_q: np.ndarray
    marker: np.ndarray
    phase: np.ndarray
    carrier_model: str
    meta: Dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "t": self.t,
                "gradient": self.gradient,
                "drive_I": self.drive_i,
                "drive_Q": self.drive_q,
                "marker": self.marker.astype(int),
            }
        )


def _check_carrier_model(carrier_model: str):
    if carrier_model not in ("baseband", "rf"):
        raise DomainError(f"Unknown carrier model '{carrier_model}'")


def _sample_times(wall_time: float, sample_rate: float) -> np.ndarray:
    if sample_rate <= 0:
        raise DomainError(f"Sample rate must be positive, got {sample_rate}")
    n = int(math.floor(wall_time * sample_rate + 1e-9)) + 1
    return np.arange(n) / sample_rate


def _check_sampling(freqs: np.ndarray, sample_rate: float, carrier_model: str):
    f_max = float(np.max(np.abs(freqs)))
    if sample_rate < OVERSAMPLING * f_max:
        raise UndersamplingError(
            f"{carrier_model} carrier reaches {f_max:.6g} Hz, which needs a sample rate of at "
            f"least {OVERSAMPLING * f_max:.6g} Hz (got {sample_rate:.6g} Hz)."
        )


def render_field(
    bz_segments: Seq[Tuple[float, float]],
    sample_rate: float,
    gamma: float = hp.GAMMA_E,
    amplitude: float = 1.0,
    carrier_model: str = "rf",
    b_ref: float = 0.0,
) -> Waveform:
    """Renders a constant-amplitude FM drive for an arbitrary piecewise field.

    In baseband mode the carrier of the reference field `b_ref` is removed.
    """
    _check_carrier_model(carrier_model)
    lab_fields = [b for b, _ in bz_segments]
    if carrier_model == "baseband":
        bz_segments = [(b - b_ref, d) for b, d in bz_segments]
    _check_sampling(np.array([gamma * b for b, _ in bz_segments]), sample_rate, carrier_model)
    t = _sample_times(math.fsum(d for _, d in bz_segments), sample_rate)
    phase = carrier_phase(bz_segments, gamma, t)
    starts = np.concatenate([[0.0], np.cumsum([d for _, d in bz_segments])[:-1]])
    k = np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(bz_segments) - 1)
    fields = np.array([b for b, _ in bz_segments])
    drive_i = amplitude * np.cos(phase)
    drive_q = amplitude * np.sin(phase) if carrier_model == "baseband" else np.zeros_like(t)
    return Waveform(
        t=t,
        gradient=fields[k] - (0.0 if carrier_model == "baseband" else b_ref),
        drive_i=drive_i,
        drive_q=drive_q,
        marker=np.zeros(len(t), dtype=bool),
        phase=phase,
        carrier_model=carrier_model,
        meta={
            "source": "field segments",
            "segments": [[b, d] for b, d in bz_segments],
            "gamma_hz_per_g": gamma,
            "fm_params": [[f, o] for f, o in fm_params(bz_segments, gamma)],
            "transition_frequency_hz": [hp.transition_frequency(b, gamma) for b in lab_fields],
        },
    )


def sequence_field_segments(seq: Sequence, b0: float, b1: float) -> List[Tuple[float, float]]:
    return [(b0 + b1 * s.detuning_sign, s.duration) for s in seq.segments]


def _drive_amplitude(s: Segment, gamma: float) -> float:
    if s.kind is SegmentKind.WAIT:
        return 0.0
    if s.duration == 0:
        raise DomainError("Instantaneous DD pulses cannot be rendered; use eps > 0.")
    return s.omega / (2 * math.pi * gamma)


def render_waveform(
    seq: Sequence,
    sample_rate: float,
    gamma: float = hp.GAMMA_E,
    carrier_model: str = "baseband",
    b0: float = 0.0,
    b1: Union[float, None] = None,
) -> Waveform:
    """Samples the gradient, drive and marker channels of a sequence.

    Args:
        seq: The sequence to render.
        sample_rate: Samples per second.
        gamma: Gyromagnetic ratio in Hz/G.
        carrier_model: 'baseband' gives I/Q relative to the carrier at `b0`; 'rf' gives the full
            field B_x(t) in the I channel.
        b0: Static bias field in G.
        b1: Gradient field amplitude in G, defaults to delta_z / (2 pi gamma).
    """
    _check_carrier_model(carrier_model)
    if b1 is None:
        b1 = seq.delta_z / (2 * math.pi * gamma)
    amplitudes = np.array([_drive_amplitude(s, gamma) for s in seq.segments])
    axes = np.array([s.phi for s in seq.segments])
    pulses = np.array([s.kind is SegmentKind.DD_PULSE for s in seq.segments])
    signs = np.array([s.detuning_sign for s in seq.segments], dtype=float)

    b_ref = b0 if carrier_model == "baseband" else 0.0
    segments = [(b - b_ref, d) for b, d in sequence_field_segments(seq, b0, b1)]
    _check_sampling(np.array([gamma * b for b, _ in segments]), sample_rate, carrier_model)

    t = _sample_times(seq.wall_time, sample_rate)
    phase = carrier_phase(segments, gamma, t)
    k = np.clip(np.searchsorted(seq.boundaries()[:-1], t, side="right") - 1, 0, len(seq) - 1)
    total = phase + axes[k]
    drive_i = amplitudes[k] * np.cos(total)
    drive_q = amplitudes[k] * np.sin(total) if carrier_model == "baseband" else np.zeros_like(t)
    return Waveform(
        t=t,
        gradient=b1 * signs[k],
        drive_i=drive_i,
        drive_q=drive_q,
        marker=pulses[k],
        phase=phase,
        carrier_model=carrier_model,
        meta={
            "source": "sequence",
            "scheme": seq.scheme.value,
            "n_cycles": seq.n_cycles,
            "theta_rad": seq.total_theta,
            "omega_rad_per_s": seq.omega,
            "delta_z_rad_per_s": seq.delta_z,
            "b0_g": b0,
            "b1_g": b1,
            "gamma_hz_per_g": gamma,
            "transition_frequency_hz": hp.transition_frequency(b0, gamma),
            "wall_time_s": seq.wall_time,
        },
    )


def write_waveform(wf: Waveform, fp: Union[str, Path], extra_meta: Dict = None) -> Path:
    """Writes a self-describing header followed by the sampled channels as CSV."""
    fp = Path(fp)
    header = {
        "format": "snrgsim waveform v1",
        "sample_rate_hz": (len(wf) - 1) / wf.t[-1] if len(wf) > 1 else float("nan"),
        "samples": len(wf),
        "carrier_model": wf.carrier_model,
        "channels": ", ".join(f"{k} [{u}]" for k, u in CHANNELS.items()),
        **wf.meta,
        **(extra_meta or {}),
    }
    lines = [f"# {k}: {hp.dumps_json(v, indent=None)}" for k, v in header.items()]
    body = wf.to_frame().to_csv(index=False, float_format="%.9g", lineterminator="\n")
    fp.parent.mkdir(parents=True, exist_ok=True)
    fp.write_text("\n".join(lines) + "\n" + body)
    logger.info(f"Waveform with {len(wf)} samples written to {fp}")
    return fp

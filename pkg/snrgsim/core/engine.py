"""Monte Carlo evaluation of control sequences under bath noise and pulse errors.

Shots are simulated in vectorized blocks: every segment's SU(2) matrix is built for all shots
of a block at once and applied to the stacked state vectors. A shot's random draws come only
from its own substreams (see `snrgsim.prep.noise.shot_streams`), so results do not depend on
block size, worker count or the detuning at which a sequence is evaluated.
"""

from __future__ import annotations

import contextlib
import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterator, List, NamedTuple, Optional, Sequence as Seq

import numpy as np
import pandas as pd
import ray
from tqdm.auto import tqdm

from snrgsim.analysis import analytic as an
from snrgsim.core import sequences as sq
from snrgsim.core import spincore as sc
from snrgsim.core.entity_stores import EnsembleResult, Estimate, ScanResult, SchemeReport
from snrgsim.errors import DomainError, NoCrossingError, OnResonanceFailure
from snrgsim.prep import noise as nz

fmt = "%(levelname)s:%(name)s:%(funcName)s():%(lineno)i:\n    %(message)s"
logging.basicConfig(level=logging.WARN, format=fmt)
logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

BLOCK_SIZE = 1000
COARSE_STEP = 0.25
SCAN_SHOTS = 2_000
REPORT_SHOTS = 20_000


class NoiseMode(enum.Enum):
    OU = "ou"
    QUASI_STATIC = "quasi_static"
    NONE = "none"


class Convention(enum.Enum):
    P1_SQUARED = "p1_squared"
    P1 = "p1"

    def fidelity(self, p1: Estimate) -> Estimate:
        """Squared transfer probability (p1_squared) or the transfer probability itself (p1)."""
        if self is Convention.P1:
            return p1
        return Estimate(mean=p1.mean**2, stderr=2 * abs(p1.mean) * p1.stderr)


@dataclass(frozen=True)
class ShotConfig:
    """Noise model and Monte Carlo budget.

    With `noise_dt`, drive and wait segments longer than `noise_dt` are split into equal pieces so
    that the OU detuning can change within them. Quasi-static noise takes the first draw of a
    shot's bath stream.
    """

    noise_mode: NoiseMode = NoiseMode.NONE
    ou: nz.OuParams = nz.OuParams(b=0.0, tau_c=1.0)
    dd_imp: nz.DdImperfection = nz.DdImperfection()
    seed: int = 0
    shots: int = 1
    noise_dt: Optional[float] = None

    def __post_init__(self):
        if self.shots < 1:
            raise DomainError(f"Need at least one shot, got {self.shots}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.noise_dt is not None and self.noise_dt <= 0:
            raise DomainError(f"noise_dt must be positive, got {self.noise_dt}")

    def with_shots(self, shots: int) -> ShotConfig:
        return replace(self, shots=shots)


class _Piece(NamedTuple):
    angle: float
    phi: float
    sign: int
    duration: float
    pulse: bool


def _pieces(seq: sq.Sequence, noise_dt: Optional[float]) -> List[_Piece]:
    res = []
    for s in seq.segments:
        pulse = s.kind is sq.SegmentKind.DD_PULSE
        m = 1
        if noise_dt is not None and not pulse and s.duration > noise_dt:
            m = math.ceil(s.duration / noise_dt)
        res.extend([_Piece(s.angle / m, s.phi, s.detuning_sign, s.duration / m, pulse)] * m)
    return res


def _bath_detunings(
    cfg: ShotConfig, streams: List[nz.ShotStreams], pieces: List[_Piece]
) -> np.ndarray:
    n, k = len(streams), len(pieces)
    if cfg.noise_mode is NoiseMode.NONE:
        return np.zeros((n, k))
    if cfg.noise_mode is NoiseMode.QUASI_STATIC:
        xi = np.array([s.bath.standard_normal() for s in streams])
        return np.repeat(cfg.ou.b * xi[:, None], k, axis=1)
    xi = np.stack([s.bath.standard_normal(k) for s in streams])
    durations = np.array([p.duration for p in pieces])
    mids = np.cumsum(durations) - durations / 2
    return nz.ou_recursion(xi, np.diff(mids), cfg.ou)


def _pulse_angles(cfg: ShotConfig, streams: List[nz.ShotStreams], n_pulses: int) -> np.ndarray:
    if n_pulses == 0:
        return np.zeros((len(streams), 0))
    size = 1 if cfg.dd_imp.per_shot else n_pulses
    angles = np.stack([nz.perturb_pi(cfg.dd_imp, s.pulses, size=size) for s in streams])
    return np.broadcast_to(angles, (len(streams), n_pulses))


def _simulate_block(seq: sq.Sequence, cfg: ShotConfig, shot_indices: Seq[int]) -> np.ndarray:
    """Final state vectors of the given shots, shape (n, 2)."""
    pieces = _pieces(seq, cfg.noise_dt)
    streams = [nz.shot_streams(cfg.seed, int(i)) for i in shot_indices]
    deltas = _bath_detunings(cfg, streams, pieces)
    angles = _pulse_angles(cfg, streams, sum(p.pulse for p in pieces))

    psi = np.zeros((len(streams), 2), dtype=complex)
    psi[:, 0] = 1
    j = 0
    for k, p in enumerate(pieces):
        if p.pulse:
            angle = angles[:, j]
            j += 1
        else:
            angle = p.angle
        z_angle = (seq.delta_z * p.sign + deltas[:, k]) * p.duration
        u = sc.su2_rotation(angle, p.phi, z_angle)
        psi = np.einsum("nij,nj->ni", u, psi)
    return psi


def simulate_shot(seq: sq.Sequence, cfg: ShotConfig, shot_index: int) -> sc.SpinState:
    """Evolves |0> through `seq` with the noise realization of shot `shot_index`."""
    return sc.SpinState.from_vector(_simulate_block(seq, cfg, [shot_index])[0])


@contextlib.contextmanager
def parallel_session(workers: int) -> Iterator[None]:
    """Starts ray for `workers` > 1 unless it is already running, and stops it afterwards."""
    started = False
    if workers > 1 and not ray.is_initialized():
        ray.init(num_cpus=workers, include_dashboard=False, log_to_driver=False)
        started = True
    try:
        yield
    finally:
        if started:
            ray.shutdown()


def _blocks(shots: int) -> List[np.ndarray]:
    return [np.arange(s, min(s + BLOCK_SIZE, shots)) for s in range(0, shots, BLOCK_SIZE)]


def _block_p1(seq: sq.Sequence, cfg: ShotConfig, idx: np.ndarray) -> np.ndarray:
    psi = _simulate_block(seq, cfg, idx)
    return np.abs(psi[:, 1]) ** 2 / np.sum(np.abs(psi) ** 2, axis=1)


def shot_p1(seq: sq.Sequence, cfg: ShotConfig, workers: int = 1) -> np.ndarray:
    """Per-shot populations of |-1>, ordered by shot index."""
    blocks = _blocks(cfg.shots)
    if workers <= 1 or len(blocks) == 1:
        return np.concatenate([_block_p1(seq, cfg, idx) for idx in blocks])

    @ray.remote
    def simulate_block(idx):
        return _block_p1(seq, cfg, idx)

    with parallel_session(workers):
        return np.concatenate(ray.get([simulate_block.remote(idx) for idx in blocks]))


def _estimate(x: np.ndarray) -> Estimate:
    se = float(np.std(x, ddof=1) / math.sqrt(len(x))) if len(x) > 1 else 0.0
    return Estimate(mean=float(np.mean(x)), stderr=se)


def run_ensemble(seq: sq.Sequence, cfg: ShotConfig, workers: int = 1) -> EnsembleResult:
    """Averages P1 and <S_z> = 1/2 - P1 over `cfg.shots` shots."""
    p1 = shot_p1(seq, cfg, workers=workers)
    est = _estimate(p1)
    logger.info(f"{seq!r}: P1 = {est}")
    return EnsembleResult(
        p1=est, sz=Estimate(mean=0.5 - est.mean, stderr=est.stderr), shots=cfg.shots
    )


@dataclass(frozen=True)
class SchemeSpec:
    """A control scheme with its hardware parameters, buildable at any duration or angle.

    Without `n_cycles`, DD schemes place one cycle per 8 `spacing` (2 `spacing` for CPMG) of
    drive time with the drive filling each gap; the remainder of the drive time is appended as
    a plain drive. With `n_cycles`, the whole gate is spread evenly over that many cycles.
    """

    scheme: sq.Scheme
    omega: float
    eps: float = 20e-9
    spacing: float = 125e-9
    n_cycles: Optional[int] = None
    phi: float = 0.0

    def __post_init__(self):
        if self.omega <= 0:
            raise DomainError(f"Rabi frequency must be positive, got {self.omega}")
        if self.spacing <= self.eps:
            raise DomainError(
                f"Pulse spacing {self.spacing} must exceed the pulse length {self.eps}"
            )

    def with_omega(self, omega: float) -> SchemeSpec:
        return replace(self, omega=omega)

    @property
    def cycle_drive_time(self) -> float:
        return (2 if self.scheme is sq.Scheme.DPG_CPMG else 8) * self.spacing

    def _fixed(self, n: int, theta: float, delta_z: float) -> sq.Sequence:
        if self.scheme is sq.Scheme.DPG_CPMG:
            return sq.build_dpg_cpmg(n, theta, self.omega, self.eps, self.phi, delta_z)
        if self.scheme is sq.Scheme.DPG_XY8:
            spacing = theta / (8 * n * self.omega)
            return sq.build_dpg_xy8(n, theta, self.omega, self.eps, spacing, self.phi, delta_z)
        return sq.build_snrg(n, theta, self.omega, self.eps, delta_z, self.phi)

    def build(self, duration: float, delta_z: float = 0.0) -> Optional[sq.Sequence]:
        """Sequence with a total drive time `duration`, or None if no DD cycle fits."""
        if self.scheme is sq.Scheme.RABI:
            return sq.build_rabi(self.omega, self.omega * duration, self.phi, delta_z)
        if self.n_cycles is not None:
            return self._fixed(self.n_cycles, self.omega * duration, delta_z)
        n = int(math.floor(duration / self.cycle_drive_time + 1e-9))
        if n == 0:
            return None
        drive = n * self.cycle_drive_time
        theta = self.omega * drive
        if self.scheme is sq.Scheme.DPG_CPMG:
            seq = sq.build_dpg_cpmg(n, theta, self.omega, self.eps, self.phi, delta_z)
        elif self.scheme is sq.Scheme.DPG_XY8:
            seq = sq.build_dpg_xy8(n, theta, self.omega, self.eps, self.spacing, self.phi, delta_z)
        else:
            seq = sq.build_snrg(n, theta, self.omega, self.eps, delta_z, self.phi, self.spacing)
        return seq.extended(duration - drive)

    def gate(self, theta: float = math.pi, delta_z: float = 0.0) -> sq.Sequence:
        seq = self.build(theta / self.omega, delta_z)
        if seq is None:
            raise DomainError(
                f"A {theta:.4g} rad gate at Omega = {self.omega:.4g} rad/s is shorter than one "
                f"{self.scheme.value} cycle of {self.cycle_drive_time:.4g} s."
            )
        return seq


def _check_grid(name: str, grid: np.ndarray):
    if len(grid) == 0:
        raise DomainError(f"The {name} grid is empty.")
    if np.any(np.diff(grid) <= 0):
        raise DomainError(f"The {name} grid must be strictly increasing.")


def _scan(
    builder: Callable[[float, float], Optional[sq.Sequence]],
    det_grid: np.ndarray,
    axis2: np.ndarray,
    cfg: ShotConfig,
    workers: int,
    progress: bool,
    desc: str,
):
    mean = np.full((len(det_grid), len(axis2)), np.nan)
    se = np.full_like(mean, np.nan)
    with parallel_session(workers):
        pbar = tqdm(list(enumerate(axis2)), disable=not progress)
        for j, x in pbar:
            pbar.set_description(f"{desc} {j + 1}/{len(axis2)}")
            for i, dz in enumerate(det_grid):
                try:
                    seq = builder(x, dz)
                except DomainError as e:
                    logger.info(f"Cell ({dz}, {x}) is infeasible: {e}")
                    seq = None
                if seq is None:
                    continue
                res = run_ensemble(seq, cfg, workers=workers)
                mean[i, j], se[i, j] = res.sz.mean, res.sz.stderr
    return mean, se


def _scan_meta(spec: SchemeSpec, cfg: ShotConfig) -> Dict:
    return {
        "scheme": spec.scheme.value,
        "omega": spec.omega,
        "eps": spec.eps,
        "spacing": spec.spacing,
        "n_cycles": spec.n_cycles,
        "noise_mode": cfg.noise_mode.value,
        "b": cfg.ou.b,
        "tau_c": cfg.ou.tau_c,
        "sigma_dd": cfg.dd_imp.sigma,
        "seed": cfg.seed,
        "shots": cfg.shots,
    }


def scan_detuning_time(
    spec: SchemeSpec,
    det_grid: Seq[float],
    time_grid: Seq[float],
    cfg: ShotConfig,
    workers: int = 1,
    progress: bool = True,
) -> ScanResult:
    """Ensemble <S_z> after each total drive time and gradient detuning.

    DD schemes advance in whole cycles plus a plain-drive tail; durations shorter than one cycle
    leave NaN cells.
    """
    det_grid, time_grid = np.asarray(det_grid, float), np.asarray(time_grid, float)
    _check_grid("detuning", det_grid)
    _check_grid("duration", time_grid)
    mean, se = _scan(
        lambda tau, dz: spec.build(tau, dz),
        det_grid,
        time_grid,
        cfg,
        workers,
        progress,
        f"Scan {spec.scheme.value} duration",
    )
    return ScanResult(det_grid, time_grid, mean, se, "duration", _scan_meta(spec, cfg))


def scan_detuning_omega(
    spec: SchemeSpec,
    det_grid: Seq[float],
    omega_grid: Seq[float],
    cfg: ShotConfig,
    theta: float = math.pi,
    workers: int = 1,
    progress: bool = True,
) -> ScanResult:
    """Ensemble <S_z> after a `theta` gate for each Rabi frequency and gradient detuning."""
    det_grid, omega_grid = np.asarray(det_grid, float), np.asarray(omega_grid, float)
    _check_grid("detuning", det_grid)
    _check_grid("Rabi frequency", omega_grid)
    if omega_grid[0] <= 0:
        raise DomainError("Rabi frequencies must be positive.")
    mean, se = _scan(
        lambda om, dz: spec.with_omega(om).build(theta / om, dz),
        det_grid,
        omega_grid,
        cfg,
        workers,
        progress,
        f"Scan {spec.scheme.value} Omega",
    )
    return ScanResult(det_grid, omega_grid, mean, se, "omega", _scan_meta(spec, cfg))


def _mc_bandwidth(
    spec: SchemeSpec,
    cfg: ShotConfig,
    f0: Estimate,
    det_max: float,
    threshold: float,
    tol: float,
    convention: Convention,
    theta: float,
    workers: int,
):
    """Coarse walk in r = delta_z / omega until the fidelity falls below `threshold`, then
    bisection. All points share the shot substreams."""

    def fidelity(r: float) -> Estimate:
        res = run_ensemble(spec.gate(theta, r * spec.omega), cfg, workers=workers)
        return convention.fidelity(res.p1)

    if f0.mean <= threshold:
        raise OnResonanceFailure(
            f"On-resonance fidelity {f0.mean:.4g} is not above the threshold {threshold}."
        )
    r_max = det_max / spec.omega
    rs, fs = [0.0], [f0.mean]
    while fs[-1] >= threshold and rs[-1] < r_max - 1e-12:
        rs.append(min(rs[-1] + COARSE_STEP, r_max))
        fs.append(fidelity(rs[-1]).mean)
    curve = an.FidelityCurve(np.array(rs), np.clip(fs, 0, 1), evaluator=lambda r: fidelity(r).mean)
    r_bw = an.bandwidth_from_curve(curve, threshold=threshold, rtol=tol)

    i = len(rs) - 1
    slope = abs(fs[i - 1] - fs[i]) / (rs[i] - rs[i - 1])
    se = fidelity(r_bw).stderr
    r_err = math.hypot(se / slope if slope > 0 else 0.0, tol * r_bw / 2)
    return r_bw * spec.omega, r_err * spec.omega


def scheme_report(
    spec: SchemeSpec,
    cfg: ShotConfig,
    det_max: Optional[float] = None,
    tol: float = 1e-3,
    threshold: float = an.BANDWIDTH_THRESHOLD,
    convention: Convention = Convention.P1_SQUARED,
    theta: float = math.pi,
    workers: int = 1,
    strict: bool = True,
) -> SchemeReport:
    """On-resonance fidelity and Monte Carlo bandwidth of a `theta` gate.

    Args:
        det_max: Largest searched gradient detuning, defaults to 5 omega.
        tol: Relative width at which the bandwidth bisection stops.
        strict: Raise `OnResonanceFailure` if the on-resonance fidelity is not above
            `threshold`; otherwise report no bandwidth.
    """
    det_max = 5 * spec.omega if det_max is None else det_max
    with parallel_session(workers):
        res = run_ensemble(spec.gate(theta, 0.0), cfg, workers=workers)
        f0 = convention.fidelity(res.p1)
        bw, bw_err, status = None, math.nan, "ok"
        try:
            bw, bw_err = _mc_bandwidth(
                spec, cfg, f0, det_max, threshold, tol, convention, theta, workers
            )
        except OnResonanceFailure:
            if strict:
                raise
            status = "on-resonance failure"
        except NoCrossingError:
            status = "no crossing"
            logger.info(f"{spec.scheme.value}: fidelity stays above {threshold} up to {det_max}")
    return SchemeReport(
        scheme=spec.scheme.value,
        omega=spec.omega,
        fidelity=f0,
        p1=res.p1,
        convention=convention.value,
        bandwidth=bw,
        bandwidth_err=bw_err,
        bandwidth_status=status,
        det_max=det_max,
        threshold=threshold,
        meta={"shots": cfg.shots, "seed": cfg.seed, "theta": theta},
    )


def enhancement_scan(
    omega_grid: Seq[float],
    cfg: ShotConfig,
    snrg: Optional[SchemeSpec] = None,
    det_max_ratio: float = 5.0,
    tol: float = 1e-2,
    threshold: float = an.BANDWIDTH_THRESHOLD,
    convention: Convention = Convention.P1_SQUARED,
    min_fidelity: float = 0.2,
    workers: int = 1,
    progress: bool = True,
) -> pd.DataFrame:
    """Fidelity and bandwidth of Rabi and SNRG pi gates over Rabi frequencies.

    Bandwidths are given only where the on-resonance fidelity exceeds `min_fidelity`. The
    selectivity enhancement is BW_rabi / BW_snrg.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    if len(omega_grid) == 0 or np.any(omega_grid <= 0):
        raise DomainError("Rabi frequencies must be positive.")
    snrg = SchemeSpec(sq.Scheme.SNRG_XY8, omega_grid[0]) if snrg is None else snrg

    rows = []
    with parallel_session(workers):
        pbar = tqdm(omega_grid, disable=not progress)
        for omega in pbar:
            pbar.set_description(f"Enhancement at Omega = {omega:.4g} rad/s")
            row = {"omega": omega}
            for name, spec in [
                ("rabi", SchemeSpec(sq.Scheme.RABI, omega, snrg.eps, snrg.spacing)),
                ("snrg", snrg.with_omega(omega)),
            ]:
                rep = scheme_report(
                    spec,
                    cfg,
                    det_max=det_max_ratio * omega,
                    tol=tol,
                    threshold=threshold,
                    convention=convention,
                    workers=workers,
                    strict=False,
                )
                ok = rep.fidelity.mean > min_fidelity and rep.bandwidth is not None
                row.update(
                    {
                        f"f_{name}": rep.fidelity.mean,
                        f"f_{name}_stderr": rep.fidelity.stderr,
                        f"bw_{name}": rep.bandwidth if ok else math.nan,
                    }
                )
            rows.append(row)

    df = pd.DataFrame(rows)
    df["fidelity_enhancement"] = df["f_snrg"] / df["f_rabi"]
    df["selectivity_enhancement"] = df["bw_rabi"] / df["bw_snrg"]
    return df

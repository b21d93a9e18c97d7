"""Grid-search least squares fits of the bath and pulse-error parameters to decay curves.

Every grid cell is simulated with the same seed, so the model curves share their random draws
and the residual surface is smooth in the parameters.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Sequence as Seq, Union

import numpy as np
import pandas as pd
from tqdm.auto import tqdm

from snrgsim import conventions as cv
from snrgsim.core import engine as en
from snrgsim.core.sequences import Scheme
from snrgsim.errors import DomainError, UnidentifiableError
from snrgsim.prep.noise import DdImperfection, OuParams

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

MIN_POINTS = 10
FLAT_PTP = 1e-6


@dataclass(frozen=True)
class FitResult:
    """Best grid cell, its sum of squared residuals and the whole residual map."""

    model: str
    params: Union[OuParams, DdImperfection]
    residual: float
    residual_map: pd.DataFrame
    best_curve: np.ndarray = field(repr=False)

    def to_dict(self) -> Dict:
        if isinstance(self.params, OuParams):
            fitted = {"b_kHz": self.params.b / cv.KHZ, "tau_c_us": self.params.tau_c / cv.US}
        else:
            fitted = {"sigma_dd": self.params.sigma}
        return {"model": self.model, **fitted, "ssr": self.residual}

    def residual_frame(self) -> pd.DataFrame:
        """Residual map in long form, one row per grid cell."""
        if self.model == "dd":
            return self.residual_map.reset_index()
        return self.residual_map.stack().rename("ssr").reset_index()


def decay_curve(
    spec: en.SchemeSpec,
    times: Seq[float],
    cfg: en.ShotConfig,
    delta_z: float = 0.0,
    workers: int = 1,
) -> np.ndarray:
    """Ensemble <S_z> after each total drive time; NaN where no DD cycle fits, 1/2 at t = 0."""
    res = np.full(len(times), np.nan)
    for i, t in enumerate(times):
        if t <= 0:
            res[i] = 0.5
            continue
        seq = spec.build(t, delta_z)
        if seq is not None:
            res[i] = en.run_ensemble(seq, cfg, workers=workers).sz.mean
    return res


def _check_data(t: np.ndarray, sz: np.ndarray):
    if t.shape != sz.shape or t.ndim != 1:
        raise DomainError("Times and observations must be equally long 1-D arrays.")
    if len(t) < MIN_POINTS:
        raise DomainError(f"A fit needs at least {MIN_POINTS} points, got {len(t)}")
    if np.ptp(sz) < FLAT_PTP:
        raise UnidentifiableError("The observed curve is flat and carries no decay information.")


def _ssr(model: np.ndarray, observed: np.ndarray) -> float:
    ok = ~np.isnan(model)
    if not np.any(ok):
        raise DomainError("No observed time admits a complete DD cycle.")
    return float(np.sum((model[ok] - observed[ok]) ** 2))


def fit_ou(
    t: Seq[float],
    sz: Seq[float],
    b_grid: Seq[float],
    tau_grid: Seq[float],
    omega: float,
    cfg: en.ShotConfig,
    delta_z: float = 0.0,
    workers: int = 1,
    progress: bool = True,
) -> FitResult:
    """Fits the OU bath parameters to an observed Rabi decay of <S_z>.

    Args:
        t: Drive times in s.
        sz: Observed <S_z> values.
        b_grid: Candidate bath couplings in rad/s.
        tau_grid: Candidate correlation times in s.
        omega: Rabi frequency of the observed drive.
        cfg: Shot budget, seed and `noise_dt` of the model; its noise parameters are replaced
            by the grid values.
    """
    t, sz = np.asarray(t, dtype=float), np.asarray(sz, dtype=float)
    _check_data(t, sz)
    spec = en.SchemeSpec(Scheme.RABI, omega)
    ssr = np.empty((len(b_grid), len(tau_grid)))
    curves = {}
    cells = [(i, j) for i in range(len(b_grid)) for j in range(len(tau_grid))]
    pbar = tqdm(cells, disable=not progress)
    for i, j in pbar:
        pbar.set_description(f"Fit OU cell {i * len(tau_grid) + j + 1}/{len(cells)}")
        ou = OuParams(b=b_grid[i], tau_c=tau_grid[j])
        c = replace(cfg, noise_mode=en.NoiseMode.OU, ou=ou)
        curves[i, j] = decay_curve(spec, t, c, delta_z=delta_z, workers=workers)
        ssr[i, j] = _ssr(curves[i, j], sz)

    i, j = np.unravel_index(np.argmin(ssr), ssr.shape)
    best = OuParams(b=b_grid[i], tau_c=tau_grid[j])
    logger.info(f"Best OU fit {best} with SSR {ssr[i, j]:.4g}")
    residual_map = pd.DataFrame(
        ssr,
        index=pd.Index(np.asarray(b_grid) / cv.KHZ, name="b_kHz"),
        columns=pd.Index(np.asarray(tau_grid) / cv.US, name="tau_c_us"),
    )
    return FitResult("ou", best, float(ssr[i, j]), residual_map, curves[i, j])


def fit_dd_imperfection(
    t: Seq[float],
    sz: Seq[float],
    sigma_grid: Seq[float],
    spec: en.SchemeSpec,
    cfg: en.ShotConfig,
    workers: int = 1,
    progress: bool = True,
) -> FitResult:
    """Fits the DD pulse-angle error to an observed on-resonance decay of a DD scheme.

    `cfg` carries the bath model, which is held fixed; only `sigma` is scanned.
    """
    t, sz = np.asarray(t, dtype=float), np.asarray(sz, dtype=float)
    _check_data(t, sz)
    if spec.scheme is Scheme.RABI:
        raise DomainError("Pulse errors cannot be fitted to a scheme without DD pulses.")
    ssr = np.empty(len(sigma_grid))
    curves = []
    pbar = tqdm(list(enumerate(sigma_grid)), disable=not progress)
    for k, sigma in pbar:
        pbar.set_description(f"Fit sigma_dd {k + 1}/{len(sigma_grid)}")
        imp = DdImperfection(sigma=sigma, per_shot=cfg.dd_imp.per_shot)
        curves.append(decay_curve(spec, t, replace(cfg, dd_imp=imp), workers=workers))
        ssr[k] = _ssr(curves[-1], sz)

    k = int(np.argmin(ssr))
    best = DdImperfection(sigma=sigma_grid[k], per_shot=cfg.dd_imp.per_shot)
    residual_map = pd.DataFrame(
        {"ssr": ssr}, index=pd.Index(np.asarray(sigma_grid, dtype=float), name="sigma_dd")
    )
    return FitResult("dd", best, float(ssr[k]), residual_map, curves[k])


def read_decay(fp) -> pd.DataFrame:
    """Reads a (t_us, sz) CSV into a frame with times in s."""
    try:
        df = pd.read_csv(fp, comment="#")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DomainError(f"Cannot read decay data from {fp}: {e}") from e
    if list(df.columns[:2]) != ["t_us", "sz"]:
        raise DomainError(f"Decay data in {fp} must have the columns t_us, sz.")
    return pd.DataFrame({"t": df["t_us"].to_numpy(float) * cv.US, "sz": df["sz"].to_numpy(float)})

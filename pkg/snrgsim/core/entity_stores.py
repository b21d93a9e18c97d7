import logging
import math
import textwrap
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tabulate import tabulate

from snrgsim import conventions as cv
from snrgsim.errors import DomainError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)


def make_table(l: List[Tuple], lead_text: str = "", table_prefix="  "):
    headers, col_data = zip(*l)
    rows = list(zip(*col_data))
    return lead_text + textwrap.indent(
        text=tabulate(rows, headers=headers, floatfmt=".4g"), prefix=table_prefix
    )


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo mean with its standard error."""

    mean: float
    stderr: float

    def __str__(self):
        return f"{self.mean:.4g} ± {self.stderr:.2g}"


@dataclass(frozen=True)
class EnsembleResult:
    p1: Estimate
    sz: Estimate
    shots: int

    def __repr__(self):
        return f"<EnsembleResult: P1 = {self.p1}, <S_z> = {self.sz}, shots = {self.shots}>"


AXIS2_KINDS = {"duration": ("duration_us", cv.US), "omega": ("omega_kHz", cv.KHZ)}


@dataclass(frozen=True)
class ScanResult:
    """Ensemble mean <S_z> on a detuning x (duration | Rabi frequency) grid.

    `mean_sz[i, j]` belongs to `axis1[i]` and `axis2[j]`. Infeasible cells are NaN.
    """

    axis1: np.ndarray
    axis2: np.ndarray
    mean_sz: np.ndarray
    stderr: np.ndarray
    axis2_kind: str = "duration"
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        shape = (len(self.axis1), len(self.axis2))
        if self.mean_sz.shape != shape or self.stderr.shape != shape:
            raise DomainError(f"Grid shapes {self.mean_sz.shape}, {self.stderr.shape} != {shape}")
        if self.axis2_kind not in AXIS2_KINDS:
            raise DomainError(f"Unknown second axis '{self.axis2_kind}'")
        ok = ~np.isnan(self.mean_sz)
        assert np.all(np.abs(self.mean_sz[ok]) <= 0.5 + 1e-12), "<S_z> must lie in [-1/2, 1/2]"
        assert np.all(self.stderr[ok] >= 0), "negative standard error"

    @property
    def shape(self) -> Tuple[int, int]:
        return self.mean_sz.shape

    @property
    def missing(self) -> int:
        return int(np.isnan(self.mean_sz).sum())

    def to_frame(self) -> pd.DataFrame:
        """Long frame in user units with one row per cell, detuning-major."""
        name2, factor2 = AXIS2_KINDS[self.axis2_kind]
        det, ax2 = np.meshgrid(self.axis1, self.axis2, indexing="ij")
        return pd.DataFrame(
            {
                "detuning_kHz": det.ravel() / cv.KHZ,
                name2: ax2.ravel() / factor2,
                "mean_sz": self.mean_sz.ravel(),
                "stderr": self.stderr.ravel(),
            }
        )

    def __repr__(self):
        name2, factor2 = AXIS2_KINDS[self.axis2_kind]
        l = [
            ("Axis", ["detuning_kHz", name2]),
            ("N", list(self.shape)),
            ("Min", [self.axis1.min() / cv.KHZ, self.axis2.min() / factor2]),
            ("Max", [self.axis1.max() / cv.KHZ, self.axis2.max() / factor2]),
        ]
        scheme = self.meta.get("scheme", "")
        lead = f"<ScanResult {scheme}, {self.missing} missing cells> preview:\n"
        return make_table(l, lead_text=lead)


@dataclass(frozen=True)
class SchemeReport:
    """On-resonance fidelity and bandwidth of a pi gate.

    `bandwidth` is None when no crossing was found up to `det_max` or when the gate already fails
    on resonance; `bandwidth_status` says which.
    """

    scheme: str
    omega: float
    fidelity: Estimate
    p1: Estimate
    convention: str
    bandwidth: Optional[float]
    bandwidth_err: float
    bandwidth_status: str
    det_max: float
    threshold: float
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        assert 0 <= self.fidelity.mean <= 1, f"fidelity {self.fidelity.mean} outside [0, 1]"

    @property
    def bandwidth_ratio(self) -> float:
        return math.nan if self.bandwidth is None else self.bandwidth / self.omega

    def to_dict(self) -> Dict:
        bw = math.nan if self.bandwidth is None else self.bandwidth / cv.KHZ
        return {
            "scheme": self.scheme,
            "omega_kHz": self.omega / cv.KHZ,
            "convention": self.convention,
            "fidelity": self.fidelity.mean,
            "fidelity_stderr": self.fidelity.stderr,
            "p1": self.p1.mean,
            "p1_stderr": self.p1.stderr,
            "bandwidth_kHz": bw,
            "bandwidth_err_kHz": self.bandwidth_err / cv.KHZ,
            "bandwidth_status": self.bandwidth_status,
            "det_max_kHz": self.det_max / cv.KHZ,
            "threshold": self.threshold,
            **self.meta,
        }

    def __repr__(self):
        d = self.to_dict()
        bw = (
            f"{d['bandwidth_kHz']:.4g} ± {d['bandwidth_err_kHz']:.2g} kHz"
            if self.bandwidth is not None
            else self.bandwidth_status
        )
        l = [
            ("Quantity", ["Fidelity", "P1", "Bandwidth"]),
            ("Value", [str(self.fidelity), str(self.p1), bw]),
            ("Convention", [self.convention, "p1", f"F < {self.threshold}"]),
        ]
        lead = f"<SchemeReport {self.scheme} at Omega = 2pi x {d['omega_kHz']:.4g} kHz> preview:\n"
        return make_table(l, lead_text=lead)

"""Run configuration in user units and its conversion into engine objects.

A config file has the INI sections listed in `snrgsim.conventions.SECTIONS`. Values stay in the
units of the file (kHz, µs, ns, mG) inside `RunConfig`; the `resolve_*` methods apply the
factors of the conventions table and are the only place where user units are converted.
"""

from __future__ import annotations

import configparser
import io
import logging
import math
import os
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from snrgsim import conventions as cv
from snrgsim import helper as hp
from snrgsim import paths
from snrgsim.core import engine as en
from snrgsim.core.sequences import Scheme
from snrgsim.errors import ConfigError
from snrgsim.prep.data_base import DataBase as db
from snrgsim.prep.noise import DdImperfection, OuParams

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)

ENV_SEED = "SNRGSIM_SEED"
ENV_THREADS = "SNRGSIM_THREADS"

Grid = Tuple[float, float, int]


@dataclass(frozen=True)
class RunConfig:
    # [run]
    out: Optional[str] = None
    scheme: str = "snrg"
    seed: int = 0
    shots: int = en.REPORT_SHOTS
    threads: int = 1
    # [gate]
    b1_mg: Optional[float] = None
    delta_z_khz: Optional[float] = None
    eps_ns: float = db.eps_DD.data
    f1_khz: Optional[float] = None
    n_cycles: Optional[int] = None
    omega_khz: float = db.Omega_drive.data
    phi_deg: float = 0.0
    spacing_ns: float = db.spacing_DD.data
    theta_pi: float = 1.0
    # [noise]
    b_khz: float = db.b_OU.data
    mode: str = "ou"
    noise_dt_us: Optional[float] = None
    per_shot_dd: bool = False
    sigma_dd: float = db.sigma_DD.data
    tau_c_us: float = db.tauc_OU.data
    # [report]
    convention: str = "p1_squared"
    det_max_khz: Optional[float] = None
    threshold: float = 0.1
    tol: float = 1e-3
    # [scan]
    detuning_khz: Grid = (-150.0, 150.0, 31)
    duration_us: Grid = (1.0, 20.0, 20)
    omega_list_khz: Tuple[float, ...] = (10.0, 20.0, 54.0, 150.0, 500.0)
    scan_type: str = "detuning_time"
    schemes: Optional[Tuple[str, ...]] = None
    # [waveform]
    b0_g: float = db.B0_bias.data
    carrier: str = "baseband"
    field_segments: Optional[str] = None
    gamma_mhz_per_g: float = db.gamma_e.data
    sample_rate_mhz: float = 100.0
    # [fit]
    b_grid_khz: Tuple[float, ...] = (30.0, 36.0, 42.0, 48.0, 54.0)
    data: Optional[str] = None
    model: str = "ou"
    sigma_grid: Tuple[float, ...] = (0.0, 0.04, 0.085, 0.13)
    tau_grid_us: Tuple[float, ...] = (50.0, 100.0, 230.0, 500.0)

    def __post_init__(self):
        for section in cv.SECTIONS:
            for key, alias in cv.get_aliases(section).items():
                value = getattr(self, key)
                if alias.choices is not None and value not in alias.choices:
                    raise ConfigError(
                        f"{section}.{key}", f"'{value}' is not one of {', '.join(alias.choices)}"
                    )
        for key in ("shots", "threads"):
            if getattr(self, key) < 1:
                raise ConfigError(f"run.{key}", f"must be at least 1, got {getattr(self, key)}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("run.seed", f"must be an unsigned 64-bit integer, got {self.seed}")
        if self.delta_z_khz is not None and self.b1_mg is not None:
            raise ConfigError("gate.delta_z_khz", "give either delta_z_khz or b1_mg, not both")
        for s in self.schemes or ():
            if s not in cv.Run.scheme.choices:
                raise ConfigError("scan.schemes", f"unknown scheme '{s}'")

    # resolution into internal units

    def resolve_scheme(self, name: Optional[str] = None) -> Scheme:
        return Scheme(self.scheme if name is None else name)

    def resolve_spec(self, name: Optional[str] = None) -> en.SchemeSpec:
        return en.SchemeSpec(
            scheme=self.resolve_scheme(name),
            omega=self.omega_khz * cv.KHZ,
            eps=self.eps_ns * cv.NS,
            spacing=self.spacing_ns * cv.NS,
            n_cycles=self.n_cycles,
            phi=self.phi_deg * cv.DEG,
        )

    def resolve_theta(self) -> float:
        return self.theta_pi * math.pi

    def resolve_gamma(self) -> float:
        """Gyromagnetic ratio in Hz/G."""
        return self.gamma_mhz_per_g * cv.MHZ

    def resolve_delta_z(self) -> float:
        """Gradient detuning in rad/s, from `delta_z_khz` or from the field mismatch
        f1 - gamma B1."""
        if self.delta_z_khz is not None:
            return self.delta_z_khz * cv.KHZ
        if self.b1_mg is not None:
            f1 = 0.0 if self.f1_khz is None else self.f1_khz * cv.Gate.f1_khz.factor
            return hp.detuning_from_mismatch(f1, self.b1_mg * cv.MG, self.resolve_gamma())
        return 0.0

    def resolve_shot_config(self) -> en.ShotConfig:
        return en.ShotConfig(
            noise_mode=en.NoiseMode(self.mode),
            ou=OuParams(b=self.b_khz * cv.KHZ, tau_c=self.tau_c_us * cv.US),
            dd_imp=DdImperfection(sigma=self.sigma_dd, per_shot=self.per_shot_dd),
            seed=self.seed,
            shots=self.shots,
            noise_dt=None if self.noise_dt_us is None else self.noise_dt_us * cv.US,
        )

    def resolve_convention(self) -> en.Convention:
        return en.Convention(self.convention)

    def resolve_det_max(self) -> Optional[float]:
        return None if self.det_max_khz is None else self.det_max_khz * cv.KHZ

    def resolve_schemes(self) -> List[str]:
        return list(self.schemes) if self.schemes else [self.scheme]

    def detuning_grid(self) -> np.ndarray:
        return _linspace(self.detuning_khz) * cv.KHZ

    def duration_grid(self) -> np.ndarray:
        return _linspace(self.duration_us) * cv.US

    def omega_grid(self) -> np.ndarray:
        return np.asarray(self.omega_list_khz, dtype=float) * cv.KHZ

    def resolve_field_segments(self) -> List[Tuple[float, float]]:
        """(B in G, T in s) pairs of the piecewise field."""
        if not self.field_segments:
            raise ConfigError("waveform.field_segments", "no field segments given")
        res = []
        for item in self.field_segments.split(","):
            try:
                b, t = item.split(":")
                res.append((float(b), float(t) * cv.US))
            except ValueError:
                raise ConfigError("waveform.field_segments", f"cannot parse '{item.strip()}'")
        return res

    def resolve_out(self, default_name: str) -> Path:
        out = Path(self.out).expanduser() if self.out else paths.RESULTS_DIR / default_name
        return out / default_name if out.is_dir() else out

    # provenance

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        d = asdict(self)
        return {s: {k: d[k] for k in cv.get_aliases(s)} for s in cv.SECTIONS}

    def with_overrides(self, **kwargs) -> RunConfig:
        """Replaces the given keys, ignoring None values."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def _linspace(grid: Grid) -> np.ndarray:
    start, stop, num = grid
    return np.linspace(start, stop, int(num))


def _parse_value(section: str, key: str, alias: cv.Alias, text: str):
    text = text.strip()
    if text == "" or text.lower() == "none":
        return None
    try:
        if alias.kind == "float":
            return float(text)
        if alias.kind == "int":
            return int(text)
        if alias.kind == "bool":
            return configparser.ConfigParser.BOOLEAN_STATES[text.lower()]
        if alias.kind == "floats":
            return tuple(hp.parse_floats(text))
        if alias.kind == "strs":
            return tuple(s.strip() for s in text.split(",") if s.strip())
        if alias.kind == "grid":
            start, stop, num = hp.parse_floats(text)
            if num < 1 or num != int(num):
                raise ValueError("the point count must be a positive integer")
            return (start, stop, int(num))
        return text
    except (ValueError, KeyError) as e:
        raise ConfigError(f"{section}.{key}", f"cannot read '{text}' as {alias.kind}: {e}")


def _format_value(alias: cv.Alias, value) -> str:
    if value is None:
        return "none"
    if alias.kind == "bool":
        return "true" if value else "false"
    if alias.kind == "floats":
        return ", ".join(repr(float(v)) for v in value)
    if alias.kind == "strs":
        return ", ".join(value)
    if alias.kind == "grid":
        return f"{float(value[0])!r}, {float(value[1])!r}, {int(value[2])}"
    if alias.kind == "float":
        return repr(float(value))
    return str(value)


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=source)
    except configparser.Error as e:
        raise ConfigError("syntax", f"{source}: {e}")
    values = {}
    for section in cp.sections():
        if section not in cv.SECTIONS:
            raise ConfigError(section, f"unknown section in {source}")
        aliases = cv.get_aliases(section)
        for key, raw in cp.items(section):
            if key not in aliases:
                raise ConfigError(f"{section}.{key}", f"unknown key in {source}")
            values[key] = _parse_value(section, key, aliases[key], raw)
    # keys whose default is not None cannot be unset
    defaults = RunConfig()
    for k, v in values.items():
        if v is None and getattr(defaults, k) is not None:
            values[k] = getattr(defaults, k)
    return RunConfig(**values)


def format_config(cfg: RunConfig) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    for section, values in cfg.to_dict().items():
        aliases = cv.get_aliases(section)
        cp[section] = {k: _format_value(aliases[k], v) for k, v in values.items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def find_config(name_or_path: Union[str, Path]) -> Path:
    """Returns an existing file path or the bundled config of that name."""
    fp = Path(name_or_path).expanduser()
    if fp.is_file():
        return fp
    bundled = paths.CONFIG_DIR / f"{Path(str(name_or_path)).stem}.ini"
    if bundled.is_file():
        return bundled
    raise ConfigError("config", f"'{name_or_path}' is neither a file nor a bundled config")


def bundled_configs() -> List[str]:
    return sorted(p.stem for p in paths.CONFIG_DIR.glob("*.ini"))


def load_config(name_or_path: Union[str, Path, None]) -> RunConfig:
    if name_or_path is None:
        return RunConfig()
    fp = find_config(name_or_path)
    logger.info(f"Load config from {fp}")
    return parse_config(fp.read_text(), source=str(fp))


def apply_env(cfg: RunConfig, environ: Mapping[str, str] = os.environ) -> RunConfig:
    """Applies the seed and thread overrides from the environment."""
    kwargs = {}
    for var, key in [(ENV_SEED, "seed"), (ENV_THREADS, "threads")]:
        if var in environ:
            try:
                kwargs[key] = int(environ[var])
            except ValueError:
                raise ConfigError(var, f"'{environ[var]}' is not an integer")
    return replace(cfg, **kwargs)

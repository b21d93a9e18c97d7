"""Command line front end: `snrgsim {gate, scan, waveform, fit}`.

Exit codes are 0 on success, 1 on usage or configuration errors and 2 on runtime errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

import snrgsim
from snrgsim import conventions as cv
from snrgsim import helper as hp
from snrgsim.analysis import fitting as ft
from snrgsim.config import RunConfig, apply_env, bundled_configs, format_config, load_config
from snrgsim.core import engine as en
from snrgsim.core import waveform as wv
from snrgsim.errors import ConfigError, SnrgError

logger = logging.getLogger(__name__)
logger.setLevel(level=logging.WARN)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", help=f"Config file or bundled name ({', '.join(bundled_configs())})"
    )
    common.add_argument("--seed", type=int, help="Master seed, overrides $SNRGSIM_SEED")
    common.add_argument("--shots", type=int, help="Monte Carlo shots per estimate")
    common.add_argument("--out", help="Output file or directory")
    common.add_argument("--threads", type=int, help="Parallel workers, overrides $SNRGSIM_THREADS")
    common.add_argument("--quiet", action="store_true", help="Hide progress bars")

    parser = _Parser(prog="snrgsim", description="Spin qubit gate simulations.")
    parser.add_argument("--version", action="version", version=f"snrgsim {snrgsim.__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gate", parents=[common], help="Fidelity and bandwidth of one pi gate")
    p.set_defaults(func=cmd_gate)
    p = sub.add_parser("scan", parents=[common], help="Detuning scans and enhancement curves")
    p.set_defaults(func=cmd_scan)
    p = sub.add_parser("waveform", parents=[common], help="Sampled gradient and drive channels")
    p.set_defaults(func=cmd_waveform)
    p = sub.add_parser("fit", parents=[common], help="Grid-search fit of noise parameters")
    p.add_argument("--data", help="(t_us, sz) CSV, overrides fit.data")
    p.add_argument(
        "--synthesize",
        action="store_true",
        help="Write the model decay at the configured parameters to --data instead of fitting",
    )
    p.set_defaults(func=cmd_fit)
    return parser


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """File values, overridden by the environment, overridden by command line flags."""
    cfg = apply_env(load_config(args.config))
    return cfg.with_overrides(seed=args.seed, shots=args.shots, out=args.out, threads=args.threads)


def provenance(cfg: RunConfig, command: str) -> Dict:
    return {
        "software": "snrgsim",
        "version": snrgsim.__version__,
        "command": command,
        "config": cfg.to_dict(),
    }


def _out_path(cfg: RunConfig, name: str, tag: Optional[str] = None) -> Path:
    fp = cfg.resolve_out(name)
    if tag is not None and fp.name != name:
        fp = fp.with_name(f"{fp.stem}_{tag}{fp.suffix}")
    return fp


def write_json(obj: Dict, fp: Path) -> Path:
    fp.parent.mkdir(parents=True, exist_ok=True)
    fp.write_text(hp.dumps_json(obj) + "\n")
    return fp


def write_csv(df: pd.DataFrame, fp: Path, cfg: RunConfig, command: str) -> Path:
    """Writes the resolved config as '#' comment lines followed by the table."""
    header = [f"# snrgsim {snrgsim.__version__} {command}"]
    header += [f"# {line}" if line else "#" for line in format_config(cfg).splitlines()]
    body = df.to_csv(index=False, float_format="%.9g", lineterminator="\n")
    fp.parent.mkdir(parents=True, exist_ok=True)
    fp.write_text("\n".join(header) + "\n" + body)
    return fp


def cmd_gate(cfg: RunConfig, args: argparse.Namespace) -> int:
    report = en.scheme_report(
        cfg.resolve_spec(),
        cfg.resolve_shot_config(),
        det_max=cfg.resolve_det_max(),
        tol=cfg.tol,
        threshold=cfg.threshold,
        convention=cfg.resolve_convention(),
        theta=cfg.resolve_theta(),
        workers=cfg.threads,
    )
    print(repr(report))
    fp = write_json(
        {**provenance(cfg, "gate"), "report": report.to_dict()},
        _out_path(cfg, f"gate_{cfg.scheme}.json"),
    )
    print(f"Report written to {fp}")
    return 0


def _enhancement_frame(df: pd.DataFrame) -> pd.DataFrame:
    df = df.copy()
    for col in ["omega", "bw_rabi", "bw_snrg"]:
        df[col] = df[col] / cv.KHZ
    names = {"omega": "omega_kHz", "bw_rabi": "bw_rabi_kHz", "bw_snrg": "bw_snrg_kHz"}
    return df.rename(columns=names)


def cmd_scan(cfg: RunConfig, args: argparse.Namespace) -> int:
    shot_cfg = cfg.resolve_shot_config()
    progress = not args.quiet
    written: List[Path] = []
    if cfg.scan_type == "enhancement":
        df = en.enhancement_scan(
            cfg.omega_grid(),
            shot_cfg,
            snrg=cfg.resolve_spec("snrg"),
            tol=cfg.tol,
            threshold=cfg.threshold,
            convention=cfg.resolve_convention(),
            workers=cfg.threads,
            progress=progress,
        )
        df = _enhancement_frame(df)
        print(df.to_string(index=False, float_format=lambda x: f"{x:.4g}"))
        written.append(write_csv(df, _out_path(cfg, "enhancement.csv"), cfg, "scan"))
    else:
        schemes = cfg.resolve_schemes()
        for name in schemes:
            spec = cfg.resolve_spec(name)
            if cfg.scan_type == "detuning_time":
                res = en.scan_detuning_time(
                    spec, cfg.detuning_grid(), cfg.duration_grid(), shot_cfg, cfg.threads, progress
                )
            else:
                res = en.scan_detuning_omega(
                    spec,
                    cfg.detuning_grid(),
                    cfg.omega_grid(),
                    shot_cfg,
                    theta=cfg.resolve_theta(),
                    workers=cfg.threads,
                    progress=progress,
                )
            print(repr(res))
            tag = name if len(schemes) > 1 else None
            fp = _out_path(cfg, f"scan_{cfg.scan_type}_{name}.csv", tag=tag)
            written.append(write_csv(res.to_frame(), fp, cfg, "scan"))
    for fp in written:
        write_json({**provenance(cfg, "scan"), "table": fp.name}, fp.with_suffix(".json"))
        print(f"Scan written to {fp}")
    return 0


def cmd_waveform(cfg: RunConfig, args: argparse.Namespace) -> int:
    gamma = cfg.resolve_gamma()
    rate = cfg.sample_rate_mhz * cv.MHZ
    if cfg.field_segments:
        wf = wv.render_field(
            cfg.resolve_field_segments(),
            rate,
            gamma=gamma,
            amplitude=cfg.omega_khz * cv.KHZ / (2 * np.pi * gamma),
            carrier_model=cfg.carrier,
            b_ref=cfg.b0_g,
        )
        name = "waveform_field.csv"
    else:
        seq = cfg.resolve_spec().gate(cfg.resolve_theta(), cfg.resolve_delta_z())
        wf = wv.render_waveform(seq, rate, gamma=gamma, carrier_model=cfg.carrier, b0=cfg.b0_g)
        name = f"waveform_{cfg.scheme}.csv"
    fp = wv.write_waveform(wf, _out_path(cfg, name), extra_meta=provenance(cfg, "waveform"))
    print(f"{len(wf)} samples written to {fp}")
    return 0


def _synthesize(cfg: RunConfig, fp: Path) -> int:
    times = cfg.duration_grid()
    spec = cfg.resolve_spec("rabi" if cfg.model == "ou" else None)
    sz = ft.decay_curve(spec, times, cfg.resolve_shot_config(), workers=cfg.threads)
    df = pd.DataFrame({"t_us": times / cv.US, "sz": sz}).dropna()
    write_csv(df, fp, cfg, "fit --synthesize")
    print(f"Synthetic {spec.scheme.value} decay with {len(df)} points written to {fp}")
    return 0


def cmd_fit(cfg: RunConfig, args: argparse.Namespace) -> int:
    data = args.data or cfg.data
    if data is None:
        raise ConfigError("fit.data", "no data file given")
    if args.synthesize:
        return _synthesize(cfg, Path(data).expanduser())

    obs = ft.read_decay(Path(data).expanduser())
    shot_cfg = cfg.resolve_shot_config()
    if cfg.model == "ou":
        res = ft.fit_ou(
            obs["t"],
            obs["sz"],
            np.asarray(cfg.b_grid_khz) * cv.KHZ,
            np.asarray(cfg.tau_grid_us) * cv.US,
            omega=cfg.omega_khz * cv.KHZ,
            cfg=shot_cfg,
            delta_z=cfg.resolve_delta_z(),
            workers=cfg.threads,
            progress=not args.quiet,
        )
    else:
        res = ft.fit_dd_imperfection(
            obs["t"],
            obs["sz"],
            list(cfg.sigma_grid),
            cfg.resolve_spec(),
            shot_cfg,
            workers=cfg.threads,
            progress=not args.quiet,
        )
    summary = res.to_dict()
    print(hp.bordered("\n".join(f"{k}: {v}" for k, v in summary.items())))
    fp = write_csv(res.residual_frame(), _out_path(cfg, f"fit_{cfg.model}.csv"), cfg, "fit")
    write_json({**provenance(cfg, "fit"), "fit": summary}, fp.with_suffix(".json"))
    print(f"Residual map written to {fp}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.quiet:
            logging.getLogger("snrgsim").setLevel(logging.ERROR)
        return args.func(resolve_run_config(args), args)
    except ConfigError as e:
        print(f"snrgsim: configuration error: {e}", file=sys.stderr)
        return 1
    except SnrgError as e:
        print(f"snrgsim: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

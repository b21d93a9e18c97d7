import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from snrgsim.analysis import fitting as ft
from snrgsim.core import engine as en
from snrgsim.core.sequences import Scheme
from snrgsim.errors import DomainError, UnidentifiableError
from snrgsim.prep import noise as nz

OMEGA = 2 * math.pi * 54e3
KHZ = 2 * math.pi * 1e3
TIMES = np.arange(1, 11) * 1e-6
CFG = en.ShotConfig(noise_mode=en.NoiseMode.OU, seed=4, shots=200, noise_dt=1e-6)


def test_decay_curve():
    spec = en.SchemeSpec(Scheme.SNRG_XY8, OMEGA)
    sz = ft.decay_curve(spec, [0.0, 0.5e-6, 2e-6], en.ShotConfig())
    assert sz[0] == 0.5
    assert np.isnan(sz[1])
    assert -0.5 <= sz[2] <= 0.5


def test_flat_or_short_data_is_rejected():
    with pytest.raises(UnidentifiableError):
        ft.fit_ou(TIMES, np.full(10, 0.5), [KHZ], [1e-4], OMEGA, CFG, progress=False)
    with pytest.raises(DomainError):
        ft.fit_ou(TIMES[:9], np.linspace(0, 0.5, 9), [KHZ], [1e-4], OMEGA, CFG, progress=False)


def test_ou_fit_recovers_bath_coupling():
    truth = nz.OuParams(b=42 * KHZ, tau_c=230e-6)
    spec = en.SchemeSpec(Scheme.RABI, OMEGA)
    data_cfg = replace(CFG, ou=truth, seed=99, shots=400)
    sz = ft.decay_curve(spec, TIMES, data_cfg)

    b_grid = [21 * KHZ, 42 * KHZ, 84 * KHZ]
    res = ft.fit_ou(TIMES, sz, b_grid, [100e-6, 230e-6], OMEGA, CFG, progress=False)
    assert res.params.b == truth.b
    assert res.residual > 0
    assert res.residual_map.shape == (3, 2)
    d = res.to_dict()
    assert d["model"] == "ou"
    assert d["b_kHz"] == pytest.approx(42.0)
    df = res.residual_frame()
    assert list(df.columns) == ["b_kHz", "tau_c_us", "ssr"]
    assert len(df) == 6


def test_ou_fit_with_common_random_numbers_is_exact():
    truth = nz.OuParams(b=42 * KHZ, tau_c=230e-6)
    spec = en.SchemeSpec(Scheme.RABI, OMEGA)
    sz = ft.decay_curve(spec, TIMES, replace(CFG, ou=truth))
    res = ft.fit_ou(
        TIMES, sz, [30 * KHZ, 42 * KHZ], [100e-6, 230e-6], OMEGA, CFG, progress=False
    )
    assert res.params == truth
    assert res.residual == pytest.approx(0.0, abs=1e-20)


@pytest.mark.slow
def test_ou_fit_lands_within_one_grid_cell():
    truth = nz.OuParams(b=42 * KHZ, tau_c=230e-6)
    spec = en.SchemeSpec(Scheme.RABI, OMEGA)
    times = np.linspace(0.5e-6, 20e-6, 40)
    sz = ft.decay_curve(spec, times, replace(CFG, ou=truth, seed=99, shots=2000))

    b_grid = np.array([30, 36, 42, 48, 54]) * KHZ
    tau_grid = np.array([50, 100, 230, 500]) * 1e-6
    cfg = replace(CFG, seed=7, shots=500)
    res = ft.fit_ou(times, sz, b_grid, tau_grid, OMEGA, cfg, progress=False)
    assert abs(res.params.b - truth.b) <= 6 * KHZ + 1e-6
    assert res.params.tau_c in tau_grid[1:]


def test_ou_fit_without_bath():
    spec = en.SchemeSpec(Scheme.RABI, OMEGA)
    sz = ft.decay_curve(spec, TIMES, en.ShotConfig())
    res = ft.fit_ou(TIMES, sz, [0.0], [230e-6], OMEGA, CFG, progress=False)
    assert res.params.b == 0
    assert res.residual == pytest.approx(0.0, abs=1e-20)


def test_dd_fit_recovers_pulse_error():
    spec = en.SchemeSpec(Scheme.SNRG_XY8, OMEGA)
    cfg = en.ShotConfig(seed=9, shots=200)
    truth = nz.DdImperfection(sigma=0.085)
    sz = ft.decay_curve(spec, TIMES, en.ShotConfig(dd_imp=truth, seed=99, shots=400))

    grid = [0.0, 0.04, 0.085, 0.13, 0.17]
    res = ft.fit_dd_imperfection(TIMES, sz, grid, spec, cfg, progress=False)
    assert abs(res.params.sigma - truth.sigma) <= 0.05
    assert res.residual > 0
    assert list(res.residual_frame().columns) == ["sigma_dd", "ssr"]
    assert res.to_dict()["sigma_dd"] == res.params.sigma

    exact = ft.decay_curve(spec, TIMES, replace(cfg, dd_imp=truth))
    res = ft.fit_dd_imperfection(TIMES, exact, grid, spec, cfg, progress=False)
    assert res.params == truth
    assert res.residual == pytest.approx(0.0, abs=1e-20)


def test_dd_fit_needs_dd_pulses():
    spec = en.SchemeSpec(Scheme.RABI, OMEGA)
    with pytest.raises(DomainError):
        ft.fit_dd_imperfection(TIMES, np.linspace(0.5, 0, 10), [0.0], spec, CFG, progress=False)


def test_read_decay(tmp_path):
    fp = tmp_path / "decay.csv"
    fp.write_text("# measured\nt_us,sz\n1,0.4\n2,0.3\n")
    df = ft.read_decay(fp)
    assert df["t"].tolist() == pytest.approx([1e-6, 2e-6])
    assert df["sz"].tolist() == [0.4, 0.3]

    pd.DataFrame({"time": [1.0], "sz": [0.1]}).to_csv(tmp_path / "bad.csv", index=False)
    with pytest.raises(DomainError):
        ft.read_decay(tmp_path / "bad.csv")
    with pytest.raises(DomainError):
        ft.read_decay(tmp_path / "missing.csv")

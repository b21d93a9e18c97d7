import math

import numpy as np
import pytest

from snrgsim.core.entity_stores import Estimate, ScanResult, SchemeReport, make_table
from snrgsim.errors import DomainError

KHZ = 2e3 * math.pi


def _scan(**kwargs) -> ScanResult:
    mean = np.array([[0.1, np.nan, -0.2], [0.3, 0.0, 0.5]])
    return ScanResult(
        axis1=np.array([-KHZ, KHZ]),
        axis2=np.array([1e-6, 2e-6, 3e-6]),
        mean_sz=mean,
        stderr=np.where(np.isnan(mean), np.nan, 0.01),
        **kwargs,
    )


def test_scan_result_frame():
    res = _scan(meta={"scheme": "snrg"})
    assert res.shape == (2, 3)
    assert res.missing == 1
    df = res.to_frame()
    assert list(df.columns) == ["detuning_kHz", "duration_us", "mean_sz", "stderr"]
    assert df["detuning_kHz"].tolist() == pytest.approx([-1, -1, -1, 1, 1, 1])
    assert df["duration_us"].tolist() == pytest.approx([1, 2, 3, 1, 2, 3])
    assert "1 missing cells" in repr(res)


def test_scan_result_validation():
    with pytest.raises(DomainError):
        ScanResult(np.zeros(2), np.zeros(3), np.zeros((3, 2)), np.zeros((3, 2)))
    with pytest.raises(DomainError):
        _scan(axis2_kind="phase")


def _report(bandwidth=49 * KHZ) -> SchemeReport:
    return SchemeReport(
        scheme="snrg",
        omega=54 * KHZ,
        fidelity=Estimate(0.9, 0.002),
        p1=Estimate(0.95, 0.001),
        convention="p1_squared",
        bandwidth=bandwidth,
        bandwidth_err=0.5 * KHZ,
        bandwidth_status="ok" if bandwidth else "no crossing",
        det_max=270 * KHZ,
        threshold=0.1,
        meta={"shots": 100},
    )


def test_scheme_report_to_dict():
    d = _report().to_dict()
    assert d["omega_kHz"] == pytest.approx(54)
    assert d["bandwidth_kHz"] == pytest.approx(49)
    assert d["bandwidth_err_kHz"] == pytest.approx(0.5)
    assert d["shots"] == 100
    assert _report().bandwidth_ratio == pytest.approx(49 / 54)
    assert "49 ± 0.5 kHz" in repr(_report())


def test_scheme_report_without_bandwidth():
    rep = _report(bandwidth=None)
    assert math.isnan(rep.to_dict()["bandwidth_kHz"])
    assert "no crossing" in repr(rep)


def test_estimate_and_table():
    assert str(Estimate(0.123456, 0.0123)) == "0.1235 ± 0.012"
    table = make_table([("a", [1.0, 2.0]), ("b", ["x", "y"])], lead_text="T:\n")
    assert table.startswith("T:\n  ")
    assert "x" in table

import math

import numpy as np
import pytest

from snrgsim.core import sequences as sq
from snrgsim.core import spincore as sc
from snrgsim.errors import DomainError

OMEGA = 2 * math.pi * 54e3


def test_xy8_axis_pattern():
    x, y = sq.X_AXIS, sq.Y_AXIS
    assert sq.XY8_AXES == (x, y, x, y, y, x, y, x)


def test_rabi_sequence():
    seq = sq.build_rabi(OMEGA, math.pi)
    assert len(seq) == 1
    assert seq.wall_time == pytest.approx(math.pi / OMEGA)
    assert sc.transfer_matrix_element(sq.compile_sequence(seq)) == pytest.approx(1.0)


def test_snrg_with_instantaneous_pulses_is_a_detuned_rotation():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 33))
        theta = rng.uniform(1e-3, 2 * np.pi)
        delta_z = rng.uniform(-5, 5) * OMEGA
        u = sq.compile_sequence(sq.build_snrg(n, theta, OMEGA, 0.0, delta_z))
        target = sc.rotation(theta, 0.0, delta_z * theta / OMEGA)
        assert sc.distance_mod_phase(u, target) < 1e-9


def test_snrg_without_gradient_equals_dpg_xy8():
    n, theta = 3, 0.8 * math.pi
    snrg = sq.build_snrg(n, theta, OMEGA, 0.0, 0.0)
    dpg = sq.build_dpg_xy8(n, theta, OMEGA, 0.0, spacing=theta / (8 * n * OMEGA))
    assert np.allclose(sq.compile_sequence(snrg).u, sq.compile_sequence(dpg).u, atol=1e-12)


def test_cpmg_single_cycle_matches_hand_product():
    theta, delta_z = math.pi, 0.7 * OMEGA
    tau = theta / (2 * OMEGA)
    half = sc.rotation(theta / 2, 0.0, delta_z * tau)
    pi_x = sc.rotation(math.pi)
    expected = pi_x @ half @ pi_x @ half
    u = sq.compile_sequence(sq.build_dpg_cpmg(1, theta, OMEGA, 0.0, delta_z=delta_z))
    assert np.allclose(u.u, expected.u, atol=1e-12)


def test_cpmg_refocuses_detuning_as_one_over_n():
    ns = np.array([4, 8, 16, 32, 64, 128, 256])
    target = sc.rotation(math.pi)
    d = [
        sc.distance_mod_phase(
            sq.compile_sequence(sq.build_dpg_cpmg(n, math.pi, OMEGA, 0.0, delta_z=OMEGA)), target
        )
        for n in ns
    ]
    slope = np.polyfit(np.log(ns), np.log(d), 1)[0]
    assert -1.3 <= slope <= -0.7


@pytest.mark.parametrize("n", [1, 2, 5])
def test_snrg_timeline_bookkeeping(n):
    eps = 20e-9
    seq = sq.build_snrg(n, math.pi, OMEGA, eps, OMEGA)
    tau_bar = math.pi / (8 * n * OMEGA)
    assert seq.pulse_count == 8 * n
    assert seq.accumulated_theta == pytest.approx(math.pi)
    assert seq.drive_time == pytest.approx(math.pi / OMEGA)
    assert abs(seq.wall_time - sq.switching_times(n, tau_bar, eps).end) < 1e-12


def test_snrg_detuning_signs_follow_pulse_train():
    n, eps = 2, 20e-9
    seq = sq.build_snrg(n, math.pi, OMEGA, eps, OMEGA)
    tm = sq.switching_times(n, math.pi / (8 * n * OMEGA), eps)
    b = seq.boundaries()
    for s, start, end in zip(seq.segments, b[:-1], b[1:]):
        assert sq.pulse_train_u((start + end) / 2, tm) == s.detuning_sign


def test_dpg_keeps_gradient_during_pulses():
    seq = sq.build_dpg_xy8(1, math.pi / 10, OMEGA, 20e-9, spacing=125e-9)
    assert {s.detuning_sign for s in seq.segments} == {1}
    assert seq.pulse_count == 8
    waits = [s for s in seq.segments if s.kind is sq.SegmentKind.WAIT]
    assert len(waits) == 2 * 9


def test_spacing_fill_and_infeasible_layouts():
    tau_bar = 125e-9
    theta = 8 * OMEGA * tau_bar
    seq = sq.build_snrg(1, theta, OMEGA, 20e-9, OMEGA, spacing=tau_bar)
    assert not any(s.kind is sq.SegmentKind.WAIT for s in seq.segments)
    with pytest.raises(DomainError):
        sq.build_dpg_xy8(1, math.pi, OMEGA, 20e-9, spacing=125e-9)
    with pytest.raises(DomainError):
        sq.build_dpg_xy8(1, math.pi / 100, OMEGA, 20e-9, spacing=10e-9)


def test_builders_reject_invalid_arguments():
    with pytest.raises(DomainError):
        sq.build_rabi(0.0, math.pi)
    with pytest.raises(DomainError):
        sq.build_snrg(0, math.pi, OMEGA, 0.0, 0.0)
    with pytest.raises(DomainError):
        sq.build_dpg_cpmg(1, math.pi, OMEGA, -1e-9)
    with pytest.raises(DomainError):
        sq.Segment.drive(OMEGA, 1e-6, sign=2)


def test_extended_appends_laboratory_frame_drive():
    seq = sq.build_snrg(1, math.pi / 2, OMEGA, 0.0, 0.0).extended(1e-6)
    assert seq.segments[-1].kind is sq.SegmentKind.DRIVE
    assert seq.total_theta == pytest.approx(math.pi / 2 + OMEGA * 1e-6)
    assert seq.extended(0.0) is seq


def test_switching_times():
    tau_bar, eps = 1e-6, 20e-9
    tm = sq.switching_times(2, tau_bar, eps)
    assert len(tm) == 16 * 2 + 2
    assert tm.t[0] == 0
    assert tm.t[1] == pytest.approx(tau_bar / 2)
    assert tm.t[2] == pytest.approx(tau_bar / 2 + eps)
    assert tm.t[3] == pytest.approx(3 * tau_bar / 2 + eps)
    assert tm.end == pytest.approx(16 * (tau_bar + eps))
    assert np.all(np.diff(tm.t) > 0)
    with pytest.raises(DomainError):
        sq.switching_times(1, 0.0, eps)


def test_pulse_train_u():
    tm = sq.switching_times(1, 1e-6, 20e-9)
    assert sq.pulse_train_u(0.0, tm) == 1
    assert sq.pulse_train_u((tm.t[1] + tm.t[2]) / 2, tm) == 0
    assert sq.pulse_train_u((tm.t[2] + tm.t[3]) / 2, tm) == -1
    assert sq.pulse_train_u((tm.t[3] + tm.t[4]) / 2, tm) == 0
    assert sq.pulse_train_u(tm.end, tm) == 1
    with pytest.raises(DomainError):
        sq.pulse_train_u(tm.end * 1.01, tm)
    with pytest.raises(DomainError):
        sq.pulse_train_u(-1e-9, tm)

"""Naming and unit conventions of the configuration keys.

Config keys carry their user unit as suffix:
    <quantity>_<unit>
Each key is declared once below, inside the class of its config section. `factor` converts the
user value into internal units (angular rad/s, s, rad, G, Hz).
"""

import math
from dataclasses import dataclass
from typing import Dict, Optional

from snrgsim import helper as hp

KHZ = hp.conv("kHz", "rad/s", 2e3 * math.pi)
US = hp.conv("µs", "s", 1e-6)
NS = hp.conv("ns", "s", 1e-9)
MG = hp.conv("mG", "G", 1e-3)
MHZ = hp.conv("MHz", "Hz", 1e6)
DEG = hp.conv("deg", "rad", math.pi / 180)


@dataclass(frozen=True)
class Alias:
    en: str
    kind: str = "float"  # float | int | str | bool | floats | strs | grid
    unit: str = ""
    factor: float = 1.0
    choices: Optional[tuple] = None


# fmt: off
class Run:
    # SORTING_START
    out = Alias(en="Output file or directory", kind="str")
    scheme = Alias(en="Control scheme", kind="str", choices=("rabi", "dpg_cpmg", "dpg_xy8", "snrg"))
    seed = Alias(en="Master seed of the per-shot substreams", kind="int")
    shots = Alias(en="Monte Carlo shots per estimate", kind="int")
    threads = Alias(en="Parallel workers", kind="int")
    # SORTING_END


class Gate:
    # SORTING_START
    b1_mg = Alias(en="Gradient field amplitude", unit="mG", factor=MG)
    delta_z_khz = Alias(en="Gradient detuning amplitude", unit="kHz", factor=KHZ)
    eps_ns = Alias(en="Duration of one DD pulse", unit="ns", factor=NS)
    f1_khz = Alias(en="Drive frequency modulation amplitude", unit="kHz", factor=hp.conv("kHz", "Hz", 1e3))
    n_cycles = Alias(en="Fixed number of DD cycles", kind="int")
    omega_khz = Alias(en="Rabi frequency", unit="kHz", factor=KHZ)
    phi_deg = Alias(en="Drive axis azimuth", unit="deg", factor=DEG)
    spacing_ns = Alias(en="Delay between DD pulses", unit="ns", factor=NS)
    theta_pi = Alias(en="Target rotation angle", unit="π", factor=math.pi)
    # SORTING_END


class Noise:
    # SORTING_START
    b_khz = Alias(en="Bath coupling", unit="kHz", factor=KHZ)
    mode = Alias(en="Bath model", kind="str", choices=("ou", "quasi_static", "none"))
    noise_dt_us = Alias(en="Longest interval with a constant bath value", unit="µs", factor=US)
    per_shot_dd = Alias(en="Share one pulse angle error per shot", kind="bool")
    sigma_dd = Alias(en="Multiplicative DD pulse angle error")
    tau_c_us = Alias(en="Bath correlation time", unit="µs", factor=US)
    # SORTING_END


class Report:
    # SORTING_START
    convention = Alias(en="Fidelity convention of the bandwidth search", kind="str", choices=("p1_squared", "p1"))
    det_max_khz = Alias(en="Largest searched detuning", unit="kHz", factor=KHZ)
    threshold = Alias(en="Bandwidth fidelity threshold")
    tol = Alias(en="Relative bisection tolerance")
    # SORTING_END


class Scan:
    # SORTING_START
    detuning_khz = Alias(en="Detuning grid (start, stop, num)", kind="grid", unit="kHz", factor=KHZ)
    duration_us = Alias(en="Total drive time grid (start, stop, num)", kind="grid", unit="µs", factor=US)
    omega_list_khz = Alias(en="Rabi frequencies", kind="floats", unit="kHz", factor=KHZ)
    scan_type = Alias(en="Scan type", kind="str", choices=("detuning_time", "detuning_omega", "enhancement"))
    schemes = Alias(en="Schemes scanned side by side", kind="strs")
    # SORTING_END


class Waveform:
    # SORTING_START
    b0_g = Alias(en="Static bias field", unit="G")
    carrier = Alias(en="Carrier model", kind="str", choices=("baseband", "rf"))
    field_segments = Alias(en="Piecewise field as B_G:T_us pairs", kind="str")
    gamma_mhz_per_g = Alias(en="Gyromagnetic ratio", unit="MHz/G", factor=MHZ)
    sample_rate_mhz = Alias(en="Sample rate", unit="MHz", factor=MHZ)
    # SORTING_END


class Fit:
    # SORTING_START
    b_grid_khz = Alias(en="Bath coupling grid", kind="floats", unit="kHz", factor=KHZ)
    data = Alias(en="Observed (t_us, sz) CSV file", kind="str")
    model = Alias(en="Fitted model", kind="str", choices=("ou", "dd"))
    sigma_grid = Alias(en="DD imperfection grid", kind="floats")
    tau_grid_us = Alias(en="Correlation time grid", kind="floats", unit="µs", factor=US)
    # SORTING_END

# fmt: on

SECTIONS = {"run": Run, "gate": Gate, "noise": Noise, "report": Report, "scan": Scan,
            "waveform": Waveform, "fit": Fit}  # fmt: skip


def get_aliases(section: str) -> Dict[str, Alias]:
    cls = SECTIONS[section]
    return {k: v for k, v in vars(cls).items() if isinstance(v, Alias)}

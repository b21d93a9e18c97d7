"""Reference parameter set of the single-NV experiment, in the units used by the config files.

Entries are named <symbol>_<context> and sorted within the formatting routine.
"""

from typing import Dict

from snrgsim.prep.par_dat import ParDat

# fmt: off

# This file is ignored from the black formatter.

class DataBase:
    # SORTING_START
    B0_bias =     ParDat(name="B0_bias", data=380.0, doc="Static bias field of the permanent magnet", src="estimated", unit="G")
    B1_gradient = ParDat(name="B1_gradient", data=70.0, doc="Amplitude of the switched microwire field", src="ODMR calibration", unit="mG")
    b_OU =        ParDat(name="b_OU", data=42.0, doc="Bath coupling of the Ornstein-Uhlenbeck detuning", src="fit to the Rabi decay", unit="kHz")
    D_NV =        ParDat(name="D_NV", data=2870.0, doc="Zero-field splitting", src="NV constant", unit="MHz")
    eps_DD =      ParDat(name="eps_DD", data=20.0, doc="Duration of one DD pi pulse", src="AWG setting", unit="ns")
    f0_MW =       ParDat(name="f0_MW", data=1800.0, doc="Microwave center frequency at B0", src="AWG setting", unit="MHz")
    f1_MW =       ParDat(name="f1_MW", data=180.0, doc="Frequency modulation amplitude of the drive", src="AWG setting", unit="kHz")
    gamma_e =     ParDat(name="gamma_e", data=2.8, doc="Electron gyromagnetic ratio", src="NV constant", unit="MHz/G")
    Omega_drive = ParDat(name="Omega_drive", data=54.0, doc="Rabi frequency of the continuous drive", src="Rabi fit", unit="kHz")
    sigma_DD =    ParDat(name="sigma_DD", data=0.085, doc="Multiplicative angle error of the DD pulses", src="fit to the SNRG decay")
    spacing_DD =  ParDat(name="spacing_DD", data=125.0, doc="Delay between consecutive DD pulses", src="AWG setting", unit="ns")
    T2star_FID =  ParDat(name="T2star_FID", data=5.0, doc="Measured free dephasing time (+-1 us)", src="Ramsey measurement", unit="µs")
    tauc_OU =     ParDat(name="tauc_OU", data=230.0, doc="Correlation time of the Ornstein-Uhlenbeck detuning", src="fit to the Rabi decay", unit="µs")
    # SORTING_END

    @classmethod
    def get_all(cls) -> Dict[str, ParDat]:
        return {k: v for k, v in vars(cls).items() if isinstance(v, ParDat)}

# fmt: on

"""The snrgsim module simulates driven spin qubit gates under detuning, correlated bath noise and
imperfect dynamical decoupling pulses, comparing plain Rabi driving with dynamically protected and
selective noise resistant gates.
"""

__title__ = "snrgsim"
__summary__ = "Selective noise resistant gate simulator"

__version__ = "0.1.0"

__license__ = "LGPLv3"

from snrgsim.analysis.analytic import FidelityCurve, bandwidth_from_curve, ideal_pi_fidelity
from snrgsim.core.engine import (
    Convention,
    NoiseMode,
    SchemeSpec,
    ShotConfig,
    enhancement_scan,
    run_ensemble,
    scan_detuning_omega,
    scan_detuning_time,
    scheme_report,
    simulate_shot,
)
from snrgsim.core.entity_stores import ScanResult, SchemeReport
from snrgsim.core.sequences import (
    Scheme,
    Sequence,
    build_dpg_cpmg,
    build_dpg_xy8,
    build_rabi,
    build_snrg,
    compile_sequence,
)
from snrgsim.prep.noise import DdImperfection, OuParams, free_induction_decay, t2_star

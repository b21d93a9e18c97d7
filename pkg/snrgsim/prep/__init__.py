"""Stochastic inputs and the documented parameter set."""
from snrgsim.prep.data_base import DataBase
from snrgsim.prep.noise import (
    DdImperfection,
    NoiseTrace,
    OuParams,
    ou_trace,
    perturb_pi,
    quasi_static_sample,
)
from snrgsim.prep.par_dat import ParDat

"""Random domino tilings of the Aztec diamond and the interlaced particle system they carry.

Submodules:

- :mod:`aztec.calculus`: exact lattice calculus (convolution, differences, sums)
- :mod:`aztec.kernels`: determinantal two-line transition kernels, exact
- :mod:`aztec.dynamics`: the interlaced particle dynamics and exact laws
- :mod:`aztec.shuffling`: domino shuffling, enumeration, particle extraction
- :mod:`aztec.asymptotics`: Gaussian limits, matrix-minor sampler, limit checks
- :mod:`aztec.validation`: exact identity suite for the kernels
- :mod:`aztec.stats`, :mod:`aztec.io`, :mod:`aztec.render`, :mod:`aztec.cli`
"""

from .dynamics import InterlacedConfiguration, initial_configuration, simulate, step
from .kernels import TwoLineState, p, p_plus, q, q_plus
from .rng import GENERATOR_ID
from .shuffling import DominoTiling, coupled_run, enumerate_all, extract_particles, grow

__version__ = "0.1.0"

__all__ = [
    "DominoTiling",
    "GENERATOR_ID",
    "InterlacedConfiguration",
    "TwoLineState",
    "coupled_run",
    "enumerate_all",
    "extract_particles",
    "grow",
    "initial_configuration",
    "p",
    "p_plus",
    "q",
    "q_plus",
    "simulate",
    "step",
]

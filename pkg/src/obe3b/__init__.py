"""Variational three-body bound states in a harmonic-oscillator basis.

Two-body forces go through Brody-Moshinsky brackets, hyperradial three-body
forces through precomputed hyperspherical coefficients, and every radial
integral through Talmi's technique.
"""
__version__ = "0.1.0"

from .basis import SectorSpec, SymmetrizedBasis, enumerate_channels, symmetrize
from .coeffs import BracketProvider, HyperTable, build_hyper_table, load_tables, save_tables
from .matel import ConfigError, ScaleParams, SystemConfig
from .solver import Solver, SpectrumResult, VariationalProtocol, assemble, optimize_scale
from .states import ChannelState
from .systems import builtin_system
from .talmi import Gaussian, Power, SqrtShifted, Tabulated

__all__ = [
    "ChannelState",
    "SectorSpec",
    "SymmetrizedBasis",
    "enumerate_channels",
    "symmetrize",
    "BracketProvider",
    "HyperTable",
    "build_hyper_table",
    "load_tables",
    "save_tables",
    "ConfigError",
    "ScaleParams",
    "SystemConfig",
    "Solver",
    "SpectrumResult",
    "VariationalProtocol",
    "assemble",
    "optimize_scale",
    "builtin_system",
    "Gaussian",
    "Power",
    "SqrtShifted",
    "Tabulated",
]

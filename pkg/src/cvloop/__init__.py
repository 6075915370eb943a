"""Gaussian and Fock simulation of a nested-loop optical quantum processor."""

from .compiler import (
    CompileError,
    InsufficientAncillaError,
    compile_cubic,
    compile_gaussian,
    compile_single_mode,
)
from .decomp import bloch_messiah, decompose_interferometer, euler_single_mode
from .gaussian import IDEAL, GaussianState, SymplecticOp
from .program import ControlProgram
from .validation import validate

__all__ = [
    "IDEAL",
    "CompileError",
    "ControlProgram",
    "GaussianState",
    "InsufficientAncillaError",
    "SymplecticOp",
    "bloch_messiah",
    "compile_cubic",
    "compile_gaussian",
    "compile_single_mode",
    "decompose_interferometer",
    "euler_single_mode",
    "validate",
]

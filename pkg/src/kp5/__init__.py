"""Numerical lab for the periodic fifth-order KP-I equation."""

from .kernels import BACKEND
from .symbols import Frequency, alpha, omega, resonance

__version__ = "0.1.0"

__all__ = ["BACKEND", "Frequency", "alpha", "omega", "resonance", "__version__"]

"""Thermodynamics of a quantum oscillator coupled to a heat bath."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]

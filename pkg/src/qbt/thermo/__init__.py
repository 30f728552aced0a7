"""Thermodynamic quantities for the damped oscillator."""
from .drude import *  # noqa: F401,F403
from .free import *  # noqa: F401,F403
from .ohmic import *  # noqa: F401,F403
from .point import *  # noqa: F401,F403

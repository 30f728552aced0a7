"""Bath descriptions: spectral densities, damping kernels and the Drude parameter map.

Two continuum baths are supported.  The Ohmic bath has
:math:`J(\\omega) = M\\gamma_o\\omega` and a memoryless kernel; the Drude bath
adds a Lorentzian cutoff :math:`\\omega_d`,

.. math:: J_d(\\omega) = \\frac{M\\gamma_o\\,\\omega\\,\\omega_d^2}{\\omega^2+\\omega_d^2},
          \\qquad \\tilde\\gamma_d(\\omega) = \\frac{\\gamma_o\\omega_d}{\\omega_d - i\\omega}.

For Drude damping the natural coordinates are the decay rates of the
susceptibility poles, :math:`(\\mathbf{w}_0, \\Omega, \\gamma)`, related to
:math:`(\\omega_0, \\omega_d, \\gamma_o)` by :func:`drude_param_map`.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, DomainError, PoleArgument

__all__ = [
    "PhysicalConstants",
    "Drude",
    "Ohmic",
    "DampingModel",
    "DeltaDistribution",
    "Branch",
    "DrudeParams",
    "CRITICAL_RTOL",
    "drude_param_map",
    "drude_param_inverse",
    "spectral_density",
    "gamma_tilde",
    "gamma_kernel",
    "model_from_dict",
    "model_to_dict",
    "load_model",
]

#: Relative window around gamma/2 = w0 classified as critical damping.
CRITICAL_RTOL = 1e-10


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a finite positive number, got {value}")
    return value


@dataclass(frozen=True)
class PhysicalConstants:
    """Unit system: reduced Planck constant, Boltzmann constant, system mass."""

    hbar: float = 1.0
    k_B: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "k_B", "M"):
            _require_positive(name, getattr(self, name))

    def beta(self, T: float) -> float:
        """Inverse temperature :math:`1/k_B T`; ``inf`` at ``T = 0``."""
        if T < 0:
            raise DomainError(f"temperature must be >= 0, got {T}")
        return math.inf if T == 0 else 1.0 / (self.k_B * T)


@dataclass(frozen=True)
class Drude:
    """Drude damping with strength `gamma_o` and cutoff `omega_d`."""

    gamma_o: float
    omega_d: float

    def __post_init__(self):
        _require_positive("gamma_o", self.gamma_o)
        _require_positive("omega_d", self.omega_d)


@dataclass(frozen=True)
class Ohmic:
    """Ohmic (memoryless) damping with strength `gamma_o`."""

    gamma_o: float

    def __post_init__(self):
        _require_positive("gamma_o", self.gamma_o)


DampingModel = Union[Drude, Ohmic]


@dataclass(frozen=True)
class DeltaDistribution:
    """Symbolic ``weight * delta(t)``; the Ohmic time kernel is not a function."""

    weight: float


class Branch(str, enum.Enum):
    OVERDAMPED = "overdamped"
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"


@dataclass(frozen=True)
class DrudeParams:
    """Drude bath in pole coordinates.

    Parameters
    ----------
    w0 : float
        :math:`\\mathbf{w}_0`, with :math:`\\mathbf{w}_0^2 = z_1 z_2`.
    Omega : float
        The real pole rate :math:`\\Omega`.
    gamma : float
        :math:`\\gamma = z_1 + z_2`.

    Attributes
    ----------
    omega_0, omega_d, gamma_o : float
        Bare frequency, cutoff and damping strength.
    w1 : float
        :math:`\\mathbf{w}_1 = \\sqrt{\\mathbf{w}_0^2 - \\gamma^2/4}` when underdamped,
        :math:`\\bar{\\mathbf{w}}_1 = \\sqrt{\\gamma^2/4 - \\mathbf{w}_0^2}` when
        overdamped, 0 when critical.
    branch : Branch
    """

    w0: float
    Omega: float
    gamma: float

    def __post_init__(self):
        _require_positive("w0", self.w0)
        _require_positive("Omega", self.Omega)
        _require_positive("gamma", self.gamma)

    @property
    def omega_d(self) -> float:
        return self.Omega + self.gamma

    @property
    def omega_0_sq(self) -> float:
        return self.w0 * self.w0 * self.Omega / (self.Omega + self.gamma)

    @property
    def omega_0(self) -> float:
        return math.sqrt(self.omega_0_sq)

    @property
    def gamma_o(self) -> float:
        wd = self.Omega + self.gamma
        return self.gamma * (self.Omega * wd + self.w0 * self.w0) / (wd * wd)

    @property
    def branch(self) -> Branch:
        half = 0.5 * self.gamma
        if abs(half - self.w0) <= CRITICAL_RTOL * self.w0:
            return Branch.CRITICAL
        return Branch.OVERDAMPED if half > self.w0 else Branch.UNDERDAMPED

    @property
    def w1(self) -> float:
        half = 0.5 * self.gamma
        if self.branch is Branch.CRITICAL:
            return 0.0
        # (w0 - g/2)(w0 + g/2) avoids cancellation in w0^2 - g^2/4
        return math.sqrt(abs((self.w0 - half) * (self.w0 + half)))

    @property
    def model(self) -> Drude:
        return Drude(gamma_o=self.gamma_o, omega_d=self.omega_d)

    def to_dict(self) -> dict:
        return {
            "parametrization": "w0-Omega-gamma",
            "w0": self.w0,
            "Omega": self.Omega,
            "gamma": self.gamma,
        }


def drude_param_map(w0: float, Omega: float, gamma: float) -> DrudeParams:
    """Build :class:`DrudeParams` from pole coordinates.

    The derived quantities follow

    .. math:: \\omega_0^2 = \\frac{\\mathbf{w}_0^2\\Omega}{\\Omega+\\gamma},\\quad
              \\omega_d = \\Omega + \\gamma,\\quad
              \\gamma_o = \\frac{\\gamma(\\Omega(\\Omega+\\gamma) + \\mathbf{w}_0^2)}{(\\Omega+\\gamma)^2}.

    Examples
    --------
    >>> p = drude_param_map(1.0, 1.0, 1.5)
    >>> p.omega_d, round(p.omega_0_sq, 12), round(p.gamma_o, 12)
    (2.5, 0.4, 0.84)
    """
    return DrudeParams(w0=w0, Omega=Omega, gamma=gamma)


def _pole_cubic_roots(omega_0: float, omega_d: float, gamma_o: float) -> np.ndarray:
    # the pole rates r solve r^3 - wd r^2 + (w0^2 + go wd) r - w0^2 wd = 0
    c1 = omega_0 * omega_0 + gamma_o * omega_d
    c0 = omega_0 * omega_0 * omega_d

    def poly(r):
        return ((r - omega_d) * r + c1) * r - c0

    def dpoly(r):
        return (3.0 * r - 2.0 * omega_d) * r + c1

    roots = np.roots([1.0, -omega_d, c1, -c0]).astype(complex)
    for _ in range(3):
        d = dpoly(roots)
        step = np.where(d != 0, poly(roots) / np.where(d != 0, d, 1.0), 0.0)
        roots = roots - step
    return roots


def drude_param_inverse(
    omega_0: float, omega_d: float, gamma_o: float, Omega_hint: float | None = None
) -> DrudeParams:
    """Recover :class:`DrudeParams` from :math:`(\\omega_0, \\omega_d, \\gamma_o)`.

    The three pole rates solve a cubic.  One of its real roots is
    :math:`\\Omega`; when all three are real (overdamped) any of them is a
    valid choice, so `Omega_hint` selects the closest one.  Without a hint the
    largest real root is used.

    Raises
    ------
    DomainError
        On non-positive input.
    """
    omega_0 = _require_positive("omega_0", omega_0)
    omega_d = _require_positive("omega_d", omega_d)
    gamma_o = _require_positive("gamma_o", gamma_o)
    roots = _pole_cubic_roots(omega_0, omega_d, gamma_o)
    scale = max(abs(r) for r in roots)
    real = sorted(r.real for r in roots if abs(r.imag) <= 1e-9 * scale)
    if not real:  # roundoff made the real root look complex
        real = [min(roots, key=lambda r: abs(r.imag)).real]
    if Omega_hint is None:
        Omega = float(real[-1])
    else:
        Omega = float(min(real, key=lambda r: abs(r - Omega_hint)))
    # gamma = z1 + z2, either as omega_d - Omega or from the linear Vieta
    # relation; take whichever is better conditioned at this point
    w02 = omega_0 * omega_0
    g_sub = omega_d - Omega
    g_vieta = (gamma_o * omega_d + w02 * (1.0 - omega_d / Omega)) / Omega
    g_est = max(abs(g_sub), abs(g_vieta), 1e-300)
    cond_sub = (omega_d + Omega) / g_est
    cond_vieta = (gamma_o * omega_d + w02 * (1.0 + 2.0 * omega_d / Omega)) / (Omega * g_est)
    gamma = g_vieta if cond_vieta < cond_sub else g_sub
    w0 = omega_0 * math.sqrt(omega_d / Omega)
    return DrudeParams(w0=w0, Omega=Omega, gamma=gamma)


def spectral_density(model: DampingModel, omega: float, consts: PhysicalConstants | None = None) -> float:
    """Spectral density :math:`J(\\omega)` for ``omega >= 0``."""
    consts = consts or PhysicalConstants()
    if not omega >= 0:
        raise DomainError(f"spectral density needs omega >= 0, got {omega}")
    ohmic = consts.M * model.gamma_o * omega
    if isinstance(model, Ohmic):
        return ohmic
    wd2 = model.omega_d * model.omega_d
    return ohmic * wd2 / (omega * omega + wd2)


def gamma_tilde(model: DampingModel, omega: complex) -> complex:
    """Frequency-domain damping function :math:`\\tilde\\gamma(\\omega)`."""
    omega = complex(omega)
    if isinstance(model, Ohmic):
        return complex(model.gamma_o)
    den = model.omega_d - 1j * omega
    if abs(den) <= 1e-14 * model.omega_d:
        raise PoleArgument(f"gamma_tilde has a pole at omega = -i*omega_d, got {omega!r}")
    return model.gamma_o * model.omega_d / den


def gamma_kernel(model: DampingModel, t: float):
    """Time-domain damping kernel :math:`\\gamma(t)` for ``t >= 0``.

    Returns a float for Drude and a :class:`DeltaDistribution` of weight
    :math:`2\\gamma_o` for Ohmic damping.
    """
    if not t >= 0:
        raise DomainError(f"damping kernel needs t >= 0, got {t}")
    if isinstance(model, Ohmic):
        return DeltaDistribution(weight=2.0 * model.gamma_o)
    return model.gamma_o * model.omega_d * math.exp(-model.omega_d * t)


def _num(d: dict, key: str) -> float:
    if key not in d:
        raise ConfigError(f"missing field '{key}'")
    try:
        value = float(d[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field '{key}' must be a number, got {d[key]!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise ConfigError(f"field '{key}' must be a finite positive number, got {value}")
    return value


def model_from_dict(d: dict):
    """Parse a model description.

    Accepted forms::

        {"model": "drude", "gamma_o": ..., "omega_d": ..., "omega_0": ...}
        {"model": "ohmic", "gamma_o": ..., "omega_0": ...}
        {"parametrization": "w0-Omega-gamma", "w0": ..., "Omega": ..., "gamma": ...}

    ``omega_0`` is optional in the first two forms.

    Returns
    -------
    model : DrudeParams, Drude or Ohmic
    omega_0 : float or None
        Bare system frequency (always set for :class:`DrudeParams`).
    """
    if not isinstance(d, dict):
        raise ConfigError("model description must be a JSON object")
    if "parametrization" in d:
        if d["parametrization"] != "w0-Omega-gamma":
            raise ConfigError(f"unknown parametrization {d['parametrization']!r}")
        p = DrudeParams(_num(d, "w0"), _num(d, "Omega"), _num(d, "gamma"))
        return p, p.omega_0
    kind = d.get("model")
    omega_0 = _num(d, "omega_0") if "omega_0" in d else None
    if kind == "drude":
        return Drude(_num(d, "gamma_o"), _num(d, "omega_d")), omega_0
    if kind == "ohmic":
        return Ohmic(_num(d, "gamma_o")), omega_0
    raise ConfigError(f"field 'model' must be 'drude' or 'ohmic', got {kind!r}")


def model_to_dict(model, omega_0: float | None = None) -> dict:
    """Inverse of :func:`model_from_dict`."""
    if isinstance(model, DrudeParams):
        return model.to_dict()
    if isinstance(model, Drude):
        d = {"model": "drude", "gamma_o": model.gamma_o, "omega_d": model.omega_d}
    elif isinstance(model, Ohmic):
        d = {"model": "ohmic", "gamma_o": model.gamma_o}
    else:
        raise ConfigError(f"cannot serialize {type(model).__name__}")
    if omega_0 is not None:
        d["omega_0"] = omega_0
    return d


def load_model(path):
    """Read a model description from a JSON file; see :func:`model_from_dict`."""
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return model_from_dict(d)

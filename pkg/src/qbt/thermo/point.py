"""One-temperature aggregate of every thermodynamic member, with serialization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..damping import Drude, DrudeParams, Ohmic, PhysicalConstants, drude_param_inverse
from ..errors import ConfigError, DomainError
from ..specfun import SeriesControl
from .drude import (
    drude_coupling_energy,
    drude_coupling_free_energy,
    drude_energy,
    drude_energy_zero_T,
    drude_variances,
    system_free_energy,
)
from .free import classical_energy, classical_free_energy, free_osc_energy, free_osc_free_energy
from .ohmic import (
    RegularizedValue,
    ohmic_coupling_free_energy,
    ohmic_coupling_free_energy_delta,
    ohmic_energy,
    ohmic_position_variance,
    ohmic_velocity_variance,
)

__all__ = ["EvalOptions", "ThermoPoint", "POINT_FIELDS", "evaluate_point", "format_float", "resolve_model"]

#: Serialization order of :class:`ThermoPoint` fields.
POINT_FIELDS = (
    "T",
    "e_free",
    "f_free",
    "E_s",
    "F_cal",
    "E_cal",
    "F_s",
    "S_s",
    "K",
    "position_var",
    "velocity_var",
    "delta_F_cal",
)

_REG_KEYS = ("divergent", "value_at_cutoff", "cutoff_terms", "cutoff_frequency", "log_slope")


@dataclass(frozen=True)
class EvalOptions:
    """What :func:`evaluate_point` computes and how.

    Attributes
    ----------
    classical : bool
        Use the :math:`\\hbar\\to0` formulas.
    include_system : bool
        Also compute :math:`F_s` and :math:`S_s` (Drude, T > 0).
    include_variances : bool
        Also compute the position and velocity variances (T > 0).
    cutoff_terms : int
        Matsubara cutoff for Ohmic divergent sums.
    cutoff_frequency : float
        Frequency cutoff for the Ohmic zero-temperature coupling free energy.
    """

    classical: bool = False
    include_system: bool = False
    include_variances: bool = False
    cutoff_terms: int = 1000
    cutoff_frequency: float = 1000.0
    ctrl: SeriesControl = field(default_factory=SeriesControl)
    quad_tol: float = 1e-11


@dataclass(frozen=True)
class ThermoPoint:
    """Thermodynamic members at one temperature.

    ``K = F_cal - f_free - E_s + e_free`` by construction whenever all four
    are finite numbers.  Ohmic divergent members are :class:`RegularizedValue`
    and then ``K`` is None.
    """

    T: float
    e_free: float
    f_free: float
    E_s: float | RegularizedValue
    F_cal: float | RegularizedValue
    K: float | None
    E_cal: float | None = None
    F_s: float | None = None
    S_s: float | None = None
    position_var: float | None = None
    velocity_var: float | RegularizedValue | None = None
    delta_F_cal: float | None = None

    def get(self, name: str):
        if name not in POINT_FIELDS:
            raise ConfigError(f"unknown output field {name!r}; choose from {', '.join(POINT_FIELDS)}")
        return getattr(self, name)

    def to_dict(self, names=None) -> dict:
        """JSON-ready mapping; divergent members become nested objects, absent ones None."""
        out = {}
        for name in names or POINT_FIELDS:
            v = self.get(name)
            if v is None and names is None:
                continue
            out[name] = v.to_dict() if isinstance(v, RegularizedValue) else v
        return out

    def csv_columns(self, names=None) -> list[str]:
        """Flat column names; a divergent member expands to ``name.key`` columns."""
        cols = []
        for name in names or POINT_FIELDS:
            if isinstance(self.get(name), RegularizedValue):
                cols.extend(f"{name}.{k}" for k in _REG_KEYS)
            else:
                cols.append(name)
        return cols

    def csv_row(self, names=None) -> list[str]:
        row = []
        for name in names or POINT_FIELDS:
            v = self.get(name)
            if isinstance(v, RegularizedValue):
                d = v.to_dict()
                row.extend(_cell(d.get(k)) for k in _REG_KEYS)
            else:
                row.append(_cell(v))
        return row


def format_float(x: float) -> str:
    """Round-trip decimal text with 17 significant digits; refuses NaN and Inf."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"refusing to emit non-finite value {x}")
    return format(x, ".17g")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return format_float(v)


def resolve_model(model, omega_0: float | None = None):
    """Normalize to :class:`DrudeParams` or ``(Ohmic, omega_0)``."""
    if isinstance(model, DrudeParams):
        return model
    if omega_0 is None:
        raise DomainError("omega_0 is required for a bare damping model")
    if isinstance(model, Drude):
        return drude_param_inverse(omega_0, model.omega_d, model.gamma_o)
    if isinstance(model, Ohmic):
        return model, float(omega_0)
    raise DomainError(f"unsupported model {type(model).__name__}")


def _classical_point(w0: float, T: float, consts: PhysicalConstants) -> ThermoPoint:
    # Both continuum models reduce exactly to E_s = 1/beta and F_cal = f_cl(omega_0)
    if not T > 0:
        raise DomainError(f"classical formulas need T > 0, got {T}")
    e = classical_energy(T, consts)
    f = classical_free_energy(w0, T, consts)
    return ThermoPoint(T=T, e_free=e, f_free=f, E_s=e, F_cal=f, K=f - f - e + e, E_cal=e)


def _drude_point(p: DrudeParams, T: float, consts: PhysicalConstants, opt: EvalOptions) -> ThermoPoint:
    w0 = p.omega_0
    e = free_osc_energy(w0, T, consts)
    f = free_osc_free_energy(w0, T, consts)
    E = drude_energy_zero_T(p, consts) if T == 0 else drude_energy(p, T, consts)
    F = drude_coupling_free_energy(p, T, consts, opt.ctrl)
    extra = {"E_cal": drude_coupling_energy(p, T, consts)}
    if T > 0 and opt.include_system:
        extra["F_s"], extra["S_s"] = system_free_energy(p, T, consts, quad_tol=opt.quad_tol)
    if T > 0 and opt.include_variances:
        extra["position_var"], extra["velocity_var"] = drude_variances(p, T, consts)
    return ThermoPoint(T=T, e_free=e, f_free=f, E_s=E, F_cal=F, K=F - f - E + e, **extra)


def _ohmic_point(w0: float, gamma_o: float, T: float, consts, opt: EvalOptions) -> ThermoPoint:
    if not T > 0:
        raise DomainError(f"Ohmic evaluation needs T > 0, got {T}")
    extra = {}
    if opt.include_variances:
        extra["position_var"] = ohmic_position_variance(w0, gamma_o, T, consts)
        extra["velocity_var"] = ohmic_velocity_variance(w0, gamma_o, T, consts, opt.cutoff_terms)
    return ThermoPoint(
        T=T,
        e_free=free_osc_energy(w0, T, consts),
        f_free=free_osc_free_energy(w0, T, consts),
        E_s=ohmic_energy(w0, gamma_o, T, consts, opt.cutoff_terms),
        F_cal=ohmic_coupling_free_energy(w0, gamma_o, T, opt.cutoff_frequency, consts, opt.ctrl),
        K=None,
        delta_F_cal=ohmic_coupling_free_energy_delta(w0, gamma_o, T, consts, opt.ctrl),
        **extra,
    )


def evaluate_point(
    model,
    T: float,
    consts: PhysicalConstants | None = None,
    options: EvalOptions | None = None,
    omega_0: float | None = None,
) -> ThermoPoint:
    """Evaluate every requested member at temperature `T`.

    Parameters
    ----------
    model : DrudeParams, Drude or Ohmic
        Bare models need `omega_0`.
    T : float
        Temperature, ``>= 0`` (Ohmic and classical need ``> 0``).

    Examples
    --------
    >>> from qbt.damping import DrudeParams
    >>> pt = evaluate_point(DrudeParams(1.0, 5.0, 4.0), 1.0)
    >>> pt.K > 0
    True
    """
    consts = consts or PhysicalConstants()
    opt = options or EvalOptions()
    if not (T >= 0 and math.isfinite(T)):
        raise DomainError(f"temperature must be finite and >= 0, got {T}")
    resolved = resolve_model(model, omega_0)
    if isinstance(resolved, DrudeParams):
        if opt.classical:
            return _classical_point(resolved.omega_0, T, consts)
        return _drude_point(resolved, T, consts, opt)
    ohm, w0 = resolved
    if opt.classical:
        return _classical_point(w0, T, consts)
    return _ohmic_point(w0, ohm.gamma_o, T, consts, opt)


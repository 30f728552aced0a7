"""Exact finite-N bath: normal modes and closed-form thermodynamics.

The oscillator :math:`(M, \\omega_0)` couples bilinearly to N bath
oscillators :math:`(m_j, \\omega_j, c_j)` with the usual counter-term, so the
full Hamiltonian is a positive quadratic form.  In mass-weighted coordinates
its stiffness matrix is

.. math:: D_{00} = \\omega_0^2 + \\sum_j \\frac{c_j^2}{M m_j \\omega_j^2},\\quad
          D_{0j} = -\\frac{c_j}{\\sqrt{M m_j}},\\quad D_{jj} = \\omega_j^2,

whose eigenvalues are the squared normal-mode frequencies :math:`\\bar\\omega_k^2`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .damping import PhysicalConstants
from .errors import ConfigError, DegenerateModes, DomainError, NotPositiveDefinite
from .specfun import hurwitz_zeta
from .thermo.free import free_osc_energy, free_osc_free_energy

__all__ = [
    "Oscillator",
    "DiscreteBath",
    "NormalModes",
    "EnergyResult",
    "DEGENERATE_RTOL",
    "stiffness_matrix",
    "normal_modes",
    "secular_residual",
    "check_interlacing",
    "energy_exact",
    "energy_oracle",
    "energy",
    "coupling_free_energy",
    "coupling_free_energy_partition",
    "coupling_energy",
    "second_law_gap",
    "random_bath",
    "bath_from_dict",
    "bath_to_dict",
    "load_bath",
    "save_bath",
]

#: Relative separation of normal modes below which the residue formula is refused.
DEGENERATE_RTOL = 1e-9


@dataclass(frozen=True)
class Oscillator:
    """One bath oscillator: mass, frequency and (real) coupling."""

    m: float
    omega: float
    c: float

    def __post_init__(self):
        for name in ("m", "omega"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"oscillator {name} must be finite and > 0, got {v!r}")
        if not (isinstance(self.c, (int, float)) and math.isfinite(self.c)):
            raise DomainError(f"coupling c must be a finite real number, got {self.c!r}")


@dataclass(frozen=True)
class DiscreteBath:
    """System oscillator plus N bath oscillators, stored with ascending frequencies."""

    M: float
    omega_0: float
    oscillators: tuple[Oscillator, ...]

    def __post_init__(self):
        for name in ("M", "omega_0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
        oscs = tuple(sorted(self.oscillators, key=lambda o: o.omega))
        if not oscs:
            raise DomainError("a bath needs at least one oscillator")
        object.__setattr__(self, "oscillators", oscs)

    @property
    def N(self) -> int:
        return len(self.oscillators)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([o.omega for o in self.oscillators])

    @property
    def decoupled(self) -> bool:
        return all(o.c == 0 for o in self.oscillators)


@dataclass(frozen=True)
class NormalModes:
    """Normal-mode frequencies (ascending) and the system components of the modes."""

    omega_bar: tuple[float, ...]
    system_weights: tuple[float, ...]


@dataclass(frozen=True)
class EnergyResult:
    value: float
    used_oracle: bool


def stiffness_matrix(bath: DiscreteBath) -> np.ndarray:
    """Mass-weighted stiffness matrix including the counter-term."""
    n = bath.N
    D = np.zeros((n + 1, n + 1))
    d00 = bath.omega_0**2
    for j, o in enumerate(bath.oscillators, start=1):
        d00 += o.c * o.c / (bath.M * o.m * o.omega**2)
        D[0, j] = D[j, 0] = -o.c / math.sqrt(bath.M * o.m)
        D[j, j] = o.omega**2
    D[0, 0] = d00
    return D


def _secular(u: float, d00: float, off2: np.ndarray, poles: np.ndarray) -> tuple[float, float]:
    # s(u) = D00 - u - sum D0j^2 / (w_j^2 - u) and its derivative
    r = 1.0 / (poles - u)
    return d00 - u - float(np.sum(off2 * r)), -1.0 - float(np.sum(off2 * r * r))


def _polish(u: float, d00: float, off2: np.ndarray, poles: np.ndarray) -> float:
    """Newton refinement of an eigenvalue on the secular equation, kept only if it helps."""
    if not off2.size or np.min(np.abs(poles - u)) <= 1e-13 * u:
        return u
    below, above = poles[poles < u], poles[poles > u]
    lo = below.max() if below.size else 0.0
    hi = above.min() if above.size else math.inf
    best, best_res = u, abs(_secular(u, d00, off2, poles)[0])
    for _ in range(8):
        s, ds = _secular(u, d00, off2, poles)
        step = s / ds
        nu = u - step
        if not lo < nu < hi:
            break
        u = nu
        res = abs(_secular(u, d00, off2, poles)[0])
        if res < best_res:
            best, best_res = u, res
        if abs(step) <= 1e-16 * u:
            break
    return best


def normal_modes(bath: DiscreteBath) -> NormalModes:
    """Normal-mode frequencies of the full quadratic Hamiltonian.

    Eigenvalues of :func:`stiffness_matrix` seed a Newton refinement on the
    secular equation (within its interlacing bracket), which keeps weakly
    coupled modes accurate.

    Raises
    ------
    NotPositiveDefinite
        If an eigenvalue is not positive.

    Examples
    --------
    >>> b = DiscreteBath(1.0, 1.0, (Oscillator(1.0, 2.0, 0.0),))
    >>> normal_modes(b).omega_bar
    (1.0, 2.0)
    """
    D = stiffness_matrix(bath)
    # uncoupled bath oscillators are exact eigenvectors; only the coupled block is solved
    coupled = np.flatnonzero(D[0, 1:] != 0.0) + 1
    free = np.flatnonzero(D[0, 1:] == 0.0) + 1
    block = np.concatenate(([0], coupled))
    Dc = D[np.ix_(block, block)]
    u, U = np.linalg.eigh(Dc)
    if u[0] <= 0:
        raise NotPositiveDefinite(f"stiffness matrix has eigenvalue {u[0]:g}")
    off2 = Dc[0, 1:] ** 2
    poles = np.diag(Dc)[1:]
    u = np.array([_polish(float(x), Dc[0, 0], off2, poles) for x in u])
    w = U[0] ** 2
    u = np.concatenate((u, np.diag(D)[free]))
    w = np.concatenate((w, np.zeros(free.size)))
    order = np.argsort(u, kind="stable")
    u, w = u[order], w[order]
    return NormalModes(omega_bar=tuple(float(x) for x in np.sqrt(u)), system_weights=tuple(float(x) for x in w))


def secular_residual(bath: DiscreteBath, omega: float) -> float:
    """:math:`|\\omega_0^2 - \\omega^2 - i\\omega\\tilde\\gamma(\\omega)|` for the discrete kernel,
    :math:`-i\\omega\\tilde\\gamma = (\\omega^2/M)\\sum_j c_j^2/(m_j\\omega_j^2(\\omega^2-\\omega_j^2))`."""
    w2 = omega * omega
    s = bath.omega_0**2 - w2
    for o in bath.oscillators:
        if o.c != 0:
            s += w2 / bath.M * o.c * o.c / (o.m * o.omega**2 * (w2 - o.omega**2))
    return abs(s)


def check_interlacing(bath: DiscreteBath, modes: NormalModes, rtol: float = 1e-12) -> bool:
    """True when :math:`\\bar\\omega_0 \\le \\omega_1 \\le \\bar\\omega_1 \\le \\dots \\le \\omega_N \\le \\bar\\omega_N`
    and :math:`\\bar\\omega_0 \\le \\omega_0 \\le \\bar\\omega_N`, up to `rtol`."""
    wb = modes.omega_bar
    ws = bath.omegas

    def le(a, b):
        return a <= b * (1.0 + rtol)

    ok = all(le(wb[j], ws[j]) and le(ws[j], wb[j + 1]) for j in range(bath.N))
    return ok and le(wb[0], bath.omega_0) and le(bath.omega_0, wb[-1])


def _T_check(T: float) -> None:
    if not (T >= 0 and math.isfinite(T)):
        raise DomainError(f"temperature must be finite and >= 0, got {T}")


def energy_exact(
    bath: DiscreteBath,
    T: float,
    consts: PhysicalConstants | None = None,
    modes: NormalModes | None = None,
) -> float:
    """Closed-form system energy from the residues of the susceptibility.

    .. math:: E_s = \\frac12\\sum_k e(\\bar\\omega_k,T)\\Big(1 + \\frac{\\omega_0^2}{\\bar\\omega_k^2}\\Big)
              \\frac{\\prod_j(\\bar\\omega_k^2 - \\omega_j^2)}{\\prod_{k'\\ne k}(\\bar\\omega_k^2 - \\bar\\omega_{k'}^2)}

    Raises
    ------
    DegenerateModes
        If two normal modes agree to within :data:`DEGENERATE_RTOL`.
    """
    consts = _consts(bath, consts)
    _T_check(T)
    modes = modes or normal_modes(bath)
    wb = np.array(modes.omega_bar)
    if np.any(np.diff(wb) <= DEGENERATE_RTOL * wb[1:]):
        raise DegenerateModes("normal modes coincide; the residue formula does not apply")
    u = wb * wb
    uj = bath.omegas ** 2
    w02 = bath.omega_0**2
    total = []
    for k, uk in enumerate(u):
        num = np.prod(uk - uj)
        den = np.prod(np.delete(uk - u, k))
        total.append(0.5 * free_osc_energy(wb[k], T, consts) * (1.0 + w02 / uk) * num / den)
    return math.fsum(total)


def energy_oracle(bath: DiscreteBath, T: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`\\langle H_s\\rangle` by transforming to normal coordinates.

    Each unit-mass normal coordinate has :math:`\\langle Q_k^2\\rangle =
    (\\hbar/2\\bar\\omega_k)\\coth` and :math:`\\langle P_k^2\\rangle =
    (\\hbar\\bar\\omega_k/2)\\coth`; the system position and momentum are
    read off the eigenvectors.  Never degenerates.
    """
    consts = _consts(bath, consts)
    _T_check(T)
    u, U = np.linalg.eigh(stiffness_matrix(bath))
    if u[0] <= 0:
        raise NotPositiveDefinite(f"stiffness matrix has eigenvalue {u[0]:g}")
    wb = np.sqrt(u)
    hbar, M = consts.hbar, bath.M
    if T == 0:
        coth = np.ones_like(wb)
    else:
        half_x = hbar * wb / (2.0 * consts.k_B * T)
        coth = np.where(half_x > 20.0, 1.0, 1.0 / np.tanh(np.minimum(half_x, 20.0)))
    q2 = float(np.sum(U[0] ** 2 * hbar / (2.0 * wb) * coth)) / M
    p2 = M * float(np.sum(U[0] ** 2 * hbar * wb / 2.0 * coth))
    return p2 / (2.0 * M) + 0.5 * M * bath.omega_0**2 * q2


def energy(bath: DiscreteBath, T: float, consts: PhysicalConstants | None = None) -> EnergyResult:
    """Residue formula, falling back to :func:`energy_oracle` for degenerate modes."""
    try:
        return EnergyResult(energy_exact(bath, T, consts), used_oracle=False)
    except DegenerateModes:
        return EnergyResult(energy_oracle(bath, T, consts), used_oracle=True)


def _consts(bath: DiscreteBath, consts: PhysicalConstants | None) -> PhysicalConstants:
    # the system mass lives on the bath; only hbar and k_B come from consts
    consts = consts or PhysicalConstants()
    if consts.M != bath.M:
        consts = PhysicalConstants(hbar=consts.hbar, k_B=consts.k_B, M=bath.M)
    return consts


def coupling_free_energy(
    bath: DiscreteBath,
    T: float,
    consts: PhysicalConstants | None = None,
    modes: NormalModes | None = None,
) -> float:
    """:math:`\\mathcal F_s = \\sum_k f(\\bar\\omega_k,T) - \\sum_j f(\\omega_j,T)`."""
    consts = _consts(bath, consts)
    _T_check(T)
    modes = modes or normal_modes(bath)
    terms = [free_osc_free_energy(w, T, consts) for w in modes.omega_bar]
    terms += [-free_osc_free_energy(o.omega, T, consts) for o in bath.oscillators]
    return math.fsum(terms)


def coupling_free_energy_partition(bath: DiscreteBath, T: float, consts: PhysicalConstants | None = None) -> float:
    """:math:`-\\beta^{-1}\\ln\\mathcal Z_\\beta` from determinants, without diagonalizing.

    With :math:`2\\sinh(x/2) = x\\prod_n(1 + x^2/4\\pi^2n^2)`,

    .. math:: \\beta\\mathcal F_s = \\tfrac12\\ln\\det(\\beta^2\\hbar^2 D) - \\sum_j\\ln(\\beta\\hbar\\omega_j)
              + \\sum_{n\\ge1}\\Big[\\ln\\det(1 + D/\\nu_n^2) - \\sum_j\\ln(1 + \\omega_j^2/\\nu_n^2)\\Big],

    the product summed directly while :math:`\\nu_n` is comparable to the
    spectrum and closed with Hurwitz zeta moments of :math:`D` beyond.
    Needs ``T > 0``.
    """
    consts = _consts(bath, consts)
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"partition-function route needs finite T > 0, got {T}")
    D = stiffness_matrix(bath)
    uj = bath.omegas ** 2
    bh = consts.hbar / (consts.k_B * T)
    sign, logdet = np.linalg.slogdet(D)
    if sign <= 0:
        raise NotPositiveDefinite("stiffness matrix is not positive definite")
    n_dim = D.shape[0]
    head = 0.5 * (logdet + 2 * n_dim * math.log(bh)) - float(np.sum(np.log(bh * np.sqrt(uj))))
    nu1 = 2.0 * math.pi / bh
    scale = float(np.abs(D).sum(axis=1).max())  # bounds the spectrum
    n_direct = max(30, math.ceil(40.0 * math.sqrt(scale) / nu1))
    n = np.arange(1, n_direct + 1)
    nu2 = (nu1 * n) ** 2
    eye = np.eye(n_dim)
    mats = eye[None, :, :] + D[None, :, :] / nu2[:, None, None]
    _, ld = np.linalg.slogdet(mats)
    bathlog = np.log1p(uj[None, :] / nu2[:, None]).sum(axis=1)
    direct = math.fsum(ld - bathlog)
    # ln det(1 + D x) - sum ln(1 + u_j x) = sum_k (-1)^(k+1) x^k [tr D^k - sum u_j^k] / k
    tail = 0.0
    Dk = eye
    for k in range(1, 6):
        Dk = Dk @ D
        moment = float(np.trace(Dk)) - float(np.sum(uj**k))
        tail += (-1) ** (k + 1) * moment / k * hurwitz_zeta(2.0 * k, n_direct + 1) / nu1 ** (2 * k)
    return (head + direct + tail) * consts.k_B * T


def coupling_energy(
    bath: DiscreteBath,
    T: float,
    consts: PhysicalConstants | None = None,
    modes: NormalModes | None = None,
) -> float:
    """:math:`\\mathcal E_s = \\sum_k e(\\bar\\omega_k,T) - \\sum_j e(\\omega_j,T)`."""
    consts = _consts(bath, consts)
    _T_check(T)
    modes = modes or normal_modes(bath)
    terms = [free_osc_energy(w, T, consts) for w in modes.omega_bar]
    terms += [-free_osc_energy(o.omega, T, consts) for o in bath.oscillators]
    return math.fsum(terms)


def second_law_gap(
    bath: DiscreteBath,
    T: float,
    consts: PhysicalConstants | None = None,
    modes: NormalModes | None = None,
) -> float:
    """:math:`K = \\mathcal F_s - f(\\omega_0,T) - E_s + e(\\omega_0,T)`."""
    consts = _consts(bath, consts)
    modes = modes or normal_modes(bath)
    try:
        E = energy_exact(bath, T, consts, modes)
    except DegenerateModes:
        E = energy_oracle(bath, T, consts)
    w0 = bath.omega_0
    return (
        coupling_free_energy(bath, T, consts, modes)
        - free_osc_free_energy(w0, T, consts)
        - E
        + free_osc_energy(w0, T, consts)
    )


def random_bath(
    n: int,
    rng: np.random.Generator | int = 42,
    M: float = 1.0,
    omega_0: float = 1.0,
) -> DiscreteBath:
    """Random bath for property tests.

    Frequencies are log-uniform in :math:`[0.1\\omega_0, 10\\omega_0]`, masses
    log-uniform in [0.5, 2], and the couplings are scaled so the counter-term
    :math:`\\sum_j c_j^2/(2m_j\\omega_j^2)` is a random fraction of
    :math:`M\\omega_0^2`.
    """
    if n < 1:
        raise DomainError(f"bath size must be >= 1, got {n}")
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    omegas = omega_0 * 10.0 ** rng.uniform(-1.0, 1.0, n)
    masses = 2.0 ** rng.uniform(-1.0, 1.0, n)
    c = rng.standard_normal(n)
    counter = float(np.sum(c * c / (2.0 * masses * omegas**2)))
    c *= math.sqrt(rng.uniform(0.05, 1.0) * M * omega_0**2 / counter)
    oscs = tuple(Oscillator(float(m), float(w), float(cj)) for m, w, cj in zip(masses, omegas, c))
    return DiscreteBath(M=M, omega_0=omega_0, oscillators=oscs)


def _field(d: dict, key: str, where: str, positive: bool = True) -> float:
    if key not in d:
        raise ConfigError(f"{where}: missing field '{key}'")
    try:
        v = float(d[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: field '{key}' must be a number, got {d[key]!r}") from None
    if not math.isfinite(v) or (positive and v <= 0):
        raise ConfigError(f"{where}: field '{key}' must be {'positive and ' if positive else ''}finite, got {v}")
    return v


def bath_from_dict(d: dict) -> DiscreteBath:
    """Parse ``{"M":…, "omega_0":…, "oscillators":[{"m":…, "omega":…, "c":…}, …]}``."""
    if not isinstance(d, dict):
        raise ConfigError("bath description must be a JSON object")
    M = _field(d, "M", "bath")
    w0 = _field(d, "omega_0", "bath")
    oscs = d.get("oscillators")
    if not isinstance(oscs, list) or not oscs:
        raise ConfigError("bath: 'oscillators' must be a non-empty list")
    parsed = []
    for i, o in enumerate(oscs):
        where = f"oscillators[{i}]"
        if not isinstance(o, dict):
            raise ConfigError(f"{where}: must be an object")
        parsed.append(Oscillator(_field(o, "m", where), _field(o, "omega", where), _field(o, "c", where, positive=False)))
    return DiscreteBath(M=M, omega_0=w0, oscillators=tuple(parsed))


def bath_to_dict(bath: DiscreteBath) -> dict:
    return {
        "M": bath.M,
        "omega_0": bath.omega_0,
        "oscillators": [{"m": o.m, "omega": o.omega, "c": o.c} for o in bath.oscillators],
    }


def load_bath(path) -> DiscreteBath:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return bath_from_dict(d)


def save_bath(bath: DiscreteBath, path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(bath_to_dict(bath), fh, indent=2)
        fh.write("\n")

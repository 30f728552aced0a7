"""Command-line front end: ``qbt figure1|sweep|discrete|verify|poles``.

Every output is deterministic: fixed float formatting (17 significant
digits in CSV, round-trip ``repr`` in JSON), fixed seeds, LF line endings
and records in input order regardless of ``--jobs``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .damping import DrudeParams, Ohmic, PhysicalConstants, model_from_dict, model_to_dict
from .discrete_bath import (
    bath_from_dict,
    bath_to_dict,
    check_interlacing,
    coupling_energy,
    coupling_free_energy,
    energy,
    energy_oracle,
    normal_modes,
    random_bath,
    secular_residual,
    second_law_gap,
)
from .errors import ConfigError, QBTError
from .response import drude_poles
from .specfun import SeriesControl
from .thermo import POINT_FIELDS, EvalOptions, evaluate_point, format_float, resolve_model, second_law_gap_drude
from .thermo.free import free_osc_energy, free_osc_free_energy
from .verify import FIGURE1_SETS, format_report, run_checks

__all__ = ["SweepConfig", "TGrid", "main", "build_parser", "cmd_figure1", "cmd_sweep", "cmd_discrete", "cmd_verify"]

log = logging.getLogger("qbt")


# configuration ----------------------------------------------------------------


@dataclass(frozen=True)
class TGrid:
    min: float
    max: float
    points: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.points == 1:
            return [self.min]
        if self.scale == "log":
            return [float(x) for x in np.logspace(math.log10(self.min), math.log10(self.max), self.points)]
        return [float(x) for x in np.linspace(self.min, self.max, self.points)]


@dataclass(frozen=True)
class SweepConfig:
    """Parsed sweep description.

    JSON layout::

        {"model": {...},                       # as accepted by model_from_dict
         "T_grid": {"min": 0.01, "max": 10, "points": 10, "scale": "log"},
         "outputs": ["E_s", "F_cal", "K"],
         "constants": {"hbar": 1, "k_B": 1, "M": 1},
         "tolerances": {"rel_tol": 1e-12, "abs_tol": 1e-14, "max_terms": 1000000,
                        "quad_tol": 1e-11},
         "options": {"classical": false, "cutoff_terms": 1000, "cutoff_frequency": 1000}}

    Only ``model`` and ``T_grid`` are required.
    """

    model: object
    omega_0: float | None
    T_grid: TGrid
    outputs: tuple[str, ...]
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    options: EvalOptions = field(default_factory=EvalOptions)

    @classmethod
    def from_dict(cls, d: dict, classical: bool = False, tol: float | None = None) -> "SweepConfig":
        if not isinstance(d, dict):
            raise ConfigError("sweep config must be a JSON object")
        known = {"model", "T_grid", "outputs", "constants", "tolerances", "options"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(extra))}")
        if "model" not in d:
            raise ConfigError("missing field 'model'")
        try:
            model, omega_0 = model_from_dict(d["model"])
        except ConfigError as exc:
            raise ConfigError(f"model: {exc}") from None
        if not isinstance(model, DrudeParams) and omega_0 is None:
            raise ConfigError("model.omega_0: required for thermodynamic evaluation")
        grid = _parse_grid(d.get("T_grid"))
        outputs = d.get("outputs", ["E_s", "F_cal", "K"])
        if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
            raise ConfigError("outputs: must be a list of field names")
        for o in outputs:
            if o not in POINT_FIELDS:
                raise ConfigError(f"outputs: unknown field {o!r}; choose from {', '.join(POINT_FIELDS)}")
        outputs = tuple(["T"] + [o for o in outputs if o != "T"])
        consts = _parse_consts(d.get("constants", {}))
        ctrl, quad_tol = _parse_tolerances(d.get("tolerances", {}), tol)
        opts = d.get("options", {})
        if not isinstance(opts, dict):
            raise ConfigError("options: must be an object")
        bad = set(opts) - {"classical", "cutoff_terms", "cutoff_frequency"}
        if bad:
            raise ConfigError(f"options: unknown field(s) {', '.join(sorted(bad))}")
        cutoff_terms = opts.get("cutoff_terms", 1000)
        if not isinstance(cutoff_terms, int) or cutoff_terms < 10:
            raise ConfigError("options.cutoff_terms: must be an integer >= 10")
        cutoff_frequency = opts.get("cutoff_frequency", 1000.0)
        if not isinstance(cutoff_frequency, (int, float)) or not cutoff_frequency > 0:
            raise ConfigError("options.cutoff_frequency: must be a positive number")
        options = EvalOptions(
            classical=bool(opts.get("classical", False)) or classical,
            include_system=bool({"F_s", "S_s"} & set(outputs)),
            include_variances=bool({"position_var", "velocity_var"} & set(outputs)),
            cutoff_terms=cutoff_terms,
            cutoff_frequency=float(cutoff_frequency),
            ctrl=ctrl,
            quad_tol=quad_tol,
        )
        if options.classical and grid.min <= 0:
            raise ConfigError("T_grid.min: classical formulas need T > 0")
        if isinstance(model, Ohmic) and grid.min <= 0 and not options.classical:
            raise ConfigError("T_grid.min: Ohmic evaluation needs T > 0")
        return cls(model, omega_0, grid, outputs, consts, options)


def _parse_grid(g) -> TGrid:
    if not isinstance(g, dict):
        raise ConfigError("T_grid: required object with min, max, points")
    for key in ("min", "max", "points"):
        if key not in g:
            raise ConfigError(f"T_grid.{key}: missing")
    lo, hi, n = g["min"], g["max"], g["points"]
    scale = g.get("scale", "linear")
    if not isinstance(lo, (int, float)) or not (math.isfinite(lo) and lo >= 0):
        raise ConfigError(f"T_grid.min: must be a finite number >= 0, got {lo!r}")
    if not isinstance(hi, (int, float)) or not (math.isfinite(hi) and hi >= lo):
        raise ConfigError(f"T_grid.max: must be a finite number >= min, got {hi!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError(f"T_grid.points: must be an integer >= 1, got {n!r}")
    if scale not in ("linear", "log"):
        raise ConfigError(f"T_grid.scale: must be 'linear' or 'log', got {scale!r}")
    if scale == "log" and lo <= 0:
        raise ConfigError("T_grid.min: must be > 0 for a log grid")
    return TGrid(float(lo), float(hi), n, scale)


def _parse_consts(c) -> PhysicalConstants:
    if not isinstance(c, dict):
        raise ConfigError("constants: must be an object")
    bad = set(c) - {"hbar", "k_B", "M"}
    if bad:
        raise ConfigError(f"constants: unknown field(s) {', '.join(sorted(bad))}")
    try:
        return PhysicalConstants(**{k: float(v) for k, v in c.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"constants: {exc}") from None


def _parse_tolerances(t, tol: float | None) -> tuple[SeriesControl, float]:
    if not isinstance(t, dict):
        raise ConfigError("tolerances: must be an object")
    bad = set(t) - {"rel_tol", "abs_tol", "max_terms", "quad_tol"}
    if bad:
        raise ConfigError(f"tolerances: unknown field(s) {', '.join(sorted(bad))}")
    quad_tol = float(t.get("quad_tol", 1e-11))
    kw = {k: t[k] for k in ("rel_tol", "abs_tol") if k in t}
    if "max_terms" in t:
        kw["max_terms"] = int(t["max_terms"])
    if tol is not None:
        kw["rel_tol"] = tol
    try:
        return SeriesControl(**kw), quad_tol
    except (TypeError, ValueError, ConfigError) as exc:
        raise ConfigError(f"tolerances: {exc}") from None


# output helpers -----------------------------------------------------------------


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


# commands -----------------------------------------------------------------------


def _figure1_row(T: float, tol: float | None = None, classical: bool = False) -> list[float]:
    ctrl = SeriesControl(rel_tol=tol) if tol else SeriesControl()
    out = [T]
    for W, g in FIGURE1_SETS:
        p = DrudeParams(1.0, W, g)
        if classical:
            K = evaluate_point(p, T, options=EvalOptions(classical=True)).K
        else:
            K = second_law_gap_drude(p, T, ctrl=ctrl)
        out.append(K / p.w0)  # hbar = 1
    return out


def cmd_figure1(
    out: str | None, jobs: int = 1, tol: float | None = None, points: int = 200, classical: bool = False
) -> str:
    """Write the four :math:`K_d(T)/\\hbar\\mathbf{w}_0` curves on a log grid over [0.01, 50]."""
    Ts = [float(x) for x in np.logspace(-2, math.log10(50.0), points)]
    rows = _map(partial(_figure1_row, tol=tol, classical=classical), Ts, jobs)
    header = ["T"] + [f"K_over_hw0_set{i}" for i in range(1, len(FIGURE1_SETS) + 1)]
    text = _csv_text(header, [[format_float(v) for v in r] for r in rows])
    _write_text(out, text)
    return text


def _sweep_point(T: float, cfg: SweepConfig):
    return evaluate_point(cfg.model, T, cfg.constants, cfg.options, omega_0=cfg.omega_0)


def cmd_sweep(cfg: SweepConfig, out: str | None, jobs: int = 1, fmt: str | None = None) -> str:
    """Evaluate the requested fields on the configured temperature grid."""
    Ts = cfg.T_grid.values()
    points = _map(partial(_sweep_point, cfg=cfg), Ts, jobs)
    fmt = fmt or ("json" if out and out.endswith(".json") else "csv")
    names = list(cfg.outputs)
    if fmt == "json":
        doc = {
            "model": model_to_dict(cfg.model, cfg.omega_0),
            "classical": cfg.options.classical,
            "records": [pt.to_dict(names) for pt in points],
        }
        text = _json_text(doc)
    else:
        text = _csv_text(points[0].csv_columns(names), [pt.csv_row(names) for pt in points])
    _write_text(out, text)
    return text


def _parse_temps(spec: str) -> list[float]:
    try:
        Ts = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"--temps: expected comma-separated numbers, got {spec!r}") from None
    if not Ts or any(not (math.isfinite(T) and T >= 0) for T in Ts):
        raise ConfigError("--temps: temperatures must be finite and >= 0")
    return Ts


def cmd_discrete(bath, temps: list[float], out: str | None, consts: PhysicalConstants | None = None) -> dict:
    """Normal modes, interlacing and thermodynamics of a finite bath, as a JSON report."""
    consts = consts or PhysicalConstants(M=bath.M)
    modes = normal_modes(bath)
    records = []
    for T in temps:
        res = energy(bath, T, consts)
        oracle = energy_oracle(bath, T, consts)
        F = coupling_free_energy(bath, T, consts, modes)
        records.append(
            {
                "T": T,
                "E_s": res.value,
                "E_s_oracle": oracle,
                "E_s_rel_delta": abs(res.value - oracle) / abs(oracle),
                "oracle_fallback": res.used_oracle,
                "e_free": free_osc_energy(bath.omega_0, T, consts),
                "f_free": free_osc_free_energy(bath.omega_0, T, consts),
                "F_cal": F,
                "E_cal": coupling_energy(bath, T, consts, modes),
                "K": second_law_gap(bath, T, consts, modes),
            }
        )
    report = {
        "bath": bath_to_dict(bath),
        "normal_modes": list(modes.omega_bar),
        "interlacing": check_interlacing(bath, modes),
        "max_secular_residual": max(secular_residual(bath, w) for w in modes.omega_bar),
        "temperatures": records,
    }
    _write_text(out, _json_text(report))
    return report


def cmd_verify(level: str, out: str | None = None) -> int:
    """Run the verification suite; 0 iff every check passes."""
    checks = run_checks(level)
    _write_text(out, format_report(checks))
    return 0 if all(c.passed for c in checks) else 1


def cmd_poles(model, omega_0: float | None, out: str | None) -> dict:
    """Pole rates and branch of a Drude model."""
    p = resolve_model(model, omega_0)
    if not isinstance(p, DrudeParams):
        raise ConfigError("poles: only Drude models have a finite pole set")
    poles = drude_poles(p)

    def c(z):
        return {"re": z.real, "im": z.imag}

    doc = {
        "params": p.to_dict(),
        "omega_0": p.omega_0,
        "omega_d": p.omega_d,
        "gamma_o": p.gamma_o,
        "branch": p.branch.value,
        "rates": {"Omega": c(poles.Omega), "z1": c(poles.z1), "z2": c(poles.z2)},
    }
    _write_text(out, _json_text(doc))
    return doc


# entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON input (sweep config, bath, or model)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    common.add_argument("--seed", type=int, default=42, help="seed for random baths (unsigned 64-bit)")
    common.add_argument("--tol", type=float, help="relative tolerance of the thermal series")
    common.add_argument("--classical", action="store_true", help="use the hbar -> 0 formulas")

    ap = argparse.ArgumentParser(prog="qbt", description="Thermodynamics of a damped quantum oscillator.")
    sub = ap.add_subparsers(dest="command", required=True)
    f1 = sub.add_parser("figure1", parents=[common], help="K_d(T) for the four reference parameter sets")
    f1.add_argument("--points", type=int, default=200)
    sw = sub.add_parser("sweep", parents=[common], help="temperature sweep from a JSON config")
    sw.add_argument("--format", choices=("csv", "json"))
    di = sub.add_parser("discrete", parents=[common], help="finite-bath report")
    di.add_argument("--temps", default="0,0.1,1,10", help="comma-separated temperatures")
    di.add_argument("--random", type=int, metavar="N", help="generate a random N-oscillator bath instead of --config")
    ve = sub.add_parser("verify", parents=[common], help="run the verification suite")
    ve.add_argument("level", choices=("quick", "full"), nargs="?", default="quick")
    sub.add_parser("poles", parents=[common], help="pole rates of a Drude model")
    return ap


def _setup_logging() -> None:
    level = os.environ.get("QBT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr, format="%(name)s: %(message)s")


def _load_json(path: str | None, what: str):
    if not path:
        raise ConfigError(f"--config is required ({what})")
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.tol is not None and not args.tol > 0:
            raise ConfigError("--tol must be > 0")
        if args.command == "figure1":
            cmd_figure1(args.out, args.jobs, args.tol, args.points, args.classical)
        elif args.command == "sweep":
            cfg = SweepConfig.from_dict(_load_json(args.config, "sweep config"), args.classical, args.tol)
            cmd_sweep(cfg, args.out, args.jobs, args.format)
        elif args.command == "discrete":
            if args.random is not None:
                bath = random_bath(args.random, args.seed)
            else:
                bath = bath_from_dict(_load_json(args.config, "bath"))
            cmd_discrete(bath, _parse_temps(args.temps), args.out)
        elif args.command == "verify":
            return cmd_verify(args.level, args.out)
        elif args.command == "poles":
            d = _load_json(args.config, "model")
            if isinstance(d, dict) and isinstance(d.get("model"), dict):
                d = d["model"]  # a sweep config is accepted too
            model, omega_0 = model_from_dict(d)
            cmd_poles(model, omega_0, args.out)
    except QBTError as exc:
        print(f"qbt: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

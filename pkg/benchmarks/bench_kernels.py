"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both implementations are imported directly, so the result does not depend on
``QBT_PURE_PYTHON``.  Each row reports the best of ``--repeat`` runs.
"""
from __future__ import annotations

import argparse
import timeit

from qbt import _kernels_py
from qbt.damping import DrudeParams
from qbt.response import TAUS, drude_poles

try:
    from qbt import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(k):
    zs = [complex(0.1 + 0.37 * i, 0.5 * (i % 7) - 1.5) for i in range(200)]
    rates = drude_poles(DrudeParams(1.0, 5.0, 1.5)).all_rates
    aux_args = [complex(0.2 + 0.05 * i, 1.0 + 0.02 * i) for i in range(100)]
    return {
        "digamma x200": lambda: [k.digamma(z) for z in zs],
        "aux_complex x100": lambda: [k.aux_complex(a, 1e-13) for a in aux_args],
        "delta_series T=0.05": lambda: k.delta_series(20.0, rates, TAUS, 1e-12, 1e-14, 10**6, 1e-13),
        "delta_series T=1": lambda: k.delta_series(1.0, rates, TAUS, 1e-12, 1e-14, 10**6, 1e-13),
        "delta_series T=20": lambda: k.delta_series(0.05, rates, TAUS, 1e-12, 1e-14, 10**6, 1e-13),
    }


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    py = _cases(_kernels_py)
    cy = _cases(_kernels) if _kernels is not None else None
    print(f"{'kernel':<22}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for name, fn in py.items():
        t_py = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<22}{t_py:>14.3f}{'n/a':>16}{'n/a':>10}")
            continue
        t_cy = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<22}{t_py:>14.3f}{t_cy:>16.3f}{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()

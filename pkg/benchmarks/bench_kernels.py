"""Benchmark the compiled quadrature/ODE kernels against the pure-Python
fallback.

Run with::

    python3 benchmarks/bench_kernels.py

Both backends implement identical algorithms (same nodes, coefficients and
operation order), so outputs are bit-identical; this script reports the
speed ratio and verifies the agreement on the benchmark workload.
"""

from __future__ import annotations

import sys
import timeit

import numpy as np

from pwave import _kernels_py

try:
    from pwave import _kernels
except ImportError:
    _kernels = None

# Representative workload: thermal averages across a resonance scan plus a
# two-term decay solved on a dense grid.
K_CONST = 1.21e-13
GAMMA = 0.05
T_UK = 10.0
DETUNINGS = np.linspace(-20.0, 120.0, 60)
T_EVAL = np.linspace(0.0, 1.0, 200)
DECAY_ARGS = (1e5, 1.0 / 30.0, 8e-7, 3e-18, T_EVAL, 1e-9)


def _bench_thermal(mod) -> float:
    def work():
        for delta in DETUNINGS:
            mod.thermal_g2(T_UK, float(delta), K_CONST, GAMMA, 1e-8, 256)

    number = 5
    return min(timeit.repeat(work, number=number, repeat=3)) / number


def _bench_decay(mod) -> float:
    def work():
        mod.decay_integrate(*DECAY_ARGS)

    number = 20
    return min(timeit.repeat(work, number=number, repeat=3)) / number


def _check_agreement() -> float:
    worst = 0.0
    for delta in DETUNINGS[:: len(DETUNINGS) // 6]:
        a = _kernels.thermal_g2(T_UK, float(delta), K_CONST, GAMMA, 1e-8, 256)[0]
        b = _kernels_py.thermal_g2(T_UK, float(delta), K_CONST, GAMMA, 1e-8, 256)[0]
        if b != 0:
            worst = max(worst, abs(a / b - 1.0))
        else:
            worst = max(worst, abs(a - b))
    ya = _kernels.decay_integrate(*DECAY_ARGS)[0]
    yb = _kernels_py.decay_integrate(*DECAY_ARGS)[0]
    worst = max(worst, float(np.max(np.abs(ya - yb) / np.maximum(yb, 1.0))))
    return worst


def main() -> int:
    if _kernels is None:
        print("compiled backend not available; nothing to compare")
        return 1
    rows = []
    for name, bench in (("thermal_g2 x60", _bench_thermal), ("decay_integrate", _bench_decay)):
        t_c = bench(_kernels)
        t_p = bench(_kernels_py)
        rows.append((name, t_c, t_p, t_p / t_c))
    print(f"{'kernel':<18} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, t_c, t_p, ratio in rows:
        print(f"{name:<18} {t_c * 1e3:>10.2f}ms {t_p * 1e3:>10.2f}ms {ratio:>8.1f}x")
    worst = _check_agreement()
    print(f"max relative disagreement: {worst:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

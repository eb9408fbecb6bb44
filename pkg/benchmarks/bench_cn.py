"""Benchmark: compiled Crank-Nicolson stepping core vs numpy fallback.

Run:  python3 benchmarks/bench_cn.py [N] [steps]
"""

import sys
import time

import numpy as np

from quadham import ModelSpec, GaussianState, GridState, builtin_coefficients
from quadham.coefficients import CALDIROLA_KANAI, EQUATION, convert_convention
from quadham.gridsim import _cn_numpy

try:
    from quadham.gridsim import _cn_core
except ImportError:
    _cn_core = None


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 4096
    steps = int(sys.argv[2]) if len(sys.argv) > 2 else 2000
    dt = 1e-3
    spec = ModelSpec(CALDIROLA_KANAI, omega0=1.2, lam=0.25)
    eq = convert_convention(builtin_coefficients(spec), EQUATION)
    x = np.linspace(-12.0, 12.0, n)
    psi0 = GaussianState(Lambda=0.5j, Theta=0.4).eval(x)
    t_mid = (np.arange(steps) + 0.5) * dt
    coeffs = [np.array([f(t) for t in t_mid])
              for f in (eq.a, eq.b, eq.c, eq.d)]

    def run(core, label):
        t0 = time.perf_counter()
        out = core.cn_run(psi0, x, x[1] - x[0], dt, *coeffs)
        elapsed = time.perf_counter() - t0
        rate = steps / elapsed
        print(f"{label:10s} N={n} steps={steps}: {elapsed:.3f} s "
              f"({rate:.0f} steps/s)")
        return out, elapsed

    out_np, t_np = run(_cn_numpy, "numpy")
    if _cn_core is None:
        print("compiled core not built; run pip install -e . first")
        return
    out_c, t_c = run(_cn_core, "compiled")
    print(f"speedup: {t_np / t_c:.2f}x, "
          f"max |diff| = {np.max(np.abs(out_np - out_c)):.3e}")


if __name__ == "__main__":
    main()

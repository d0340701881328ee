"""Measure the temporal convergence order of each benchmark.

The stepping kernels inherit the accuracy of the scheme they encode:
backward Euler on Burgers is first order, the trapezoidal rule on the wave
system and on the heat equation is second order, and the two-stage
Gauss-Legendre rule on advection is fourth order.  The script sweeps the
step size for each benchmark, fits the pre-saturation slope on a log-log
error curve, and plots all four curves together.

Expect a couple of minutes of runtime: the Burgers sweep alone takes about
150 steps across its five step sizes.
"""

import pathlib
import time

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gppde.driver import convergence_sweep
from gppde.problems import make_problem

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

cases = [
    ("burgers", make_problem("burgers", n_artificial={"u": 50}),
     [1e-1, 3e-2, 1e-2, 3e-3, 1e-3], 0.1, 1),
    ("wave", make_problem("wave"), [4e-2, 2e-2, 1e-2, 5e-3], 0.2, 2),
    ("advection", make_problem("advection", n_data={"u": 50}, n_artificial={"u": 50}),
     [0.25, 0.125, 0.0625], 0.5, 4),
    ("heat", make_problem("heat", n_data={"u": 50}, n_artificial={"u": 50},
                          n_boundary=10),
     [4e-2, 2e-2, 1e-2], 0.2, 2),
]

fig, ax = plt.subplots(figsize=(6, 5))
for name, problem, dts, T, nominal in cases:
    t0 = time.time()
    res = convergence_sweep(problem, dts, T=T, seed=0)
    print(
        f"{name:10s} fitted order {res.slope:5.2f} (nominal {nominal}), "
        f"{time.time() - t0:4.0f}s"
    )
    (line,) = ax.loglog(res.dts, res.errors, "o-", label=f"{name}: {res.slope:.2f}")
    ref = res.errors[0] * (np.asarray(res.dts) / res.dts[0]) ** nominal
    ax.loglog(res.dts, ref, ":", color=line.get_color(), lw=1)

ax.set_xlabel("dt")
ax.set_ylabel("relative L2 error at T")
ax.set_title("temporal convergence (dotted: nominal order)")
ax.legend(frameon=False)
fig.tight_layout()
fig.savefig(OUT / "convergence_orders.svg")
print(f"wrote {OUT / 'convergence_orders.svg'}")

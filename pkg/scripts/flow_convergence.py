"""Direct curve shortening flow vs isometric motion under grid refinement.

Each level doubles the number of samples and quarters the time step, starting
from the CFL-limited step of the coarsest grid.

    python3 scripts/flow_convergence.py --levels 3
"""
import argparse
import math
import time

import numpy as np

from hypercsf.flow import cfl_step, soliton_flow_deviation
from hypercsf.frame import reconstruct
from hypercsf.minkowski import IsometryKind
from hypercsf.soliton_ode import integrate_state


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1001, help="samples on the coarsest grid")
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--t-end", type=float, default=0.1)
    ap.add_argument("--half-width", type=float, default=10.0)
    args = ap.parse_args()

    w = args.half_width
    traj = integrate_state(1.0, (math.sqrt(2.0), 1.0, 0.0), (-w, w))
    n, dt, previous = args.n, None, None
    print(f"{'n':>6} {'dt':>10} {'deviation':>11} {'ratio':>6} {'seconds':>8}")
    for _ in range(args.levels):
        curve = reconstruct(traj, s=np.linspace(-w, w, n))
        dt = cfl_step(curve.X) if dt is None else dt / 4
        start = time.perf_counter()
        dev = soliton_flow_deviation(curve, IsometryKind.ROTATION, 1.0, args.t_end, dt=dt)
        ratio = f"{previous / dev:6.2f}" if previous else f"{'':>6}"
        print(f"{n:6d} {dt:10.3e} {dev:11.3e} {ratio} {time.perf_counter() - start:8.1f}")
        previous, n = dev, 2 * n - 1


if __name__ == "__main__":
    main()

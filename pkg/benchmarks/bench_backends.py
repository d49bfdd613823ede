"""Compare the compiled and pure-numpy kernel backends.

Times a single fused right-hand-side evaluation per form at several grid
sizes (best of --repeat), then a short end-to-end integration. The compiled
backend is warmed up before timing so JIT compilation is not counted.

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --sizes 512 4096 --repeat 9
"""

import argparse
import time

import numpy as np

from dvns1d import Params, background_profile, build_mesh, make_state, run
from dvns1d import kernels


def rhs_args(n):
    m = build_mesh(10.0, n)
    rho = 1.0 + 0.5 * np.exp(-m.x**2)
    vel = 0.1 * np.sin(m.x)
    return rho, vel, m.dx


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_backend(name, sizes, repeat, horizon):
    kernels.use_backend(name)
    params = Params(alpha=1.0, gamma=2.0, eps=0.125)
    rows = []
    for n in sizes:
        rho, vel, dx = rhs_args(n)
        call_u = lambda: kernels.rhs_u(rho, vel, dx, 1.0, 2.0, 1.0, 1.0, 0.0)
        call_v = lambda: kernels.rhs_v(rho, vel, dx, 1.0, 2.0, 1.0, 1.0, 0.0)
        call_u(), call_v()  # warm-up: first numba call compiles
        rows.append((n, best_of(call_u, repeat), best_of(call_v, repeat)))

    n_run = max(sizes)
    m = build_mesh(10.0, n_run)
    prof = background_profile(m, 1.0, 1.0)
    st = make_state(1.0 + 0.5 * np.exp(-m.x**2), np.zeros(n_run), "U", m)
    run(st, m, prof, params, T=1e-4, output_dt=1e-4)  # warm the stepper path
    t0 = time.perf_counter()
    traj = run(st, m, prof, params, T=horizon, output_dt=horizon)
    wall = time.perf_counter() - t0
    return rows, (n_run, traj.steps, wall)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", type=int, default=[512, 2048, 8192])
    ap.add_argument("--repeat", type=int, default=7)
    ap.add_argument("--horizon", type=float, default=0.02,
                    help="end time of the integration benchmark")
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    if len(backends) == 1:
        print("numba not installed; timing the numpy backend only")

    results = {}
    for name in backends:
        results[name] = bench_backend(name, args.sizes, args.repeat, args.horizon)

    print(f"\nper-call RHS time, best of {args.repeat} (seconds)")
    print(f"{'N':>8} {'form':>5}", *(f"{b:>12}" for b in backends),
          "speedup" if len(backends) == 2 else "")
    for i, n in enumerate(args.sizes):
        for fi, form in ((1, "U"), (2, "V")):
            cells = [results[b][0][i][fi] for b in backends]
            line = f"{n:>8} {form:>5}" + "".join(f" {c:>12.3e}" for c in cells)
            if len(cells) == 2 and cells[1] > 0:
                line += f" {cells[0] / cells[1]:>7.1f}x"
            print(line)

    print(f"\nintegration to T={args.horizon:g} at the largest size")
    for name in backends:
        n_run, steps, wall = results[name][1]
        rate = steps / wall if wall > 0 else float("inf")
        print(f"  {name:>6}: N={n_run} {steps} steps in {wall:.3f}s ({rate:,.0f} steps/s)")

    kernels.use_backend(kernels._default_backend())


if __name__ == "__main__":
    main()

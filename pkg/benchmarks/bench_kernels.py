"""Compare the compiled and numpy density kernels.

    python3 benchmarks/bench_kernels.py [--nodes 2048] [--M 68] [--repeat 5]

Also times one energy evaluation and one gradient with each backend, by
swapping the kernel functions used by the energy module.
"""

import argparse
import time

import numpy as np

from mengerlab import kernels
from mengerlab.curve import circle, perturbed
from mengerlab.energy import EnergyParams, MengerEnergy
from mengerlab.kernels import python_backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def fields(nodes, n, M, seed=0):
    rng = np.random.default_rng(seed)
    mk = lambda: np.ascontiguousarray(rng.normal(size=(nodes, n, M)))
    P1 = np.ascontiguousarray(rng.normal(size=(n, M)))
    a, b = rng.random(nodes) * 0.3 + 0.01, rng.random(nodes) * 0.3 + 0.01
    return mk(), mk(), P1, mk(), mk(), np.sqrt(np.einsum("im,im->m", P1, P1)), a, b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=2048)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--M", type=int, default=68)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if kernels.BACKEND != "cython":
        print("compiled extension not available; only the numpy backend is timed")
    A, B, P1, P2, P3, sp1, a, b = fields(args.nodes, args.n, args.M)
    p, q = 2.5, 2.0
    backends = {"numpy": python_backend}
    if kernels.BACKEND == "cython":
        from mengerlab import _kernels

        backends["cython"] = _kernels

    print(f"kernel sizes: nodes={args.nodes} dim={args.n} M={args.M}")
    rows = {}
    for name, mod in backends.items():
        td = best_of(lambda: mod.menger_density(A, B, P2, P3, sp1, a, b, p, q), args.repeat)
        tg = best_of(lambda: mod.menger_density_grad(A, B, P1, P2, P3, sp1, a, b, p, q), args.repeat)
        rows[name] = (td, tg)
        print(f"  {name:7s} density {td * 1e3:9.2f} ms   density+grad {tg * 1e3:9.2f} ms")
    if len(rows) == 2:
        print(f"  speedup density x{rows['numpy'][0] / rows['cython'][0]:.1f}, grad x{rows['numpy'][1] / rows['cython'][1]:.1f}")

    curve = perturbed(circle(3, 16), 3, 1e-2)
    params = EnergyParams(2.5)
    fn = MengerEnergy.for_curve(curve, params)
    print(f"energy functional: N=16, {len(fn.rule)} quadrature nodes")
    saved = kernels.menger_density, kernels.menger_density_grad
    try:
        for name, mod in backends.items():
            kernels.menger_density, kernels.menger_density_grad = mod.menger_density, mod.menger_density_grad
            te = best_of(lambda: fn(curve), max(1, args.repeat // 2))
            tg = best_of(lambda: fn.value_and_gradient(curve), max(1, args.repeat // 2))
            print(f"  {name:7s} energy {te:7.3f} s   energy+gradient {tg:7.3f} s")
    finally:
        kernels.menger_density, kernels.menger_density_grad = saved


if __name__ == "__main__":
    main()

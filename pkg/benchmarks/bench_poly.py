"""Benchmark: compiled vs pure-Python polynomial kernel.

Times the two halves of the certification hot loop - exact tensor
contraction and triangular reduction - on one representative
interaction with each kernel, and reports the speedup.

    python benchmarks/bench_poly.py [--interaction +,-+]
"""
import argparse
import time

from abiwave.resonance import InteractionSpec
from abiwave.symbolic import _kernel_py
from abiwave.symbolic import poly, tensors
from abiwave.symbolic.ideal import reduce_terms


def run_with_kernel(kernel, eps):
    # route both modules through the chosen kernel
    saved = (tensors._kernel, poly._kernel)
    tensors._kernel = kernel
    poly._kernel = kernel
    import abiwave.symbolic.ideal as ideal_mod
    saved_ideal = ideal_mod._kernel
    ideal_mod._kernel = kernel
    try:
        t0 = time.perf_counter()
        T = tensors.build_interaction_tensor(eps)
        t_build = time.perf_counter() - t0
        s = eps[1] * eps[2]
        t0 = time.perf_counter()
        nonzero = sum(1 for _, t in T.iter_entries()
                      if t and reduce_terms(t, s))
        t_reduce = time.perf_counter() - t0
        return t_build, t_reduce, nonzero
    finally:
        tensors._kernel, poly._kernel = saved
        ideal_mod._kernel = saved_ideal


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--interaction", default="+,-+")
    ns = ap.parse_args()
    spec = InteractionSpec.parse(ns.interaction)
    eps = (spec.eps1, spec.eps2, spec.eps3)

    kernels = [("pure-python", _kernel_py)]
    try:
        from abiwave.symbolic import _kernel as compiled
        kernels.append(("compiled", compiled))
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only")

    print(f"interaction {ns.interaction}: 10x10x10 exact tensor build "
          f"+ reduction\n")
    results = {}
    for name, kern in kernels:
        tb, tr, nz = run_with_kernel(kern, eps)
        results[name] = tb + tr
        print(f"{name:>12}: build {tb:6.2f} s   reduce {tr:6.2f} s   "
              f"total {tb + tr:6.2f} s   (nonzero residues: {nz})")
    if len(results) == 2:
        speed = results["pure-python"] / results["compiled"]
        print(f"\nspeedup (compiled over pure): {speed:.2f}x")


if __name__ == "__main__":
    main()

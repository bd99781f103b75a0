"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each kernel runs on identical inputs under both backends; the outputs are
compared before timings are reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from posiplant import _pykernels, kernels
from posiplant.planting import PlantingConfig, derive_seed, plant, random_planted
from posiplant.samplers import _fields
from posiplant.topology import chimera
from posiplant.twosat import implication_graph, posiform_to_twosat


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(quick: bool):
    e = chimera(4)
    seed = derive_seed(11, 0)
    inst = plant(PlantingConfig(e.num_vars, random_planted(e.num_vars, seed), edge_set=e, seed=seed))
    q = inst.qubo
    indptr, indices, data = q.csr
    reads, sweeps = (50, 32) if quick else (200, 64)
    rng = np.random.default_rng(0)
    x0 = rng.integers(0, 2, size=(reads, q.num_vars)).astype(np.int8)
    f0 = _fields(q, x0)
    betas = np.geomspace(0.05, 3.0, sweeps)
    uniforms = rng.random((sweeps, reads, q.num_vars))

    def anneal(mod):
        x, f = x0.copy(), f0.copy()
        mod.anneal(x, f, indptr, indices, data, betas, uniforms)
        return x

    def descent(mod):
        x, f = x0.copy(), f0.copy()
        mod.steepest_descent(x, f, indptr, indices, data)
        return x

    small = plant(PlantingConfig(16 if quick else 20, random_planted(20, 1)[: 16 if quick else 20], seed=5)).qubo
    sp, si, sd = small.csr
    lin = small.arrays[0]

    def brute(mod):
        return mod.brute_force(lin, sp, si, sd, 1e-9)

    n2 = 20000 if quick else 200000
    m2 = 3 * n2
    a = rng.integers(0, 2 * n2, size=m2)
    b = rng.integers(0, 2 * n2, size=m2)
    gp, gi = implication_graph(n2, a, b)

    def tarjan(mod):
        return mod.tarjan_scc(gp, gi)

    big = chimera(8 if quick else 16)
    w = np.asarray(random_planted(big.num_vars, 3), dtype=np.uint8)
    inst_big = plant(PlantingConfig(big.num_vars, w, edge_set=big, seed=3))
    fa, fb = posiform_to_twosat(inst_big.posiform).nodes
    up, ui = implication_graph(big.num_vars, fa, fb)
    rp, ri = implication_graph(big.num_vars, fa, fb, reverse=True)
    true_nodes = 2 * np.arange(big.num_vars, dtype=np.int64) + w.astype(np.int64)

    def backbone(mod):
        return mod.unique_backbone(true_nodes, up, ui, rp, ri)

    def csr(mod):
        return mod.build_csr(2 * n2, a.astype(np.int64), b.astype(np.int64))

    return {
        f"anneal {reads}x{sweeps} chimera(4)": anneal,
        f"steepest_descent {reads} reads": descent,
        f"brute_force n={small.num_vars}": brute,
        f"tarjan_scc {2 * n2} nodes": tarjan,
        f"unique_backbone n={big.num_vars}": backbone,
        f"build_csr {m2} edges": csr,
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if "cython" not in kernels.available_backends():
        print("compiled backend not built; only the Python timings are meaningful")
    compiled = kernels.available_backends().get("cython")
    print(f"{'kernel':40s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  match")
    for name, fn in cases(args.quick).items():
        tp, outp = _best(lambda: fn(_pykernels), args.repeat)
        if compiled is None:
            print(f"{name:40s} {tp:10.4f} {'-':>10s} {'-':>8s}  -")
            continue
        tc, outc = _best(lambda: fn(compiled), args.repeat)
        print(f"{name:40s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}  {_same(outp, outc)}")


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python kernels on enumeration and annealing.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

from permqubo import _backend
from permqubo.encodings import perm_encoding
from permqubo.gates import gt_gate
from permqubo.poly import Var, VariableRegistry
from permqubo.solve import AnnealParams


def gt_template(width: int):
    reg = VariableRegistry()
    g = gt_gate(reg.new_bus("x", width, "input"), reg.new_bus("y", width, "input"),
                Var(reg.new("c", "output")), reg)
    return g.poly


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"] + (["compiled"] if _backend.HAVE_COMPILED else [])

    cases = []
    for width in (3, 4):
        cp = _backend.compile_poly(gt_template(width))
        cases.append((f"enumerate gt k={width} ({cp.nvars} vars)", lambda k, cp=cp: k.enumerate_level(
            cp.nvars, cp.offset, cp.lin, cp.indptr, cp.indices, cp.data, True, 0)))
    for n, sweeps in ((4, 200), (8, 100)):
        e = perm_encoding(n)
        cp = _backend.compile_poly(e.poly, range(len(e.registry)))
        betas = AnnealParams(sweeps=sweeps).betas()
        cases.append((f"anneal perm n={n} ({cp.nvars} vars, {sweeps} sweeps, 4 reads)",
                      lambda k, cp=cp, betas=betas: k.anneal(cp.lin, cp.indptr, cp.indices, cp.data, betas, 1, 4)))

    print(f"{'case':58s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases:
        times = [best_of(lambda: fn(_backend.get_kernels(b)), args.repeat) for b in backends]
        row = f"{name:58s}" + "".join(f"{t:11.4f}s" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python evaluation kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each workload is compiled once; every timed run evaluates it on a fresh
store.  Both kernels must produce identical firing counts and stores.
"""
import argparse
import time

from demandlog.bench import fixture, workload
from demandlog.engine import ebu_evaluate
from demandlog.engine.kernel import KERNELS
from demandlog.pipeline import compile_query, load_store

WORKLOADS = [
    ("balbin", "chain", 8000),
    ("tc", "chain", 2000),
    ("extended", "complete", 60),
    ("extended", "random", (1000, 100000)),
]
QUICK = [
    ("balbin", "chain", 1000),
    ("tc", "chain", 300),
    ("extended", "complete", 20),
    ("extended", "random", (200, 5000)),
]


def time_kernel(compiled, program, facts, kernel, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        store = load_store(program, facts, compiled.seeds)
        t0 = time.perf_counter()
        result = ebu_evaluate(compiled.rules, store, compiled.strata, kernel=kernel)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small sizes, for smoke runs")
    args = ap.parse_args(argv)

    kernels = [k for k in ("python", "compiled") if k in KERNELS]
    print("program\tfamily\tsize\tfirings\t" + "\t".join(f"{k}_s" for k in kernels) + "\tspeedup")
    for name, family, size in QUICK if args.quick else WORKLOADS:
        program, query = fixture(name)
        facts = workload(name, family, size)
        compiled = compile_query(program, query)
        times, results = {}, {}
        for k in kernels:
            times[k], results[k] = time_kernel(compiled, program, facts, k, args.repeat)
        counts = {tuple(r.firings.counts) for r in results.values()}
        sizes = {tuple(sorted(r.store.sizes().items())) for r in results.values()}
        if len(counts) != 1 or len(sizes) != 1:
            raise SystemExit(f"kernels disagree on {name}/{family}/{size}")
        firings = next(iter(results.values())).firings.total
        speedup = f"{times['python'] / times['compiled']:.2f}x" if "compiled" in times else "-"
        label = f"{size[0]}:{size[1]}" if isinstance(size, tuple) else size
        print(f"{name}\t{family}\t{label}\t{firings}\t"
              + "\t".join(f"{times[k]:.4f}" for k in kernels) + f"\t{speedup}")


if __name__ == "__main__":
    main()

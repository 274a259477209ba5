"""Benchmark of the compiled kernels against the numpy fallback.

Run as ``python -m gwolf.benchmark``. Verifies that both backends produce
bit-identical output on the benchmark inputs before timing them.
"""

import argparse
import sys
import time

import numpy as np

from . import _kernels_py
from .core import schedule_a

try:
    from . import _kernels
except ImportError:
    _kernels = None


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(blocks=1_000_000, trials=20_000, T=50, seed=12345):
    rng_ = np.random.default_rng(seed)
    counters = rng_.integers(0, 2**32, size=(blocks, 4), dtype=np.uint32)
    a_sched = np.array([schedule_a(t, T) for t in range(1, T)])
    chain_args = (-1.0, 1.5, 2.5, a_sched, -4.0, 4.0, trials, 0,
                  5 << 24, 111, 222)

    backends = [("python", _kernels_py)]
    if _kernels is not None:
        backends.insert(0, ("compiled", _kernels))

    rows = []
    ref = {}
    for name, mod in backends:
        t_philox, words = _time(lambda m=mod: m.philox4x32(counters, 1, 2))
        t_chain, chain = _time(lambda m=mod: m.stagnation_chain(*chain_args))
        ref.setdefault("philox", np.asarray(words))
        ref.setdefault("chain", np.asarray(chain))
        if not np.array_equal(ref["philox"], np.asarray(words)):
            raise AssertionError(f"{name} backend: philox output mismatch")
        if not np.array_equal(ref["chain"], np.asarray(chain)):
            raise AssertionError(f"{name} backend: chain output mismatch")
        rows.append((name, t_philox, t_chain))

    print(f"philox4x32: {blocks} blocks; stagnation chain: "
          f"{trials} trials x {T} iterations")
    base = rows[-1]
    for name, t_philox, t_chain in rows:
        print(f"  {name:>8s}  philox {t_philox * 1e3:8.1f} ms "
              f"(x{base[1] / t_philox:5.1f})   chain {t_chain * 1e3:8.1f} ms "
              f"(x{base[2] / t_chain:5.1f})")
    if _kernels is None:
        print("  compiled backend not available; showing fallback only")
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--blocks", type=int, default=1_000_000)
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--T", type=int, default=50)
    args = parser.parse_args(argv)
    run(blocks=args.blocks, trials=args.trials, T=args.T)
    return 0


if __name__ == "__main__":
    sys.exit(main())

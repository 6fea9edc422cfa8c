"""Time the compiled chain-vector kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from qhist import _chain_py

try:
    from qhist import _chain
except ImportError:
    _chain = None

CASES = [
    # (label, rows, dim, ops)
    ("expand 256x4 by 2", 256, 4, 2),
    ("expand 4096x8 by 4", 4096, 8, 4),
    ("max_offdiag 512x4", 512, 4, None),
    ("max_offdiag 4096x8", 4096, 8, None),
]


def _inputs(rows, dim, ops, rng):
    kets = rng.normal(size=(rows, dim)) + 1j * rng.normal(size=(rows, dim))
    if ops is None:
        return (kets,)
    return kets, rng.normal(size=(ops, dim, dim)) + 1j * rng.normal(size=(ops, dim, dim))


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    backends = {"numpy": _chain_py}
    if _chain is not None:
        backends["cython"] = _chain
    else:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'case':<22}" + "".join(f"{name:>14}" for name in backends) + "   speedup")
    for label, rows, dim, ops in CASES:
        data = _inputs(rows, dim, ops, rng)
        fn_name = "expand" if ops is not None else "max_offdiag"
        times = {}
        for name, mod in backends.items():
            fn = getattr(mod, fn_name)
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(*data), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: fn(*data), number=number, repeat=args.repeat))
            times[name] = best / number
        speed = times["numpy"] / times["cython"] if "cython" in times else float("nan")
        print(f"{label:<22}" + "".join(f"{times[n] * 1e3:>11.3f} ms" for n in backends)
              + f"   {speed:6.2f}x")


if __name__ == "__main__":
    main()

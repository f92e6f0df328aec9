"""Compare the compiled and pure-Python kernels on rational, jet and float inputs.

    python benchmarks/bench_kernels.py [--sizes 8 16 24] [--repeat 5]

Both implementations are imported directly, so one run times both
regardless of MCBOP_PURE_PYTHON.  Results are checked for equality first.
"""
import argparse
import random
import sys
import timeit
from fractions import Fraction

from mcbop import _pykernels
from mcbop.ring import JQQ, QQ, RR, Jet2

try:
    from mcbop import _ckernels
except ImportError:
    _ckernels = None


def _rat(rng):
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def _inputs(kind, n, rng):
    if kind == "QQ":
        draw, ring = (lambda: _rat(rng)), QQ
    elif kind == "JQQ":
        draw, ring = (lambda: Jet2(_rat(rng), _rat(rng), _rat(rng))), JQQ
    else:
        draw, ring = (lambda: rng.uniform(-1, 1)), RR
    a = [draw() for _ in range(n * n)]
    for i in range(n):
        a[i * n + i] = a[i * n + i] + n  # keeps the matrix comfortably invertible
    b = [draw() for _ in range(n * n)]
    return a, b, ring


def _cases(impl, kind, n, a, b, ring):
    partial = kind == "RR"
    return {
        "matmul": lambda: impl.matmul(a, b, n, n, n, ring.zero),
        "solve": lambda: impl.gauss_jordan(a, b, n, n, ring.is_unit, ring.inv, partial),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 24])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--kinds", nargs="+", default=["QQ", "JQQ", "RR"])
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; timing the Python fallback only")
    rng = random.Random(2024)
    print(f"{'kernel':<8}{'ring':<6}{'n':>4}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for kind in args.kinds:
        for n in args.sizes:
            a, b, ring = _inputs(kind, n, rng)
            py = _cases(_pykernels, kind, n, a, b, ring)
            cy = _cases(_ckernels, kind, n, a, b, ring) if _ckernels else None
            for name, fn in py.items():
                if cy is not None and fn() != cy[name]():
                    print(f"MISMATCH {name} {kind} n={n}", file=sys.stderr)
                    return 1
                t_py = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
                if cy is None:
                    print(f"{name:<8}{kind:<6}{n:>4}{t_py:>12.2f}{'-':>12}{'-':>9}")
                    continue
                t_cy = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
                print(f"{name:<8}{kind:<6}{n:>4}{t_py:>12.2f}{t_cy:>12.2f}{t_py / t_cy:>8.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

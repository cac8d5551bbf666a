"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from mcgwb import _pykernels

try:
    from mcgwb import _ckernels
except ImportError:
    _ckernels = None


def workloads(rng):
    words = [tuple(rng.choice([1, -1]) * rng.randint(1, 6) for _ in range(60)) for _ in range(200)]
    mats = [tuple(rng.randrange(5) for _ in range(36)) for _ in range(200)]
    gens = [_pykernels.gf2_pack(m, 4) for m in (
        (1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1),
        (1, 0, 0, 0, 1, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1),
        (1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1),
        (1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 1, 0, 0, 1),
    )]
    return {
        "free_reduce x200": lambda k: [k.free_reduce(w) for w in words],
        "dehn_reduce_linear x200 (g=3)": lambda k: [k.dehn_reduce_linear(w, 3) for w in words],
        "mat_mul_mod 6x6 x200": lambda k: [k.mat_mul_mod(a, b, 6, 5) for a, b in zip(mats, mats[1:])],
        "gf2_closure Sp(4,2)": lambda k: k.gf2_closure(gens, 4, 10_000),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':32} " + " ".join(f"{n:>12}" for n, _ in backends) + "   speedup")
    for name, fn in workloads(random.Random(1)).items():
        best = [min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat)) for _, k in backends]
        speed = f"{best[0] / best[1]:8.1f}x" if len(best) > 1 else "       -"
        print(f"{name:32} " + " ".join(f"{b * 1e3:10.2f}ms" for b in best) + "  " + speed)


if __name__ == "__main__":
    main()

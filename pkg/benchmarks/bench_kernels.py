"""Time the compiled kernels against their pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--closure-len 10]
"""
import argparse
import os
import random
import subprocess
import sys
import timeit

from permchain import kernels
from permchain.closure import marked_layers, marked_sigma


def random_perm(rng, n):
    p = list(range(1, n + 1))
    rng.shuffle(p)
    return tuple(p)


def workloads(rng):
    hosts = [random_perm(rng, 14) for _ in range(200)]
    pats = [random_perm(rng, 5) for _ in range(200)]
    packed = [bytes(random_perm(rng, 12)) for _ in range(500)]
    layer = marked_layers(16, 12)[12]
    rho = marked_sigma(8)
    fills = [(b"\x02\x01", 0), (b"\x01\x02\x03", 1)]
    ends = [b"\x01", b"\x01\x02", b"\x01\x02\x03\x04"]

    def occ(k):
        for h, p in zip(hosts, pats):
            k.find_occurrence(h, p)

    def dels(k):
        for p in packed:
            k.deletions(p)

    def children(k):
        k.marked_children(layer, {})

    def inflate_marked(k):
        outs = [set() for _ in range(31)]
        k.inflate_marked(rho, fills, ends, 4, 30, outs)

    def flat(k):
        for h in hosts:
            k.flatten(h)

    return {"find_occurrence": occ, "deletions": dels, "marked_children": children,
            "inflate_marked": inflate_marked, "flatten": flat}


def closure_time(n, pure):
    env = dict(os.environ)
    if pure:
        env["PERMCHAIN_PURE"] = "1"
    code = (
        "import time; from permchain.antichain import AntichainSpec; "
        "from permchain.closure import closure_counts; "
        "s = AntichainSpec.from_tau(3, (2, 1), (1, 2, 3, 4)); t = time.perf_counter(); "
        f"closure_counts(s, {n}, recheck=False); print(time.perf_counter() - t)"
    )
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--closure-len", type=int, default=10, help="0 skips the end-to-end run")
    args = ap.parse_args(argv)

    found = kernels.backends()
    if "cython" not in found:
        print("compiled kernels not built; nothing to compare")
        return 1
    work = workloads(random.Random(1))
    print(f"{'kernel':18s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in work.items():
        t = {b: min(timeit.repeat(lambda: fn(found[b]), number=1, repeat=args.repeat)) * 1e3
             for b in ("python", "cython")}
        print(f"{name:18s} {t['python']:10.2f} {t['cython']:10.2f} {t['python'] / t['cython']:8.1f}x")
    if args.closure_len:
        n = args.closure_len
        tp, tc = closure_time(n, True), closure_time(n, False)
        print(f"{'closure n=' + str(n):18s} {tp * 1e3:10.0f} {tc * 1e3:10.0f} {tp / tc:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

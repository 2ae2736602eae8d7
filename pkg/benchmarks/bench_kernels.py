"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run once per backend to warm up (numba compiles or loads its
cache), then timed; outputs are checked to agree before anything is reported.
The last row runs a whole survey scan in a subprocess per backend, selected
with CYCLOSIEVE_NO_NUMBA.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from cyclosieve import build_extension, kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    q = 2**31 - 1
    base = rng.integers(1, q, 20000)
    yield "powmod 20k x 2^200", lambda b: kernels.powmod_array(base, 2**200 + 7, q, backend=b)

    F = build_extension(193, 12)
    elems = rng.integers(0, 193, (2000, 12))
    yield "ext_powmod F_193^12 2k", lambda b: kernels.ext_powmod_array(elems, F.card_minus_1 // 5, F.modulus, 193, backend=b)

    moduli = rng.integers(0, 9973, (500, 7))
    moduli[:, -1] = 1
    yield "frobenius 500 sextics", lambda b: kernels.frobenius_powers(moduli, 9973, backend=b)

    table = rng.integers(0, 1000, (5000, 7, 1))
    values = table[np.arange(5000), rng.integers(0, 7, 5000)]
    yield "match_powers 5k x 7", lambda b: kernels.match_powers(values, table, backend=b)

    yield "bernoulli mod 2003", lambda b: kernels.bernoulli_even_mod_p(2003, backend=b)


def scan_time(no_numba):
    env = dict(os.environ, CYCLOSIEVE_NO_NUMBA="1" if no_numba else "")
    argv = [sys.executable, "-m", "cyclosieve", "survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "3000",
            "--format", "json"]
    t = time.perf_counter()
    out = subprocess.run(argv, env=env, capture_output=True, check=True).stdout
    return time.perf_counter() - t, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-scan", action="store_true")
    args = ap.parse_args()

    print(f"{'kernel':<28}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, fn in cases():
        a, b = fn("numba"), fn("numpy")
        assert np.array_equal(a, b), name
        t_nb = best_of(lambda: fn("numba"), args.repeat)
        t_np = best_of(lambda: fn("numpy"), args.repeat)
        print(f"{name:<28}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")

    if not args.skip_scan:
        scan_time(False)  # populate the numba cache
        t_nb, out_nb = scan_time(False)
        t_np, out_np = scan_time(True)
        assert out_nb == out_np
        print(f"{'scan p=5 q<3000 (e2e)':<28}{t_nb:>10.2f}{t_np:>10.2f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()

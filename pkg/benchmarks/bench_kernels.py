"""Timing comparison of the jitted kernels against the pure-Python fallback.

Runs itself twice in subprocesses (RMTLAB_NUMBA=1 / RMTLAB_NUMBA=0) so each
mode gets a fresh import, then prints a side-by-side table.

    python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time


def run_mode(mode: str) -> dict:
    env = dict(os.environ)
    env["RMTLAB_NUMBA"] = mode
    out = subprocess.run(
        [sys.executable, __file__, "--worker"], capture_output=True, text=True, env=env
    )
    if out.returncode != 0:
        raise RuntimeError(out.stderr)
    return json.loads(out.stdout.splitlines()[-1])


def worker() -> None:
    import numpy as np

    from rmtlab._accel import USING_NUMBA
    from rmtlab._bessel import log_bessel_k
    from rmtlab.distributions import constrain_unit_variance, ghd_pdf
    from rmtlab.fitting import build_histogram, fit_ghd

    timings = {"numba": USING_NUMBA}

    log_bessel_k(0.5, 1.0)  # trigger compilation outside the timed region
    n_calls = 20_000 if USING_NUMBA else 2_000
    t0 = time.perf_counter()
    for _ in range(n_calls):
        log_bessel_k(2.8615, 1.37)
    timings["log_bessel_k_us"] = (time.perf_counter() - t0) / n_calls * 1e6

    params = constrain_unit_variance(0.5862, 0.5031)
    xs = np.linspace(-6.0, 6.0, 240)
    ghd_pdf(xs, params)
    n_evals = 2_000 if USING_NUMBA else 50
    t0 = time.perf_counter()
    for _ in range(n_evals):
        ghd_pdf(xs, params)
    timings["ghd_pdf_240bins_ms"] = (time.perf_counter() - t0) / n_evals * 1e3

    rng = np.random.default_rng(1)
    hist = build_histogram(rng.standard_normal(200_000), 0.05, 6.0)
    t0 = time.perf_counter()
    fit = fit_ghd(hist)
    timings["fit_ghd_s"] = time.perf_counter() - t0
    timings["fit_converged"] = fit.converged
    print(json.dumps(timings))


def main() -> None:
    if "--worker" in sys.argv:
        worker()
        return
    rows = {}
    for label, mode in (("numba", "1"), ("fallback", "0")):
        print(f"running {label} pass...", flush=True)
        rows[label] = run_mode(mode)
    keys = ["log_bessel_k_us", "ghd_pdf_240bins_ms", "fit_ghd_s"]
    units = {"log_bessel_k_us": "us/call", "ghd_pdf_240bins_ms": "ms/eval", "fit_ghd_s": "s/fit"}
    print(f"\n{'kernel':<28}{'numba':>12}{'fallback':>12}{'speedup':>10}")
    for key in keys:
        a, b = rows["numba"][key], rows["fallback"][key]
        print(f"{key:<28}{a:>12.4g}{b:>12.4g}{b / a:>9.1f}x  [{units[key]}]")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the detection kernels: compiled extension vs numpy fallback.

Times the fused detect+count stage on identical pre-drawn chunks, then an
end-to-end simulate() per backend.  Run from an installed environment:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import math
import time

import numpy as np

from constlab.backends import available_backends, get_backend
from constlab.channel import ChannelConfig, _draw_chunk, simulate
from constlab.permutation import Constellation, signal_matrix

WORKLOADS = (
    ("threshold k=1 q=50", Constellation(1, 50), "threshold", 40_000),
    ("threshold k=4 q=6", Constellation(4, 6), "threshold", 40_000),
    ("rank k=2 q=12", Constellation(2, 12), "rank", 40_000),
    ("rank k=8 q=2", Constellation(8, 2), "rank", 40_000),
    ("ml k=1 q=5", Constellation(1, 5), "ml", 20_000),
)


def run_kernel(kernel, con, detector, sent, received, rho_s):
    two_k = con.levels_per_block
    scaled = con.levels * math.sqrt(rho_s)
    if detector == "threshold":
        return kernel.count_threshold(
            received, sent, float(scaled[0]), con.level_spacing * math.sqrt(rho_s),
            two_k, con.q,
        )
    if detector == "rank":
        return kernel.count_rank(received, sent, two_k, con.q)
    coords, level_idx = signal_matrix(con)
    table = np.ascontiguousarray(coords * math.sqrt(rho_s))
    return kernel.count_ml(
        received, sent, table, np.ascontiguousarray(level_idx), two_k, con.q
    )


def main():
    rho_s = 4.0
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'workload':24s} {'backend':9s} {'trials/s':>12s} {'counts':>24s}")
    for label, con, detector, trials in WORKLOADS:
        cfg = ChannelConfig(rho_s=rho_s, trials=trials, seed=1, detector=detector)
        scaled = con.levels * math.sqrt(rho_s)
        sent, received = _draw_chunk(con, cfg, 0, trials, scaled)
        for name in backends:
            kernel = get_backend(name)
            run_kernel(kernel, con, detector, sent, received, rho_s)  # warmup
            best = math.inf
            for _ in range(3):
                t0 = time.perf_counter()
                counts = run_kernel(kernel, con, detector, sent, received, rho_s)
                best = min(best, time.perf_counter() - t0)
            print(f"{label:24s} {name:9s} {trials / best:12.0f} {str(counts):>24s}")
    print()
    print("end-to-end simulate(), rank detector, k=2 q=12, 200k trials:")
    con = Constellation(2, 12)
    for name in backends:
        cfg = ChannelConfig(rho_s=rho_s, trials=200_000, seed=1,
                            detector="rank", backend=name)
        rep = simulate(con, cfg)
        print(f"  {name:9s} {rep.elapsed:8.3f}s  p_message={rep.p_message:.5g}")


if __name__ == "__main__":
    main()

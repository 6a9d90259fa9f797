#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The lfisense Authors
"""Regenerates noise_observations_synthetic.csv from fixed coefficients.

log10(sqrt(n_avg) * sigma_fb) = a1 log10 f_ramp + a2 log10 S + a3 log10 f_b
                                + a4 log10 v + a5 log10 R + b + N(0, 0.05)
"""
import math
import random

A = (0.5, -0.3, 0.6, 0.2, 0.4)
B = 2.7
LOG_NOISE = 0.05
N = 120
SEED = 20260

rng = random.Random(SEED)
with open("noise_observations_synthetic.csv", "w", newline="\n") as f:
    f.write("f_ramp_rate,slope_S,beat_f_b,velocity_v,distance_R,n_avg,observed_sigma_fb\n")
    for i in range(N):
        x = (
            10 ** rng.uniform(3.0, 4.0),
            10 ** rng.uniform(14.0, 15.0),
            10 ** rng.uniform(4.0, 5.5),
            10 ** rng.uniform(-3.0, -1.0),
            10 ** rng.uniform(-2.0, -1.0),
        )
        n_avg = (1, 2, 4, 8, 16)[i % 5]
        y = B + sum(a * math.log10(v) for a, v in zip(A, x)) + rng.gauss(0.0, LOG_NOISE)
        sigma = 10**y / math.sqrt(n_avg)
        f.write(",".join(repr(v) for v in (*x, n_avg, sigma)) + "\n")

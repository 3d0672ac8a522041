#!/usr/bin/env python3
"""Regenerates data/uk_cases.csv, the bundled offline fixture.

The fixture mimics the UK COVID-19 case-rate series (new cases per million,
7-day smoothed) between 2022-03-01 and 2023-02-28: the spring BA.2 peak, the
deep May trough, the July BA.5 wave, the October and late-December waves, and
the early-2023 decline, overlaid with a drifting monthly reporting cycle,
shorter reporting ripples, noise-level regimes, and occasional single-day
reporting artifacts. Values are synthesized deterministically so the test
suite runs without network access; scripts/fetch_uk_data.py documents how to
pull the real series instead.

Usage: python3 scripts/make_uk_fixture.py [out.csv]
"""

import datetime as dt
import math
import sys

import numpy as np

START = dt.date(2022, 3, 1)
END = dt.date(2023, 2, 28)
SEED = 516444

# wave skeleton: (day offset from START, cases per million), log-interpolated
ANCHORS = [
    (0, 620.0), (23, 1240.0), (33, 1100.0), (58, 310.0), (78, 130.0),
    (103, 106.0), (124, 480.0), (134, 450.0), (152, 200.0), (170, 128.0),
    (196, 140.0), (217, 355.0), (228, 320.0), (252, 105.0), (268, 86.0),
    (295, 185.0), (306, 165.0), (330, 64.0), (345, 58.0), (364, 54.0),
]
MACRO_SCALE = 0.7137920777391464  # contraction of the skeleton's log range

# extra piecewise slope perturbations between the anchors
KINK_AMP = 0.04357722394182969
KINK_GAP = (15, 49)

# quasi-periodic components (log space)
A16, P16, RHO16 = 0.014834479614750488, 16.0, 0.90
A45, P45, RHO45 = 0.010032925670836843, 45.0, 0.965
A30, P30 = 0.06442758948593975, 30.0        # drifting monthly cycle
DRIFT30, ENV30 = 0.011863189389313715, 0.188332621378872
WEEKLY_AMP = 0.012

# observation noise: alternating quiet/loud regimes plus reporting spikes
SD_QUIET = 0.007744473123678245
SD_LOUD = 0.06124179775537264
REGIME_LEN = (34, 54)
SPIKE_RATE = 0.0354773482990006
SPIKE_MAG = (0.12234089246270054, 0.3201867823069397)


def ar2(n, period, rho, rng):
    """Unit-variance AR(2) resonance around the given period."""
    w = rng.standard_normal(n + 200)
    x = np.zeros(n + 200)
    c = 2 * rho * math.cos(2 * math.pi / period)
    for t in range(2, n + 200):
        x[t] = c * x[t - 1] - rho * rho * x[t - 2] + w[t]
    x = x[200:]
    s = x.std()
    return x / (s if s > 0 else 1.0)


def generate():
    n = (END - START).days + 1
    rng = np.random.default_rng(SEED)
    t = np.arange(n, dtype=float)

    xs = np.array([a[0] for a in ANCHORS], float)
    ys = np.log(np.array([a[1] for a in ANCHORS], float))
    log_trend = np.interp(t, xs, ys)
    log_trend = log_trend.mean() + MACRO_SCALE * (log_trend - log_trend.mean())

    kink = np.zeros(n)
    pos = 0
    knots_x = [0.0]
    knots_y = [0.0]
    while pos < n:
        pos += rng.integers(KINK_GAP[0], KINK_GAP[1])
        knots_x.append(min(pos, n - 1))
        knots_y.append(KINK_AMP * rng.standard_normal())
    kink = np.interp(t, knots_x, knots_y)

    mid = A16 * ar2(n, P16, RHO16, rng)
    slow = A45 * ar2(n, P45, RHO45, rng)

    phase_drift = np.cumsum(DRIFT30 * rng.standard_normal(n))
    envelope = 1.0 + ENV30 * ar2(n, 120.0, 0.97, rng)
    monthly = A30 * envelope * np.sin(2 * math.pi * t / P30 + phase_drift)

    weekly = WEEKLY_AMP * np.sin(2 * math.pi * t / 7.0 + 0.8)

    sd = np.full(n, SD_QUIET)
    pos = 0
    loud = rng.random() < 0.5
    while pos < n:
        length = int(rng.integers(REGIME_LEN[0], REGIME_LEN[1]))
        if loud:
            sd[pos:pos + length] = SD_LOUD
        loud = not loud
        pos += length
    noise = sd * rng.standard_normal(n)

    spikes = np.zeros(n)
    u = rng.random(n)
    mag = rng.uniform(SPIKE_MAG[0], SPIKE_MAG[1], n)
    mag *= np.where(rng.random(n) < 0.5, -1, 1)
    spikes[u < SPIKE_RATE] = mag[u < SPIKE_RATE]

    return np.exp(log_trend + kink + mid + slow + monthly + weekly + noise + spikes)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/uk_cases.csv"
    values = generate()
    with open(out, "w", newline="") as f:
        f.write("date,cases\n")
        day = START
        for v in values:
            f.write(f"{day.isoformat()},{v:.3f}\n")
            day += dt.timedelta(days=1)
    print(f"wrote {out}: {len(values)} rows {START} .. {END}")


if __name__ == "__main__":
    main()

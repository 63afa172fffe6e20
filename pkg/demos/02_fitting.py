"""Fitting the power-law and CPU-DVFS models to a latency trace.

A synthetic trace is drawn from one ResNet152 block with 2% multiplicative
noise and five repeats per frequency, written as CSV, read back (repeats
are averaged) and fitted with both model families.

Run: python demos/02_fitting.py
"""
import tempfile
from pathlib import Path

import numpy as np

from gpudvfs import fit_cpu_dvfs, fit_linear_flops, fit_power_law, load_builtin, read_trace
from gpudvfs.models import predict_cpu_dvfs, predict_power_law
from gpudvfs.profiles import write_trace

rng = np.random.default_rng(0)
prof = load_builtin("resnet152-xavier-nx")
truth = prof.network.blocks[4].model
print("true block-5 model:", truth)

rows = {5: [(f, truth.latency(f) * (1 + 0.02 * rng.standard_normal()))
            for f in prof.device.freq_scale for _ in range(5)]}
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "trace.csv"
    write_trace(rows, path)
    series = read_trace(path)[5]

pl = fit_power_law(series)
cpu = fit_cpu_dvfs(series)
print(f"power-law fit: a={pl.model.a:.4f} b={pl.model.b:.4f} c={pl.model.c:.4f}  rmse={pl.rmse:.3f} ms  R2={pl.r_squared:.4f}")
print(f"CPU-DVFS fit:  coeff={cpu.model.coeff:.4f}                         rmse={cpu.rmse:.3f} ms  R2={cpu.r_squared:.4f}")

# The inverse-frequency model has no floor, so it drifts away at high clocks.
print(f"\n{'f':>5} {'measured':>9} {'power-law':>10} {'cpu-dvfs':>9}")
for f, t in series[::2]:
    print(f"{f:5.2f} {t:9.2f} {predict_power_law(pl.model, f):10.2f} {predict_cpu_dvfs(cpu.model, f):9.2f}")

# Fitted only on the low band, the CPU-DVFS model underestimates at 1.1 GHz.
low = fit_cpu_dvfs([p for p in series if p[0] <= 0.4]).model
print(f"\nlow-band CPU-DVFS at 1.1 GHz: {low.latency(1.1):.2f} ms vs truth {truth.latency(1.1):.2f} ms")

# FLOPs-vs-latency correlation across networks. The two shipped networks
# are listed with their 1 GHz totals; append your own (FLOPs, ms) pairs,
# since two points always give |r| = 1.
pts = [(1.43e9, 10.42), (23.11e9, 118.84)]
slope, intercept, r = fit_linear_flops(pts)
print(f"\nlinear FLOPs fit: {slope * 1e9:.3f} ms/GFLOP + {intercept:.2f} ms, r={r:.3f}")

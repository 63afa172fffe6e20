"""Latency and energy of the shipped Xavier NX profiles across the DVFS scale.

Run: python demos/01_latency_and_energy.py
"""
from gpudvfs import load_builtin, predict_energy, total_latency
from gpudvfs.models import predict_power_law

alex = load_builtin("alexnet-xavier-nx")
res = load_builtin("resnet152-xavier-nx")
dev = res.device

# Each block follows t = a * f**-b + c; at 1 GHz that is simply a + c.
print("AlexNet   total @ 1.0 GHz:", round(total_latency(alex.network, 1.0), 4), "ms")
print("ResNet152 total @ 1.0 GHz:", round(total_latency(res.network, 1.0), 4), "ms")

# Latency keeps shrinking with frequency but flattens toward the sum of the
# c terms, while dynamic energy kappa * f**3 * t keeps growing.
floor = sum(b.model.c for b in res.network.blocks)
print(f"\nResNet152 latency floor (sum of c): {floor:.2f} ms")
print(f"{'f [GHz]':>8} {'t [ms]':>9} {'E [mJ]':>8}")
for f in dev.freq_scale:
    t = total_latency(res.network, f)
    print(f"{f:8.2f} {t:9.2f} {1e3 * predict_energy(dev.kappa, f, t):8.2f}")

# Per-block view: which blocks are frequency sensitive?
print("\nResNet152 block latency at the scale ends")
for i, blk in enumerate(res.network.blocks, 1):
    lo, hi = predict_power_law(blk.model, dev.f_min), predict_power_law(blk.model, dev.f_max)
    print(f"  block {i}: {lo:7.2f} -> {hi:6.2f} ms  (speed-up x{lo / hi:.1f})")

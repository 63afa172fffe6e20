"""Device-edge cooperative inference for ResNet152.

Edge-side block latencies are not part of the shipped data; the numbers
below are placeholders for a desktop GPU and should be replaced by
measurements. Transmit power is likewise an assumption (0.5 W).

Run: python demos/04_partition_planning.py
"""
from gpudvfs import DeviceProfile, EdgeProfile, PartitionPlanRequest, load_builtin, plan_partition, rate_sweep

prof = load_builtin("resnet152-xavier-nx")
net = prof.network
dev = DeviceProfile(prof.device.name, prof.device.freq_scale, prof.device.kappa, tx_power=0.5)
edge = EdgeProfile("desktop-gpu", (0.4, 0.6, 1.2, 0.9, 2.5, 2.2, 2.1, 2.4, 0.3))

print("partition point per uplink rate (deadline 200 ms, device at max clock)")
for rate, plan in rate_sweep(net, dev, edge, [1, 5, 10, 15, 20, 25, 50, 100], 200):
    print(f"  {rate:5.0f} Mbps -> m={plan.partition}  {plan.predicted_latency_ms:7.2f} ms"
          f"  {plan.predicted_energy_j * 1e3:6.2f} mJ")

print("\nall candidates at 20 Mbps")
plan = plan_partition(net, dev, edge, PartitionPlanRequest(200, 20))
for c in plan.candidate_table:
    mark = "*" if c.partition == plan.partition else " "
    print(f" {mark} m={c.partition}: device {c.device_ms:6.2f} + upload {c.upload_ms:7.2f} + edge {c.edge_ms:5.2f}"
          f" = {c.latency_ms:7.2f} ms, {c.energy_j * 1e3:6.2f} mJ {'' if c.feasible else '(misses deadline)'}")

joint = plan_partition(net, dev, edge, PartitionPlanRequest(200, 20, joint_freq=True))
print(f"\njoint search over clock and partition: m={joint.partition} at {joint.frequency} GHz,"
      f" {joint.predicted_energy_j * 1e3:.2f} mJ")

"""Local inference: pick the GPU clock under a deadline or an energy budget,
and compare plans made with the power-law model against the CPU-DVFS
baseline, both judged by the power-law model.

The baseline is calibrated on the low end of the scale (<= 0.4 GHz), where
the two models agree; that is where its errors come from.

Run: python demos/03_local_planning.py
"""
from gpudvfs import LocalPlanRequest, evaluate_plan, fit_baseline, load_builtin, plan_frequency

prof = load_builtin("resnet152-xavier-nx")
dev = prof.device
net = fit_baseline(prof.network, [f for f in dev.freq_scale if f <= 0.4])


def show(req, label):
    print(label)
    for family in ("power-law", "cpu-dvfs"):
        plan = plan_frequency(net, dev, req, family)
        ev = evaluate_plan(plan, net, dev, truth_family="power-law")
        print(f"  {family:9s} f={plan.frequency:.2f} GHz  planned {plan.predicted_latency_ms:7.2f} ms"
              f" / {plan.predicted_energy_j * 1e3:6.2f} mJ   actual {ev.actual_latency_ms:7.2f} ms"
              f" / {ev.actual_energy_j * 1e3:6.2f} mJ   {'ok' if ev.deadline_met else 'VIOLATED'}"
              f"{'' if plan.feasible else '  (no feasible clock)'}")


for D in (100, 150, 200):
    show(LocalPlanRequest.deadline(D), f"deadline {D} ms")
for E in (0.02, 0.04):
    show(LocalPlanRequest.energy_budget(E), f"energy budget {E} J")

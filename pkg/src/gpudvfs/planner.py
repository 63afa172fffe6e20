"""Frequency and partition-point planning by exhaustive enumeration.

Two decisions are planned:

* local inference: pick a GPU frequency from the device scale that either
  minimises energy under a deadline or minimises latency under an energy
  budget;
* device-edge cooperative inference: pick a partition point ``m`` (and
  optionally the frequency) minimising device energy, computation plus
  upload, under an end-to-end deadline at a fixed uplink rate.

Infeasible requests still return a best-effort plan with ``feasible=False``
so it can be evaluated against another latency model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from .models import predict_energy
from .profiles import ConfigurationError, DeviceProfile, EdgeProfile, NetworkProfile, prefix_energy, prefix_latency, total_latency

MIN_ENERGY = "min-energy-under-deadline"
MIN_LATENCY = "min-latency-under-energy"
OBJECTIVES = (MIN_ENERGY, MIN_LATENCY)
FAMILIES = ("power-law", "cpu-dvfs")
LOCAL = "local"


@dataclass(frozen=True)
class LocalPlanRequest:
    objective: str
    deadline_ms: Optional[float] = None
    energy_budget_j: Optional[float] = None

    def __post_init__(self):
        if self.objective == MIN_ENERGY:
            if self.deadline_ms is None or self.energy_budget_j is not None:
                raise ConfigurationError(f"{MIN_ENERGY} takes a deadline and no energy budget")
            if not self.deadline_ms > 0:
                raise ConfigurationError("deadline must be positive")
        elif self.objective == MIN_LATENCY:
            if self.energy_budget_j is None or self.deadline_ms is not None:
                raise ConfigurationError(f"{MIN_LATENCY} takes an energy budget and no deadline")
            if not self.energy_budget_j > 0:
                raise ConfigurationError("energy budget must be positive")
        else:
            raise ConfigurationError(f"unknown objective {self.objective!r}; expected one of {OBJECTIVES}")

    @classmethod
    def deadline(cls, deadline_ms: float) -> "LocalPlanRequest":
        return cls(MIN_ENERGY, deadline_ms=deadline_ms)

    @classmethod
    def energy_budget(cls, energy_j: float) -> "LocalPlanRequest":
        return cls(MIN_LATENCY, energy_budget_j=energy_j)

    def as_dict(self) -> dict:
        d = {"objective": self.objective}
        if self.deadline_ms is not None:
            d["deadline_ms"] = self.deadline_ms
        if self.energy_budget_j is not None:
            d["energy_budget_j"] = self.energy_budget_j
        return d


@dataclass(frozen=True)
class PartitionPlanRequest:
    deadline_ms: float
    rate_mbps: float
    device_freq: Union[float, str] = "max"
    joint_freq: bool = False

    def __post_init__(self):
        if not self.deadline_ms > 0:
            raise ConfigurationError("deadline must be positive")
        if not self.rate_mbps > 0:
            raise ConfigurationError("rate must be positive")
        if self.device_freq != "max" and not (isinstance(self.device_freq, (int, float)) and self.device_freq > 0):
            raise ConfigurationError(f"device_freq must be 'max' or a positive frequency, got {self.device_freq!r}")

    def as_dict(self) -> dict:
        return {"deadline_ms": self.deadline_ms, "rate_mbps": self.rate_mbps,
                "device_freq": self.device_freq, "joint_freq": self.joint_freq}


@dataclass(frozen=True)
class Candidate:
    frequency: float
    partition: Union[int, str]
    latency_ms: float
    energy_j: float
    feasible: bool
    device_ms: Optional[float] = None
    upload_ms: Optional[float] = None
    edge_ms: Optional[float] = None

    def as_dict(self) -> dict:
        d = {"frequency_ghz": self.frequency, "partition": self.partition,
             "latency_ms": self.latency_ms, "energy_j": self.energy_j, "feasible": self.feasible}
        if self.device_ms is not None:
            d.update(device_ms=self.device_ms, upload_ms=self.upload_ms, edge_ms=self.edge_ms)
        return d


@dataclass(frozen=True)
class Plan:
    request: Union[LocalPlanRequest, PartitionPlanRequest]
    model_family: str
    frequency: float
    partition: Union[int, str]
    predicted_latency_ms: float
    predicted_energy_j: float
    feasible: bool
    candidate_table: tuple = field(default=(), repr=False)

    @property
    def is_partition(self) -> bool:
        return isinstance(self.request, PartitionPlanRequest)

    def as_dict(self) -> dict:
        return {
            "model_family": self.model_family,
            "frequency_ghz": self.frequency,
            "partition": self.partition,
            "predicted_latency_ms": self.predicted_latency_ms,
            "predicted_energy_j": self.predicted_energy_j,
            "feasible": self.feasible,
            "candidates": [c.as_dict() for c in self.candidate_table],
        }


@dataclass(frozen=True)
class Evaluation:
    actual_latency_ms: float
    actual_energy_j: float
    deadline_met: bool


def _check_family(family):
    if family not in FAMILIES:
        raise ConfigurationError(f"unknown model family {family!r}; expected one of {FAMILIES}")


def _local_candidate(net, dev, f, family, req) -> Candidate:
    t = total_latency(net, f, family)
    e = predict_energy(dev.kappa, f, t)
    ok = t <= req.deadline_ms if req.objective == MIN_ENERGY else e <= req.energy_budget_j
    return Candidate(f, LOCAL, t, e, ok)


def plan_frequency(net: NetworkProfile, dev: DeviceProfile, req: LocalPlanRequest,
                   model_family: str = "power-law") -> Plan:
    """Choose the local-inference frequency from ``dev.freq_scale``.

    Ties are broken by the other metric, then by the lower frequency. With
    no feasible frequency the plan falls back to the maximum frequency
    (deadline objective) or the minimum one (energy objective).
    """
    _check_family(model_family)
    table = tuple(_local_candidate(net, dev, f, model_family, req) for f in dev.freq_scale)
    feasible = [c for c in table if c.feasible]
    if req.objective == MIN_ENERGY:
        key = lambda c: (c.energy_j, c.latency_ms, c.frequency)
        fallback = max(table, key=lambda c: c.frequency)
    else:
        key = lambda c: (c.latency_ms, c.energy_j, c.frequency)
        fallback = min(table, key=lambda c: c.frequency)
    best = min(feasible, key=key) if feasible else fallback
    return Plan(req, model_family, best.frequency, LOCAL, best.latency_ms, best.energy_j,
                bool(feasible), table)


def _upload_bytes(net: NetworkProfile, m: int) -> float:
    if m == net.num_blocks:
        return 0.0  # fully local: nothing leaves the device
    if m == 0:
        return net.input_bytes
    return net.blocks[m - 1].output_bytes


def _check_partition_inputs(net, edge):
    if edge is None:
        raise ConfigurationError("partition planning needs an edge profile")
    if len(edge.block_latency) != net.num_blocks:
        raise ConfigurationError(
            f"edge profile has {len(edge.block_latency)} entries for {net.num_blocks} blocks")
    if net.input_bytes is None:
        raise ConfigurationError(f"network {net.name!r} has no input size")
    missing = [b.name for b in net.blocks[:-1] if b.output_bytes is None]
    if missing:
        raise ConfigurationError(f"blocks without output feature size: {', '.join(missing)}")


def partition_candidate(net: NetworkProfile, dev: DeviceProfile, edge: EdgeProfile, m: int, f: float,
                        rate_mbps: float, deadline_ms: float, family: str = "power-law") -> Candidate:
    """Latency and device energy of partitioning at ``m`` with the device at ``f``."""
    device_ms = prefix_latency(net, m, f, family)
    upload_ms = _upload_bytes(net, m) * 8 / (rate_mbps * 1e6) * 1e3
    edge_ms = math.fsum(edge.block_latency[m:])
    latency = device_ms + upload_ms + edge_ms
    energy = prefix_energy(net, dev, m, f, family) + dev.tx_power * upload_ms * 1e-3
    return Candidate(f, m, latency, energy, latency <= deadline_ms, device_ms, upload_ms, edge_ms)


def _partition_freqs(dev: DeviceProfile, req: PartitionPlanRequest) -> tuple:
    if req.joint_freq:
        return dev.freq_scale
    if req.device_freq == "max":
        return (dev.f_max,)
    for f in dev.freq_scale:
        if math.isclose(f, req.device_freq, rel_tol=1e-9):
            return (f,)
    raise ConfigurationError(f"frequency {req.device_freq} GHz is not on the device scale")


def plan_partition(net: NetworkProfile, dev: DeviceProfile, edge: EdgeProfile, req: PartitionPlanRequest,
                   model_family: str = "power-law") -> Plan:
    """Choose the partition point (and frequency, with ``joint_freq``).

    Minimises device energy among candidates meeting the deadline; ties go
    to lower latency, then lower frequency, then larger ``m``. Without a
    feasible candidate, the lowest-latency one is returned flagged
    infeasible.
    """
    _check_family(model_family)
    _check_partition_inputs(net, edge)
    table = tuple(
        partition_candidate(net, dev, edge, m, f, req.rate_mbps, req.deadline_ms, model_family)
        for f in _partition_freqs(dev, req)
        for m in range(net.num_blocks + 1)
    )
    feasible = [c for c in table if c.feasible]
    if feasible:
        best = min(feasible, key=lambda c: (c.energy_j, c.latency_ms, c.frequency, -c.partition))
    else:
        best = min(table, key=lambda c: (c.latency_ms, c.energy_j, c.frequency, -c.partition))
    return Plan(req, model_family, best.frequency, best.partition, best.latency_ms, best.energy_j,
                bool(feasible), table)


def evaluate_plan(plan: Plan, net: NetworkProfile, dev: DeviceProfile, edge: Optional[EdgeProfile] = None,
                  truth_family: str = "power-law") -> Evaluation:
    """Re-evaluate a plan's decision under ``truth_family``.

    ``deadline_met`` reports whether the original constraint (deadline, or
    energy budget for the energy objective) holds under the truth model.
    """
    _check_family(truth_family)
    req = plan.request
    if plan.is_partition:
        _check_partition_inputs(net, edge)
        c = partition_candidate(net, dev, edge, plan.partition, plan.frequency,
                                req.rate_mbps, req.deadline_ms, truth_family)
    else:
        c = _local_candidate(net, dev, plan.frequency, truth_family, req)
    return Evaluation(c.latency_ms, c.energy_j, c.feasible)


def rate_sweep(net: NetworkProfile, dev: DeviceProfile, edge: EdgeProfile, rates, deadline_ms: float,
               model_family: str = "power-law", device_freq="max", joint_freq: bool = False) -> list:
    """``[(rate_mbps, plan), ...]`` in the order of ``rates``."""
    return [
        (r, plan_partition(net, dev, edge, PartitionPlanRequest(deadline_ms, r, device_freq, joint_freq),
                           model_family))
        for r in rates
    ]

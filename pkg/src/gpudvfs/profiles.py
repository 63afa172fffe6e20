"""Network, device and edge profiles: data model, file I/O and validation.

Profile files are JSON with top-level ``device``, ``network`` and optional
``edge`` objects. Sizes are in bytes (1 MB = 10**6 bytes), frequencies in
GHz, latencies in ms.
"""

from __future__ import annotations

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .models import MAX_EXPONENT, CpuDvfsModel, DomainError, EnergyCoefficient, PowerLawModel, predict_cpu_dvfs, predict_power_law

MB = 1e6
DEFAULT_TX_POWER_W = 1.0


class ProfileError(ValueError):
    """Malformed profile or trace file."""


class ConfigurationError(ValueError):
    """A requested computation needs data the profiles do not carry."""


@dataclass(frozen=True)
class BlockProfile:
    name: str
    model: PowerLawModel
    flops: Optional[float] = None
    output_bytes: Optional[float] = None
    cpu_dvfs: Optional[CpuDvfsModel] = None


@dataclass(frozen=True)
class NetworkProfile:
    """A serial chain of blocks.

    Partition index ``m`` runs blocks ``1..m`` on the device; ``m = 0``
    uploads the raw input and ``m = len(blocks)`` is fully local.
    """

    name: str
    blocks: tuple
    input_bytes: Optional[float] = None
    flops: Optional[float] = None
    cpu_dvfs: Optional[CpuDvfsModel] = None

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def block_index(self, key) -> int:
        """0-based index of a block given its 1-based number or its name."""
        if isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
            i = int(key) - 1
            if 0 <= i < len(self.blocks):
                return i
            raise IndexError(f"block {key} out of range 1..{len(self.blocks)}")
        for i, blk in enumerate(self.blocks):
            if blk.name == key:
                return i
        raise KeyError(f"unknown block {key!r}")


@dataclass(frozen=True)
class DeviceProfile:
    name: str
    freq_scale: tuple
    kappa: EnergyCoefficient
    tx_power: float = DEFAULT_TX_POWER_W
    tx_power_defaulted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "freq_scale", tuple(float(f) for f in self.freq_scale))
        if not isinstance(self.kappa, EnergyCoefficient):
            object.__setattr__(self, "kappa", EnergyCoefficient(float(self.kappa)))

    @property
    def f_min(self) -> float:
        return self.freq_scale[0]

    @property
    def f_max(self) -> float:
        return self.freq_scale[-1]


@dataclass(frozen=True)
class EdgeProfile:
    name: str
    block_latency: tuple

    def __post_init__(self):
        object.__setattr__(self, "block_latency", tuple(float(x) for x in self.block_latency))


@dataclass(frozen=True)
class Profile:
    device: DeviceProfile
    network: NetworkProfile
    edge: Optional[EdgeProfile] = None


def uniform_scale(f_lo: float, f_hi: float, n: int) -> tuple:
    """``n`` evenly spaced frequencies, rounded to kHz so files stay readable."""
    if n == 1:
        return (round(f_hi, 6),)
    step = (f_hi - f_lo) / (n - 1)
    return tuple(round(f_lo + i * step, 6) for i in range(n))


# ---------------------------------------------------------------- prediction

def block_latencies(net: NetworkProfile, f, family: str = "power-law") -> list:
    """Per-block latency (ms) at ``f`` under ``family``."""
    if family == "power-law":
        return [predict_power_law(b.model, f) for b in net.blocks]
    if family == "cpu-dvfs":
        missing = [b.name for b in net.blocks if b.cpu_dvfs is None]
        if missing:
            raise ConfigurationError(f"blocks without a CPU-DVFS model: {', '.join(missing)}")
        return [predict_cpu_dvfs(b.cpu_dvfs, f) for b in net.blocks]
    raise ConfigurationError(f"unknown model family {family!r}")


def total_latency(net: NetworkProfile, f, family: str = "power-law") -> float:
    """End-to-end latency (ms). For ``cpu-dvfs``, a network-level model is
    used when not every block carries one."""
    if family == "cpu-dvfs" and net.cpu_dvfs is not None and any(b.cpu_dvfs is None for b in net.blocks):
        return predict_cpu_dvfs(net.cpu_dvfs, f)
    return prefix_latency(net, net.num_blocks, f, family)


def prefix_latency(net: NetworkProfile, m: int, f, family: str = "power-law") -> float:
    """Latency (ms) of blocks ``1..m`` on the device."""
    if not 0 <= m <= net.num_blocks:
        raise IndexError(f"partition index {m} out of range 0..{net.num_blocks}")
    if m == 0:
        return 0.0
    return math.fsum(block_latencies(net, f, family)[:m])


def prefix_energy(net: NetworkProfile, dev: DeviceProfile, m: int, f, family: str = "power-law") -> float:
    """Device energy (J) of blocks ``1..m``; block energies add up."""
    return dev.kappa.kappa * f**3 * prefix_latency(net, m, f, family) * 1e-3


def with_workload_baseline(net: NetworkProfile, flops_per_cycle: float) -> NetworkProfile:
    """Attach CPU-DVFS models derived from FLOP counts where they are known."""
    blocks = tuple(
        BlockProfile(b.name, b.model, b.flops, b.output_bytes,
                     CpuDvfsModel.from_workload(b.flops, flops_per_cycle) if b.flops else b.cpu_dvfs)
        for b in net.blocks
    )
    net_cpu = CpuDvfsModel.from_workload(net.flops, flops_per_cycle) if net.flops else net.cpu_dvfs
    return NetworkProfile(net.name, blocks, net.input_bytes, net.flops, net_cpu)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    severity: str = "error"

    def as_dict(self) -> dict:
        return {"code": self.code, "severity": self.severity, "message": self.message}


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)

    @property
    def errors(self) -> list:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list:
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list:
        return [i.code for i in self.issues]

    def as_dict(self) -> dict:
        return {"ok": self.ok, "issues": [i.as_dict() for i in self.issues]}


def _bad_number(x) -> bool:
    return not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x)


def validate_profile(net: NetworkProfile, dev: DeviceProfile, edge: Optional[EdgeProfile] = None) -> ValidationReport:
    """Check every profile invariant and report violations with stable codes.

    Codes: ``empty-network``, ``exponent out of bounds``, ``negative coefficient``,
    ``negative flops``, ``negative output size``, ``negative input size``,
    ``empty frequency scale``, ``frequency scale not increasing``,
    ``non-positive frequency``, ``non-positive kappa``, ``negative tx power``,
    ``edge/block length mismatch``, ``negative edge latency`` (errors) and
    ``defaulted`` (warning, tx power not given).
    """
    issues = []
    add = lambda code, msg, sev="error": issues.append(Issue(code, msg, sev))

    if not net.blocks:
        add("empty-network", f"network {net.name!r} has no blocks")
    for i, blk in enumerate(net.blocks, start=1):
        m = blk.model
        if _bad_number(m.b) or not 0 < m.b <= MAX_EXPONENT:
            add("exponent out of bounds", f"block {i}: b={m.b} not in (0, {MAX_EXPONENT}]")
        if _bad_number(m.a) or _bad_number(m.c) or m.a < 0 or m.c < 0:
            add("negative coefficient", f"block {i}: a={m.a}, c={m.c}")
        if blk.flops is not None and (_bad_number(blk.flops) or blk.flops < 0):
            add("negative flops", f"block {i}: flops={blk.flops}")
        if blk.output_bytes is not None and (_bad_number(blk.output_bytes) or blk.output_bytes < 0):
            add("negative output size", f"block {i}: output_bytes={blk.output_bytes}")
    if net.input_bytes is not None and (_bad_number(net.input_bytes) or net.input_bytes < 0):
        add("negative input size", f"input_bytes={net.input_bytes}")

    scale = dev.freq_scale
    if not scale:
        add("empty frequency scale", f"device {dev.name!r} has no frequencies")
    if any(_bad_number(f) or f <= 0 for f in scale):
        add("non-positive frequency", f"scale {list(scale)}")
    if any(b <= a for a, b in zip(scale, scale[1:])):
        add("frequency scale not increasing", f"scale {list(scale)}")
    if _bad_number(dev.kappa.kappa) or dev.kappa.kappa <= 0:
        add("non-positive kappa", f"kappa={dev.kappa.kappa}")
    if _bad_number(dev.tx_power) or dev.tx_power < 0:
        add("negative tx power", f"tx_power={dev.tx_power}")
    if dev.tx_power_defaulted:
        add("defaulted", f"tx_power_w not given, using {dev.tx_power} W", "warning")

    if edge is not None:
        if len(edge.block_latency) != len(net.blocks):
            add("edge/block length mismatch",
                f"edge has {len(edge.block_latency)} entries, network has {len(net.blocks)} blocks")
        if any(_bad_number(x) or x < 0 for x in edge.block_latency):
            add("negative edge latency", f"block_latency_ms {list(edge.block_latency)}")
    return ValidationReport(issues)


# ---------------------------------------------------------------- file format

_DEVICE_KEYS = {"name", "freq_scale_ghz", "kappa_w_per_ghz3", "tx_power_w"}
_NETWORK_KEYS = {"name", "input_bytes", "blocks", "flops", "cpu_dvfs"}
_BLOCK_KEYS = {"name", "flops", "output_bytes", "model", "cpu_dvfs"}
_EDGE_KEYS = {"name", "block_latency_ms"}


def _reject_constant(token):
    raise ProfileError(f"non-finite number {token} not allowed")


def _check_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ProfileError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ProfileError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ProfileError(f"{where}: missing key(s) {sorted(missing)}")


def _num(x, where, optional=False):
    if x is None and optional:
        return None
    if _bad_number(x):
        raise ProfileError(f"{where}: expected a number, got {x!r}")
    return float(x)


def _power_law_unchecked(a, b, c) -> PowerLawModel:
    # bypass invariants so validate_profile can report them instead of the loader crashing
    m = object.__new__(PowerLawModel)
    for k, v in (("a", a), ("b", b), ("c", c)):
        object.__setattr__(m, k, v)
    return m


def _parse_cpu(obj, where):
    _check_keys(obj, {"coeff"}, {"coeff"}, where)
    try:
        return CpuDvfsModel(_num(obj["coeff"], where))
    except DomainError as e:
        raise ProfileError(f"{where}: {e}") from None


def parse_device(obj) -> DeviceProfile:
    _check_keys(obj, _DEVICE_KEYS, {"name", "freq_scale_ghz", "kappa_w_per_ghz3"}, "device")
    scale = obj["freq_scale_ghz"]
    if not isinstance(scale, list):
        raise ProfileError("device.freq_scale_ghz: expected a list")
    kappa = object.__new__(EnergyCoefficient)  # range checked by validate_profile
    object.__setattr__(kappa, "kappa", _num(obj["kappa_w_per_ghz3"], "device.kappa_w_per_ghz3"))
    return DeviceProfile(
        name=str(obj["name"]),
        freq_scale=tuple(_num(f, "device.freq_scale_ghz") for f in scale),
        kappa=kappa,
        tx_power=_num(obj["tx_power_w"], "device.tx_power_w") if "tx_power_w" in obj else DEFAULT_TX_POWER_W,
        tx_power_defaulted="tx_power_w" not in obj,
    )


def parse_network(obj) -> NetworkProfile:
    _check_keys(obj, _NETWORK_KEYS, {"name", "blocks"}, "network")
    if not isinstance(obj["blocks"], list):
        raise ProfileError("network.blocks: expected a list")
    blocks = []
    for i, b in enumerate(obj["blocks"], start=1):
        where = f"network.blocks[{i}]"
        _check_keys(b, _BLOCK_KEYS, {"name", "model"}, where)
        _check_keys(b["model"], {"a", "b", "c"}, {"a", "b", "c"}, where + ".model")
        model = _power_law_unchecked(*(_num(b["model"][k], f"{where}.model.{k}") for k in "abc"))
        blocks.append(BlockProfile(
            name=str(b["name"]),
            model=model,
            flops=_num(b.get("flops"), where + ".flops", optional=True),
            output_bytes=_num(b.get("output_bytes"), where + ".output_bytes", optional=True),
            cpu_dvfs=_parse_cpu(b["cpu_dvfs"], where + ".cpu_dvfs") if "cpu_dvfs" in b else None,
        ))
    return NetworkProfile(
        name=str(obj["name"]),
        blocks=tuple(blocks),
        input_bytes=_num(obj.get("input_bytes"), "network.input_bytes", optional=True),
        flops=_num(obj.get("flops"), "network.flops", optional=True),
        cpu_dvfs=_parse_cpu(obj["cpu_dvfs"], "network.cpu_dvfs") if "cpu_dvfs" in obj else None,
    )


def parse_edge(obj) -> EdgeProfile:
    _check_keys(obj, _EDGE_KEYS, _EDGE_KEYS, "edge")
    if not isinstance(obj["block_latency_ms"], list):
        raise ProfileError("edge.block_latency_ms: expected a list")
    return EdgeProfile(str(obj["name"]),
                       tuple(_num(x, "edge.block_latency_ms") for x in obj["block_latency_ms"]))


def _loads(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise ProfileError(f"invalid JSON at line {e.lineno}: {e.msg}") from None


def parse_profile(obj) -> Profile:
    _check_keys(obj, {"device", "network", "edge"}, {"device", "network"}, "profile")
    edge = parse_edge(obj["edge"]) if obj.get("edge") is not None else None
    return Profile(parse_device(obj["device"]), parse_network(obj["network"]), edge)


def load_profile(path) -> Profile:
    return parse_profile(_loads(Path(path).read_text(encoding="utf-8")))


def load_edge(path) -> EdgeProfile:
    """Read an edge profile from a file holding ``{"edge": {...}}``."""
    obj = _loads(Path(path).read_text(encoding="utf-8"))
    _check_keys(obj, {"edge"}, {"edge"}, "edge file")
    return parse_edge(obj["edge"])


def load_builtin(name: str) -> Profile:
    """Load a shipped profile: ``alexnet-xavier-nx`` or ``resnet152-xavier-nx``."""
    fname = name.replace("-", "_") + ".json"
    try:
        text = resources.files("gpudvfs.data").joinpath(fname).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise KeyError(f"no built-in profile {name!r}; available: {builtin_profiles()}") from None
    return parse_profile(_loads(text))


def builtin_profiles() -> list:
    return sorted(p.name[:-5].replace("_", "-")
                  for p in resources.files("gpudvfs.data").iterdir() if p.name.endswith(".json"))


def _drop_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def device_to_dict(dev: DeviceProfile) -> dict:
    d = {"name": dev.name, "freq_scale_ghz": list(dev.freq_scale), "kappa_w_per_ghz3": dev.kappa.kappa}
    if not dev.tx_power_defaulted:
        d["tx_power_w"] = dev.tx_power
    return d


def network_to_dict(net: NetworkProfile) -> dict:
    blocks = [
        _drop_none({
            "name": b.name,
            "flops": b.flops,
            "output_bytes": b.output_bytes,
            "model": {"a": b.model.a, "b": b.model.b, "c": b.model.c},
            "cpu_dvfs": b.cpu_dvfs.as_dict() if b.cpu_dvfs else None,
        })
        for b in net.blocks
    ]
    return _drop_none({
        "name": net.name,
        "input_bytes": net.input_bytes,
        "flops": net.flops,
        "cpu_dvfs": net.cpu_dvfs.as_dict() if net.cpu_dvfs else None,
        "blocks": blocks,
    })


def profile_to_dict(profile: Profile) -> dict:
    d = {"device": device_to_dict(profile.device), "network": network_to_dict(profile.network)}
    if profile.edge is not None:
        d["edge"] = {"name": profile.edge.name, "block_latency_ms": list(profile.edge.block_latency)}
    return d


def dump_profile(profile: Profile, path=None) -> str:
    text = json.dumps(profile_to_dict(profile), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------------- traces

TRACE_HEADER = ("block", "freq_ghz", "latency_ms")


def read_trace(path_or_lines) -> dict:
    """Read a latency trace CSV into ``{key: [(f, mean_t), ...]}``.

    ``key`` is a 1-based block number (int) or ``"total"``. Repeated rows
    for the same (key, frequency) are averaged; points are sorted by f.
    """
    if isinstance(path_or_lines, (str, Path)):
        with open(path_or_lines, newline="", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(path_or_lines)

    reader = csv.reader(lines)
    rows = [(n, r) for n, r in enumerate(reader, start=1) if any(cell.strip() for cell in r)]
    if not rows:
        raise ProfileError("no data rows")
    n0, header = rows[0]
    if tuple(c.strip() for c in header) != TRACE_HEADER:
        raise ProfileError(f"line {n0}: expected header {','.join(TRACE_HEADER)}, got {','.join(header)}")
    if len(rows) == 1:
        raise ProfileError("no data rows")

    acc = defaultdict(list)
    for lineno, row in rows[1:]:
        if len(row) != 3:
            raise ProfileError(f"line {lineno}: expected 3 fields, got {len(row)}")
        key_s, f_s, t_s = (c.strip() for c in row)
        if key_s == "total":
            key = "total"
        elif key_s.isdigit() and int(key_s) >= 1:
            key = int(key_s)
        else:
            raise ProfileError(f"line {lineno}: block must be a 1-based index or 'total', got {key_s!r}")
        try:
            f, t = float(f_s), float(t_s)
        except ValueError:
            raise ProfileError(f"line {lineno}: non-numeric frequency or latency") from None
        if not (math.isfinite(f) and f > 0):
            raise ProfileError(f"line {lineno}: frequency must be positive, got {f_s}")
        if not (math.isfinite(t) and t >= 0):
            raise ProfileError(f"line {lineno}: latency must be >= 0, got {t_s}")
        acc[(key, f)].append(t)

    out = defaultdict(list)
    for (key, f), ts in acc.items():
        out[key].append((f, math.fsum(ts) / len(ts)))
    return {k: sorted(v) for k, v in sorted(out.items(), key=lambda kv: (kv[0] == "total", str(kv[0]).zfill(6)))}


def write_trace(series: dict, path=None) -> str:
    """Inverse of :func:`read_trace` (one row per point)."""
    lines = [",".join(TRACE_HEADER)]
    for key, pts in series.items():
        lines += [f"{key},{f!r},{t!r}" for f, t in pts]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text

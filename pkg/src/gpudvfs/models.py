"""Latency and energy models for DVFS-controlled GPU inference.

Units are fixed throughout the package: frequency in GHz, latency in ms,
energy in J. Conversions happen only where a formula crosses units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_EXPONENT = 4.0


class DomainError(ValueError):
    """Raised when a model is evaluated outside its domain."""


def _check_freq(f):
    arr = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"frequency must be positive and finite, got {f!r}")
    return arr


def _out(value, like):
    # scalar in, float out; array in, array out
    return float(value) if np.ndim(like) == 0 else value


@dataclass(frozen=True)
class PowerLawModel:
    """Latency ``a * f**-b + c``.

    ``a`` carries the workload-like term (ms * GHz**b), ``b`` the frequency
    sensitivity and ``c`` the frequency-independent floor (ms).
    """

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite number, got {v!r}")
        if self.a < 0 or self.c < 0:
            raise DomainError(f"a and c must be >= 0, got a={self.a}, c={self.c}")
        if not 0 < self.b <= MAX_EXPONENT:
            raise DomainError(f"b must lie in (0, {MAX_EXPONENT}], got {self.b}")

    def latency(self, f):
        return predict_power_law(self, f)

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c}


@dataclass(frozen=True)
class CpuDvfsModel:
    """Latency ``coeff / f``, the classic cycles-over-clock model.

    ``coeff`` is in ms * GHz. Build it from a FLOP count and a per-cycle
    throughput with :meth:`from_workload`.
    """

    coeff: float

    def __post_init__(self):
        if not isinstance(self.coeff, (int, float)) or not math.isfinite(self.coeff) or self.coeff <= 0:
            raise DomainError(f"coeff must be a positive finite number, got {self.coeff!r}")

    @classmethod
    def from_workload(cls, flops: float, flops_per_cycle: float) -> "CpuDvfsModel":
        # t[s] = w / (g * f[Hz]) = w / (g * f[GHz] * 1e9)  =>  coeff[ms*GHz] = w / (g * 1e6)
        if flops <= 0 or flops_per_cycle <= 0:
            raise DomainError("flops and flops_per_cycle must be positive")
        return cls(flops / (flops_per_cycle * 1e6))

    def latency(self, f):
        return predict_cpu_dvfs(self, f)

    def as_dict(self) -> dict:
        return {"coeff": self.coeff}


@dataclass(frozen=True)
class EnergyCoefficient:
    """Dynamic-energy coefficient kappa in W/GHz^3."""

    kappa: float

    def __post_init__(self):
        if not isinstance(self.kappa, (int, float)) or not math.isfinite(self.kappa) or self.kappa <= 0:
            raise DomainError(f"kappa must be a positive finite number, got {self.kappa!r}")


def _kappa_value(kappa) -> float:
    return kappa.kappa if isinstance(kappa, EnergyCoefficient) else float(kappa)


def predict_power_law(model: PowerLawModel, f):
    """Latency in ms of ``model`` at frequency ``f`` (GHz). Accepts arrays."""
    arr = _check_freq(f)
    return _out(model.a * arr ** (-model.b) + model.c, f)


def predict_cpu_dvfs(model: CpuDvfsModel, f):
    """Latency in ms of the CPU-DVFS model at frequency ``f`` (GHz)."""
    arr = _check_freq(f)
    return _out(model.coeff / arr, f)


def predict_energy(kappa, f, t):
    """Dynamic energy in J for running ``t`` ms at ``f`` GHz.

    >>> round(predict_energy(1.3, 0.5, 1.2824), 10)
    0.00020839
    """
    arr = _check_freq(f)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise DomainError(f"latency must be finite and >= 0, got {t!r}")
    e = _kappa_value(kappa) * arr**3 * t_arr * 1e-3
    return float(e) if np.ndim(e) == 0 else e


def energy_at_frequency(model: PowerLawModel, kappa, f):
    """Energy in J of one execution of ``model`` at ``f``."""
    return predict_energy(kappa, f, predict_power_law(model, f))

"""DVFS-aware GPU inference latency and energy modelling.

Power-law latency ``a * f**-b + c`` per network or block, cubic dynamic
energy ``kappa * f**3 * t``, the inverse-frequency CPU-DVFS baseline,
curve fitting for both, and frequency/partition planners.
"""

from .fitting import FitResult, InsufficientDataError, fit_baseline, fit_cpu_dvfs, fit_goodness, fit_linear_flops, fit_power_law
from .models import CpuDvfsModel, DomainError, EnergyCoefficient, PowerLawModel, energy_at_frequency, predict_cpu_dvfs, predict_energy, predict_power_law
from .planner import (
    Evaluation,
    LocalPlanRequest,
    PartitionPlanRequest,
    Plan,
    evaluate_plan,
    plan_frequency,
    plan_partition,
    rate_sweep,
)
from .profiles import (
    BlockProfile,
    ConfigurationError,
    DeviceProfile,
    EdgeProfile,
    NetworkProfile,
    Profile,
    ProfileError,
    load_builtin,
    load_profile,
    prefix_energy,
    prefix_latency,
    read_trace,
    total_latency,
    validate_profile,
)

__version__ = "0.1.0"

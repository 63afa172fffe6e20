"""Fit latency models to (frequency, latency) measurements.

The power-law fit uses variable projection: for a fixed exponent ``b`` the
model ``a * f**-b + c`` is linear in ``(a, c)``, which is solved exactly
under ``a, c >= 0``. The exponent is then found by a log-spaced grid scan
over ``(0.05, 4]`` followed by golden-section refinement around the best
grid point. No starting guess is needed and the result is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .models import MAX_EXPONENT, CpuDvfsModel, PowerLawModel, predict_cpu_dvfs, predict_power_law

B_GRID_MIN = 0.05
B_GRID_SIZE = 400
B_TOL = 1e-7

UNIDENTIFIABLE = "unidentifiable exponent"


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    model: Union[PowerLawModel, CpuDvfsModel, None]
    rmse: float
    r_squared: float
    flags: tuple = field(default=())


def b_grid(n: int = B_GRID_SIZE) -> np.ndarray:
    return np.geomspace(B_GRID_MIN, MAX_EXPONENT, n)


def _as_arrays(series):
    pts = list(series)
    if not pts:
        raise InsufficientDataError("empty series")
    f = np.array([p[0] for p in pts], dtype=float)
    t = np.array([p[1] for p in pts], dtype=float)
    if np.any(f <= 0) or not np.all(np.isfinite(f)):
        raise ValueError("frequencies must be positive and finite")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("latencies must be finite and >= 0")
    return f, t


def nonneg_affine_lsq(x: np.ndarray, t: np.ndarray):
    """Minimise ``sum((a*x + c - t)**2)`` over ``a, c >= 0``.

    Two-variable problem: the optimum is either the unconstrained solution
    or lies on a face ``a = 0`` / ``c = 0`` / both. Returns ``(a, c, sse)``.
    """
    n = x.size
    candidates = [(0.0, 0.0)]
    c0 = max(float(t.mean()), 0.0)
    candidates.append((0.0, c0))
    sxx = float(x @ x)
    if sxx > 0:
        candidates.append((max(float(x @ t) / sxx, 0.0), 0.0))
    xm = x.mean()
    dx = x - xm
    var = float(dx @ dx)
    if n >= 2 and var > 1e-300:
        a = float(dx @ (t - t.mean())) / var
        c = float(t.mean() - a * xm)
        if a >= 0 and c >= 0:
            candidates.append((a, c))
    best = None
    for a, c in candidates:
        r = a * x + c - t
        sse = float(r @ r)
        if best is None or sse < best[2]:
            best = (a, c, sse)
    return best


def _profile_sse(f, t, b):
    return nonneg_affine_lsq(f ** (-b), t)


def _golden(fun, lo, hi, tol):
    """Golden-section minimum of a unimodal ``fun`` on ``[lo, hi]``."""
    inv_phi = (math.sqrt(5) - 1) / 2
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    seen = [(f1, x1), (f2, x2)]
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = fun(x1)
            seen.append((f1, x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = fun(x2)
            seen.append((f2, x2))
    return min(seen)


def fit_power_law(series, grid_size: int = B_GRID_SIZE, tol: float = B_TOL) -> FitResult:
    """Least-squares fit of ``t = a * f**-b + c`` with ``a, c >= 0``, ``0 < b <= 4``.

    ``series`` is an iterable of ``(freq_ghz, latency_ms)`` pairs; at least
    three distinct frequencies are required. When no exponent gives a
    positive ``a`` (frequency-independent data) the exponent cannot be
    identified: ``b`` is reported as 1 and the result carries the
    ``"unidentifiable exponent"`` flag.
    """
    f, t = _as_arrays(series)
    if np.unique(f).size < 3:
        raise InsufficientDataError(f"power-law fit needs >= 3 distinct frequencies, got {np.unique(f).size}")

    grid = b_grid(grid_size)
    fits = [_profile_sse(f, t, b) for b in grid]
    sse = np.array([s for _, _, s in fits])

    if all(a == 0.0 for a, _, _ in fits):
        c = fits[0][1]
        model = PowerLawModel(0.0, 1.0, c)
        rmse, r2 = fit_goodness(zip(f, t), model)
        return FitResult(model, rmse, r2, (UNIDENTIFIABLE,))

    # first index of the minimum keeps ties deterministic
    i = int(np.argmin(sse))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    best_sse, best_b = _golden(lambda b: _profile_sse(f, t, b)[2], lo, hi, tol)
    if sse[i] <= best_sse:
        best_b, best_sse = float(grid[i]), float(sse[i])
    a, c, _ = _profile_sse(f, t, best_b)
    model = PowerLawModel(a, float(best_b), c)
    rmse, r2 = fit_goodness(zip(f, t), model)
    return FitResult(model, rmse, r2)


def fit_cpu_dvfs(series) -> FitResult:
    """Least-squares fit of ``t = coeff / f``.

    Closed form ``coeff = sum(t/f) / sum(1/f**2)``. A zero coefficient
    (all-zero data) cannot form a valid model; the result then has
    ``model=None``.
    """
    f, t = _as_arrays(series)
    coeff = max(float(np.sum(t / f) / np.sum(f ** -2.0)), 0.0)
    if coeff == 0.0:
        rmse = float(np.sqrt(np.mean(t**2)))
        return FitResult(None, rmse, 1.0 if rmse == 0 else 0.0, ("zero workload",))
    model = CpuDvfsModel(coeff)
    rmse, r2 = fit_goodness(zip(f, t), model)
    return FitResult(model, rmse, r2)


def fit_goodness(series, model) -> tuple:
    """``(rmse, r_squared)`` of ``model`` on ``series``.

    ``r_squared`` is ``1 - SS_res / SS_tot``; when the data has no spread
    it is 1 for a perfect prediction and ``-inf`` otherwise.
    """
    f, t = _as_arrays(series)
    if isinstance(model, PowerLawModel):
        pred = predict_power_law(model, f)
    elif isinstance(model, CpuDvfsModel):
        pred = predict_cpu_dvfs(model, f)
    else:
        raise TypeError(f"unsupported model {type(model).__name__}")
    res = t - pred
    ss_res = float(res @ res)
    dev = t - t.mean()
    ss_tot = float(dev @ dev)
    rmse = math.sqrt(ss_res / t.size)
    if ss_tot == 0.0:
        # float noise in the prediction counts as exact
        r2 = 1.0 if ss_res <= 1e-24 * max(float(t @ t), 1.0) else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return rmse, r2


def fit_linear_flops(points) -> tuple:
    """Ordinary least-squares line through ``(flops, latency_ms)`` points.

    Returns ``(slope, intercept, pearson_r)``. ``pearson_r`` is 0 when the
    latencies are all equal.
    """
    pts = list(points)
    if len(pts) < 2:
        raise InsufficientDataError("need at least 2 points")
    x = np.array([p[0] for p in pts], dtype=float)
    y = np.array([p[1] for p in pts], dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise InsufficientDataError("all FLOP counts are identical")
    sxy = float(dx @ dy)
    syy = float(dy @ dy)
    slope = sxy / sxx
    intercept = float(y.mean() - slope * x.mean())
    r = 0.0 if syy == 0.0 else max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    return slope, intercept, r


def fit_baseline(net, freqs):
    """Attach to every block of ``net`` a CPU-DVFS model fitted to its own
    power-law predictions at ``freqs``.

    This reproduces how a cycles-over-clock model ends up calibrated when
    only a band of frequencies was profiled.
    """
    from .profiles import BlockProfile, NetworkProfile

    freqs = [float(f) for f in freqs]
    if not freqs:
        raise InsufficientDataError("no frequencies to fit the baseline on")
    blocks = []
    for b in net.blocks:
        res = fit_cpu_dvfs([(f, predict_power_law(b.model, f)) for f in freqs])
        blocks.append(BlockProfile(b.name, b.model, b.flops, b.output_bytes, res.model))
    return NetworkProfile(net.name, tuple(blocks), net.input_bytes, net.flops, None)

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import TABLE_I, TABLE_II
from gpudvfs.models import (
    CpuDvfsModel,
    DomainError,
    EnergyCoefficient,
    PowerLawModel,
    energy_at_frequency,
    predict_cpu_dvfs,
    predict_energy,
    predict_power_law,
)

BLOCK1 = PowerLawModel(0.7111, 0.750, 0.0865)


def mp_power_law(a, b, c, f):
    mpmath.mp.dps = 40
    return float(mpmath.mpf(a) * mpmath.mpf(f) ** (-mpmath.mpf(b)) + mpmath.mpf(c))


class TestPowerLaw:
    def test_unit_frequency_gives_a_plus_c(self):
        assert predict_power_law(BLOCK1, 1.0) == pytest.approx(0.7976, abs=1e-12)

    def test_half_frequency(self):
        expected = mp_power_law(0.7111, 0.750, 0.0865, 0.5)
        assert expected == pytest.approx(1.2824, abs=5e-5)
        assert predict_power_law(BLOCK1, 0.5) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("f", [0.01, 0.5, 1.0, 7.0])
    def test_zero_workload_is_floor(self, f):
        assert predict_power_law(PowerLawModel(0, 1, 5.0), f) == 5.0

    def test_array_input(self):
        f = np.array([0.5, 1.0])
        out = predict_power_law(BLOCK1, f)
        assert out.shape == (2,)
        assert out[1] == pytest.approx(0.7976)

    @pytest.mark.parametrize("f", [0.0, -1.0, math.nan, math.inf])
    def test_bad_frequency(self, f):
        with pytest.raises(DomainError):
            predict_power_law(BLOCK1, f)

    @pytest.mark.parametrize("abc", [(-1, 1, 0), (1, 0, 0), (1, 4.5, 0), (1, 1, -0.1), (math.nan, 1, 0)])
    def test_invalid_parameters(self, abc):
        with pytest.raises(DomainError):
            PowerLawModel(*abc)


class TestCpuDvfs:
    def test_from_workload_alexnet(self):
        # 1.43 GFLOPs at 1536 FLOP/cycle and 1 GHz: 1.43e9 / 1536 / 1e9 s
        m = CpuDvfsModel.from_workload(1.43e9, 1536)
        assert predict_cpu_dvfs(m, 1.0) == pytest.approx(1.43e9 / 1536 / 1e9 * 1e3, rel=1e-12)
        assert predict_cpu_dvfs(m, 1.0) == pytest.approx(0.9310, abs=5e-5)

    def test_coefficient_at_unit_frequency(self):
        assert predict_cpu_dvfs(CpuDvfsModel(0.07374), 1.0) == pytest.approx(0.07374)

    def test_published_baseline_coefficient_ratio(self):
        # cross-check only: the ratio of the two published baseline coefficients
        assert 0.006455 / 0.07374 == pytest.approx(0.088, abs=5e-4)
        assert 1.43 / 23.11 == pytest.approx(0.062, abs=5e-4)

    def test_doubling_halves(self):
        assert predict_cpu_dvfs(CpuDvfsModel(1), 2) == 0.5

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            CpuDvfsModel(0)
        with pytest.raises(DomainError):
            predict_cpu_dvfs(CpuDvfsModel(1), 0)


class TestEnergy:
    def test_alexnet_total_at_unit_frequency(self):
        assert predict_energy(1.3, 1.0, 10.4205) == pytest.approx(0.013547, abs=5e-7)

    def test_half_frequency(self):
        assert predict_energy(EnergyCoefficient(1.3), 0.5, 1.2824) == pytest.approx(1.3 * 0.125 * 1.2824e-3, rel=1e-14)
        assert predict_energy(1.3, 0.5, 1.2824) == pytest.approx(2.0839e-4, abs=5e-9)

    @pytest.mark.parametrize("kappa,f", [(1.3, 0.1), (0.2, 2.0)])
    def test_zero_latency(self, kappa, f):
        assert predict_energy(kappa, f, 0.0) == 0.0

    def test_negative_latency(self):
        with pytest.raises(DomainError):
            predict_energy(1.3, 1.0, -1e-9)

    def test_kappa_must_be_positive(self):
        with pytest.raises(DomainError):
            EnergyCoefficient(0.0)

    @pytest.mark.parametrize("f", [0.1, 0.7, 3.0])
    def test_cubic_exponent_cancels(self, f):
        assert energy_at_frequency(PowerLawModel(1, 3, 0), 1.0, f) == pytest.approx(1e-3, rel=1e-12)

    def test_composition(self):
        assert energy_at_frequency(BLOCK1, 1.3, 0.5) == pytest.approx(2.0839e-4, abs=5e-9)
        assert energy_at_frequency(PowerLawModel(2, 1, 0.5), 2.0, 1.0) == pytest.approx(5e-3, rel=1e-14)

    def test_closed_form(self):
        a, b, c, k, f = 0.8595, 1.432, 3.843, 1.3, 0.61
        assert energy_at_frequency(PowerLawModel(a, b, c), k, f) == pytest.approx(
            k * (a * f ** (3 - b) + c * f**3) * 1e-3, rel=1e-13)


models = st.builds(
    PowerLawModel,
    st.floats(1e-3, 100), st.floats(0.05, 4.0), st.floats(0, 100),
)
freqs = st.floats(0.05, 5.0)


@given(models, freqs, st.floats(1.001, 10))
def test_latency_strictly_decreasing(m, f1, ratio):
    assert predict_power_law(m, f1 * ratio) < predict_power_law(m, f1)


@given(st.builds(PowerLawModel, st.floats(1e-3, 100), st.floats(0.05, 2.95), st.floats(1e-3, 100)),
       freqs, st.floats(1.001, 10))
def test_energy_strictly_increasing_below_cubic(m, f1, ratio):
    assert energy_at_frequency(m, 1.3, f1 * ratio) > energy_at_frequency(m, 1.3, f1)


@pytest.mark.parametrize("abc", TABLE_I + TABLE_II)
def test_table_energy_increasing_on_grid(abc):
    m = PowerLawModel(*abc)
    e = [energy_at_frequency(m, 1.3, f) for f in np.linspace(0.12, 1.1, 50)]
    assert all(y > x for x, y in zip(e, e[1:]))


@given(models, st.floats(1e-6, 1.0))
def test_floor_approached(m, eps):
    F = (m.a / eps) ** (1 / m.b)
    if not 0 < F < 1e150:
        return
    assert predict_power_law(m, F) - m.c == pytest.approx(eps, rel=1e-6, abs=1e-9 * max(m.c, 1))
    assert predict_power_law(m, 2 * F) - m.c < eps + 1e-9 * max(m.c, 1)


@given(st.floats(1e-3, 1e3), freqs)
def test_cpu_dvfs_is_degenerate_power_law(coeff, f):
    pl = predict_power_law(PowerLawModel(coeff, 1, 0), f)
    cpu = predict_cpu_dvfs(CpuDvfsModel(coeff), f)
    assert abs(pl - cpu) <= 1e-12 * cpu

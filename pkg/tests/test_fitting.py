# test_fitting.py - Decay fits, model regression and size extrapolation
import math

import numpy as np
import pytest

from shared.utils.errors import ConfigError, FitError
from services.analysis_service.fitting import (
    extrapolate_in_n, fit_exponential_decay, fit_model_coefficients, fit_trace_decay,
)
from services.analysis_service.models import ErrorModel
from services.simulation_service.models import ErrorTrace, StepErrorRecord


def synthetic_trace(C, c, B, b, gamma, p=2, upsilon=4, r=100, t=10.0, noise=None, rng=None):
    records = []
    for d in range(1, r + 1):
        phys = C * gamma * upsilon * math.exp(-c * gamma * upsilon * d)
        alg = B * (t / r) ** (p + 1) * math.exp(-b * gamma * upsilon * d)
        if noise:
            phys *= 1 + noise * rng.uniform(-1, 1)
            alg *= 1 + noise * rng.uniform(-1, 1)
        records.append(StepErrorRecord(step=d, phys_err=phys, alg_err=alg, tot_err=phys + alg))
    return ErrorTrace(records=records)


class TestDecayFit:
    def test_exact_decay_is_recovered(self):
        series = [0.3 * math.exp(-0.02 * d) for d in range(1, 51)]
        fit = fit_exponential_decay(series)
        assert fit.prefactor == pytest.approx(0.3, rel=1e-10)
        assert fit.rate == pytest.approx(0.02, rel=1e-10)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.window == (1, 50) and fit.n_points == 50

    def test_constant_series(self):
        fit = fit_exponential_decay([0.5] * 10)
        assert fit.rate == pytest.approx(0.0, abs=1e-14)
        assert fit.prefactor == pytest.approx(0.5)

    def test_noisy_series(self, rng):
        series = [2.0 * math.exp(-0.05 * d) * (1 + 0.01 * rng.uniform(-1, 1)) for d in range(1, 101)]
        fit = fit_exponential_decay(series)
        assert fit.rate == pytest.approx(0.05, rel=0.1)
        assert fit.prefactor == pytest.approx(2.0, rel=0.1)

    def test_window_restricts_points(self):
        series = [10.0] * 5 + [math.exp(-0.1 * d) for d in range(6, 31)]
        fit = fit_exponential_decay(series, window=(6, 30))
        assert fit.rate == pytest.approx(0.1, rel=1e-10)
        assert fit.n_points == 25

    def test_non_positive_value_reports_step(self):
        series = [1.0, 0.5, 0.0, 0.2]
        with pytest.raises(FitError) as excinfo:
            fit_exponential_decay(series)
        assert excinfo.value.index == 3

    @pytest.mark.parametrize("window", [(0, 5), (3, 3), (4, 20)])
    def test_invalid_window(self, window):
        with pytest.raises(ConfigError):
            fit_exponential_decay([1.0] * 10, window=window)

    def test_trace_decay_skips_burn_in(self):
        trace = synthetic_trace(1.0, 0.5, 2.0, 0.5, 0.01)
        phys, alg = fit_trace_decay(trace)
        assert phys.window == (11, 100)
        assert phys.rate == pytest.approx(0.5 * 0.01 * 4, rel=1e-9)
        assert alg.rate == pytest.approx(0.5 * 0.01 * 4, rel=1e-9)


class TestModelCoefficients:
    GAMMAS = [0.001, 0.002, 0.004, 0.008]

    def test_recovers_synthetic_coefficients(self):
        C, c, B, b = 3.0, 0.4, 2.0, 0.6
        traces = [synthetic_trace(C, c, B, b, gamma) for gamma in self.GAMMAS]
        model = fit_model_coefficients(traces, gammas=self.GAMMAS, order=2, upsilon=4, t=10.0, n=6)
        assert model.C == pytest.approx(C, rel=1e-6)
        assert model.c == pytest.approx(c, rel=1e-6)
        assert model.B == pytest.approx(B, rel=1e-6)
        assert model.b == pytest.approx(b, rel=1e-6)
        assert model.n == 6 and model.upsilon == 4
        assert model.provenance.window == (11, 100)
        assert len(model.provenance.per_gamma) == 4

    def test_noisy_traces_stay_close(self, rng):
        C, c, B, b = 3.0, 0.4, 2.0, 0.6
        traces = [synthetic_trace(C, c, B, b, gamma, noise=0.005, rng=rng) for gamma in self.GAMMAS]
        model = fit_model_coefficients(traces, gammas=self.GAMMAS, order=2, upsilon=4, t=10.0, n=6)
        assert model.C == pytest.approx(C, rel=0.05)
        assert model.B == pytest.approx(B, rel=0.05)

    def test_alg_prefactor_spread_recorded(self):
        traces = [synthetic_trace(1.0, 0.5, 2.0, 0.5, gamma) for gamma in self.GAMMAS]
        model = fit_model_coefficients(traces, gammas=self.GAMMAS, order=2, upsilon=4, t=10.0, n=4)
        assert model.provenance.alg_prefactor_spread == pytest.approx(0.0, abs=1e-9)
        assert model.provenance.alg_prefactor_linear["slope"] == pytest.approx(0.0, abs=1e-9)

    def test_needs_three_noise_rates(self):
        traces = [synthetic_trace(1.0, 0.5, 1.0, 0.5, gamma) for gamma in (0.001, 0.002)]
        with pytest.raises(ConfigError):
            fit_model_coefficients(traces, gammas=[0.001, 0.002], order=2, upsilon=4, t=10.0, n=4)

    def test_needs_positive_noise_rates(self):
        traces = [synthetic_trace(1.0, 0.5, 1.0, 0.5, gamma) for gamma in (0.001, 0.002, 0.003)]
        with pytest.raises(ConfigError):
            fit_model_coefficients(traces, gammas=[0.0, 0.002, 0.003], order=2, upsilon=4, t=10.0, n=4)

    def test_needs_parameters_without_configs(self):
        traces = [synthetic_trace(1.0, 0.5, 1.0, 0.5, gamma) for gamma in self.GAMMAS]
        with pytest.raises(ConfigError):
            fit_model_coefficients(traces)

    def test_growing_decay_is_clamped(self):
        traces = [synthetic_trace(1.0, -0.5, 1.0, 0.5, gamma) for gamma in self.GAMMAS]
        model = fit_model_coefficients(traces, gammas=self.GAMMAS, order=2, upsilon=4, t=10.0, n=4)
        assert model.c == 0.0


class TestExtrapolation:
    @staticmethod
    def model(n, C, B, c=0.3, b=0.4, worst=None):
        return ErrorModel(C=C, c=c, B=B, b=b, order=2, upsilon=4, n=n, worst_case_b=worst)

    def test_linear_sizes(self):
        models = [self.model(n, 2.0 * n, 0.5 * n, worst=3.0 * n) for n in (6, 8, 10)]
        result = extrapolate_in_n(models, 20)
        assert result.C == pytest.approx(40.0)
        assert result.B == pytest.approx(10.0)
        assert result.worst_case_b == pytest.approx(60.0)
        assert result.n == 20
        assert result.provenance.source_sizes == [6, 8, 10]

    def test_clamped_decay(self):
        models = [self.model(n, 2.0 * n, 0.5 * n) for n in (6, 8, 10)]
        result = extrapolate_in_n(models, 20)
        assert result.c == 0.5 and result.b == 0.5
        assert result.provenance.clamped_decay
        assert result.worst_case_b is None

    def test_unclamped_decay_uses_mean(self):
        models = [self.model(n, 2.0 * n, 0.5 * n, c=0.1 * k, b=0.2 * k) for k, n in enumerate((6, 8, 10), 1)]
        result = extrapolate_in_n(models, 20, clamp_decay=False)
        assert result.c == pytest.approx(0.2)
        assert result.b == pytest.approx(0.4)

    def test_noisy_sizes(self, rng):
        models = [self.model(n, 1.5 * n * (1 + 0.01 * rng.uniform(-1, 1)), 1.0) for n in (6, 8, 10, 12)]
        assert extrapolate_in_n(models, 20).C == pytest.approx(30.0, rel=0.05)

    def test_needs_three_sizes(self):
        with pytest.raises(ConfigError):
            extrapolate_in_n([self.model(6, 1.0, 1.0), self.model(8, 1.0, 1.0)], 20)

    def test_rejects_mixed_orders(self):
        models = [self.model(6, 1.0, 1.0), self.model(8, 1.0, 1.0),
                  ErrorModel(C=1.0, c=0.1, B=1.0, b=0.1, order=1, upsilon=2, n=10)]
        with pytest.raises(ConfigError):
            extrapolate_in_n(models, 20)

    def test_model_round_trip_through_json(self, tmp_path):
        original = self.model(6, 1.25, 0.75, worst=2.0)
        path = tmp_path / "model.json"
        original.save(path)
        assert ErrorModel.load(path) == original

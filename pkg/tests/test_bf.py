"""Beamforming SINR model against quadrature and limit-case oracles.

The independent oracle is the mixing integral: with X = rho*lambda_max
and Y the interference sum, the SINR density is
f(g) = int f_X(g(1+y)) (1+y) f_Y(y) dy, evaluated by quadrature.
"""

import math

import numpy as np
import pytest
from scipy import integrate

from ranksinr import bf
from ranksinr.errors import ConfigError
from ranksinr.mixture import build_mixture, pdf_y
from ranksinr.scenario import (
    InterfererSpec,
    OwnMode,
    ScenarioConfig,
    Technique,
    build_rate_set,
    own_numerator_scale,
)
from ranksinr.wishart import cdf_lambda_max, compute_weights, pdf_lambda_max

from conftest import REF_BF


def mixing_pdf(model: bf.BfModel, g: float) -> float:
    def integrand(y):
        x = g * (1.0 + y)
        return float(
            pdf_lambda_max(x, model.table, model.rho_bar)
            * (1.0 + y)
            * pdf_y(y, model.mixture)
        )

    val, _ = integrate.quad(integrand, 0.0, np.inf, limit=300)
    return val


@pytest.fixture(scope="module")
def ref_model():
    return bf.from_config(REF_BF)


def test_pdf_matches_mixing_integral(ref_model):
    for g_db in (-5.0, 0.0, 5.0, 10.0, 15.0):
        g = 10 ** (g_db / 10)
        assert ref_model.sinr_pdf(g) == pytest.approx(
            mixing_pdf(ref_model, g), rel=1e-8
        )


def test_outage_is_pdf_integral(ref_model):
    # spec'd cross-check points: 0, 5, 10 dB
    for g_db in (0.0, 5.0, 10.0):
        g0 = 10 ** (g_db / 10)
        val, _ = integrate.quad(
            lambda t: float(ref_model.sinr_pdf(t)), 0.0, g0, limit=300
        )
        assert ref_model.outage(g0) == pytest.approx(val, abs=1e-6)


def test_pdf_integrates_to_one(ref_model):
    val, _ = integrate.quad(
        lambda t: float(ref_model.sinr_pdf(t)), 0.0, np.inf, limit=400
    )
    assert val == pytest.approx(1.0, abs=1e-9)


def test_threshold_roundtrip(ref_model):
    for p in (1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9):
        g0 = ref_model.threshold(p)
        assert ref_model.outage(g0) == pytest.approx(p, rel=1e-9)


def test_single_and_general_routes_agree():
    # one equal-power rank-2 interferer gives a single mixture group,
    # exercising the plain-arithmetic route; the log-domain route must
    # produce the same curve
    cfg = ScenarioConfig(
        n_r=2, n_t=2, noise_power=1.0, snr_db=15.0,
        own_mode=OwnMode.BEAMFORMING,
        interferers=(
            InterfererSpec(
                technique=Technique.SPATIAL_MULTIPLEXING, inr_db=10.0, layers=2
            ),
        ),
    )
    model = bf.from_config(cfg)
    assert model.mixture.n_groups == 1
    for g_db in (-5.0, 0.0, 5.0, 10.0):
        g = 10 ** (g_db / 10)
        assert model._outage_single(g) == pytest.approx(
            model._outage_general(g), rel=1e-9
        )
        assert model._pdf_single(g) == pytest.approx(
            model._pdf_general(g), rel=1e-9
        )


def test_no_interferer_reduces_to_eigenvalue_cdf():
    cfg = ScenarioConfig(
        n_r=3, n_t=2, noise_power=1.0, snr_db=12.0, own_mode=OwnMode.BEAMFORMING
    )
    model = bf.from_config(cfg)
    assert model.mixture is None
    table = compute_weights(3, 2)
    rho = own_numerator_scale(cfg)
    g = np.linspace(0.5, 40.0, 25)
    assert model.outage(g) == pytest.approx(
        np.asarray(cdf_lambda_max(g, table, rho)), rel=1e-12
    )


def test_outage_monotone_in_threshold_and_inr(ref_model):
    g = np.linspace(0.05, 200.0, 300)
    out = ref_model.outage(g)
    assert np.all(np.diff(out) >= -1e-12)
    assert out[0] < 1e-3 and out[-1] > 0.999

    def outage_at(inr_db):
        cfg = ScenarioConfig(
            n_r=2, n_t=2, noise_power=1.0, snr_db=15.0,
            own_mode=OwnMode.BEAMFORMING,
            interferers=(
                InterfererSpec(technique=Technique.BEAMFORMING, inr_db=inr_db),
            ),
        )
        return bf.from_config(cfg).outage(1.0)

    vals = [outage_at(x) for x in (0.0, 5.0, 10.0, 15.0)]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_wrapper_functions(ref_model):
    g = np.array([0.5, 2.0])
    assert bf.sinr_pdf_bf(g, ref_model) == pytest.approx(ref_model.sinr_pdf(g))
    assert bf.outage_bf(g, ref_model) == pytest.approx(ref_model.outage(g))
    assert bf.threshold_at_outage(0.01, ref_model) == ref_model.threshold(0.01)


def test_from_config_rejects_wrong_mode():
    with pytest.raises(ConfigError):
        bf.from_config(
            ScenarioConfig(
                n_r=2, n_t=2, noise_power=1.0, snr_db=15.0, own_mode=OwnMode.OSTBC
            )
        )


def test_rejects_negative_arguments(ref_model):
    with pytest.raises(ValueError):
        ref_model.sinr_pdf(-0.5)
    with pytest.raises(ValueError):
        ref_model.outage(0.0)


def test_extreme_thresholds_stay_in_unit_interval(ref_model):
    assert 0.0 <= ref_model.outage(1e-12) <= 1e-9
    assert ref_model.outage(1e9) == pytest.approx(1.0, abs=1e-12)

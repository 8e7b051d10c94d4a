"""Randomized invariant checks over generated scenarios.

Everything here must hold for any valid input, not just the pinned
reference points, so the generators draw configs broadly and hypothesis
hunts for counterexamples.
"""

import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from ranksinr import bf, ostbc
from ranksinr.mixture import build_mixture, mean_y
from ranksinr.scenario import (
    InterfererSpec,
    OwnMode,
    ScenarioConfig,
    Technique,
    build_rate_set,
    db_to_linear,
)
from ranksinr.sweeps import model_for
from ranksinr.wishart import compute_weights, mean_lambda_max

# random draws legitimately wander into ill-conditioned rate sets that the
# library flags; the warnings are the subject of dedicated tests elsewhere
pytestmark = pytest.mark.filterwarnings("ignore::RuntimeWarning")


def well_separated(cfg) -> bool:
    """Rates either coincide (they group) or sit > 5% apart.

    The sliver in between is the documented ill-conditioned regime with
    its own deterministic tests; invariants below assume clean inputs.
    """
    rates = sorted(build_rate_set(cfg))
    for a, b in zip(rates, rates[1:]):
        if 1.0 + 1e-8 < b / a < 1.05:
            return False
    return True


def eval_noise(model) -> float:
    """Absolute round-off scale of the outage expansion."""
    if model.mixture is None:
        return 0.0
    _, _, xi = model.mixture.terms()
    return 1e-15 * float(sum(abs(x) for x in xi))

# distinct-ish INRs keep the mixtures away from the degenerate-group path,
# which has its own dedicated tests
inr_values = st.floats(min_value=-3.0, max_value=15.0).map(lambda v: round(v, 2))


@st.composite
def interferer_specs(draw):
    tech = draw(st.sampled_from(list(Technique)))
    inr = draw(inr_values)
    if tech is Technique.SPATIAL_MULTIPLEXING:
        return InterfererSpec(technique=tech, inr_db=inr, layers=draw(st.integers(1, 2)))
    return InterfererSpec(technique=tech, inr_db=inr)


@st.composite
def scenarios(draw, own_mode=None):
    mode = own_mode or draw(st.sampled_from(list(OwnMode)))
    return ScenarioConfig(
        n_r=draw(st.integers(1, 4)),
        n_t=draw(st.integers(2, 4)),
        noise_power=draw(st.sampled_from([0.5, 1.0, 2.0])),
        snr_db=draw(st.floats(min_value=0.0, max_value=25.0).map(lambda v: round(v, 1))),
        own_mode=mode,
        interferers=tuple(draw(st.lists(interferer_specs(), min_size=0, max_size=3))),
    )


@settings(max_examples=60, deadline=None)
@given(scenarios())
def test_rate_set_mean_is_total_power_over_nt_sigma2(cfg):
    rates = build_rate_set(cfg)
    total = sum(db_to_linear(s.inr_db) * cfg.noise_power for s in cfg.interferers)
    if cfg.own_mode is OwnMode.OSTBC:
        expect = total / (cfg.n_t * cfg.noise_power)
    else:
        # BF victims see SM split across layers and OSTBC averaged over
        # antennas, so only per-technique bookkeeping is universal
        expect = 0.0
        for s in cfg.interferers:
            p = db_to_linear(s.inr_db) * cfg.noise_power
            if s.technique is Technique.OSTBC:
                expect += p / (cfg.n_t * cfg.noise_power)
            else:
                expect += p / cfg.noise_power
    assert math.isclose(sum(rates), expect, rel_tol=1e-12, abs_tol=1e-12)
    if rates:
        mix = build_mixture(rates)
        rho, jj, xi = mix.terms()
        # the coefficient route cancels; forward error scales with |Xi|
        slack = 4e-16 * float(sum(abs(x * j * r) for x, j, r in zip(xi, jj, rho)))
        assert math.isclose(mean_y(mix), sum(rates), rel_tol=1e-9, abs_tol=slack)


@settings(max_examples=40, deadline=None)
@given(scenarios(), st.floats(min_value=-10.0, max_value=25.0))
def test_outage_is_a_cdf_in_gamma0(cfg, g_db):
    assume(well_separated(cfg))
    model = model_for(cfg)
    g = 10.0 ** (g_db / 10.0)
    lo, hi = model.outage(g), model.outage(g * 1.5)
    assert 0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0
    # deep-tail values carry alternating-sum noise at the 1e-16 level
    assert hi >= lo - 1e-12


@settings(max_examples=30, deadline=None)
@given(scenarios(), st.floats(min_value=1e-4, max_value=0.9))
def test_threshold_round_trips_through_outage(cfg, p):
    assume(well_separated(cfg))
    model = model_for(cfg)
    g = model.threshold(p)
    tol = max(1e-10, 10.0 * eval_noise(model))
    assert math.isclose(model.outage(g), p, rel_tol=1e-7, abs_tol=tol)


@settings(max_examples=40, deadline=None)
@given(scenarios(own_mode=OwnMode.BEAMFORMING), st.floats(min_value=-5.0, max_value=20.0))
def test_csi_gap_ostbc_never_beats_bf(cfg, g_db):
    # same channel statistics, open loop vs closed loop
    o_cfg = ScenarioConfig(
        n_r=cfg.n_r, n_t=cfg.n_t, noise_power=cfg.noise_power,
        snr_db=cfg.snr_db, own_mode=OwnMode.OSTBC, interferers=cfg.interferers,
    )
    assume(well_separated(cfg) and well_separated(o_cfg))
    bf_model = bf.from_config(cfg)
    o_model = ostbc.from_config(o_cfg)
    g = 10.0 ** (g_db / 10.0)
    tol = 1e-9 + 10.0 * (eval_noise(bf_model) + eval_noise(o_model))
    assert o_model.outage(g) >= bf_model.outage(g) - tol


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.floats(min_value=0.1, max_value=30.0))
def test_eigenvalue_mean_scales_linearly(n_r, n_t, scale):
    table = compute_weights(n_r, n_t)
    assert math.isclose(
        mean_lambda_max(table, scale=scale),
        scale * mean_lambda_max(table),
        rel_tol=1e-12,
    )
    # the top eigenvalue dominates the average one
    assert mean_lambda_max(table) >= max(n_r, n_t) - 1e-12

import math

import numpy as np
import pytest

from aoiharvest.model import PenaltySpec, Policy, SystemParams, validate_policy
from aoiharvest.renewal import (
    BadState,
    StepBreaksMonotonicity,
    conditional_moments,
    interupdate_cdf,
    moment_derivative_check,
    policy_metrics,
)

IDENT = PenaltySpec.identity()


def make(mu, taus):
    params = SystemParams(mu_h=mu, battery=len(taus))
    return params, validate_policy(params, taus)


class TestInterupdateCdf:
    def test_below_smallest_threshold(self):
        params, pol = make(1.0, [1.5, 0.72])
        assert interupdate_cdf(params, pol, 0, 0.5) == 0.0

    def test_middle_piece(self):
        params, pol = make(1.0, [1.5, 0.72])
        assert interupdate_cdf(params, pol, 1, 1.0) == pytest.approx(
            1 - math.exp(-1.0), rel=1e-12
        )

    def test_top_piece_saturates_from_full(self):
        params, pol = make(1.0, [1.5, 0.72])
        assert interupdate_cdf(params, pol, 1, 2.0) == 1.0

    def test_bad_state(self):
        params, pol = make(1.0, [1.5, 0.72])
        with pytest.raises(BadState):
            interupdate_cdf(params, pol, 2, 1.0)

    def test_right_continuous_nondecreasing(self):
        params, pol = make(1.0, [1.8, 1.1, 0.6])
        xs = np.linspace(0, 40, 800)
        for j in range(3):
            vals = [interupdate_cdf(params, pol, j, x) for x in xs]
            assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
            assert vals[-1] == pytest.approx(1.0, abs=1e-9)


class TestConditionalMoments:
    def test_b1_closed_form(self):
        # E[X] = tau + e^{-mu tau}/mu, E[X^2] = tau^2 + (2/mu^2 + 2 tau/mu) e^{-mu tau}
        params, pol = make(1.0, [1.0])
        cm = conditional_moments(params, pol, IDENT)
        assert cm.ex[0] == pytest.approx(1 + math.exp(-1), rel=1e-12)
        assert cm.ex2[0] == pytest.approx(1 + 4 * math.exp(-1), rel=1e-12)

    def test_b2_frozen_from_quadrature(self):
        # oracle: piecewise quadrature of the survival function
        params, pol = make(1.0, [1.5, 0.72])
        cm = conditional_moments(params, pol, IDENT)
        assert cm.ex[0] == pytest.approx(1.4861407358400482, rel=1e-10)
        assert cm.ex2[0] == pytest.approx(2.8109606983339703, rel=1e-10)
        assert cm.ex[1] == pytest.approx(0.9836220958115418, rel=1e-10)
        assert cm.ex2[1] == pytest.approx(1.0771769597601535, rel=1e-10)

    def test_identity_penalty_reward_is_half_second_moment(self):
        params, pol = make(0.7, [2.1, 1.4, 0.9])
        cm = conditional_moments(params, pol, IDENT)
        assert np.allclose(cm.epx, cm.ex2 / 2, rtol=1e-12)

    def test_moment_inequalities(self):
        params, pol = make(1.2, [1.9, 1.3, 0.8, 0.8])
        cm = conditional_moments(params, pol, IDENT)
        assert np.all(cm.ex >= pol.tau_full)
        assert np.all(cm.ex2 >= cm.ex**2)


class TestPolicyMetrics:
    def test_b2_table_row(self):
        params, pol = make(1.0, [1.5, 0.72])
        m = policy_metrics(params, pol)
        assert m.m1 == pytest.approx(1.1521569859942833, rel=1e-10)
        assert m.avg_age == pytest.approx(0.7198038206519034, rel=1e-10)
        assert m.avg_penalty == m.avg_age

    def test_b1_direct(self):
        params, pol = make(1.0, [1.0])
        m = policy_metrics(params, pol)
        want = (0.5 + 2 * math.exp(-1)) / (1 + math.exp(-1))
        assert m.avg_age == pytest.approx(want, rel=1e-12)

    def test_optimum_is_fixed_point(self):
        tau = 0.901201031729666  # 2 W(1/sqrt 2)
        params, pol = make(1.0, [tau])
        assert policy_metrics(params, pol).avg_age == pytest.approx(tau, abs=1e-12)

    def test_consumption_rate_bound(self):
        for mu, taus in [(1.0, [1.5, 0.72]), (2.0, [0.4, 0.1]), (0.5, [4.0, 3.0, 2.0])]:
            params, pol = make(mu, taus)
            m = policy_metrics(params, pol)
            assert m.m1 >= 1.0 / mu - 1e-12
            assert m.m1 >= pol.tau_full
            assert m.m2 >= m.m1**2

    def test_scale_invariance(self):
        base_params, base_pol = make(1.0, [1.5, 0.72])
        base = policy_metrics(base_params, base_pol)
        for c in (0.5, 2.0, 3.7):
            params, pol = make(c, [1.5 / c, 0.72 / c])
            m = policy_metrics(params, pol)
            assert m.m1 == pytest.approx(base.m1 / c, rel=1e-12)
            assert m.m2 == pytest.approx(base.m2 / c**2, rel=1e-12)
            assert m.avg_age == pytest.approx(base.avg_age / c, rel=1e-12)

    def test_cdf_consistency_with_chain(self):
        # total transition mass equals the CDF limit: both are 1
        params, pol = make(1.0, [1.8, 1.1, 0.6])
        from aoiharvest.chain import transition_matrix

        T = transition_matrix(params, pol).entries
        for j in range(3):
            assert T[j].sum() == pytest.approx(1.0, abs=1e-12)
            assert interupdate_cdf(params, pol, j, 100.0) == pytest.approx(1.0, abs=1e-12)

    def test_quadratic_penalty_reward(self):
        params, pol = make(1.0, [1.5, 0.72])
        m = policy_metrics(params, pol, PenaltySpec.power(2.0))
        # E[X^3]/3 numerator: check against quadrature-frozen conditional moments
        assert m.avg_penalty > 0
        ident = policy_metrics(params, pol)
        assert m.m1 == pytest.approx(ident.m1, rel=1e-12)


class TestMomentDerivative:
    @pytest.mark.parametrize(
        "mu,taus,i",
        [
            (1.0, [1.5, 0.72], 1),
            (1.0, [1.5, 0.72], 2),
            (1.0, [0.9], 1),
            (0.8, [2.2, 1.4, 0.9], 2),
        ],
    )
    def test_residual_small(self, mu, taus, i):
        params, pol = make(mu, taus)
        assert moment_derivative_check(params, pol, i, 1e-5) <= 1e-4

    def test_b1_analytic_derivative(self):
        # dE[X]/dtau = 1 - e^{-mu tau}; dE[X^2]/dtau = 2 tau (1 - e^{-mu tau})
        params, pol = make(1.0, [0.9])
        h = 1e-6
        up = conditional_moments(params, Policy((0.9 + h,)), IDENT)
        dn = conditional_moments(params, Policy((0.9 - h,)), IDENT)
        d_ex = (up.ex[0] - dn.ex[0]) / (2 * h)
        assert d_ex == pytest.approx(1 - math.exp(-0.9), abs=1e-8)

    def test_tied_thresholds_break_stencil(self):
        params, pol = make(1.0, [1.0, 1.0])
        with pytest.raises(StepBreaksMonotonicity):
            moment_derivative_check(params, pol, 2, 1e-5)

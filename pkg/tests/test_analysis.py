import math

import pytest
from hypothesis import given, strategies as st

from adhm.analysis import (InequalityViolation, QuadratureError, RateReport,
                           component_rate, kl_divergence, mixture_kl_slack,
                           palette_rate, pooled_rate_gap)
from adhm.distributions import (Exponential, Geometric, Mixture,
                                TabulatedDiscrete, two_point_mixture)
from adhm.world import OraclePalette

F = Exponential(0.5)
G = Exponential(10.0)


def test_kl_exponential_frozen():
    # log(10/0.5) + 0.5/10 - 1
    assert abs(kl_divergence(G, F) - 2.0457322735539907) < 1e-12


def test_kl_geometric_frozen():
    got = kl_divergence(Geometric(0.5), Geometric(0.8))
    assert abs(got - 0.44628710262841964) < 1e-12


def test_kl_self_is_zero():
    assert kl_divergence(F, F) == 0.0
    assert kl_divergence(Geometric(0.3), Geometric(0.3)) == 0.0


def test_kl_closed_matches_numeric():
    for p, q in ((Exponential(0.4), Exponential(3.0)),
                 (Exponential(7.0), Exponential(0.2))):
        closed = kl_divergence(p, q, method="closed")
        numeric = kl_divergence(p, q, method="numeric")
        assert abs(closed - numeric) < 1e-8
    for p, q in ((Geometric(0.2), Geometric(0.7)),
                 (Geometric(0.9), Geometric(0.15))):
        closed = kl_divergence(p, q, method="closed")
        numeric = kl_divergence(p, q, method="numeric")
        assert abs(closed - numeric) < 1e-10


def test_kl_method_handling():
    mix = two_point_mixture(0.5, F, G)
    with pytest.raises(ValueError):
        kl_divergence(mix, F, method="closed")
    with pytest.raises(ValueError):
        kl_divergence(F, G, method="fast")
    with pytest.raises(ValueError):
        kl_divergence(F, Geometric(0.5))


def test_kl_mixture_numeric_positive():
    mix = two_point_mixture(0.5, F, G)
    val = kl_divergence(mix, F)
    assert 0.0 < val < kl_divergence(G, F)


def test_kl_discrete_support_violation_is_infinite():
    narrow = TabulatedDiscrete((0.5, 0.5))
    assert kl_divergence(Geometric(0.5), narrow) == math.inf
    assert kl_divergence(narrow, Geometric(0.5)) < math.inf


class _Uniform01:
    """Continuous law on [0, 1]; used to hit the quadrature support guard."""

    is_discrete = False

    def pdf(self, y):
        return 1.0 if 0.0 <= y <= 1.0 else 0.0

    def logpdf(self, y):
        return 0.0 if 0.0 <= y <= 1.0 else -math.inf

    def support_upper_q(self, tail):
        return 1.0


def test_kl_continuous_support_violation_raises():
    with pytest.raises(QuadratureError):
        kl_divergence(Exponential(1.0), _Uniform01(), method="numeric")


@given(st.floats(0.05, 20.0), st.floats(0.05, 20.0))
def test_kl_exponential_nonnegative(rp, rq):
    assert kl_divergence(Exponential(rp), Exponential(rq)) >= -1e-12


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_kl_geometric_nonnegative(tp, tq):
    assert kl_divergence(Geometric(tp), Geometric(tq)) >= -1e-12


def test_component_rate_frozen_and_structure():
    # p0 = 0 collapses the mixture to g.
    got = component_rate(F, G, 0.0, 10, 2)
    expect = kl_divergence(G, F) + (1 / 9) * kl_divergence(F, G)
    assert abs(got - 3.8239842431584057) < 1e-12
    assert got == pytest.approx(expect, rel=1e-12)
    # K = 1 drops the reverse term.
    assert component_rate(F, G, 0.0, 10, 1) == pytest.approx(
        kl_divergence(G, F), rel=1e-12)


def test_component_rate_validation():
    with pytest.raises(ValueError):
        component_rate(F, G, 0.5, 1, 1)
    with pytest.raises(ValueError):
        component_rate(F, G, 0.5, 5, 6)
    with pytest.raises(ValueError):
        component_rate(F, G, 0.5, 5, 0)


PALETTE = OraclePalette((0.3, 0.8), (0.5, 0.5))


def test_palette_rate_frozen():
    report = palette_rate(F, G, PALETTE, 5, 2)
    assert abs(report.weighted_rate - 0.6759353864341028) < 1e-12
    assert report.component_rates == pytest.approx(
        (1.210118592882941, 0.14175217998526451), rel=1e-12)
    assert report.weights == PALETTE.weights
    dot = math.fsum(w * r for w, r in zip(report.weights,
                                          report.component_rates))
    assert report.weighted_rate == pytest.approx(dot, rel=1e-15)


def test_rate_report_predictors():
    report = RateReport((2.0,), (1.0,), 2.0)
    c = math.exp(-10)
    assert report.predicted_delay(c) == pytest.approx(5.0, rel=1e-12)
    assert report.predicted_risk(c) == pytest.approx(c * 5.0, rel=1e-12)


def test_mixture_kl_slack_nonnegative():
    components = [(0.5, two_point_mixture(0.3, F, G)),
                  (0.5, two_point_mixture(0.8, F, G))]
    report = mixture_kl_slack(F, components)
    assert report.slack >= 0.0
    assert report.lhs > report.rhs > 0.0


def test_mixture_kl_slack_equality_on_identical_components():
    law = two_point_mixture(0.4, F, G)
    report = mixture_kl_slack(F, [(0.25, law), (0.75, law)])
    assert abs(report.slack) < 1e-9


def test_mixture_kl_slack_weight_validation():
    law = two_point_mixture(0.4, F, G)
    with pytest.raises(ValueError):
        mixture_kl_slack(F, [(0.5, law), (0.6, law)])


def test_mixture_kl_slack_discrete_family():
    f = Geometric(0.8)
    g = Geometric(0.3)
    components = [(0.2, two_point_mixture(0.1, f, g)),
                  (0.8, two_point_mixture(0.9, f, g))]
    report = mixture_kl_slack(f, components)
    assert report.slack >= 0.0


def test_pooled_rate_gap_nonnegative_and_equality():
    gap = pooled_rate_gap(F, G, PALETTE, 5, 2)
    assert gap.gap >= 0.0
    assert gap.adaptive == pytest.approx(0.6759353864341028, rel=1e-12)
    flat = OraclePalette((0.6, 0.6, 0.6), (0.2, 0.3, 0.5))
    assert abs(pooled_rate_gap(F, G, flat, 8, 3).gap) < 1e-9


def test_pooled_rate_gap_k1_forward_only():
    gap = pooled_rate_gap(F, G, PALETTE, 5, 1)
    comps = [kl_divergence(two_point_mixture(v, F, G), F)
             for v in PALETTE.values]
    assert gap.adaptive == pytest.approx(
        0.5 * comps[0] + 0.5 * comps[1], rel=1e-10)
    assert gap.gap >= 0.0


def test_inequality_violation_type():
    assert issubclass(InequalityViolation, AssertionError)
    mix = Mixture((0.5, 0.5), (F, G))
    assert mix.is_discrete is False

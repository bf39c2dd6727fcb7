import math
import random

import pytest
from hypothesis import given, strategies as st

from adhm.distributions import (Exponential, Geometric, Mixture, SupportError,
                                TabulatedDiscrete, mixture_pdf,
                                two_point_mixture)


def test_mixture_pdf_frozen_value():
    # 0.5*0.5*exp(-0.05) + 0.5*10*exp(-1), hand-checked.
    got = mixture_pdf(0.5, Exponential(0.5), Exponential(10.0), 0.1)
    assert abs(got - 2.07720456198239) < 1e-12


def test_exponential_pdf_logpdf_agree():
    law = Exponential(0.7)
    for y in (0.0, 0.3, 2.5, 11.0):
        assert math.isclose(math.log(law.pdf(y)), law.logpdf(y), rel_tol=1e-12)
    assert law.pdf(-0.1) == 0.0
    assert law.logpdf(-0.1) == -math.inf


def test_exponential_validation():
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        Exponential(-2.0)
    with pytest.raises(ValueError):
        Exponential(math.inf)


def test_exponential_tail_quantile_exact():
    law = Exponential(0.5)
    u = law.support_upper_q(1e-9)
    assert math.isclose(math.exp(-0.5 * u), 1e-9, rel_tol=1e-12)


def test_exponential_sample_mean():
    law = Exponential(2.0)
    rng = random.Random(42)
    xs = [law.sample(rng) for _ in range(20000)]
    assert abs(sum(xs) / len(xs) - law.mean()) < 0.02


def test_geometric_pmf_values():
    law = Geometric(0.5)
    assert law.pdf(0) == 0.5
    assert law.pdf(1) == 0.25
    assert law.pdf(3) == 0.0625
    assert law.pdf(-1) == 0.0
    assert law.pdf(1.5) == 0.0
    # Float-typed integers count as support points.
    assert law.pdf(3.0) == law.pdf(3)
    assert law.logpdf(2) == pytest.approx(math.log(0.125), rel=1e-12)
    assert law.logpdf(-2) == -math.inf


def test_geometric_validation():
    for theta in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            Geometric(theta)


def test_geometric_sampler_matches_pmf():
    law = Geometric(0.3)
    rng = random.Random(7)
    n = 50000
    counts = {}
    for _ in range(n):
        k = law.sample(rng)
        assert isinstance(k, int) and k >= 0
        counts[k] = counts.get(k, 0) + 1
    for k in range(6):
        p = law.pdf(k)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(counts.get(k, 0) / n - p) < 4 * se


def test_geometric_mean():
    assert Geometric(0.25).mean() == pytest.approx(3.0)


def test_tabulated_validation():
    with pytest.raises(ValueError):
        TabulatedDiscrete(())
    with pytest.raises(ValueError):
        TabulatedDiscrete((0.5, -0.1, 0.6))
    with pytest.raises(ValueError):
        TabulatedDiscrete((0.5, 0.6))


def test_tabulated_pmf_and_mean():
    law = TabulatedDiscrete((0.2, 0.5, 0.3))
    assert law.pdf(0) == 0.2
    assert law.pdf(2) == 0.3
    assert law.pdf(3) == 0.0
    assert law.pdf(-1) == 0.0
    assert law.mean() == pytest.approx(0.5 + 0.6)
    rng = random.Random(3)
    n = 30000
    freq = sum(law.sample(rng) == 1 for _ in range(n)) / n
    assert abs(freq - 0.5) < 0.02


def test_mixture_pdf_is_weighted_sum():
    f = Exponential(0.5)
    g = Exponential(10.0)
    mix = Mixture((0.3, 0.7), (f, g))
    for y in (0.01, 0.5, 2.0):
        assert mix.pdf(y) == pytest.approx(0.3 * f.pdf(y) + 0.7 * g.pdf(y), rel=1e-14)
        assert mix.logpdf(y) == pytest.approx(math.log(mix.pdf(y)), rel=1e-12)


def test_mixture_validation():
    f, g = Exponential(1.0), Exponential(2.0)
    with pytest.raises(ValueError):
        Mixture((0.5,), (f, g))
    with pytest.raises(ValueError):
        Mixture((), ())
    with pytest.raises(ValueError):
        Mixture((0.7, 0.7), (f, g))
    with pytest.raises(ValueError):
        Mixture((-0.1, 1.1), (f, g))
    with pytest.raises(ValueError):
        Mixture((0.5, 0.5), (f, Geometric(0.5)))


def test_mixture_sampling_uses_weights():
    # Weight 1 on the second component: samples follow it exactly.
    mix = Mixture((0.0, 1.0), (Exponential(1000.0), Exponential(0.001)))
    rng = random.Random(1)
    xs = [mix.sample(rng) for _ in range(200)]
    assert min(xs) > 1.0  # rate 1000 would sit near zero


def test_two_point_mixture_endpoints():
    f = Exponential(0.5)
    g = Exponential(10.0)
    at_f = two_point_mixture(1.0, f, g)
    at_g = two_point_mixture(0.0, f, g)
    for y in (0.05, 1.0, 4.0):
        assert at_f.pdf(y) == pytest.approx(f.pdf(y), rel=1e-14)
        assert at_g.pdf(y) == pytest.approx(g.pdf(y), rel=1e-14)
    with pytest.raises(ValueError):
        two_point_mixture(-0.01, f, g)
    with pytest.raises(ValueError):
        two_point_mixture(1.01, f, g)


def test_mixture_pdf_support_error():
    f = Geometric(0.5)
    g = Geometric(0.8)
    with pytest.raises(SupportError):
        mixture_pdf(0.5, f, g, 2.5)
    with pytest.raises(SupportError):
        mixture_pdf(0.5, Exponential(1.0), Exponential(2.0), -1.0)


def test_mixture_pdf_matches_mixture_object():
    f = Geometric(0.7)
    g = Geometric(0.2)
    mix = two_point_mixture(0.4, f, g)
    for k in range(8):
        assert mixture_pdf(0.4, f, g, k) == pytest.approx(mix.pdf(k), rel=1e-14)


@given(st.floats(0.0, 1.0), st.floats(1e-3, 10.0), st.floats(1e-3, 10.0),
       st.floats(0.0, 20.0))
def test_mixture_pdf_between_components(r, rate_f, rate_g, y):
    f = Exponential(rate_f)
    g = Exponential(rate_g)
    fy, gy = f.pdf(y), g.pdf(y)
    val = mixture_pdf(r, f, g, y)
    assert min(fy, gy) - 1e-12 <= val <= max(fy, gy) + 1e-12


def test_mixture_logpdf_handles_zero_weight():
    # A zero-weight component must not poison logsumexp with log(0).
    mix = Mixture((1.0, 0.0), (Geometric(0.5), Geometric(0.9)))
    assert mix.logpdf(2) == pytest.approx(math.log(0.125), rel=1e-12)


def test_mixture_logpdf_off_support():
    mix = Mixture((0.5, 0.5), (Geometric(0.5), Geometric(0.9)))
    assert mix.logpdf(-3) == -math.inf

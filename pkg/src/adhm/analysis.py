"""KL divergences, search rate functions, and numeric inequality checks.

Closed forms exist for exponential/exponential and geometric/geometric pairs;
everything else (mixtures in particular) is integrated by adaptive quadrature
on a truncated interval (continuous) or summed to negligible tail mass
(discrete). The numeric route is also exposed directly so closed forms can be
cross-checked against it.

The per-component search rate for a two-point mixture law gd = p*f + (1-p)*g is

    D(gd || f) + (K-1)/(M-1) * D(f || gd)

and the palette rate is the occupancy-weighted average of component rates.
The weighted average dominates the rate of the pooled (weight-averaged)
mixture law; ``pooled_rate_gap`` measures that margin, and
``mixture_kl_slack`` checks the underlying averaged-KL inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .distributions import Exponential, Geometric, Mixture, two_point_mixture
from .world import OraclePalette

# Truncation targets for the numeric routes.
_CONT_TAIL = 1e-14
_DISC_TAIL = 1e-14
_QUAD_ABS_TOL = 1e-8
_MAX_TERMS = 2_000_000


class QuadratureError(ArithmeticError):
    """Numeric KL evaluation failed to reach the required accuracy."""


class InequalityViolation(AssertionError):
    """A numeric check of a provable inequality came out negative."""


def kl_divergence(p, q, method: str = "auto") -> float:
    """D(p || q) in nats.

    method="auto" uses the closed form when one exists and the numeric route
    otherwise; "closed" and "numeric" force the respective path.
    """
    if method not in ("auto", "closed", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if method in ("auto", "closed"):
        closed = _kl_closed_form(p, q)
        if closed is not None:
            return closed
        if method == "closed":
            raise ValueError(f"no closed form for {type(p).__name__} || {type(q).__name__}")
    if p.is_discrete != q.is_discrete:
        raise ValueError("KL between a discrete and a continuous law is undefined here")
    if p.is_discrete:
        return _kl_discrete_sum(p, q)
    return _kl_quadrature(p, q)


def _kl_closed_form(p, q) -> float | None:
    if isinstance(p, Exponential) and isinstance(q, Exponential):
        return math.log(p.rate / q.rate) + q.rate / p.rate - 1.0
    if isinstance(p, Geometric) and isinstance(q, Geometric):
        return (
            math.log(p.theta / q.theta)
            + (1.0 - p.theta) / p.theta * (math.log1p(-p.theta) - math.log1p(-q.theta))
        )
    return None


def _kl_quadrature(p, q) -> float:
    upper = max(p.support_upper_q(_CONT_TAIL), q.support_upper_q(_CONT_TAIL))

    def integrand(y: float) -> float:
        lp = p.logpdf(y)
        if lp == -math.inf:
            return 0.0
        lq = q.logpdf(y)
        if lq == -math.inf:
            # Mass of p outside q's support: divergence is infinite.
            raise QuadratureError(
                f"support violation at y={y!r}: p has density, q does not"
            )
        return math.exp(lp) * (lp - lq)

    # Log-spaced breakpoints keep the adaptive subdivision honest when the
    # integrand mixes a sharp spike near zero with a much longer tail.
    breakpoints = [upper * 10.0 ** e for e in range(-5, 0)]
    value, abserr = quad(integrand, 0.0, upper, limit=200,
                         epsabs=1e-12, epsrel=1e-10, points=breakpoints)
    if abserr > _QUAD_ABS_TOL:
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3e} exceeds {_QUAD_ABS_TOL:.0e} "
            f"for {p!r} || {q!r} on [0, {upper:.3g}]"
        )
    return value


def _kl_discrete_sum(p, q) -> float:
    k_max = int(max(p.support_upper_q(_DISC_TAIL), q.support_upper_q(_DISC_TAIL))) + 1
    if k_max > _MAX_TERMS:
        raise QuadratureError(
            f"discrete KL truncation needs {k_max} terms (> {_MAX_TERMS}); "
            f"laws {p!r} || {q!r} are too heavy-tailed for summation"
        )
    terms = []
    for k in range(k_max + 1):
        lp = p.logpdf(k)
        if lp == -math.inf:
            continue
        lq = q.logpdf(k)
        if lq == -math.inf:
            # Mass of p outside q's support: divergence is infinite.  Deep
            # geometric tails never land here because logpdf is analytic.
            return math.inf
        terms.append(math.exp(lp) * (lp - lq))
    return math.fsum(terms)


@dataclass(frozen=True)
class RateReport:
    """Per-component rates, their weighted combination, and its predictors."""

    component_rates: tuple[float, ...]
    weights: tuple[float, ...]
    weighted_rate: float

    def predicted_delay(self, c: float) -> float:
        return -math.log(c) / self.weighted_rate

    def predicted_risk(self, c: float) -> float:
        return -c * math.log(c) / self.weighted_rate


def component_rate(f, g, p0_value: float, M: int, K: int) -> float:
    """Rate earned per step once probing locks onto the target under g~_{p0}."""
    _check_mk(M, K)
    gd = two_point_mixture(p0_value, f, g)
    forward = kl_divergence(gd, f)
    if K == 1:
        return forward
    return forward + (K - 1) / (M - 1) * kl_divergence(f, gd)


def palette_rate(f, g, palette: OraclePalette, M: int, K: int) -> RateReport:
    """Occupancy-weighted rate over the palette's mixture components."""
    _check_mk(M, K)
    rates = tuple(component_rate(f, g, v, M, K) for v in palette.values)
    weighted = math.fsum(w * r for w, r in zip(palette.weights, rates))
    return RateReport(rates, palette.weights, weighted)


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def mixture_kl_slack(f, components, tol: float = 1e-6) -> InequalityReport:
    """Check sum_d w_d D(g_d || f) >= D(sum_d w_d g_d || f).

    ``components`` is a sequence of (weight, law) pairs with weights summing
    to 1. Raises :class:`InequalityViolation` when the numerically evaluated
    slack falls below -tol; the slack equals the mean posterior-KL term that
    makes the inequality an identity, so it is 0 exactly when all components
    with positive weight coincide.
    """
    weights = tuple(w for w, _ in components)
    laws = tuple(law for _, law in components)
    if abs(math.fsum(weights) - 1.0) > 1e-12:
        raise ValueError("component weights must sum to 1")
    lhs = math.fsum(
        w * kl_divergence(law, f) for w, law in zip(weights, laws) if w > 0.0
    )
    pooled = Mixture(weights, laws)
    rhs = kl_divergence(pooled, f, method="numeric")
    report = InequalityReport(lhs, rhs)
    if report.slack < -tol:
        raise InequalityViolation(
            f"averaged KL {lhs!r} fell below pooled KL {rhs!r} by more than {tol}"
        )
    return report


@dataclass(frozen=True)
class RateGap:
    adaptive: float
    pooled: float

    @property
    def gap(self) -> float:
        return self.adaptive - self.pooled


def pooled_rate_gap(f, g, palette: OraclePalette, M: int, K: int,
                    tol: float = 1e-6) -> RateGap:
    """Margin of the weighted palette rate over the pooled-mixture rate.

    The pooled rate treats the weight-averaged anomalous law as if it were a
    single i.i.d. law, which is what a static-mixture policy effectively
    assumes. Convexity of KL in each argument makes the margin nonnegative;
    it vanishes when all palette values coincide.
    """
    _check_mk(M, K)
    adaptive = palette_rate(f, g, palette, M, K).weighted_rate
    p_eff = math.fsum(w * v for w, v in zip(palette.weights, palette.values))
    pooled_law = two_point_mixture(p_eff, f, g)
    pooled = kl_divergence(pooled_law, f)
    if K > 1:
        pooled += (K - 1) / (M - 1) * kl_divergence(f, pooled_law)
    result = RateGap(adaptive, pooled)
    if result.gap < -tol:
        raise InequalityViolation(
            f"weighted rate {adaptive!r} fell below pooled rate {pooled!r} "
            f"by more than {tol}"
        )
    return result


def _check_mk(M: int, K: int) -> None:
    if M < 2:
        raise ValueError(f"need at least two cells, got M={M}")
    if not 1 <= K <= M:
        raise ValueError(f"probe count K={K} must satisfy 1 <= K <= M={M}")

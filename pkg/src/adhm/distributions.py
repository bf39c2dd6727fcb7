"""Univariate observation laws and their mixtures.

Three base families are supported: exponential (continuous), geometric
(discrete, support {0, 1, 2, ...} with pmf theta*(1-theta)^k), and tabulated
discrete. A :class:`Mixture` combines laws of the same kind (all continuous or
all discrete) with convex weights; the two-point mixture ``r*f + (1-r)*g`` is
the anomalous observation law conditioned on a normal-state probability ``r``.

All laws expose ``pdf``/``logpdf`` (density for continuous, mass for discrete),
``sample`` (drawing from a ``random.Random`` stream), and ``support_upper_q``
used to pick integration/summation limits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass


class SupportError(ValueError):
    """Observation lies outside the support of every relevant law."""


@dataclass(frozen=True)
class Exponential:
    """Exponential law with density rate*exp(-rate*y) on [0, inf)."""

    rate: float

    is_discrete = False

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"exponential rate must be finite and > 0, got {self.rate}")

    def pdf(self, y: float) -> float:
        if y < 0.0:
            return 0.0
        return self.rate * math.exp(-self.rate * y)

    def logpdf(self, y: float) -> float:
        if y < 0.0:
            return -math.inf
        return math.log(self.rate) - self.rate * y

    def sample(self, rng: random.Random) -> float:
        return rng.expovariate(self.rate)

    def mean(self) -> float:
        return 1.0 / self.rate

    def support_upper_q(self, tail: float) -> float:
        """y beyond which the right tail mass is below ``tail``."""
        return -math.log(tail) / self.rate


@dataclass(frozen=True)
class Geometric:
    """Geometric law on k in {0, 1, 2, ...} with pmf theta*(1-theta)^k."""

    theta: float

    is_discrete = True

    def __post_init__(self):
        if not (0.0 < self.theta < 1.0):
            raise ValueError(f"geometric theta must lie strictly in (0, 1), got {self.theta}")

    def pdf(self, y: float) -> float:
        k = _as_count(y)
        if k is None:
            return 0.0
        return self.theta * (1.0 - self.theta) ** k

    def logpdf(self, y: float) -> float:
        k = _as_count(y)
        if k is None:
            return -math.inf
        return math.log(self.theta) + k * math.log1p(-self.theta)

    def sample(self, rng: random.Random) -> int:
        # Inverse transform: P(k >= j) = (1-theta)^j.
        u = 1.0 - rng.random()  # u in (0, 1]
        return int(math.log(u) / math.log1p(-self.theta))

    def mean(self) -> float:
        return (1.0 - self.theta) / self.theta

    def support_upper_q(self, tail: float) -> float:
        return math.log(tail) / math.log1p(-self.theta)


@dataclass(frozen=True)
class TabulatedDiscrete:
    """Discrete law on {0, ..., n-1} given by an explicit probability table."""

    probs: tuple[float, ...]

    is_discrete = True

    def __post_init__(self):
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.probs) == 0:
            raise ValueError("tabulated law needs at least one probability")
        if any(p < 0.0 for p in self.probs):
            raise ValueError("tabulated probabilities must be nonnegative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"tabulated probabilities must sum to 1 (got {total!r})")

    def pdf(self, y: float) -> float:
        k = _as_count(y)
        if k is None or k >= len(self.probs):
            return 0.0
        return self.probs[k]

    def logpdf(self, y: float) -> float:
        p = self.pdf(y)
        return math.log(p) if p > 0.0 else -math.inf

    def sample(self, rng: random.Random) -> int:
        u = rng.random()
        acc = 0.0
        for k, p in enumerate(self.probs):
            acc += p
            if u < acc:
                return k
        return len(self.probs) - 1

    def mean(self) -> float:
        return sum(k * p for k, p in enumerate(self.probs))

    def support_upper_q(self, tail: float) -> float:
        return float(len(self.probs))


@dataclass(frozen=True)
class Mixture:
    """Convex mixture of laws sharing one observation space."""

    weights: tuple[float, ...]
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.weights) != len(self.components) or not self.components:
            raise ValueError("mixture needs matching, non-empty weights and components")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("mixture weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")
        kinds = {c.is_discrete for c in self.components}
        if len(kinds) > 1:
            raise ValueError("cannot mix continuous and discrete laws in one mixture")

    @property
    def is_discrete(self) -> bool:
        return self.components[0].is_discrete

    def pdf(self, y: float) -> float:
        return math.fsum(w * c.pdf(y) for w, c in zip(self.weights, self.components))

    def logpdf(self, y: float) -> float:
        terms = [
            math.log(w) + c.logpdf(y)
            for w, c in zip(self.weights, self.components)
            if w > 0.0
        ]
        return _logsumexp(terms)

    def sample(self, rng: random.Random):
        u = rng.random()
        acc = 0.0
        for w, c in zip(self.weights, self.components):
            acc += w
            if u < acc:
                return c.sample(rng)
        return self.components[-1].sample(rng)

    def mean(self) -> float:
        return math.fsum(w * c.mean() for w, c in zip(self.weights, self.components))

    def support_upper_q(self, tail: float) -> float:
        return max(c.support_upper_q(tail) for c in self.components)


def two_point_mixture(r: float, f, g) -> Mixture:
    """The anomalous law r*f + (1-r)*g for normal-state probability r."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"mixture coefficient must lie in [0, 1], got {r}")
    return Mixture((r, 1.0 - r), (f, g))


def mixture_pdf(r: float, f, g, y: float) -> float:
    """Evaluate r*f(y) + (1-r)*g(y), raising if y is outside both supports.

    Scalar fast path used by the policy inner loop; equals
    ``two_point_mixture(r, f, g).pdf(y)`` on the common support.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"mixture coefficient must lie in [0, 1], got {r}")
    fy = f.pdf(y)
    gy = g.pdf(y)
    if fy == 0.0 and gy == 0.0:
        raise SupportError(f"observation {y!r} lies outside the support of both laws")
    return r * fy + (1.0 - r) * gy


def _as_count(y) -> int | None:
    """Coerce y to a nonnegative integer, or None when it is not one."""
    if isinstance(y, float):
        if not y.is_integer() or y < 0.0:
            return None
        return int(y)
    k = int(y)
    if k != y or k < 0:
        return None
    return k


def _logsumexp(terms: list[float]) -> float:
    if not terms:
        return -math.inf
    hi = max(terms)
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(math.fsum(math.exp(t - hi) for t in terms))

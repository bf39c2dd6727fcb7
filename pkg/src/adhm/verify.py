"""Randomized numeric checks of the analysis layer's identities.

Each suite draws a batch of random instances, evaluates an identity or
inequality both ways, and fails loudly with a serialized worst instance so a
violation can be replayed. The suites back the `verify` CLI subcommand; the
acceptance tests run the same checks at their full instance counts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .analysis import (InequalityViolation, kl_divergence, mixture_kl_slack,
                       palette_rate, pooled_rate_gap)
from .distributions import Exponential, Geometric, two_point_mixture
from .world import OraclePalette


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    worst: dict | None = None


def _random_exponential(rng: random.Random) -> Exponential:
    return Exponential(math.exp(rng.uniform(math.log(0.05), math.log(20.0))))


def _random_geometric(rng: random.Random) -> Geometric:
    return Geometric(rng.uniform(0.05, 0.95))


def _random_pair(rng: random.Random, discrete: bool):
    draw = _random_geometric if discrete else _random_exponential
    return draw(rng), draw(rng)


def _random_weights(rng: random.Random, d: int) -> tuple[float, ...]:
    raw = [-math.log(1.0 - rng.random()) for _ in range(d)]
    total = math.fsum(raw)
    return tuple(w / total for w in raw)


def suite_kl_closed_form(tol: float = 1e-6, seed: int = 7,
                         pairs: int = 100) -> SuiteResult:
    """Closed-form KL must agree with quadrature/summation on random pairs."""
    rng = random.Random(seed)
    worst_diff = -1.0
    worst = None
    for discrete in (False, True):
        for _ in range(pairs):
            p, q = _random_pair(rng, discrete)
            closed = kl_divergence(p, q, method="closed")
            numeric = kl_divergence(p, q, method="numeric")
            diff = abs(closed - numeric)
            if diff > worst_diff:
                worst_diff = diff
                worst = {"p": repr(p), "q": repr(q),
                         "closed": closed, "numeric": numeric, "diff": diff}
    passed = worst_diff <= tol
    return SuiteResult(
        "kl-closed-form", passed,
        f"max |closed - numeric| = {worst_diff:.3e} over {2 * pairs} pairs "
        f"(tol {tol:g})", None if passed else worst)


def suite_mixture_kl(tol: float = 1e-6, seed: int = 7,
                     instances: int = 500) -> SuiteResult:
    """Weighted component KLs must dominate the pooled-mixture KL."""
    rng = random.Random(seed)
    min_slack = math.inf
    worst = None
    checked = 0
    for i in range(instances):
        discrete = i % 2 == 1
        f, g = _random_pair(rng, discrete)
        d = rng.randint(1, 4)
        values = [rng.random() for _ in range(d)]
        if i % 25 == 0:
            # Exercise the equality case: identical components give zero slack.
            values = [values[0]] * d
        weights = _random_weights(rng, d)
        components = [(w, two_point_mixture(v, f, g))
                      for w, v in zip(weights, values)]
        instance = {"f": repr(f), "g": repr(g),
                    "values": values, "weights": list(weights)}
        try:
            report = mixture_kl_slack(f, components, tol=tol)
        except InequalityViolation as exc:
            return SuiteResult("mixture-kl", False, str(exc), instance)
        checked += 1
        if report.slack < min_slack:
            min_slack = report.slack
            worst = instance | {"lhs": report.lhs, "rhs": report.rhs,
                                "slack": report.slack}
        if len(set(values)) == 1 and abs(report.slack) > max(tol, 1e-9):
            return SuiteResult(
                "mixture-kl", False,
                f"identical components should give zero slack, got "
                f"{report.slack:.3e}", instance)
    passed = min_slack >= -tol
    return SuiteResult(
        "mixture-kl", passed,
        f"min slack = {min_slack:.3e} over {checked} instances (tol {tol:g})",
        None if passed else worst)


def suite_rate_gap(tol: float = 1e-6, seed: int = 7,
                   instances: int = 200) -> SuiteResult:
    """The weighted palette rate must dominate the pooled-mixture rate."""
    rng = random.Random(seed)
    min_gap = math.inf
    worst = None
    for i in range(instances):
        discrete = i % 2 == 1
        f, g = _random_pair(rng, discrete)
        d = rng.randint(1, 4)
        values = [rng.random() for _ in range(d)]
        if i % 25 == 0:
            values = [values[0]] * d
        palette = OraclePalette(tuple(values), _random_weights(rng, d))
        M = rng.randint(2, 12)
        K = rng.randint(1, M)
        instance = {"f": repr(f), "g": repr(g), "values": values,
                    "weights": list(palette.weights), "M": M, "K": K}
        try:
            result = pooled_rate_gap(f, g, palette, M, K, tol=tol)
        except InequalityViolation as exc:
            return SuiteResult("rate-gap", False, str(exc), instance)
        if result.gap < min_gap:
            min_gap = result.gap
            worst = instance | {"adaptive": result.adaptive,
                                "pooled": result.pooled, "gap": result.gap}
        if len(set(values)) == 1 and abs(result.gap) > max(tol, 1e-9):
            return SuiteResult(
                "rate-gap", False,
                f"identical palette values should give zero gap, got "
                f"{result.gap:.3e}", instance)
    passed = min_gap >= -tol
    return SuiteResult(
        "rate-gap", passed,
        f"min gap = {min_gap:.3e} over {instances} palettes (tol {tol:g})",
        None if passed else worst)


def suite_oracle_delay(tol: float = 1e-6, trials: int = 400,
                       lo: float = 0.8, hi: float = 1.2) -> SuiteResult:
    """Measured oracle delay must sit near its rate-function prediction."""
    from .config import PRESETS, config_from_dict
    from .harness import run_block

    doc = PRESETS["oracle_m5k2"]()
    doc["trials"] = trials
    config = config_from_dict(doc)
    report = palette_rate(config.f, config.g, config.palette,
                          config.M, config.K)
    c = config.c_grid[-1]
    spec = config.policies[0]
    outcomes = run_block(config, spec, c, len(config.c_grid) - 1)
    avg_delay = math.fsum(o.tau for o in outcomes) / len(outcomes)
    predicted = report.predicted_delay(c)
    ratio = avg_delay / predicted
    # A negative tolerance can never be satisfied; it fails this suite just
    # like it fails the inequality suites.
    passed = tol >= 0 and lo <= ratio <= hi
    return SuiteResult(
        "oracle-delay", passed,
        f"avg delay {avg_delay:.2f} / predicted {predicted:.2f} = "
        f"{ratio:.3f} at -log c = {-math.log(c):g} ({trials} trials, "
        f"band [{lo:g}, {hi:g}])",
        None if passed else {"ratio": ratio, "avg_delay": avg_delay,
                             "predicted": predicted,
                             "weighted_rate": report.weighted_rate})


SUITES = {
    "kl-closed-form": suite_kl_closed_form,
    "mixture-kl": suite_mixture_kl,
    "rate-gap": suite_rate_gap,
    "oracle-delay": suite_oracle_delay,
}


def run_verification(only=None, tol: float = 1e-6) -> list[SuiteResult]:
    """Run the selected suites (all by default) with a shared tolerance."""
    names = list(SUITES) if not only else list(only)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown verification suite(s) {unknown}; "
                         f"known: {', '.join(SUITES)}")
    return [SUITES[name](tol=tol) for name in names]

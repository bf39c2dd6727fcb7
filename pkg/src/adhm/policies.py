"""Probing policies built on per-cell cumulative log-likelihood-ratio scores.

Every policy keeps one score S[m] per cell, probes K cells each step, adds
the chosen log-likelihood ratio of each new observation to that cell's score,
and stops as soon as the top score leads the runner-up by -log(c), declaring
the current argmax (score ties always resolve to the lowest cell index).
They differ in two places only:

* which cells get probed (top-K by score; top-K with a sampling gate that can
  skip whole steps; or argmax plus uniformly drawn companions), and
* which anomalous law the ratio is computed against (a mixture r*f + (1-r)*g
  under a tracked normal-state belief r, a frozen mixture, raw g, or the
  mixture at a revealed per-step value).

Scores are never touched on a skipped step, and the stopping test still runs
there. Ratios are clamped to +-llr_clamp with the number of clamped terms
counted; the mixture ratio is bounded below by log(r) on its own, so clamping
matters mainly for the raw-g baseline on near-normal observations.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .distributions import SupportError
from .world import HmmParams, OraclePalette

DEFAULT_LLR_CLAMP = 50.0

POLICY_KINDS = ("adhm", "adhm_p", "dgf", "chernoff", "adhm_oracle")


@dataclass(frozen=True)
class PolicySpec:
    """Configuration for one policy instance inside a sweep."""

    kind: str
    id: str | None = None
    p_th: float = 0.7
    gamma: float = 0.0
    baseline_llr_mode: str = "stationary_mixture"
    rho_explore: float = 0.0
    belief_source: str = "top_cell"
    llr_clamp: float = DEFAULT_LLR_CLAMP

    @property
    def policy_id(self) -> str:
        return self.id if self.id is not None else self.kind

    def validate(self) -> list[str]:
        """Return human-readable problems, empty when the spec is usable."""
        problems = []
        if self.kind not in POLICY_KINDS:
            problems.append(f"kind: unknown policy kind {self.kind!r}; "
                            f"expected one of {', '.join(POLICY_KINDS)}")
        if not 0.0 < self.p_th < 1.0:
            problems.append(f"p_th: must lie strictly in (0, 1), got {self.p_th}")
        if not self.gamma >= 0.0:
            problems.append(f"gamma: must be >= 0, got {self.gamma}")
        if self.baseline_llr_mode not in ("stationary_mixture", "raw_g"):
            problems.append("baseline_llr_mode: expected 'stationary_mixture' "
                            f"or 'raw_g', got {self.baseline_llr_mode!r}")
        if not 0.0 <= self.rho_explore < 1.0:
            problems.append(f"rho_explore: must lie in [0, 1), got {self.rho_explore}")
        if self.belief_source not in ("top_cell", "per_cell"):
            problems.append("belief_source: expected 'top_cell' or 'per_cell', "
                            f"got {self.belief_source!r}")
        if not self.llr_clamp > 0.0:
            problems.append(f"llr_clamp: must be > 0, got {self.llr_clamp}")
        return problems


@dataclass(frozen=True)
class StepDecision:
    """Outcome of one policy step: what was probed, and whether to stop."""

    probe: tuple[int, ...] | None
    stopped: bool
    declared: int | None = None


def mixture_llr(f, g, r: float, y, clamp: float = DEFAULT_LLR_CLAMP) -> float:
    """log((r*f(y) + (1-r)*g(y)) / f(y)), clamped to [-clamp, clamp]."""
    fy = f.pdf(y)
    gy = g.pdf(y)
    if fy == 0.0 and gy == 0.0:
        raise SupportError(f"observation {y!r} lies outside the support of both laws")
    return _llr_from_densities(fy, gy, r, clamp)[0]


def _llr_from_densities(fy: float, gy: float, r: float, clamp: float):
    """(clamped llr, clamped?) given the two densities at one observation."""
    if fy == 0.0:
        return clamp, True
    mix = r * fy + (1.0 - r) * gy
    if mix == 0.0:
        return -clamp, True
    raw = math.log(mix / fy)
    if raw > clamp:
        return clamp, True
    if raw < -clamp:
        return -clamp, True
    return raw, False


def belief_update(hmm: HmmParams, p0: float, y, f, g) -> float:
    """One forward-filter step: absorb a target observation, then transition."""
    return filter_step(hmm, p0, f.pdf(y), g.pdf(y))


def filter_step(hmm: HmmParams, p0: float, fy: float, gy: float) -> float:
    """Next-step normal-state probability given observation densities fy, gy."""
    den = p0 * fy + (1.0 - p0) * gy
    if den == 0.0:
        # Both densities underflowed; the observation carries no usable
        # state information, so fall back to the transition alone.
        return predict_step(hmm, p0)
    num = p0 * (1.0 - hmm.alpha) * fy + (1.0 - p0) * hmm.beta * gy
    return num / den


def predict_step(hmm: HmmParams, p0: float) -> float:
    """Transition-only belief update for steps without a target observation."""
    return p0 * (1.0 - hmm.alpha) + (1.0 - p0) * hmm.beta


class _ScorePolicy:
    """Score bookkeeping, ranking, and the stopping test shared by all kinds."""

    needs_revealed = False

    def __init__(self, M: int, K: int, c: float, clamp: float):
        if not 0.0 < c < 1.0:
            raise ValueError(f"cost parameter c must lie strictly in (0, 1), got {c}")
        if M < 2:
            raise ValueError(f"need at least two cells, got M={M}")
        if not 1 <= K <= M:
            raise ValueError(f"probe count K={K} must satisfy 1 <= K <= M={M}")
        self.M = M
        self.K = K
        self.c = c
        self.threshold = -math.log(c)
        self.clamp = clamp
        self.scores = [0.0] * M
        self.n = 0              # completed time steps
        self.samples = 0        # steps on which cells were probed
        self.idle = 0           # steps skipped by a sampling gate
        self.clamp_events = 0
        self.stopped = False
        self._probe: tuple[int, ...] | None = None

    def ranked_top_k(self) -> tuple[int, ...]:
        """Indices of the K largest scores, best first, ties to lowest index."""
        order = sorted(range(self.M), key=lambda m: (-self.scores[m], m))
        return tuple(order[: self.K])

    def current_argmax(self) -> int:
        scores = self.scores
        best = 0
        for m in range(1, self.M):
            if scores[m] > scores[best]:
                best = m
        return best

    def _stop_decision(self) -> StepDecision:
        """Run the top-two gap test against the stopping threshold."""
        scores = self.scores
        best = 0
        second = 1
        if scores[1] > scores[0]:
            best, second = 1, 0
        for m in range(2, self.M):
            s = scores[m]
            if s > scores[best]:
                second = best
                best = m
            elif s > scores[second]:
                second = m
        if scores[best] - scores[second] >= self.threshold:
            self.stopped = True
            return StepDecision(self._probe, True, best)
        return StepDecision(self._probe, False)

    def begin(self) -> tuple[int, ...] | None:
        """Choose this step's probe set; None means the step is skipped."""
        if self.stopped:
            raise RuntimeError("policy already stopped; no further steps allowed")
        self._probe = self._select()
        return self._probe

    def _select(self) -> tuple[int, ...] | None:
        return self.ranked_top_k()

    def ingest(self, obs, revealed: int | None = None) -> StepDecision:
        """Consume this step's observations and report the stop decision."""
        probe = self._probe
        if probe is None:
            raise RuntimeError("ingest called before begin")
        if obs is None or len(obs) != len(probe) or any(m not in obs for m in probe):
            got = None if obs is None else sorted(obs)
            raise ValueError(f"observations keyed {got!r} do not match probe set {probe!r}")
        self._absorb(probe, obs, revealed)
        decision = self._stop_decision()
        self.n += 1
        self.samples += 1
        self._probe = None
        return decision

    def _absorb(self, probe, obs, revealed) -> None:
        raise NotImplementedError


class AdhmPolicy(_ScorePolicy):
    """Top-K probing with the mixture ratio under a tracked forward filter.

    With belief_source="top_cell" a single belief is filtered on the
    top-ranked cell's observation and used for every probed cell's ratio;
    with "per_cell" each cell runs its own filter, advanced by its own
    observation when probed and by the transition alone otherwise.
    """

    def __init__(self, M, K, c, f, g, hmm: HmmParams,
                 belief_source: str = "top_cell",
                 clamp: float = DEFAULT_LLR_CLAMP):
        super().__init__(M, K, c, clamp)
        self.f = f
        self.g = g
        self.hmm = hmm
        self._f_pdf = f.pdf
        self._g_pdf = g.pdf
        self.per_cell = belief_source == "per_cell"
        p0 = hmm.stationary_p0
        self.belief = p0
        self.beliefs = [p0] * M if self.per_cell else None

    def _absorb(self, probe, obs, revealed) -> None:
        scores = self.scores
        clamp = self.clamp
        if self.per_cell:
            beliefs = self.beliefs
            seen = set()
            for m in probe:
                y = obs[m]
                fy = self._f_pdf(y)
                gy = self._g_pdf(y)
                if fy == 0.0 and gy == 0.0:
                    raise SupportError(
                        f"observation {y!r} lies outside the support of both laws")
                val, clamped = _llr_from_densities(fy, gy, beliefs[m], clamp)
                scores[m] += val
                if clamped:
                    self.clamp_events += 1
                beliefs[m] = filter_step(self.hmm, beliefs[m], fy, gy)
                seen.add(m)
            for m in range(self.M):
                if m not in seen:
                    beliefs[m] = predict_step(self.hmm, beliefs[m])
            self.belief = beliefs[self.current_argmax()]
            return
        r = self.belief
        top_fy = top_gy = None
        for m in probe:
            y = obs[m]
            fy = self._f_pdf(y)
            gy = self._g_pdf(y)
            if fy == 0.0 and gy == 0.0:
                raise SupportError(
                    f"observation {y!r} lies outside the support of both laws")
            if top_fy is None:
                top_fy, top_gy = fy, gy
            val, clamped = _llr_from_densities(fy, gy, r, clamp)
            scores[m] += val
            if clamped:
                self.clamp_events += 1
        # The filter treats the top-ranked cell's observation as the target's.
        self.belief = filter_step(self.hmm, r, top_fy, top_gy)


class AdhmPPolicy(AdhmPolicy):
    """Belief-gated variant: probe only when the anomalous state looks likely.

    A step is sampled when 1 - belief exceeds p_th, or when gamma times the
    run of consecutive skips exceeds c (the safeguard that bounds how long
    the gate may stay shut). Skipped steps advance the belief by the
    transition alone, leave every score untouched, and still run the
    stopping test.
    """

    def __init__(self, M, K, c, f, g, hmm: HmmParams,
                 p_th: float = 0.7, gamma: float = 0.0,
                 belief_source: str = "top_cell",
                 clamp: float = DEFAULT_LLR_CLAMP):
        super().__init__(M, K, c, f, g, hmm, belief_source, clamp)
        self.p_th = p_th
        self.gamma = gamma
        self.skips_since_sample = 0

    def _select(self) -> tuple[int, ...] | None:
        gate_belief = (self.beliefs[self.current_argmax()]
                       if self.per_cell else self.belief)
        if 1.0 - gate_belief > self.p_th:
            return self.ranked_top_k()
        if self.skips_since_sample * self.gamma > self.c:
            return self.ranked_top_k()
        return None

    def ingest(self, obs, revealed: int | None = None) -> StepDecision:
        if self._probe is not None:
            decision = super().ingest(obs, revealed)
            self.skips_since_sample = 0
            return decision
        if obs is not None:
            raise ValueError("received observations for a skipped step")
        self.skips_since_sample += 1
        self.idle += 1
        if self.per_cell:
            self.beliefs = [predict_step(self.hmm, b) for b in self.beliefs]
            self.belief = self.beliefs[self.current_argmax()]
        else:
            self.belief = predict_step(self.hmm, self.belief)
        decision = self._stop_decision()
        self.n += 1
        return decision


class StaticMixturePolicy(_ScorePolicy):
    """Top-K probing with the ratio against a frozen anomalous law.

    The frozen law is the mixture at a fixed normal-state probability r;
    r equal to the stationary value gives the usual averaged baseline and
    r = 0 scores against raw g.
    """

    def __init__(self, M, K, c, f, g, r_static: float,
                 clamp: float = DEFAULT_LLR_CLAMP):
        super().__init__(M, K, c, clamp)
        if not 0.0 <= r_static <= 1.0:
            raise ValueError(f"static mixture weight must lie in [0, 1], got {r_static}")
        self.f = f
        self.g = g
        self.r_static = r_static
        self._f_pdf = f.pdf
        self._g_pdf = g.pdf

    def _absorb(self, probe, obs, revealed) -> None:
        scores = self.scores
        clamp = self.clamp
        r = self.r_static
        for m in probe:
            y = obs[m]
            fy = self._f_pdf(y)
            gy = self._g_pdf(y)
            if fy == 0.0 and gy == 0.0:
                raise SupportError(
                    f"observation {y!r} lies outside the support of both laws")
            val, clamped = _llr_from_densities(fy, gy, r, clamp)
            scores[m] += val
            if clamped:
                self.clamp_events += 1


class DgfPolicy(StaticMixturePolicy):
    """Deterministic top-K probing with the frozen-mixture ratio."""


class ChernoffPolicy(StaticMixturePolicy):
    """Probe the argmax plus K-1 companions drawn uniformly at random.

    For K = 1 the argmax itself is probed with probability 1 - rho_explore,
    otherwise one of the remaining cells is probed uniformly.
    """

    def __init__(self, M, K, c, f, g, r_static: float, rng: random.Random,
                 rho_explore: float = 0.0, clamp: float = DEFAULT_LLR_CLAMP):
        super().__init__(M, K, c, f, g, r_static, clamp)
        self.rng = rng
        self.rho_explore = rho_explore

    def _select(self) -> tuple[int, ...]:
        best = self.current_argmax()
        rest = [m for m in range(self.M) if m != best]
        if self.K == 1:
            if self.rho_explore > 0.0 and self.rng.random() < self.rho_explore:
                return (self.rng.choice(rest),)
            return (best,)
        return (best, *self.rng.sample(rest, self.K - 1))


class AdhmOraclePolicy(_ScorePolicy):
    """Top-K probing with the mixture ratio at the revealed per-step value."""

    needs_revealed = True

    def __init__(self, M, K, c, f, g, palette: OraclePalette,
                 clamp: float = DEFAULT_LLR_CLAMP):
        super().__init__(M, K, c, clamp)
        self.f = f
        self.g = g
        self.palette = palette
        self._f_pdf = f.pdf
        self._g_pdf = g.pdf

    def _absorb(self, probe, obs, revealed) -> None:
        if revealed is None or not 0 <= revealed < len(self.palette):
            raise ValueError(f"revealed palette index {revealed!r} outside "
                             f"0..{len(self.palette) - 1}")
        r = self.palette.values[revealed]
        scores = self.scores
        clamp = self.clamp
        for m in probe:
            y = obs[m]
            fy = self._f_pdf(y)
            gy = self._g_pdf(y)
            if fy == 0.0 and gy == 0.0:
                raise SupportError(
                    f"observation {y!r} lies outside the support of both laws")
            val, clamped = _llr_from_densities(fy, gy, r, clamp)
            scores[m] += val
            if clamped:
                self.clamp_events += 1


def build_policy(spec: PolicySpec, *, M: int, K: int, c: float, f, g,
                 hmm: HmmParams | None = None,
                 palette: OraclePalette | None = None,
                 rng: random.Random | None = None):
    """Instantiate the policy described by ``spec`` for one trial."""
    problems = spec.validate()
    if problems:
        raise ValueError(f"invalid policy spec {spec.policy_id!r}: " + "; ".join(problems))
    kind = spec.kind
    if kind in ("adhm", "adhm_p"):
        if hmm is None:
            raise ValueError(f"policy {spec.policy_id!r} needs hmm parameters")
        if kind == "adhm":
            return AdhmPolicy(M, K, c, f, g, hmm, spec.belief_source, spec.llr_clamp)
        return AdhmPPolicy(M, K, c, f, g, hmm, spec.p_th, spec.gamma,
                           spec.belief_source, spec.llr_clamp)
    if kind in ("dgf", "chernoff"):
        if spec.baseline_llr_mode == "raw_g":
            r_static = 0.0
        elif hmm is not None:
            r_static = hmm.stationary_p0
        elif palette is not None:
            r_static = math.fsum(
                w * v for w, v in zip(palette.weights, palette.values))
        else:
            raise ValueError(f"policy {spec.policy_id!r} needs hmm parameters or "
                             "a palette to fix its mixture weight")
        if kind == "dgf":
            return DgfPolicy(M, K, c, f, g, r_static, spec.llr_clamp)
        if rng is None:
            raise ValueError(f"policy {spec.policy_id!r} needs a random stream")
        return ChernoffPolicy(M, K, c, f, g, r_static, rng,
                              spec.rho_explore, spec.llr_clamp)
    if kind == "adhm_oracle":
        if palette is None:
            raise ValueError(f"policy {spec.policy_id!r} needs a palette")
        return AdhmOraclePolicy(M, K, c, f, g, palette, spec.llr_clamp)
    raise ValueError(f"unknown policy kind {kind!r}")

"""Ground-truth simulators for the anomaly search.

One of M cells hides the target. Normal cells emit observations from ``f``
whenever probed. The target's emissions are driven either by a two-state
Markov chain (state 0 -> ``f``, state 1 -> ``g``), or, in oracle mode, by a
palette of mixture laws with the active palette index redrawn i.i.d. every
step and revealed to oracle-aware policies.

The hidden state advances exactly once per time step via :meth:`advance`,
independent of which cells were probed (probing never perturbs the dynamics);
``observe`` only reads the current state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .distributions import two_point_mixture


@dataclass(frozen=True)
class HmmParams:
    """Two-state transition law: alpha = P(0 -> 1), beta = P(1 -> 0)."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie strictly in (0, 1), got {self.alpha}")
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must lie strictly in (0, 1), got {self.beta}")

    @property
    def stationary_p0(self) -> float:
        """Long-run probability of state 0, the fixed point of predict_step."""
        return self.beta / (self.alpha + self.beta)


def hmm_step(params: HmmParams, state: int, rng: random.Random) -> int:
    """Advance the two-state chain by one transition."""
    u = rng.random()
    if state == 0:
        return 1 if u < params.alpha else 0
    return 0 if u < params.beta else 1


def stationary_p0(params: HmmParams) -> float:
    return params.stationary_p0


@dataclass(frozen=True)
class OraclePalette:
    """Belief values P_d with their stationary occupancy weights."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.values) != len(self.weights) or not self.values:
            raise ValueError("palette needs matching, non-empty values and weights")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("palette values must lie in [0, 1]")
        if any(w < 0.0 for w in self.weights):
            raise ValueError("palette weights must be nonnegative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ValueError("palette weights must sum to 1")

    def __len__(self) -> int:
        return len(self.values)

    def draw_index(self, rng: random.Random) -> int:
        u = rng.random()
        acc = 0.0
        for d, w in enumerate(self.weights):
            acc += w
            if u < acc:
                return d
        return len(self.weights) - 1


class HmmWorld:
    """Simulator state for one trial under the hidden-Markov target model."""

    def __init__(self, m_star: int, M: int, f, g, hmm: HmmParams,
                 rng: random.Random, init_state: int | None = None):
        if not 0 <= m_star < M:
            raise ValueError(f"target index {m_star} outside 0..{M - 1}")
        self.m_star = m_star
        self.M = M
        self.f = f
        self.g = g
        self.hmm = hmm
        self.rng = rng
        if init_state is None:
            init_state = 0 if rng.random() < hmm.stationary_p0 else 1
        self.hidden_state = init_state
        self.t = 0

    # Oracle-aware policies look at this; it stays None under the HMM world.
    revealed = None

    def observe(self, cells) -> dict[int, float]:
        """Draw one observation per probed cell from the current state."""
        if not cells:
            raise ValueError("probe set must be non-empty")
        out = {}
        for m in cells:
            if not 0 <= m < self.M:
                raise ValueError(f"probed cell {m} outside 0..{self.M - 1}")
            if m == self.m_star and self.hidden_state == 1:
                out[m] = self.g.sample(self.rng)
            else:
                out[m] = self.f.sample(self.rng)
        return out

    def advance(self) -> None:
        """Move to the next time step; the chain steps whether or not probed."""
        self.hidden_state = hmm_step(self.hmm, self.hidden_state, self.rng)
        self.t += 1


class OracleWorld:
    """Simulator whose target emits from g~_{P_d} with d redrawn each step.

    ``revealed`` holds the palette index governing the current step's target
    emission; the harness hands it to oracle-mode policies only.
    """

    def __init__(self, m_star: int, M: int, f, g, palette: OraclePalette,
                 rng: random.Random):
        if not 0 <= m_star < M:
            raise ValueError(f"target index {m_star} outside 0..{M - 1}")
        self.m_star = m_star
        self.M = M
        self.f = f
        self.g = g
        self.palette = palette
        self.rng = rng
        self.revealed = palette.draw_index(rng)
        self.t = 0

    def observe(self, cells) -> dict[int, float]:
        if not cells:
            raise ValueError("probe set must be non-empty")
        out = {}
        p_d = self.palette.values[self.revealed]
        for m in cells:
            if not 0 <= m < self.M:
                raise ValueError(f"probed cell {m} outside 0..{self.M - 1}")
            if m == self.m_star and self.rng.random() >= p_d:
                out[m] = self.g.sample(self.rng)
            else:
                out[m] = self.f.sample(self.rng)
        return out

    def advance(self) -> None:
        self.revealed = self.palette.draw_index(self.rng)
        self.t += 1


def anomalous_marginal(f, g, palette: OraclePalette):
    """The pooled law of oracle-mode target emissions: sum_d w_d * g~_{P_d}.

    Because each component mixes the same f and g, this collapses to the
    two-point mixture at the weight-averaged belief value.
    """
    p_eff = math.fsum(w * v for w, v in zip(palette.weights, palette.values))
    return two_point_mixture(p_eff, f, g)

"""Monte Carlo driver: trial loop, aggregation, and result files.

A sweep runs every (policy, c) pair on its own block of independent trials.
Trial randomness is derived per trial by hashing (base_seed, policy id,
c index, trial index) into two independent streams, one for the world and one
for the policy, so any single trial can be reproduced in isolation and the
schedule of workers cannot change the draws. Aggregation always consumes the
outcomes in trial order, which makes serial and parallel runs byte-identical.

Per (policy, c) block the aggregate row reports mean delay with a Student-t
interval, error rate with a Wilson interval, the realized Bayes risk
error_rate + c * avg_delay, and the sampling-cost variant
error_rate + c * avg_samples + gamma * avg_idle (the two coincide for
policies that probe every step). Trials still running at the horizon are
declared from the current score argmax and counted in ``censored_frac``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from scipy.stats import t as _student_t

from .policies import PolicySpec, build_policy
from .world import HmmParams, HmmWorld, OraclePalette, OracleWorld

_WILSON_Z = 1.959963984540054  # two-sided 95% normal quantile

CSV_COLUMNS = (
    "policy", "c", "neg_log_c", "trials",
    "avg_delay", "delay_ci_lo", "delay_ci_hi",
    "error_rate", "err_ci_lo", "err_ci_hi",
    "bayes_risk", "avg_samples", "avg_idle",
    "censored_frac", "base_seed", "sampling_risk",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs: the world, the policies, and the grid."""

    name: str
    M: int
    K: int
    f: object
    g: object
    policies: tuple[PolicySpec, ...]
    c_grid: tuple[float, ...]
    trials: int
    base_seed: int
    horizon: int = 1_000_000
    world: str = "hmm"
    hmm: HmmParams | None = None
    palette: OraclePalette | None = None

    def problems(self) -> list[str]:
        """Field-by-field validation messages; empty when runnable."""
        out = []
        if not self.name or any(ch in self.name for ch in "/\\ \t\n"):
            out.append(f"name: must be a non-empty token without spaces or "
                       f"path separators, got {self.name!r}")
        if self.M < 2:
            out.append(f"M: need at least two cells, got {self.M}")
        if not 1 <= self.K <= self.M:
            out.append(f"K: must satisfy 1 <= K <= M, got K={self.K} with M={self.M}")
        if self.f is None or self.g is None:
            out.append("f/g: both observation laws are required")
        elif self.f.is_discrete != self.g.is_discrete:
            out.append("f/g: normal and anomalous laws must share one "
                       "observation space (both continuous or both discrete)")
        if self.world not in ("hmm", "oracle"):
            out.append(f"world: expected 'hmm' or 'oracle', got {self.world!r}")
        if self.world == "hmm" and self.hmm is None:
            out.append("hmm: required when world is 'hmm'")
        if self.world == "oracle" and self.palette is None:
            out.append("palette: required when world is 'oracle'")
        if not self.policies:
            out.append("policies: at least one policy is required")
        ids = [s.policy_id for s in self.policies]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            out.append(f"policies: duplicate policy ids {dupes}")
        for i, spec in enumerate(self.policies):
            for msg in spec.validate():
                out.append(f"policies[{i}].{msg}")
            if spec.kind in ("adhm", "adhm_p") and self.hmm is None:
                out.append(f"policies[{i}]: kind {spec.kind!r} needs hmm parameters")
            if spec.kind == "adhm_oracle" and self.world != "oracle":
                out.append(f"policies[{i}]: kind 'adhm_oracle' needs world 'oracle'")
            if (spec.kind in ("dgf", "chernoff")
                    and spec.baseline_llr_mode == "stationary_mixture"
                    and self.hmm is None and self.palette is None):
                out.append(f"policies[{i}]: stationary_mixture baseline needs "
                           "hmm parameters or a palette")
        if not self.c_grid:
            out.append("c_grid: at least one cost value is required")
        else:
            if any(not 0.0 < c < 1.0 for c in self.c_grid):
                out.append(f"c_grid: every c must lie strictly in (0, 1), "
                           f"got {list(self.c_grid)}")
            if any(b >= a for a, b in zip(self.c_grid, self.c_grid[1:])):
                out.append("c_grid: must be strictly decreasing in c "
                           "(increasing in -log c)")
        if self.trials < 1:
            out.append(f"trials: must be >= 1, got {self.trials}")
        if self.horizon < 1:
            out.append(f"horizon: must be >= 1, got {self.horizon}")
        if self.base_seed < 0:
            out.append(f"base_seed: must be >= 0, got {self.base_seed}")
        return out


@dataclass(frozen=True)
class TrialOutcome:
    """Result of one trial: where it stopped and what it cost."""

    policy: str
    c: float
    trial: int
    m_star: int
    declared: int
    correct: bool
    tau: int
    samples: int
    idle: int
    censored: bool
    clamp_events: int


def trial_seeds(base_seed: int, policy_id: str, c_index: int,
                trial_index: int) -> tuple[int, int]:
    """Two independent 128-bit stream seeds for one (policy, c, trial) cell."""
    tag = f"{base_seed}|{policy_id}|{c_index}|{trial_index}".encode()
    digest = hashlib.blake2b(tag, digest_size=32).digest()
    return (int.from_bytes(digest[:16], "little"),
            int.from_bytes(digest[16:], "little"))


def run_trial(config: ExperimentConfig, spec: PolicySpec, c: float,
              c_index: int, trial_index: int) -> TrialOutcome:
    """Simulate one trial to its stopping time (or the horizon)."""
    world_seed, policy_seed = trial_seeds(config.base_seed, spec.policy_id,
                                          c_index, trial_index)
    world_rng = random.Random(world_seed)
    policy_rng = random.Random(policy_seed)
    m_star = world_rng.randrange(config.M)
    if config.world == "oracle":
        world = OracleWorld(m_star, config.M, config.f, config.g,
                            config.palette, world_rng)
    else:
        world = HmmWorld(m_star, config.M, config.f, config.g,
                         config.hmm, world_rng)
    policy = build_policy(spec, M=config.M, K=config.K, c=c,
                          f=config.f, g=config.g, hmm=config.hmm,
                          palette=config.palette, rng=policy_rng)
    needs_revealed = policy.needs_revealed
    horizon = config.horizon
    while True:
        probe = policy.begin()
        if probe is not None:
            obs = world.observe(probe)
            revealed = world.revealed if needs_revealed else None
        else:
            obs = None
            revealed = None
        decision = policy.ingest(obs, revealed)
        world.advance()
        if decision.stopped:
            declared = decision.declared
            censored = False
            break
        if policy.n >= horizon:
            declared = policy.current_argmax()
            censored = True
            break
    return TrialOutcome(
        policy=spec.policy_id, c=c, trial=trial_index, m_star=m_star,
        declared=declared, correct=declared == m_star, tau=policy.n,
        samples=policy.samples, idle=policy.idle, censored=censored,
        clamp_events=policy.clamp_events,
    )


def _run_chunk(config: ExperimentConfig, spec: PolicySpec, c: float,
               c_index: int, lo: int, hi: int) -> list[TrialOutcome]:
    return [run_trial(config, spec, c, c_index, i) for i in range(lo, hi)]


def run_block(config: ExperimentConfig, spec: PolicySpec, c: float,
              c_index: int, workers: int = 1,
              pool: ProcessPoolExecutor | None = None) -> list[TrialOutcome]:
    """All trials for one (policy, c) pair, in trial order."""
    n = config.trials
    if workers <= 1 or n < 2:
        return _run_chunk(config, spec, c, c_index, 0, n)
    chunk = max(1, -(-n // (4 * workers)))
    bounds = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    own_pool = pool is None
    if own_pool:
        pool = ProcessPoolExecutor(max_workers=workers)
    try:
        futures = [pool.submit(_run_chunk, config, spec, c, c_index, lo, hi)
                   for lo, hi in bounds]
        out: list[TrialOutcome] = []
        for fut in futures:
            out.extend(fut.result())
        return out
    finally:
        if own_pool:
            pool.shutdown()


def aggregate_bayes_risk(outcomes, c: float) -> float:
    """Realized error rate plus c times the mean stopping time."""
    n = len(outcomes)
    errors = sum(1 for o in outcomes if not o.correct)
    mean_tau = math.fsum(o.tau for o in outcomes) / n
    return errors / n + c * mean_tau


def aggregate_sampling_risk(outcomes, c: float, gamma: float) -> float:
    """Error rate plus c per sampled step plus gamma per skipped step."""
    n = len(outcomes)
    errors = sum(1 for o in outcomes if not o.correct)
    mean_samples = math.fsum(o.samples for o in outcomes) / n
    mean_idle = math.fsum(o.idle for o in outcomes) / n
    return errors / n + c * mean_samples + gamma * mean_idle


def wilson_interval(successes: int, n: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n == 0:
        return 0.0, 1.0
    p_hat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def t_interval(values) -> tuple[float, float, float]:
    """(mean, lo, hi) of a Student-t 95% interval for the mean."""
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, mean, mean
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    half = float(_student_t.ppf(0.975, n - 1)) * math.sqrt(var / n)
    return mean, mean - half, mean + half


@dataclass(frozen=True)
class SweepRow:
    """Aggregate over one (policy, c) block; one CSV line."""

    policy: str
    c: float
    neg_log_c: float
    trials: int
    avg_delay: float
    delay_ci_lo: float
    delay_ci_hi: float
    error_rate: float
    err_ci_lo: float
    err_ci_hi: float
    bayes_risk: float
    avg_samples: float
    avg_idle: float
    censored_frac: float
    base_seed: int
    sampling_risk: float
    # Extras kept out of the CSV contract, reported in the summary file.
    risk_ci_lo: float
    risk_ci_hi: float
    clamp_total: int

    def csv_values(self) -> list[str]:
        vals = []
        for col in CSV_COLUMNS:
            v = getattr(self, col)
            vals.append(repr(float(v)) if isinstance(v, float) else str(v))
        return vals


def aggregate_block(outcomes, spec: PolicySpec, c: float,
                    base_seed: int) -> SweepRow:
    """Collapse one block of outcomes (in trial order) to its sweep row."""
    n = len(outcomes)
    errors = sum(1 for o in outcomes if not o.correct)
    error_rate = errors / n
    avg_delay, delay_lo, delay_hi = t_interval([o.tau for o in outcomes])
    err_lo, err_hi = wilson_interval(errors, n)
    avg_samples = math.fsum(o.samples for o in outcomes) / n
    avg_idle = math.fsum(o.idle for o in outcomes) / n
    # Reported risk is recomputed from the row's own fields; only the
    # interval comes from the per-trial risk sample.
    _, risk_lo, risk_hi = t_interval(
        [(0.0 if o.correct else 1.0) + c * o.tau for o in outcomes])
    return SweepRow(
        policy=spec.policy_id, c=c, neg_log_c=-math.log(c), trials=n,
        avg_delay=avg_delay, delay_ci_lo=delay_lo, delay_ci_hi=delay_hi,
        error_rate=error_rate, err_ci_lo=err_lo, err_ci_hi=err_hi,
        bayes_risk=error_rate + c * avg_delay,
        avg_samples=avg_samples, avg_idle=avg_idle,
        censored_frac=sum(1 for o in outcomes if o.censored) / n,
        base_seed=base_seed,
        sampling_risk=error_rate + c * avg_samples + spec.gamma * avg_idle,
        risk_ci_lo=risk_lo, risk_ci_hi=risk_hi,
        clamp_total=sum(o.clamp_events for o in outcomes),
    )


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[SweepRow]
    outcomes: dict[tuple[str, int], list[TrialOutcome]] | None = None
    csv_path: Path | None = None
    summary_path: Path | None = None


def run_sweep(config: ExperimentConfig, *, workers: int = 1,
              out_dir: str | Path | None = None,
              retain_outcomes: bool = False,
              progress=None) -> SweepResult:
    """Run every (policy, c) block and optionally write result files."""
    issues = config.problems()
    if issues:
        raise ValueError("invalid experiment config:\n  " + "\n  ".join(issues))
    rows = []
    kept: dict[tuple[str, int], list[TrialOutcome]] = {}
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for spec in config.policies:
            for c_index, c in enumerate(config.c_grid):
                outcomes = run_block(config, spec, c, c_index,
                                     workers=workers, pool=pool)
                rows.append(aggregate_block(outcomes, spec, c, config.base_seed))
                if retain_outcomes:
                    kept[(spec.policy_id, c_index)] = outcomes
                if progress is not None:
                    progress(f"{config.name}: {spec.policy_id} at "
                             f"-log c={-math.log(c):.3g} done "
                             f"({len(outcomes)} trials)")
    finally:
        if pool is not None:
            pool.shutdown()
    result = SweepResult(config, rows, kept if retain_outcomes else None)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.csv_path = out / f"{config.name}.csv"
        write_csv(result.csv_path, rows)
        result.summary_path = out / f"{config.name}_summary.json"
        write_summary(result.summary_path, config, rows)
    return result


def write_csv(path: str | Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_values())


def write_summary(path: str | Path, config: ExperimentConfig, rows) -> None:
    doc = {
        "name": config.name,
        "M": config.M,
        "K": config.K,
        "world": config.world,
        "f": repr(config.f),
        "g": repr(config.g),
        "hmm": repr(config.hmm) if config.hmm is not None else None,
        "palette": repr(config.palette) if config.palette is not None else None,
        "trials": config.trials,
        "base_seed": config.base_seed,
        "horizon": config.horizon,
        "policies": [
            {"id": s.policy_id, "kind": s.kind, "p_th": s.p_th,
             "gamma": s.gamma, "baseline_llr_mode": s.baseline_llr_mode,
             "rho_explore": s.rho_explore, "belief_source": s.belief_source,
             "llr_clamp": s.llr_clamp}
            for s in config.policies
        ],
        "c_grid": list(config.c_grid),
        "rows": [
            {col: getattr(r, col) for col in CSV_COLUMNS}
            | {"risk_ci_lo": r.risk_ci_lo, "risk_ci_hi": r.risk_ci_hi,
               "clamp_total": r.clamp_total}
            for r in rows
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")

"""Reading and validating sweep CSV logs.

The harness writes one row per (policy, cost) block with a fixed column
set; everything here treats that file format as the contract and refuses
anything that does not carry it. Input files are only ever opened for
reading.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

SCHEMA = (
    "policy", "c", "neg_log_c", "trials",
    "avg_delay", "delay_ci_lo", "delay_ci_hi",
    "error_rate", "err_ci_lo", "err_ci_hi",
    "bayes_risk", "avg_samples", "avg_idle",
    "censored_frac", "base_seed", "sampling_risk",
)


class SchemaError(ValueError):
    """The CSV does not carry the sweep schema."""


@dataclass(frozen=True)
class SweepTable:
    """One parsed CSV: float-valued rows plus the policy order of appearance."""

    path: Path
    rows: tuple[dict, ...]
    policies: tuple[str, ...]

    def series(self, policy: str) -> list[dict]:
        return [r for r in self.rows if r["policy"] == policy]


def read_sweep(path: str | Path) -> SweepTable:
    """Parse and validate one sweep CSV.

    Raises SchemaError naming the missing columns when the header is wrong,
    or when the file has a header but no data rows.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in SCHEMA if col not in header]
        if missing:
            raise SchemaError(
                f"{path}: missing column(s) {', '.join(missing)}"
            )
        rows = []
        for raw in reader:
            row = {"policy": raw["policy"]}
            for col in SCHEMA[1:]:
                try:
                    row[col] = float(raw[col])
                except (TypeError, ValueError):
                    raise SchemaError(
                        f"{path}: non-numeric value {raw[col]!r} in "
                        f"column {col}"
                    ) from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    policies = []
    for row in rows:
        if row["policy"] not in policies:
            policies.append(row["policy"])
    return SweepTable(path, tuple(rows), tuple(policies))

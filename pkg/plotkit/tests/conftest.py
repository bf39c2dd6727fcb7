import csv
import math

import pytest

from plotkit.io import SCHEMA


@pytest.fixture
def sweep_csv(tmp_path):
    """Builder for synthetic sweep CSVs carrying the full schema.

    drop= omits a column from the header, with_rows=False writes a bare
    header; both exist to provoke the reader's error paths.
    """

    def build(name="sweep.csv", policies=("adhm", "dgf", "chernoff"),
              nlcs=(2, 4, 6), drop=None, with_rows=True):
        path = tmp_path / name
        header = [col for col in SCHEMA if col != drop]
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=header)
            writer.writeheader()
            if not with_rows:
                return path
            for rank, policy in enumerate(policies):
                for nlc in nlcs:
                    c = math.exp(-nlc)
                    delay = (3.0 + rank) * nlc / 2.0
                    err = 0.4 * math.exp(-0.7 * nlc) * (1.0 + 0.3 * rank)
                    row = {
                        "policy": policy,
                        "c": c,
                        "neg_log_c": float(nlc),
                        "trials": 100,
                        "avg_delay": delay,
                        "delay_ci_lo": delay - 0.4,
                        "delay_ci_hi": delay + 0.4,
                        "error_rate": err,
                        "err_ci_lo": max(err - 0.02, 0.0),
                        "err_ci_hi": err + 0.02,
                        "bayes_risk": err + c * delay,
                        "avg_samples": delay,
                        "avg_idle": 0.0,
                        "censored_frac": 0.0,
                        "base_seed": 7,
                        "sampling_risk": err + c * delay,
                    }
                    if drop is not None:
                        row.pop(drop)
                    writer.writerow(row)
        return path

    return build

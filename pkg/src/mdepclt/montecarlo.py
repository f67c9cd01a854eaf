"""Monte Carlo study of normalized row sums against the standard normal.

Row sums are normalized by the exact closed-form standard deviation (never
the sample one), so the empirical distribution targets exactly the object
whose limit is claimed.  Distance to N(0,1) is the Kolmogorov-Smirnov
sup-statistic, whose distribution-free null band gives usable thresholds
without any rate theory.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogi, ndtr

from .models import ArrayModel, exact_sigma2, model_to_config, sample_row


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted Monte Carlo replicates of S_n/sigma_n."""

    n: int
    reps: int
    seed: int
    samples: np.ndarray

    def __post_init__(self):
        if len(self.samples) != self.reps:
            raise ValueError("sample count does not match reps")


@dataclass(frozen=True)
class ConvergenceReport:
    """KS distances over an n-grid; final_ks belongs to the largest n."""

    model: ArrayModel
    grid: tuple  # of dicts {n, ks_stat, reps, seed}
    monotone_trend: bool
    final_ks: float


def simulate_normalized_sums(
    model: ArrayModel, n: int, reps: int, seed: int = 0
) -> EmpiricalDistribution:
    """Draw reps independent values of S_n/sigma_n, sorted ascending.

    Each replicate has its own counter-based stream keyed by
    (seed, n, replicate), so the result is bit-identical however the
    replicate range is partitioned across workers.
    """
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    sigma = math.sqrt(exact_sigma2(model, n))
    out = np.empty(reps)
    for r in range(reps):
        out[r] = sample_row(model, n, seed=seed, replicate=r).values.sum() / sigma
    out.sort()
    return EmpiricalDistribution(n, reps, seed, out)


def ks_statistic(emp) -> float:
    """sup_x |F_hat(x) - Phi(x)| by the order-statistic formula."""
    samples = emp.samples if isinstance(emp, EmpiricalDistribution) else np.sort(np.asarray(emp))
    r = len(samples)
    if r == 0:
        raise ValueError("empty sample")
    cdf = ndtr(samples)
    i = np.arange(1, r + 1)
    upper = np.max(i / r - cdf)
    lower = np.max(cdf - (i - 1) / r)
    return float(max(upper, lower))


def kolmogorov_band(reps: int, confidence: float = 0.99) -> float:
    """Threshold b with P(KS <= b) = confidence under the exact-normal null."""
    return float(kolmogi(1.0 - confidence)) / math.sqrt(reps)


def convergence_sweep(
    model: ArrayModel, n_grid, reps: int = 10_000, seed: int = 0
) -> ConvergenceReport:
    """KS distance per grid point, largest n last."""
    n_grid = list(n_grid)
    if not n_grid or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
        raise ValueError("n_grid must be nonempty and strictly increasing")
    rows = []
    for n in n_grid:
        emp = simulate_normalized_sums(model, n, reps, seed)
        rows.append({"n": n, "ks_stat": ks_statistic(emp), "reps": reps, "seed": seed})
    monotone = rows[-1]["ks_stat"] <= rows[0]["ks_stat"]
    return ConvergenceReport(model, tuple(rows), monotone, rows[-1]["ks_stat"])


def plot_data(emp: EmpiricalDistribution) -> np.ndarray:
    """Two columns (z, empirical CDF minus Phi) for external plotting."""
    r = emp.reps
    ecdf = np.arange(1, r + 1) / r
    return np.column_stack([emp.samples, ecdf - ndtr(emp.samples)])


def write_plot_data(emp: EmpiricalDistribution, path) -> None:
    np.savetxt(path, plot_data(emp), delimiter=",", header="z,ecdf_minus_phi", comments="")


# ---------------------------------------------------------------------------
# serialization


def report_to_dict(report: ConvergenceReport) -> dict:
    return {
        "model": model_to_config(report.model),
        "grid": list(report.grid),
        "monotone_trend": report.monotone_trend,
        "final_ks": report.final_ks,
    }


def report_to_json(report: ConvergenceReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def report_to_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "ks_stat", "reps", "seed"])
    for row in report.grid:
        writer.writerow([row["n"], repr(row["ks_stat"]), row["reps"], row["seed"]])
    return buf.getvalue()

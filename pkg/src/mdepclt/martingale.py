"""Exact reconstruction of the conditional-expectation martingale.

For a finitely enumerable model row, the filtration generated by
(X_1, ..., X_k) is literally the partition of the outcome table by the
value of that prefix.  Conditional expectations are probability-weighted
cell averages, so every identity of the martingale construction -- the
measurability and independence simplifications, the windowed difference
form, the partial-sum form, the quadratic-variation identity, and the
variance and increment bounds -- can be asserted outcome by outcome.

Large rows (where enumeration is impossible) are handled by a Monte Carlo
path that evaluates the same martingale through per-family closed forms of
the conditional expectations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import (
    ENUMERATION_CAP,
    ArrayModel,
    ContinuousModelError,
    EnumerationTooLargeError,
    OutcomeTable,
    _enumeration_bits,
    _innovation_count,
    _innovations,
    _spike_scale,
    enumerate_outcomes,
    exact_sigma2,
    row_rng,
    truncated_model,
)

#: cap on outcomes * N * (N+1) entries of the stored tensor (~128 MiB)
TRACE_CELL_CAP = 2**24


class HypothesisViolationError(ValueError):
    """The row is not bounded by eps/m_n, so the bound checks do not apply."""


class UnsupportedFamilyError(ValueError):
    """No closed-form conditional expectations for this family."""


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named identity or bound check."""

    name: str
    passed: bool
    max_abs_err: float
    detail: dict | None = None

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return f"{self.name}: {status} (max err {self.max_abs_err:.3e})"


@dataclass
class MartingaleTrace:
    """Per-outcome martingale objects for one enumerable model row.

    Index conventions: W[o, i-1, k] = E(X_i | prefix of length k) on
    outcome o, for i = 1..N and k = 0..N; M[o, k] and dM[o, k-1] follow
    the same k convention; entries with i <= 0 or i > N are identically 0
    and are not stored.
    """

    model: ArrayModel
    n: int
    m: int
    table: OutcomeTable
    W: np.ndarray  # (outcomes, N, N+1)
    M: np.ndarray  # (outcomes, N+1)
    dM: np.ndarray  # (outcomes, N)
    Q: np.ndarray  # (outcomes,)
    q: np.ndarray  # (N,)
    prefix_ids: list  # per k = 0..N: partition cell index of each outcome

    @property
    def sigma2(self) -> float:
        """E S_n^2 computed from the table itself."""
        s = self.table.row_sums()
        return float(self.table.probs @ s**2)


def trace_feasible(model: ArrayModel, n: int) -> bool:
    """Whether build_trace can run: finite support within both the outcome
    cap and the trace tensor cap."""
    try:
        bits = _enumeration_bits(model, n)
    except ContinuousModelError:
        return False
    count = 2**bits
    N = model.length(n)
    return count <= ENUMERATION_CAP and count * N * (N + 1) <= TRACE_CELL_CAP


def build_trace(model: ArrayModel, n: int) -> MartingaleTrace:
    """Enumerate the row and compute W, M, dM, Q, q exactly."""
    table = enumerate_outcomes(model, n)
    rows, probs = table.rows, table.probs
    n_out, N = rows.shape
    if n_out * N * (N + 1) > TRACE_CELL_CAP:
        raise EnumerationTooLargeError(
            f"trace tensor would hold {n_out * N * (N + 1)} cells (cap {TRACE_CELL_CAP})"
        )
    W = np.empty((n_out, N, N + 1))
    prefix_ids = []
    for k in range(N + 1):
        if k == 0:
            inv = np.zeros(n_out, dtype=np.intp)
        else:
            _, inv = np.unique(rows[:, :k], axis=0, return_inverse=True)
            inv = inv.astype(np.intp).ravel()
        ncells = int(inv.max()) + 1
        cellp = np.bincount(inv, weights=probs, minlength=ncells)
        wsum = np.zeros((ncells, N))
        np.add.at(wsum, inv, probs[:, None] * rows)
        W[:, :, k] = wsum[inv] / cellp[inv, None]
        prefix_ids.append(inv)
    M = W.sum(axis=1)
    dM = np.diff(M, axis=1)
    Q = np.einsum("ok,ok->o", dM, dM)
    q = probs @ dM**2
    return MartingaleTrace(model, n, model.m(n), table, W, M, dM, Q, q, prefix_ids)


def _first_violation(err: np.ndarray, names=("outcome", "i", "k")) -> dict:
    flat = int(np.argmax(err))
    idx = np.unravel_index(flat, err.shape)
    detail = dict(zip(names[: err.ndim], (int(v) for v in idx)))
    detail["err"] = float(err[idx])
    return detail


def _result(name: str, err: np.ndarray, tol: float, names=("outcome", "i", "k")) -> CheckResult:
    worst = float(err.max()) if err.size else 0.0
    if worst <= tol:
        return CheckResult(name, True, worst)
    detail = _first_violation(err, names)
    detail["identity"] = name
    return CheckResult(name, False, worst, detail)


def check_structure(trace: MartingaleTrace, tol: float = 1e-10) -> list[CheckResult]:
    """Assert the four structural identities of the martingale, per outcome.

    measurable-past     W[i, k] = X_i for i <= k
    independent-future  W[i, k] = 0 for i > k + m
    window-difference   dM_k = sum_{i=k}^{k+m} (W[i, k] - W[i, k-1])
    partial-sum-form    M_k = sum_{i<=k} X_i + sum_{i=k+1}^{k+m} W[i, k]
    endpoint            M_0 = 0 and M_N = S_n
    """
    rows = trace.table.rows
    n_out, N = rows.shape
    m = trace.m
    W, M, dM = trace.W, trace.M, trace.dM
    results = []

    ii = np.arange(1, N + 1)
    kk = np.arange(0, N + 1)
    past = ii[:, None] <= kk[None, :]  # (N, N+1)
    err = np.abs(W - rows[:, :, None]) * past[None, :, :]
    results.append(_result("measurable-past", err, tol))

    future = ii[:, None] > (kk[None, :] + m)
    err = np.abs(W) * future[None, :, :]
    results.append(_result("independent-future", err, tol))

    recon = np.zeros((n_out, N))
    for k in range(1, N + 1):
        lo = max(k, 1) - 1
        hi = min(k + m, N)
        recon[:, k - 1] = (W[:, lo:hi, k] - W[:, lo:hi, k - 1]).sum(axis=1)
    err = np.abs(dM - recon)
    results.append(_result("window-difference", err, tol, names=("outcome", "k")))

    recon_m = np.zeros((n_out, N + 1))
    csum = np.cumsum(rows, axis=1)
    for k in range(N + 1):
        head = csum[:, k - 1] if k >= 1 else 0.0
        hi = min(k + m, N)
        tail = W[:, k:hi, k].sum(axis=1) if hi > k else 0.0
        recon_m[:, k] = head + tail
    err = np.abs(M - recon_m)
    results.append(_result("partial-sum-form", err, tol, names=("outcome", "k")))

    s = trace.table.row_sums()
    err = np.maximum(np.abs(M[:, 0]), np.abs(M[:, N] - s))
    results.append(_result("endpoint", err, tol, names=("outcome",)))
    return results


def check_bounds(trace: MartingaleTrace, eps: float, tol: float = 1e-12) -> list[CheckResult]:
    """Assert the increment and quadratic-variation bounds.

    Requires the row to satisfy |X_i| <= eps/max(m,1) on every outcome
    (raises HypothesisViolationError otherwise).  Checks, per outcome,
    |W| <= eps/m, |dM_k| <= 4 eps, |T_{i+m} - M_i| <= 2 eps, and globally
    E Q = E S^2 and Var Q <= 48 eps^2 E S^2.  The realized slack ratios
    Var Q/(eps^2 sigma^2) and max|dM|/eps are reported in the details.
    """
    rows = trace.table.rows
    probs = trace.table.probs
    n_out, N = rows.shape
    m_eff = max(trace.m, 1)
    bound = eps / m_eff
    max_x = float(np.abs(rows).max())
    if max_x > bound * (1 + 1e-12):
        raise HypothesisViolationError(
            f"row not bounded by eps/m = {bound:.6g} (max |X| = {max_x:.6g})"
        )
    results = []

    err = np.maximum(np.abs(trace.W) - bound, 0.0)
    results.append(_result("conditional-bound", err, tol))

    dm_max = float(np.abs(trace.dM).max())
    err = np.maximum(np.abs(trace.dM) - 4.0 * eps, 0.0)
    res = _result("increment-bound", err, tol, names=("outcome", "k"))
    results.append(
        CheckResult(res.name, res.passed, res.max_abs_err, {"max_dm_over_eps": dm_max / eps})
        if res.passed
        else res
    )

    T = np.cumsum(rows, axis=1)
    idx = np.minimum(np.arange(1, N + 1) + trace.m, N) - 1
    gap = np.abs(T[:, idx] - trace.M[:, 1 : N + 1])
    err = np.maximum(gap - 2.0 * eps, 0.0)
    results.append(_result("prefix-gap", err, tol, names=("outcome", "i")))

    s2 = trace.sigma2
    eq = float(probs @ trace.Q)
    results.append(_result("mean-quadratic-variation", np.array([abs(eq - s2)]), 1e-10, ("",)))

    var_q = float(probs @ (trace.Q - eq) ** 2)
    cap = 48.0 * eps**2 * s2
    res = _result("variance-bound", np.array([max(var_q - cap, 0.0)]), tol, ("",))
    slack = {"var_q_over_eps2_sigma2": var_q / (eps**2 * s2), "max_dm_over_eps": dm_max / eps}
    results.append(CheckResult(res.name, res.passed, res.max_abs_err, slack))
    return results


def check_tower(trace: MartingaleTrace, tol: float = 1e-12) -> list[CheckResult]:
    """Full conditional-mean-zero test: E[dM_k 1{cell}] = 0 for every
    partition cell of the prefix of length k-1."""
    probs = trace.table.probs
    results = []
    worst = 0.0
    detail = None
    for k in range(1, trace.dM.shape[1] + 1):
        inv = trace.prefix_ids[k - 1]
        cell_sums = np.bincount(inv, weights=probs * trace.dM[:, k - 1])
        w = float(np.abs(cell_sums).max())
        if w > worst:
            worst = w
            detail = {"k": k, "cell": int(np.argmax(np.abs(cell_sums))), "err": w}
    passed = worst <= tol
    results.append(CheckResult("tower-mean-zero", passed, worst, None if passed else detail))
    return results


@dataclass(frozen=True)
class TruncationCheck:
    """Exact verification of the centred truncation split at one (n, eps)."""

    passed: bool
    results: list
    values: dict


def check_truncation(model: ArrayModel, n: int, eps: float, tol: float = 1e-12) -> TruncationCheck:
    """Verify the truncation split on the full enumeration.

    Checks that X' + X'' recovers X exactly, both parts are mean zero,
    both parts keep the banded covariance (m_n-dependence), and the tail
    sum obeys E[(S'')^2] <= (2 m_n + 1) * sum_i E[X_i^2 1{|X_i| > t}].
    """
    table = enumerate_outcomes(model, n)
    split = truncated_model(model, n, eps)
    x_lo, x_hi = split.split_rows(table.rows)
    probs = table.probs
    N = table.rows.shape[1]
    m = model.m(n)
    results = []

    err = np.abs((x_lo + x_hi) - table.rows)
    results.append(_result("split-additivity", err, 0.0, names=("outcome", "i")))

    mean_lo = probs @ x_lo
    mean_hi = probs @ x_hi
    err = np.maximum(np.abs(mean_lo), np.abs(mean_hi))
    results.append(_result("split-centred", err, tol, names=("i",)))

    worst = 0.0
    for part in (x_lo, x_hi):
        mu = probs @ part
        for i in range(N):
            for j in range(i + m + 1, N):
                cov = float(probs @ ((part[:, i] - mu[i]) * (part[:, j] - mu[j])))
                worst = max(worst, abs(cov))
    results.append(_result("split-banded", np.array([worst]), tol, ("",)))

    s_hi = x_hi.sum(axis=1)
    lhs = float(probs @ s_hi**2)
    tail_sum = float(sum(probs @ (table.rows[:, i] ** 2 * (np.abs(table.rows[:, i]) > split.threshold)) for i in range(N)))
    rhs = (2 * m + 1) * tail_sum
    results.append(_result("tail-variance-bound", np.array([max(lhs - rhs, 0.0)]), tol, ("",)))

    values = {
        "threshold": split.threshold,
        "mu_max_abs": float(np.abs(split.mu).max()),
        "tail_second_moment_sum": tail_sum,
        "s_tail_second_moment": lhs,
        "bound": rhs,
    }
    return TruncationCheck(all(r.passed for r in results), results, values)


# ---------------------------------------------------------------------------
# closed-form martingale increments for sampled rows


def increments_from_innovations(model: ArrayModel, n: int, innov: np.ndarray) -> np.ndarray:
    """(dM_1, ..., dM_N) from raw innovations via closed-form conditional
    expectations.  The innovation layout matches sample_row; supported
    families are the ones whose conditional expectations are available
    analytically."""
    fam = model.family
    amp = model.amplitude
    if fam == "iid-baseline":
        return amp * n**-0.5 * innov
    if fam == "two-scale":
        alpha = model.params["alpha"]
        xi = innov[:n]
        eta = innov[n:]
        d = eta[1:] - eta[:-1]
        x = n**-0.5 * xi + n**-alpha * d
        # eta_k is knowable from the prefix once any increment was nonzero;
        # before that the conditional expectation of eta_k vanishes
        seen = np.maximum.accumulate(d != 0.0)
        eta_hat = np.where(seen, eta[1:], 0.0)
        w_next = -(n**-alpha) * eta_hat  # E(X_{k+1} | prefix k), k = 1..n
        w_next[-1] = 0.0  # X_{n+1} := 0
        w_prev = np.concatenate([[0.0], w_next[:-1]])  # E(X_k | prefix k-1)
        return amp * (x + w_next - w_prev)
    if fam == "block-repeat":
        m = model.m(n)
        y = innov.copy()
        y[0] *= _spike_scale(model, n)
        dm = np.zeros(y.size * m)
        dm[::m] = y  # the martingale jumps by Y_j when block j is first seen
        return amp * dm
    if fam == "tail-coupled":
        m = model.m(n)
        dm = np.zeros(n + m)
        dm[:n] = innov[:n]
        dm[n] = m * innov[n]  # all m copies of eta become known at index n+1
        return amp * dm
    raise UnsupportedFamilyError(
        f"no closed-form conditional expectations for family {fam!r}"
    )


def _hh_increments(model: ArrayModel, n: int, rng) -> np.ndarray:
    """One replicate of the increments, drawing innovations in the same
    order as sample_row."""
    kind = "rademacher" if model.family == "two-scale" else model.innovation
    if model.family == "tail-coupled":
        kind = "normal"
    innov = _innovations(rng, kind, _innovation_count(model, n))
    return increments_from_innovations(model, n, innov)


@dataclass(frozen=True)
class HHReport:
    """Empirical behaviour of the martingale-CLT hypotheses over an n-grid.

    rows: per-n dicts with quantiles of max|dM|/sigma, the mean and spread
    of Q/sigma^2, and E[max dM^2]/sigma^2.
    """

    model: ArrayModel
    reps: int
    seed: int
    rows: list
    max_increment_vanishes: bool
    quadratic_variation_concentrates: bool
    max_square_bounded: bool

    @property
    def passed(self) -> bool:
        return (
            self.max_increment_vanishes
            and self.quadratic_variation_concentrates
            and self.max_square_bounded
        )


def check_hh_hypotheses(
    model: ArrayModel,
    n_grid,
    reps: int = 2000,
    seed: int = 0,
    q_tol: float = 0.05,
) -> HHReport:
    """Monte Carlo check of the three martingale-CLT hypotheses.

    For each n: max_k |dM_k|/sigma_n should trend to zero (HH1),
    Q_n/sigma_n^2 should concentrate at 1 (HH2, within q_tol at the
    largest n), and E[max_k dM_k^2]/sigma_n^2 should stay bounded (HH3).
    """
    n_grid = sorted(n_grid)
    rows = []
    for n in n_grid:
        sigma = math.sqrt(exact_sigma2(model, n))
        max_abs = np.empty(reps)
        q_norm = np.empty(reps)
        for r in range(reps):
            dm = _hh_increments(model, n, row_rng(seed, n, r)) / sigma
            max_abs[r] = np.abs(dm).max()
            q_norm[r] = dm @ dm
        rows.append(
            {
                "n": n,
                "max_dm_mean": float(max_abs.mean()),
                "max_dm_q95": float(np.quantile(max_abs, 0.95)),
                "q_mean": float(q_norm.mean()),
                "q_sd": float(q_norm.std(ddof=1)),
                "max_dm2_mean": float((max_abs**2).mean()),
            }
        )
    hh1 = rows[-1]["max_dm_q95"] < rows[0]["max_dm_q95"] or rows[-1]["max_dm_q95"] < 0.05
    hh2 = abs(rows[-1]["q_mean"] - 1.0) <= q_tol
    first, last = rows[0]["max_dm2_mean"], rows[-1]["max_dm2_mean"]
    hh3 = last <= max(first, 1.0)
    return HHReport(model, reps, seed, rows, hh1, hh2, hh3)


# ---------------------------------------------------------------------------
# export


def trace_summary(trace: MartingaleTrace, eps: float | None = None) -> dict:
    """Compact JSON-ready summary of a trace and its checks."""
    structure = check_structure(trace)
    tower = check_tower(trace)
    probs = trace.table.probs
    eq = float(probs @ trace.Q)
    var_q = float(probs @ (trace.Q - eq) ** 2)
    out = {
        "n": trace.n,
        "m": trace.m,
        "outcomes": int(trace.table.rows.shape[0]),
        "sigma2": trace.sigma2,
        "sum_q": float(trace.q.sum()),
        "var_q": var_q,
        "max_abs_dm": float(np.abs(trace.dM).max()),
        "structure_passed": all(r.passed for r in structure),
        "tower_passed": all(r.passed for r in tower),
        "checks": {r.name: r.passed for r in structure + tower},
    }
    if eps is not None:
        bounds = check_bounds(trace, eps)
        out["eps"] = eps
        out["bounds_passed"] = all(r.passed for r in bounds)
        out["checks"].update({r.name: r.passed for r in bounds})
        slack = bounds[-1].detail or {}
        out.update(slack)
    return out


def trace_to_csv(trace: MartingaleTrace, path) -> None:
    """Dump the full W tensor for debugging; refused for rows longer than 8."""
    n_out, N, _ = trace.W.shape
    if N > 8:
        raise ValueError("full tensor dump limited to rows of length <= 8")
    with open(path, "w") as fh:
        fh.write("outcome,prob,i,k,w,m_k,dm_k\n")
        for o in range(n_out):
            p = trace.table.probs[o]
            for i in range(1, N + 1):
                for k in range(N + 1):
                    dm = trace.dM[o, k - 1] if k >= 1 else 0.0
                    fh.write(
                        f"{o},{p!r},{i},{k},{trace.W[o, i - 1, k]!r},"
                        f"{trace.M[o, k]!r},{dm!r}\n"
                    )

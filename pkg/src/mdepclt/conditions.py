"""Sufficient-condition functionals and finite-grid asymptotic verdicts.

Each functional maps (model, n) to a nonnegative scalar whose convergence
to zero (or boundedness) is the hypothesis of one of the limit theorems
under study.  Exact values come from the per-variable laws; a Monte Carlo
fallback exists for laws without closed forms.  Verdicts over an n-grid
are rendered by an ordinary least-squares fit of log(value) against
log(n).

Identifier tokens carried in the ``eq`` field:

==================  ======
lindeberg-classic   tmL
lindeberg-mdep      tmnL
lyapunov(r)         lyap
orey                cond+
rio                 rio
berk components     berki, berkiii, berkiv
romano-wolf         RW1, RW3, RW5, RW6, RWvar
==================  ======
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .models import (
    ArrayModel,
    exact_sigma2,
    marginal_law_groups,
    sample_row,
    window_variance_max,
)

#: representative thresholds standing in for "every eps > 0"
DEFAULT_EPS_GRID = (0.05, 0.1, 0.5, 1.0)
#: default moment orders for the r > 2 conditions
DEFAULT_R_GRID = (3.0, 4.0, 6.0)
#: default geometric n-grid 2^6 .. 2^14
DEFAULT_N_GRID = tuple(2**k for k in range(6, 15))

VERDICTS = ("tends-to-zero", "bounded", "diverges", "inconclusive")


class DegenerateVarianceError(ValueError):
    """sigma_n^2 is zero (or negative) at the requested n."""


class ZeroDependenceError(ValueError):
    """m_n = 0 where the functional requires m_n >= 1."""


class InsufficientGridError(ValueError):
    """Verdicts need at least four strictly increasing grid points."""


@dataclass(frozen=True)
class ConditionValue:
    """One evaluation of a condition functional at one n."""

    condition_id: str
    n: int
    value: float
    method: str = "closed-form"  # closed-form | enumeration | monte-carlo
    mc_std_err: float = 0.0
    eq: str = ""

    def __post_init__(self):
        if self.value < 0 and not math.isnan(self.value):
            raise ValueError(f"condition value must be >= 0, got {self.value}")
        if self.method == "monte-carlo" and not self.mc_std_err > 0:
            raise ValueError("monte-carlo values must carry a positive std err")


@dataclass(frozen=True)
class ConditionReport:
    """A condition series over an n-grid with slope fit and verdict."""

    condition_id: str
    grid: tuple  # of (n, ConditionValue)
    loglog_slope: float
    slope_std_err: float
    verdict: str
    eq: str = ""

    def values(self) -> np.ndarray:
        return np.array([cv.value for _, cv in self.grid])

    def ns(self) -> np.ndarray:
        return np.array([n for n, _ in self.grid])


def _sigma(model: ArrayModel, n: int) -> float:
    s2 = exact_sigma2(model, n)
    if not s2 > 0.0:
        raise DegenerateVarianceError(f"sigma_n^2 = {s2} at n = {n}")
    return math.sqrt(s2)


def _method(model: ArrayModel) -> str:
    return "enumeration" if model.is_discrete else "closed-form"


# ---------------------------------------------------------------------------
# single-variable tail moments


def tail_second_moment(model: ArrayModel, n: int, i: int, t: float) -> float:
    """E[X_{n,i}^2 1{|X_{n,i}| > t}], exact from the entry law."""
    if t < 0:
        raise ValueError("threshold must be >= 0")
    from .models import marginal_law

    return marginal_law(model, n, i).tail_second_moment(t)


def tail_second_moment_mc(
    model: ArrayModel, n: int, i: int, t: float, reps: int = 4000, seed: int = 0
) -> tuple[float, float]:
    """Monte Carlo estimate of the same functional, with its standard error.

    Fallback path for laws without closed forms; also serves as an
    independent cross-check of the exact path.
    """
    vals = np.empty(reps)
    for r in range(reps):
        x = sample_row(model, n, seed=seed, replicate=r).values[i - 1]
        vals[r] = x * x if abs(x) > t else 0.0
    se = float(vals.std(ddof=1) / math.sqrt(reps))
    return float(vals.mean()), max(se, 1e-300)


# ---------------------------------------------------------------------------
# condition functionals


def lindeberg_classic(model: ArrayModel, n: int, eps: float) -> ConditionValue:
    """(1/sigma_n^2) sum_i E[X_i^2 1{|X_i| > eps*sigma_n}]."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    sigma = _sigma(model, n)
    total = sum(
        count * law.tail_second_moment(eps * sigma)
        for count, law in marginal_law_groups(model, n)
    )
    return ConditionValue(
        f"lindeberg-classic(eps={eps:g})", n, total / sigma**2, _method(model), eq="tmL"
    )


def lindeberg_mdep(model: ArrayModel, n: int, eps: float, zero_m: str = "raise") -> ConditionValue:
    """(m_n/sigma_n^2) sum_i E[X_i^2 1{|X_i| > eps*sigma_n/m_n}].

    Rows with m_n = 0 are rejected by default; with zero_m="promote" the
    row is treated as 1-dependent (m_n replaced by 1), which is always a
    valid dependence bound.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    m = model.m(n)
    if m == 0:
        if zero_m != "promote":
            raise ZeroDependenceError(
                "m_n = 0; substitute m_n = 1 (an independent row is 1-dependent)"
            )
        m = 1
    sigma = _sigma(model, n)
    t = eps * sigma / m
    total = sum(
        count * law.tail_second_moment(t) for count, law in marginal_law_groups(model, n)
    )
    return ConditionValue(
        f"lindeberg-mdep(eps={eps:g})", n, m * total / sigma**2, _method(model), eq="tmnL"
    )


def lyapunov_ratio(model: ArrayModel, n: int, r: float) -> ConditionValue:
    """(m_n^(r-1)/sigma_n^r) sum_i E|X_i|^r for fixed r > 2; m_n floored at 1."""
    if not r > 2:
        raise ValueError(f"r must exceed 2, got {r}")
    sigma = _sigma(model, n)
    m = max(model.m(n), 1)
    total = sum(count * law.abs_moment(r) for count, law in marginal_law_groups(model, n))
    return ConditionValue(
        f"lyapunov(r={r:g})", n, m ** (r - 1) * total / sigma**r, _method(model), eq="lyap"
    )


def orey_ratio(model: ArrayModel, n: int) -> ConditionValue:
    """sum_i Var X_i / sigma_n^2 (the classical extra condition)."""
    sigma2 = _sigma(model, n) ** 2
    total = sum(count * law.var() for count, law in marginal_law_groups(model, n))
    return ConditionValue("orey", n, total / sigma2, _method(model), eq="cond+")


def rio_functional(model: ArrayModel, n: int) -> ConditionValue:
    """(m_n/sigma_n^2) sum_i E[X_i^2 min(m_n|X_i|/sigma_n, 1)]; m_n floored at 1."""
    sigma = _sigma(model, n)
    m = max(model.m(n), 1)
    total = sum(
        count * law.capped_second_moment(m / sigma)
        for count, law in marginal_law_groups(model, n)
    )
    return ConditionValue("rio", n, m * total / sigma**2, _method(model), eq="rio")


def berk_check(model: ArrayModel, n: int, delta: float) -> list[ConditionValue]:
    """The three quantities entering the bounded-moment block criterion.

    Returned in order: sup_i E|X_i|^(2+delta) (must stay bounded),
    sigma_n^2/N_n (must converge to a positive constant), and
    m_n^(2+2/delta)/N_n (must vanish).
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    sigma2 = _sigma(model, n) ** 2
    N = model.length(n)
    m = max(model.m(n), 1)
    sup_mom = max(law.abs_moment(2 + delta) for _, law in marginal_law_groups(model, n))
    meth = _method(model)
    tag = f"berk(delta={delta:g})"
    return [
        ConditionValue(f"{tag}:moment", n, sup_mom, meth, eq="berki"),
        ConditionValue(f"{tag}:variance-ratio", n, sigma2 / N, meth, eq="berkiii"),
        ConditionValue(f"{tag}:m-growth", n, m ** (2 + 2 / delta) / N, meth, eq="berkiv"),
    ]


def sup_moment_preset(model: ArrayModel, delta: float):
    """Delta_n preset: the exact supremum of E|X_i|^(2+delta) over the row."""

    def delta_n(n: int) -> float:
        return max(law.abs_moment(2 + delta) for _, law in marginal_law_groups(model, n))

    return delta_n


def variance_ratio_preset(model: ArrayModel, gamma: float):
    """L_n preset: sigma_n^2/(N_n m_n^gamma), the largest admissible choice."""

    def l_n(n: int) -> float:
        return exact_sigma2(model, n) / (model.length(n) * max(model.m(n), 1) ** gamma)

    return l_n


def romano_wolf_check(
    model: ArrayModel,
    n: int,
    delta: float,
    gamma: float,
    Delta_n=None,
    L_n=None,
) -> list[ConditionValue]:
    """Evaluate the growing-m block-criterion inequalities at one n.

    Components (all "holds" when bounded, except RW6 which must vanish):

    RW1    sup_i E|X_i|^(2+delta) / Delta_n
    RW3    L_n * N_n * m_n^gamma / sigma_n^2           (<= 1 required)
    RW5    Delta_n / L_n^((2+delta)/2)
    RW6    m_n^(1+(1-gamma)(1+2/delta)) / N_n          (-> 0 required)
    RWvar  max_a Var(window of length m_n) * N_n * m_n^gamma
           / (m_n^(1+gamma) * sigma_n^2)

    RWvar combines the criterion's window-variance growth bound with RW3;
    it is the component that rules out rows in which one shared variable
    occupies a whole window, no matter how Delta_n and L_n are chosen.
    Delta_n and L_n are caller-supplied maps n -> value; the defaults are
    sup_moment_preset and variance_ratio_preset.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if not -1.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [-1, 1), got {gamma}")
    if Delta_n is None:
        Delta_n = sup_moment_preset(model, delta)
    if L_n is None:
        L_n = variance_ratio_preset(model, gamma)
    sigma2 = _sigma(model, n) ** 2
    N = model.length(n)
    m = max(model.m(n), 1)
    dn = float(Delta_n(n)) if callable(Delta_n) else float(Delta_n)
    ln = float(L_n(n)) if callable(L_n) else float(L_n)
    if not (dn > 0 and ln > 0):
        raise ValueError("Delta_n and L_n must be positive")
    sup_mom = max(law.abs_moment(2 + delta) for _, law in marginal_law_groups(model, n))
    wvar = window_variance_max(model, n, m)
    meth = _method(model)
    tag = f"romano-wolf(delta={delta:g},gamma={gamma:g})"
    return [
        ConditionValue(f"{tag}:RW1", n, sup_mom / dn, meth, eq="RW1"),
        ConditionValue(f"{tag}:RW3", n, ln * N * m**gamma / sigma2, meth, eq="RW3"),
        ConditionValue(f"{tag}:RW5", n, dn / ln ** ((2 + delta) / 2), meth, eq="RW5"),
        ConditionValue(
            f"{tag}:RW6", n, m ** (1 + (1 - gamma) * (1 + 2 / delta)) / N, meth, eq="RW6"
        ),
        ConditionValue(
            f"{tag}:window-variance",
            n,
            wvar * N * m**gamma / (m ** (1 + gamma) * sigma2),
            meth,
            eq="RWvar",
        ),
    ]


# ---------------------------------------------------------------------------
# grid evaluation and verdicts


def _ols_loglog(ns: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    x = np.log(ns.astype(float))
    y = np.log(values)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ yc) / sxx
    resid = yc - slope * xc
    dof = len(x) - 2
    se = math.sqrt(float(resid @ resid) / dof / sxx) if dof > 0 else 0.0
    return slope, se


def asymptotic_verdict(
    series, *, slope_atol: float = 0.02, stable_se: float = 0.05
) -> ConditionReport:
    """Fit log(value) against log(n) and classify the trend.

    The verdict margin is max(2 * slope std err, slope_atol): a slope below
    minus the margin reads "tends-to-zero", above it "diverges", otherwise
    "bounded" when the fit is stable (2 se <= stable_se) and
    "inconclusive" when it is not.  Any exact zero in the series
    short-circuits to "tends-to-zero".
    """
    series = list(series)
    if len(series) < 4:
        raise InsufficientGridError(f"need >= 4 grid points, got {len(series)}")
    ns = np.array([cv.n for cv in series])
    if not np.all(np.diff(ns) > 0):
        raise InsufficientGridError("grid must be strictly increasing in n")
    values = np.array([cv.value for cv in series])
    if np.any(values < 0):
        raise ValueError("condition values must be >= 0")
    cid = series[0].condition_id
    eq = series[0].eq
    grid = tuple((cv.n, cv) for cv in series)
    if np.any(values == 0.0):
        return ConditionReport(cid, grid, float("nan"), float("nan"), "tends-to-zero", eq)
    slope, se = _ols_loglog(ns, values)
    margin = max(2.0 * se, slope_atol)
    if slope < -margin:
        verdict = "tends-to-zero"
    elif slope > margin:
        verdict = "diverges"
    elif 2.0 * se <= stable_se:
        verdict = "bounded"
    else:
        verdict = "inconclusive"
    return ConditionReport(cid, grid, slope, se, verdict, eq)


def condition_series(func, model: ArrayModel, n_grid, **kwargs) -> list[ConditionValue]:
    """Evaluate a scalar condition functional over an n-grid."""
    return [func(model, n, **kwargs) for n in n_grid]


def condition_report(func, model: ArrayModel, n_grid, **kwargs) -> ConditionReport:
    """Series plus verdict in one call."""
    return asymptotic_verdict(condition_series(func, model, n_grid, **kwargs))


def component_reports(func, model: ArrayModel, n_grid, **kwargs) -> dict[str, ConditionReport]:
    """Verdicts for vector-valued checks keyed by component id."""
    per_n = [func(model, n, **kwargs) for n in n_grid]
    out: dict[str, ConditionReport] = {}
    for idx in range(len(per_n[0])):
        series = [row[idx] for row in per_n]
        out[series[0].condition_id] = asymptotic_verdict(series)
    return out


def berk_holds(reports: dict[str, ConditionReport]) -> bool:
    """All three block-criterion components behave as required."""
    by_eq = {rep.eq: rep for rep in reports.values()}
    return (
        by_eq["berki"].verdict in ("bounded", "tends-to-zero")
        and by_eq["berkiii"].verdict == "bounded"
        and by_eq["berkiv"].verdict == "tends-to-zero"
    )


def romano_wolf_holds(reports: dict[str, ConditionReport]) -> bool:
    """All five components behave as required (RW6 vanishing, rest bounded)."""
    by_eq = {rep.eq: rep for rep in reports.values()}
    ok_bounded = ("bounded", "tends-to-zero")
    if by_eq["RW6"].verdict != "tends-to-zero":
        return False
    if any(by_eq[tag].verdict not in ok_bounded for tag in ("RW1", "RW5", "RWvar")):
        return False
    rw3 = by_eq["RW3"]
    return rw3.verdict in ok_bounded and bool(np.all(rw3.values() <= 1.0 + 1e-9))


# ---------------------------------------------------------------------------
# serialization


def value_to_dict(cv: ConditionValue) -> dict:
    return {
        "condition_id": cv.condition_id,
        "n": cv.n,
        "value": cv.value,
        "method": cv.method,
        "mc_std_err": cv.mc_std_err,
        "eq": cv.eq,
    }


def report_to_dict(report: ConditionReport) -> dict:
    return {
        "condition_id": report.condition_id,
        "eq": report.eq,
        "grid": [value_to_dict(cv) for _, cv in report.grid],
        "loglog_slope": report.loglog_slope,
        "slope_std_err": report.slope_std_err,
        "verdict": report.verdict,
    }


def report_to_json(report: ConditionReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True, allow_nan=True) + "\n"


def report_to_csv(report: ConditionReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["condition_id", "eq", "n", "value", "method", "mc_std_err"])
    for n, cv in report.grid:
        writer.writerow([cv.condition_id, cv.eq, n, repr(cv.value), cv.method, repr(cv.mc_std_err)])
    return buf.getvalue()

"""Catalogue of m_n-dependent triangular-array models.

A model fixes, for every row index n, the row length N_n, the dependence
range m_n, and the joint law of the row (X_n1, ..., X_nNn).  All rows are
centred and the row-sum variance is available in closed form.  Rademacher
built families additionally support exhaustive outcome enumeration, which
is the exact substrate used by the martingale oracle.

Families
--------
iid-baseline    independent entries, scale 1/sqrt(n); m_n = 0
two-scale       xi_i/sqrt(n) + (eta_i - eta_{i-1})/n^alpha with Rademacher
                xi, eta; m_n = 1
block-repeat    each of J innovations repeated m_n times and divided by
                m_n; optionally one block carries a fixed fraction of the
                total variance (Lindeberg-violating control)
tail-coupled    n independent standard normals followed by m_n copies of
                one extra normal; m_n should grow like o(sqrt(n))
moving-average  MA(q) filter of independent innovations, scale 1/sqrt(n);
                m_n = q (generic positive control)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

from .laws import DiscreteLaw, GaussianLaw, rademacher_law, sign_combination_law

FAMILIES = ("iid-baseline", "two-scale", "block-repeat", "tail-coupled", "moving-average")
INNOVATIONS = ("rademacher", "normal")

#: hard cap on exhaustively enumerated outcomes
ENUMERATION_CAP = 2**22

# fixed second word of the Philox key; separates this stream universe from
# other Philox users with small integer seeds
_KEY_SALT = np.uint64(0x9E3779B97F4A7C15)


class InvalidParameterError(ValueError):
    """Model parameters outside their admissible range."""


class EnumerationTooLargeError(ValueError):
    """Exhaustive enumeration would exceed ENUMERATION_CAP outcomes."""


class ContinuousModelError(ValueError):
    """Requested exact enumeration of a model with continuous marginals."""


@dataclass(frozen=True)
class Schedule:
    """Integer-valued map n -> value, serializable as (kind, param).

    kinds: "constant" (param = value), "power" (max(1, floor(n**param))),
    "log" (max(1, floor(ln n))).
    """

    kind: str
    param: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "power", "log"):
            raise InvalidParameterError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "constant" and (self.param < 0 or self.param != int(self.param)):
            raise InvalidParameterError("constant schedule needs an integer value >= 0")
        if self.kind == "power" and not 0.0 < self.param < 1.0:
            raise InvalidParameterError("power schedule exponent must lie in (0, 1)")

    def __call__(self, n: int) -> int:
        if self.kind == "constant":
            return int(self.param)
        if self.kind == "power":
            return max(1, int(math.floor(n**self.param)))
        return max(1, int(math.floor(math.log(max(n, 2)))))

    def describe(self) -> str:
        if self.kind == "constant":
            return f"m={int(self.param)}"
        if self.kind == "power":
            return f"m=floor(n^{self.param:g})"
        return "m=floor(ln n)"


@dataclass(frozen=True)
class ArrayModel:
    """An immutable triangular-array model: family tag plus parameters."""

    family: str
    params: dict = field(default_factory=dict)

    def m(self, n: int) -> int:
        """Dependence range of row n."""
        fam = self.family
        if fam == "iid-baseline":
            return 0
        if fam == "two-scale":
            return 1
        if fam == "moving-average":
            return len(self.params["coeffs"]) - 1
        return self.params["m_schedule"](n)

    def length(self, n: int) -> int:
        """Row length N_n."""
        fam = self.family
        if fam == "block-repeat":
            m = self.m(n)
            return max(1, n // m) * m
        if fam == "tail-coupled":
            return n + self.m(n)
        return n

    def blocks(self, n: int) -> int:
        if self.family != "block-repeat":
            raise InvalidParameterError("blocks() only applies to block-repeat")
        return max(1, n // self.m(n))

    @property
    def amplitude(self) -> float:
        return self.params.get("amplitude", 1.0)

    @property
    def innovation(self) -> str:
        return self.params.get("innovation", "rademacher")

    @property
    def is_discrete(self) -> bool:
        """True when every row has finite support (Rademacher built)."""
        if self.family == "two-scale":
            return True
        if self.family == "tail-coupled":
            return False
        return self.innovation == "rademacher"

    def scaled(self, c: float) -> "ArrayModel":
        """The model with every entry multiplied by c > 0."""
        if not c > 0:
            raise InvalidParameterError("scaling factor must be positive")
        params = dict(self.params)
        params["amplitude"] = self.amplitude * c
        return ArrayModel(self.family, params)

    def describe(self) -> str:
        p = self.params
        fam = self.family
        if fam == "two-scale":
            return f"two-scale(alpha={p['alpha']:g})"
        if fam == "block-repeat":
            sched = p["m_schedule"].describe()
            extra = f", spike={p['spike_frac']:g}" if p.get("spike_frac") else ""
            return f"block-repeat({p['innovation']}, {sched}{extra})"
        if fam == "tail-coupled":
            return f"tail-coupled({p['m_schedule'].describe()})"
        if fam == "moving-average":
            return f"moving-average(coeffs={tuple(p['coeffs'])}, {p['innovation']})"
        return f"iid-baseline({p['innovation']})"


@dataclass(frozen=True)
class RowSample:
    """One sampled row of the array."""

    n: int
    values: np.ndarray


@dataclass(frozen=True)
class OutcomeTable:
    """Exhaustive list of (row, probability) pairs for one model row."""

    n: int
    rows: np.ndarray  # shape (n_outcomes, N_n)
    probs: np.ndarray  # shape (n_outcomes,)

    def row_sums(self) -> np.ndarray:
        return self.rows.sum(axis=1)

    def mean_sum(self) -> float:
        return float(self.probs @ self.row_sums())

    def var_sum(self) -> float:
        s = self.row_sums()
        mu = self.probs @ s
        return float(self.probs @ (s - mu) ** 2)

    def mean_entry(self, i: int) -> float:
        return float(self.probs @ self.rows[:, i - 1])

    def cov_entries(self, i: int, j: int) -> float:
        xi = self.rows[:, i - 1]
        xj = self.rows[:, j - 1]
        mi = self.probs @ xi
        mj = self.probs @ xj
        return float(self.probs @ ((xi - mi) * (xj - mj)))

    def to_csv(self, path) -> None:
        n_cols = self.rows.shape[1]
        header = "prob," + ",".join(f"x_{i}" for i in range(1, n_cols + 1))
        data = np.column_stack([self.probs, self.rows])
        np.savetxt(path, data, delimiter=",", header=header, comments="")


@dataclass(frozen=True)
class TruncationSplit:
    """Per-variable truncation X = X' + X'' at threshold eps*sigma_n/m_n.

    X'  = X 1{|X| <= t} - mu   (bounded, centred part)
    X'' = X 1{|X| >  t} + mu   (tail part)
    with mu_i = E[X_i 1{|X_i| <= t}], so both arrays are mean zero and the
    sum recovers X exactly on every outcome.
    """

    model: ArrayModel
    n: int
    eps: float
    threshold: float
    mu: np.ndarray

    def split_rows(self, rows: np.ndarray):
        rows = np.atleast_2d(rows)
        below = np.abs(rows) <= self.threshold
        x_lo = rows * below - self.mu[None, :]
        x_hi = rows * ~below + self.mu[None, :]
        return x_lo, x_hi


# ---------------------------------------------------------------------------
# construction


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidParameterError(msg)


def _as_schedule(value) -> Schedule:
    if isinstance(value, Schedule):
        return value
    if isinstance(value, int):
        return Schedule("constant", value)
    raise InvalidParameterError(f"expected Schedule or int, got {value!r}")


def build_model(family: str, **params) -> ArrayModel:
    """Validate parameters and build an ArrayModel.

    Family-specific parameters (all optional unless noted):

    iid-baseline    innovation
    two-scale       alpha (required, in (0, 1/2))
    block-repeat    m_schedule (int or Schedule, >= 1), innovation,
                    spike_frac in [0, 1) routing that fraction of the row
                    variance into the first block
    tail-coupled    m_schedule (int or Schedule, >= 1)
    moving-average  coeffs (tuple of taps, c_0 != 0), innovation

    Every family accepts amplitude > 0 multiplying all entries.
    """
    if family not in FAMILIES:
        raise InvalidParameterError(f"unknown family {family!r}")
    p = dict(params)
    amplitude = p.pop("amplitude", 1.0)
    _require(amplitude > 0, "amplitude must be positive")
    out: dict = {"amplitude": amplitude}

    if family == "iid-baseline":
        innovation = p.pop("innovation", "rademacher")
        _require(innovation in INNOVATIONS, f"unknown innovation {innovation!r}")
        out["innovation"] = innovation
    elif family == "two-scale":
        _require("alpha" in p, "two-scale requires alpha")
        alpha = float(p.pop("alpha"))
        _require(0.0 < alpha < 0.5, f"alpha must lie in (0, 1/2), got {alpha}")
        out["alpha"] = alpha
    elif family == "block-repeat":
        sched = _as_schedule(p.pop("m_schedule", 2))
        _require(sched.kind != "constant" or sched.param >= 1, "block-repeat needs m_n >= 1")
        innovation = p.pop("innovation", "rademacher")
        _require(innovation in INNOVATIONS, f"unknown innovation {innovation!r}")
        spike = float(p.pop("spike_frac", 0.0))
        _require(0.0 <= spike < 1.0, "spike_frac must lie in [0, 1)")
        out.update(m_schedule=sched, innovation=innovation, spike_frac=spike)
    elif family == "tail-coupled":
        sched = _as_schedule(p.pop("m_schedule", Schedule("power", 0.25)))
        _require(sched.kind != "constant" or sched.param >= 1, "tail-coupled needs m_n >= 1")
        out["m_schedule"] = sched
    else:  # moving-average
        coeffs = tuple(float(c) for c in p.pop("coeffs", (1.0, 0.5)))
        _require(len(coeffs) >= 1 and coeffs[0] != 0.0, "coeffs must start with c_0 != 0")
        innovation = p.pop("innovation", "rademacher")
        _require(innovation in INNOVATIONS, f"unknown innovation {innovation!r}")
        out.update(coeffs=coeffs, innovation=innovation)

    _require(not p, f"unknown parameters for {family}: {sorted(p)}")
    return ArrayModel(family, out)


def _check_n(model: ArrayModel, n: int) -> None:
    if n < 1:
        raise InvalidParameterError(f"row index n must be >= 1, got {n}")
    if model.family == "block-repeat":
        spike = model.params.get("spike_frac", 0.0)
        if spike > 0 and model.blocks(n) < 2:
            raise InvalidParameterError("spike block-repeat needs at least 2 blocks")


def _spike_scale(model: ArrayModel, n: int) -> float:
    """Innovation scale of block 1 so it carries spike_frac of Var S_n."""
    p = model.params.get("spike_frac", 0.0)
    if p <= 0.0:
        return 1.0
    J = model.blocks(n)
    return math.sqrt(p * (J - 1) / (1.0 - p))


# ---------------------------------------------------------------------------
# sampling


def row_rng(seed: int, n: int, replicate: int) -> Generator:
    """Counter-based stream for one (seed, n, replicate) cell.

    Philox keyed by the seed with (n, replicate) placed in the high counter
    words: streams never overlap and are independent of worker scheduling.
    """
    key = np.array([np.uint64(seed), _KEY_SALT], dtype=np.uint64)
    counter = np.array([0, 0, np.uint64(n), np.uint64(replicate)], dtype=np.uint64)
    return Generator(Philox(key=key, counter=counter))


def _rademacher(rng: Generator, size: int) -> np.ndarray:
    return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0


def _innovations(rng: Generator, kind: str, size: int) -> np.ndarray:
    if kind == "rademacher":
        return _rademacher(rng, size)
    return rng.standard_normal(size)


def _row_from_innovations(model: ArrayModel, n: int, innov: np.ndarray) -> np.ndarray:
    """Map raw innovations (array or matrix with trailing axis) to row values."""
    fam = model.family
    amp = model.amplitude
    if fam == "iid-baseline":
        return amp * n**-0.5 * innov
    if fam == "two-scale":
        alpha = model.params["alpha"]
        xi = innov[..., :n]
        eta = innov[..., n:]
        return amp * (n**-0.5 * xi + n**-alpha * (eta[..., 1:] - eta[..., :-1]))
    if fam == "block-repeat":
        m = model.m(n)
        y = innov.copy()
        y[..., 0] *= _spike_scale(model, n)
        return amp / m * np.repeat(y, m, axis=-1)
    if fam == "tail-coupled":
        m = model.m(n)
        head = innov[..., :n]
        tail = np.repeat(innov[..., n:], m, axis=-1)
        return amp * np.concatenate([head, tail], axis=-1)
    # moving-average: innov carries zeta_{1-q}..zeta_N along the last axis
    coeffs = model.params["coeffs"]
    q = len(coeffs) - 1
    N = model.length(n)
    row = np.zeros(innov.shape[:-1] + (N,))
    for lag, c in enumerate(coeffs):
        row += c * innov[..., q - lag : q - lag + N]
    return amp * n**-0.5 * row


def _innovation_count(model: ArrayModel, n: int) -> int:
    fam = model.family
    if fam == "iid-baseline":
        return n
    if fam == "two-scale":
        return 2 * n + 1
    if fam == "block-repeat":
        return model.blocks(n)
    if fam == "tail-coupled":
        return n + 1
    return model.length(n) + len(model.params["coeffs"]) - 1


def sample_row(model: ArrayModel, n: int, seed: int = 0, replicate: int = 0) -> RowSample:
    """Draw one full row from the model law, deterministically from
    (seed, n, replicate)."""
    _check_n(model, n)
    rng = row_rng(seed, n, replicate)
    kind = "rademacher" if model.family == "two-scale" else model.innovation
    if model.family == "tail-coupled":
        kind = "normal"
    innov = _innovations(rng, kind, _innovation_count(model, n))
    return RowSample(n, _row_from_innovations(model, n, innov))


# ---------------------------------------------------------------------------
# exact second-moment structure


def exact_sigma2(model: ArrayModel, n: int) -> float:
    """Var S_n in closed form."""
    _check_n(model, n)
    amp2 = model.amplitude**2
    fam = model.family
    if fam == "iid-baseline":
        return amp2 * model.length(n) / n
    if fam == "two-scale":
        alpha = model.params["alpha"]
        return amp2 * (1.0 + 2.0 * n ** (-2.0 * alpha))
    if fam == "block-repeat":
        J = model.blocks(n)
        return amp2 * (J - 1 + _spike_scale(model, n) ** 2)
    if fam == "tail-coupled":
        m = model.m(n)
        return amp2 * (n + m**2)
    weights = _ma_weights(model, n)
    return amp2 / n * float(weights @ weights)


def _ma_weights(model: ArrayModel, n: int) -> np.ndarray:
    """Coefficient sums w_j = sum of taps hitting innovation j in S_n."""
    coeffs = np.asarray(model.params["coeffs"])
    q = coeffs.size - 1
    N = model.length(n)
    w = np.zeros(N + q)
    for lag, c in enumerate(coeffs):
        w[q - lag : q - lag + N] += c
    return w


def cov_band(model: ArrayModel, n: int, d: int) -> np.ndarray:
    """Vector of Cov(X_{n,i}, X_{n,i+d}) for i = 1..N_n-d, exact."""
    _check_n(model, n)
    if d < 0:
        raise IndexError("lag d must be >= 0")
    N = model.length(n)
    if d >= N:
        return np.zeros(0)
    amp2 = model.amplitude**2
    fam = model.family
    size = N - d
    if fam == "iid-baseline":
        return np.full(size, amp2 / n) if d == 0 else np.zeros(size)
    if fam == "two-scale":
        alpha = model.params["alpha"]
        if d == 0:
            return np.full(size, amp2 * (1.0 / n + 2.0 * n ** (-2.0 * alpha)))
        if d == 1:
            return np.full(size, -amp2 * n ** (-2.0 * alpha))
        return np.zeros(size)
    if fam == "block-repeat":
        m = model.m(n)
        i = np.arange(1, size + 1)
        same_block = (i - 1) // m == (i + d - 1) // m
        var_block = np.where((i - 1) // m == 0, _spike_scale(model, n) ** 2, 1.0)
        return amp2 / m**2 * same_block * var_block
    if fam == "tail-coupled":
        i = np.arange(1, size + 1)
        if d == 0:
            return np.full(size, amp2)
        return amp2 * (i > n).astype(float)
    coeffs = np.asarray(model.params["coeffs"])
    q = coeffs.size - 1
    if d > q:
        return np.zeros(size)
    acf = float(coeffs[: q + 1 - d] @ coeffs[d:])
    return np.full(size, amp2 / n * acf)


def exact_cov(model: ArrayModel, n: int, i: int, j: int) -> float:
    """Cov(X_{n,i}, X_{n,j}); zero whenever |i - j| > m_n."""
    N = model.length(n)
    if not (1 <= i <= N and 1 <= j <= N):
        raise IndexError(f"indices must lie in 1..{N}, got ({i}, {j})")
    d = abs(i - j)
    band = cov_band(model, n, d)
    return float(band[min(i, j) - 1])


def marginal_law(model: ArrayModel, n: int, i: int):
    """Exact law of the single entry X_{n,i}."""
    N = model.length(n)
    if not 1 <= i <= N:
        raise IndexError(f"index must lie in 1..{N}, got {i}")
    amp = model.amplitude
    fam = model.family
    if fam == "iid-baseline":
        a = amp / math.sqrt(n)
        return rademacher_law(a) if model.innovation == "rademacher" else GaussianLaw(a)
    if fam == "two-scale":
        alpha = model.params["alpha"]
        # six-point support, written with the same expression tree as the
        # sampled rows so the atoms agree bit for bit
        vals, probs = [], []
        for s, ps in ((-1.0, 0.5), (1.0, 0.5)):
            for d, pd in ((-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)):
                vals.append(amp * (n**-0.5 * s + n**-alpha * d))
                probs.append(ps * pd)
        return DiscreteLaw.from_points(vals, probs)
    if fam == "block-repeat":
        m = model.m(n)
        block = (i - 1) // m + 1
        c = _spike_scale(model, n) if block == 1 else 1.0
        a = amp * c / m
        return rademacher_law(a) if model.innovation == "rademacher" else GaussianLaw(a)
    if fam == "tail-coupled":
        return GaussianLaw(amp)
    coeffs = np.asarray(model.params["coeffs"])
    scale = amp / math.sqrt(n)
    if model.innovation == "rademacher":
        return sign_combination_law(scale * coeffs)
    return GaussianLaw(scale * math.sqrt(float(coeffs @ coeffs)))


def marginal_law_groups(model: ArrayModel, n: int) -> list:
    """Distinct entry laws of row n with multiplicities [(count, law), ...].

    Every catalogued family has at most two distinct marginals per row, so
    condition functionals sum over groups instead of over all N_n indices.
    """
    _check_n(model, n)
    N = model.length(n)
    if model.family == "block-repeat" and model.params.get("spike_frac", 0.0) > 0:
        m = model.m(n)
        return [(m, marginal_law(model, n, 1)), (N - m, marginal_law(model, n, m + 1))]
    return [(N, marginal_law(model, n, 1))]


def _sliding_sum(x: np.ndarray, width: int) -> np.ndarray:
    c = np.concatenate([[0.0], np.cumsum(x)])
    return c[width:] - c[:-width]


def window_variance_max_generic(model: ArrayModel, n: int, k: int) -> float:
    """max over a of Var(X_{n,a} + ... + X_{n,a+k-1}) via the covariance
    band; exact for every model but O(N_n * m_n) in time."""
    _check_n(model, n)
    N = model.length(n)
    k = min(max(k, 1), N)
    total = _sliding_sum(cov_band(model, n, 0), k)
    for d in range(1, min(model.m(n), k - 1) + 1):
        total = total + 2.0 * _sliding_sum(cov_band(model, n, d), k - d)
    return float(total.max())


def window_variance_max(model: ArrayModel, n: int, k: int) -> float:
    """max over a of Var(X_{n,a} + ... + X_{n,a+k-1}), exact.

    Family closed forms where available (verified against the generic band
    computation in the test suite), banded fallback otherwise.
    """
    _check_n(model, n)
    N = model.length(n)
    k = min(max(k, 1), N)
    amp2 = model.amplitude**2
    fam = model.family
    mn = model.m(n)
    if fam == "iid-baseline":
        return k * amp2 / n
    if fam == "two-scale":
        # stationary with one off-diagonal lag: k*g0 + 2(k-1)*g1
        alpha = model.params["alpha"]
        g0 = 1.0 / n + 2.0 * n ** (-2.0 * alpha)
        g1 = -(n ** (-2.0 * alpha))
        return amp2 * (k * g0 + 2.0 * (k - 1) * g1)
    if fam == "moving-average":
        coeffs = np.asarray(model.params["coeffs"])
        q = coeffs.size - 1
        total = k * float(coeffs @ coeffs)
        for d in range(1, min(q, k - 1) + 1):
            total += 2.0 * (k - d) * float(coeffs[: q + 1 - d] @ coeffs[d:])
        return amp2 / n * total
    if fam == "block-repeat" and k <= mn:
        # the best window sits inside the highest-variance block
        c = max(_spike_scale(model, n), 1.0)
        return amp2 * (c * k / mn) ** 2
    if fam == "tail-coupled" and k <= mn:
        # a window of k copies of the shared tail variable has variance k^2
        return amp2 * k * k
    return window_variance_max_generic(model, n, k)


# ---------------------------------------------------------------------------
# exact enumeration


def _enumeration_bits(model: ArrayModel, n: int) -> int:
    if not model.is_discrete:
        raise ContinuousModelError(
            f"{model.describe()} has continuous marginals; enumeration undefined"
        )
    return _innovation_count(model, n)


def enumerate_outcomes(model: ArrayModel, n: int, cap: int = ENUMERATION_CAP) -> OutcomeTable:
    """All outcomes of a finitely supported model row with probabilities."""
    _check_n(model, n)
    bits = _enumeration_bits(model, n)
    count = 2**bits
    if count > cap:
        raise EnumerationTooLargeError(
            f"{model.describe()} at n={n} needs 2^{bits} outcomes (cap {cap})"
        )
    idx = np.arange(count, dtype=np.uint64)
    signs = ((idx[:, None] >> np.arange(bits, dtype=np.uint64)) & 1).astype(float)
    signs = signs * 2.0 - 1.0
    rows = _row_from_innovations(model, n, signs)
    probs = np.full(count, 2.0**-bits)
    return OutcomeTable(n, rows, probs)


# ---------------------------------------------------------------------------
# truncation


def truncated_model(model: ArrayModel, n: int, eps: float) -> TruncationSplit:
    """Split each entry at threshold eps*sigma_n/max(m_n,1) and re-centre."""
    if not eps > 0:
        raise InvalidParameterError("eps must be positive")
    _check_n(model, n)
    sigma = math.sqrt(exact_sigma2(model, n))
    m_eff = max(model.m(n), 1)
    t = eps * sigma / m_eff
    N = model.length(n)
    mu = np.array([marginal_law(model, n, i).truncated_mean(t) for i in range(1, N + 1)])
    return TruncationSplit(model, n, eps, t, mu)


# ---------------------------------------------------------------------------
# config round-trip


def model_to_config(model: ArrayModel) -> dict:
    """Flat key-value form of a model, suitable for a JSON config file."""
    cfg: dict = {"family": model.family}
    p = model.params
    if model.amplitude != 1.0:
        cfg["amplitude"] = model.amplitude
    if model.family == "two-scale":
        cfg["alpha"] = p["alpha"]
    if p.get("innovation", "rademacher") != "rademacher":
        cfg["innovation"] = p["innovation"]
    if "m_schedule" in p:
        sched = p["m_schedule"]
        if sched.kind == "constant":
            cfg["m"] = int(sched.param)
        elif sched.kind == "power":
            cfg["beta"] = sched.param
        else:
            cfg["m_kind"] = "log"
    if p.get("spike_frac"):
        cfg["spike_frac"] = p["spike_frac"]
    if "coeffs" in p:
        cfg["coeffs"] = list(p["coeffs"])
    return cfg


def model_from_config(cfg: dict) -> ArrayModel:
    """Inverse of model_to_config; unknown keys are rejected."""
    cfg = dict(cfg)
    try:
        family = cfg.pop("family")
    except KeyError:
        raise InvalidParameterError("config is missing the 'family' key") from None
    params: dict = {}
    if "amplitude" in cfg:
        params["amplitude"] = float(cfg.pop("amplitude"))
    if "alpha" in cfg:
        params["alpha"] = float(cfg.pop("alpha"))
    if "innovation" in cfg:
        params["innovation"] = cfg.pop("innovation")
    if "coeffs" in cfg:
        params["coeffs"] = tuple(cfg.pop("coeffs"))
    if "spike_frac" in cfg:
        params["spike_frac"] = float(cfg.pop("spike_frac"))
    sched = None
    if "m" in cfg:
        sched = Schedule("constant", int(cfg.pop("m")))
    if "beta" in cfg:
        sched = Schedule("power", float(cfg.pop("beta")))
    if cfg.pop("m_kind", None) == "log":
        sched = Schedule("log")
    if sched is not None:
        params["m_schedule"] = sched
    if cfg:
        raise InvalidParameterError(f"unknown config keys: {sorted(cfg)}")
    return build_model(family, **params)

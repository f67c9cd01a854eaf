"""Exact single-variable laws and their truncated-moment functionals.

Every catalogued array family has per-variable marginals that are either
finitely supported (products of signs) or centred Gaussian.  Both kinds
expose the same small set of moment functionals, computed in closed form,
so condition evaluations upstream never need quadrature or sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _phi(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT_2PI


def normal_tail_second_moment(t: float) -> float:
    """E[Z^2 1{|Z| > t}] for standard normal Z: 2*(t*phi(t) + 1 - Phi(t))."""
    if t <= 0.0:
        return 1.0
    return 2.0 * (t * _phi(t) + (1.0 - float(ndtr(t))))


def normal_abs_moment(r: float) -> float:
    """E|Z|^r = 2^(r/2) * Gamma((r+1)/2) / sqrt(pi) for standard normal Z."""
    if r < 0:
        raise ValueError(f"moment order must be >= 0, got {r}")
    return 2.0 ** (r / 2.0) * math.gamma((r + 1.0) / 2.0) / math.sqrt(math.pi)


def normal_abs3_below(u: float) -> float:
    """E[|Z|^3 1{|Z| <= u}]; antiderivative of z^3 phi(z) is -(z^2+2) phi(z)."""
    if u <= 0.0:
        return 0.0
    return 4.0 * _phi(0.0) - 2.0 * (u * u + 2.0) * _phi(u)


def normal_capped_second_moment(b: float) -> float:
    """E[Z^2 min(b|Z|, 1)] for b >= 0, split at |Z| = 1/b."""
    if b <= 0.0:
        return 0.0
    u = 1.0 / b
    return b * normal_abs3_below(u) + normal_tail_second_moment(u)


@dataclass(frozen=True)
class DiscreteLaw:
    """A finitely supported law given by (values, probs).

    Duplicate support points are merged on construction so moment sums run
    over the minimal support.
    """

    values: np.ndarray
    probs: np.ndarray

    @staticmethod
    def from_points(values, probs) -> "DiscreteLaw":
        values = np.asarray(values, dtype=float)
        probs = np.asarray(probs, dtype=float)
        if values.shape != probs.shape:
            raise ValueError("values and probs must have equal length")
        total = probs.sum()
        if not math.isclose(total, 1.0, abs_tol=1e-12):
            raise ValueError(f"probabilities sum to {total}, expected 1")
        uniq, inverse = np.unique(values, return_inverse=True)
        merged = np.zeros_like(uniq)
        np.add.at(merged, inverse, probs)
        return DiscreteLaw(uniq, merged)

    def mean(self) -> float:
        return float(self.probs @ self.values)

    def second_moment(self) -> float:
        return float(self.probs @ self.values**2)

    def var(self) -> float:
        return self.second_moment() - self.mean() ** 2

    def abs_moment(self, r: float) -> float:
        return float(self.probs @ np.abs(self.values) ** r)

    def tail_second_moment(self, t: float) -> float:
        """E[X^2 1{|X| > t}], strict inequality in the indicator."""
        mask = np.abs(self.values) > t
        return float(self.probs[mask] @ self.values[mask] ** 2)

    def is_symmetric(self) -> bool:
        return bool(
            np.array_equal(self.values, -self.values[::-1])
            and np.array_equal(self.probs, self.probs[::-1])
        )

    def truncated_mean(self, t: float) -> float:
        """E[X 1{|X| <= t}]; exactly 0 for symmetric laws (the truncation
        window is symmetric, so the masked law stays symmetric)."""
        if self.is_symmetric():
            return 0.0
        mask = np.abs(self.values) <= t
        return float(self.probs[mask] @ self.values[mask])

    def capped_second_moment(self, a: float) -> float:
        """E[X^2 min(a|X|, 1)]."""
        cap = np.minimum(a * np.abs(self.values), 1.0)
        return float(self.probs @ (self.values**2 * cap))


@dataclass(frozen=True)
class GaussianLaw:
    """Centred Gaussian with standard deviation sd > 0."""

    sd: float

    def __post_init__(self):
        if not self.sd > 0.0:
            raise ValueError(f"sd must be positive, got {self.sd}")

    def mean(self) -> float:
        return 0.0

    def second_moment(self) -> float:
        return self.sd**2

    def var(self) -> float:
        return self.sd**2

    def abs_moment(self, r: float) -> float:
        return self.sd**r * normal_abs_moment(r)

    def tail_second_moment(self, t: float) -> float:
        return self.sd**2 * normal_tail_second_moment(t / self.sd)

    def truncated_mean(self, t: float) -> float:
        # symmetric law: the truncated window is symmetric around 0
        return 0.0

    def capped_second_moment(self, a: float) -> float:
        return self.sd**2 * normal_capped_second_moment(a * self.sd)


def rademacher_law(a: float) -> DiscreteLaw:
    """Two-point law on {-a, +a} with equal weights."""
    return DiscreteLaw.from_points([-a, a], [0.5, 0.5])


def sign_combination_law(coeffs) -> DiscreteLaw:
    """Law of sum(c_l * s_l) over independent signs s_l in {-1, +1}.

    Enumerates all 2^len(coeffs) sign patterns; intended for short windows
    (moving-average taps, the two-scale pair of increments).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    k = coeffs.size
    if k > 20:
        raise ValueError("sign-combination law limited to 20 terms")
    idx = np.arange(2**k, dtype=np.uint32)
    signs = ((idx[:, None] >> np.arange(k)) & 1).astype(float) * 2.0 - 1.0
    values = signs @ coeffs
    probs = np.full(2**k, 2.0**-k)
    return DiscreteLaw.from_points(values, probs)

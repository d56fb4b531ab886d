"""Nonparametric statistics for paired comparisons and rank correlations.

Wilcoxon signed-rank uses the exact sign-flip distribution (dynamic
programming over mid-ranks) up to 20 effective pairs and a tie-corrected
normal approximation with continuity correction beyond. Spearman is the
product-moment correlation of mid-ranks with a seeded permutation test for
the two-sided p-value. Quantiles follow the inclusive linear-interpolation
rule (position (n-1)q on the sorted sample).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXACT_LIMIT = 20
SPEARMAN_PERMUTATIONS = 10_000

STRENGTH_STRONG = 0.7
STRENGTH_MODERATE = 0.5
ALPHA = 0.05


def midranks(values) -> list:
    """Ranks 1..n with ties sharing the mean of their rank positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j + 2) / 2.0   # positions are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def quantile(values, q: float) -> float:
    """Inclusive linear-interpolation quantile of an unsorted sample."""
    if not values:
        raise ValueError("quantile of empty sample")
    xs = sorted(values)
    pos = (len(xs) - 1) * q
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return xs[lo]
    return xs[lo] + (xs[hi] - xs[lo]) * (pos - lo)


def summary(values) -> dict:
    return {
        "n": len(values),
        "median": quantile(values, 0.5),
        "q1": quantile(values, 0.25),
        "q3": quantile(values, 0.75),
    }


@dataclass
class TestResult:
    statistic: float
    p_value: float
    n_effective: int
    method: str               # exact | approx | degenerate
    summary_x: dict
    summary_y: dict

    @property
    def significant(self) -> bool:
        return self.p_value < ALPHA


def wilcoxon_paired(x, y) -> TestResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped; tied absolute differences share
    mid-ranks; the statistic is W = min(W+, W-).
    """
    if len(x) != len(y):
        raise ValueError("paired samples must have equal length")
    if len(x) == 0:
        raise ValueError("paired samples must be non-empty")
    diffs = [yi - xi for xi, yi in zip(x, y)]
    nonzero = [d for d in diffs if d != 0]
    n = len(nonzero)
    sx, sy = summary(list(x)), summary(list(y))
    if n == 0:
        return TestResult(0.0, 1.0, 0, "degenerate", sx, sy)

    ranks = midranks([abs(d) for d in nonzero])
    w_plus = sum(r for d, r in zip(nonzero, ranks) if d > 0)
    w_minus = sum(r for d, r in zip(nonzero, ranks) if d < 0)
    w = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        p = _exact_two_sided_p(ranks, w)
        return TestResult(w, p, n, "exact", sx, sy)

    mean = n * (n + 1) / 4.0
    tie_sizes = _tie_sizes(ranks)
    var = (n * (n + 1) * (2 * n + 1)
           - sum(t ** 3 - t for t in tie_sizes) / 2.0) / 24.0
    if var <= 0:
        return TestResult(w, 1.0, n, "degenerate", sx, sy)
    z = (w - mean + 0.5) / math.sqrt(var)   # w <= mean, continuity correction
    p = min(1.0, math.erfc(-z / math.sqrt(2.0)))
    return TestResult(w, p, n, "approx", sx, sy)


def _tie_sizes(ranks) -> list:
    counts: dict = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    return [c for c in counts.values() if c > 1]


def _exact_two_sided_p(ranks, w_observed: float) -> float:
    """P(min(W+, W-) <= observed) over all 2^n equally likely sign flips.

    Mid-ranks are multiples of 1/2, so doubling them gives integers and the
    distribution of 2*W+ follows by convolution.
    """
    scaled = [int(round(2 * r)) for r in ranks]
    total = sum(scaled)
    dist = [0] * (total + 1)
    dist[0] = 1
    for s in scaled:
        for v in range(total - s, -1, -1):
            if dist[v]:
                dist[v + s] += dist[v]
    w2 = int(round(2 * w_observed))
    favorable = sum(c for v, c in enumerate(dist) if min(v, total - v) <= w2)
    return favorable / (1 << len(ranks))


@dataclass
class SpearmanResult:
    rho: float | None
    p_value: float | None
    strength: str | None      # strong | moderate | weak
    n: int
    n_permutations: int
    method: str = "permutation"   # or "t-approx"
    undefined: bool = False

    @property
    def significant(self) -> bool:
        return self.p_value is not None and self.p_value < ALPHA


def strength_label(rho: float) -> str:
    a = abs(rho)
    if a >= STRENGTH_STRONG:
        return "strong"
    if a >= STRENGTH_MODERATE:
        return "moderate"
    return "weak"


def spearman(x, y, n_permutations: int = SPEARMAN_PERMUTATIONS,
             seed: int = 20_260_101, method: str = "permutation"
             ) -> SpearmanResult:
    """Tie-corrected Spearman correlation.

    Two-sided p by seeded permutation test (default) or, behind the flag,
    the Student-t approximation t = rho * sqrt((n-2) / (1-rho^2)).
    """
    if len(x) != len(y):
        raise ValueError("samples must have equal length")
    n = len(x)
    if n < 3:
        raise ValueError("spearman needs at least 3 observations")
    if method not in ("permutation", "t-approx"):
        raise ValueError(f"unknown spearman method {method!r}")
    if len(set(x)) < 2 or len(set(y)) < 2:
        return SpearmanResult(None, None, None, n, 0, undefined=True)

    rx = np.array(midranks(list(x)))
    ry = np.array(midranks(list(y)))
    rho = _pearson(rx, ry)

    if method == "t-approx":
        if abs(rho) >= 1.0:
            p = 0.0
        else:
            t = rho * math.sqrt((n - 2) / (1.0 - rho * rho))
            p = _t_sf_two_sided(t, n - 2)
        return SpearmanResult(rho, p, strength_label(rho), n, 0,
                              method="t-approx")

    rng = np.random.Generator(np.random.PCG64(seed))
    xc = rx - rx.mean()
    yc = ry - ry.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    observed = abs(float(xc @ yc) / denom)
    # permutations of y ranks as argsorted uniform rows (one vectorized draw)
    idx = np.argsort(rng.random((n_permutations, n)), axis=1)
    stats = np.abs(yc[idx] @ xc) / denom
    hits = int(np.count_nonzero(stats >= observed - 1e-12))
    p = (hits + 1) / (n_permutations + 1)
    return SpearmanResult(rho, p, strength_label(rho), n, n_permutations)


def _t_sf_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t via the incomplete beta."""
    x = df / (df + t * t)
    return _betainc_reg(df / 2.0, 0.5, x)


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), continued-fraction form."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log(1.0 - x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float, max_iter: int = 300,
            eps: float = 1e-14) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    ac = a - a.mean()
    bc = b - b.mean()
    denom = math.sqrt(float(ac @ ac) * float(bc @ bc))
    if denom == 0:
        return math.nan
    return float(ac @ bc) / denom

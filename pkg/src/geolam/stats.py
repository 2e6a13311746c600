"""ECDF / KS statistics, histograms and moment estimates."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np


class StatsDomainError(ValueError):
    pass


def ks_statistic(samples, cdf, weights=None) -> float:
    """Kolmogorov-Smirnov distance between the (weighted) ECDF and ``cdf``.

    sup_i max(|W_i - F(x_i)|, |W_{i-1} - F(x_i)|) with W the cumulative
    normalized weight; unweighted samples give W_i = i/n.  Unsorted input
    is sorted first.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise StatsDomainError("KS statistic of an empty sample")
    order = np.argsort(x, kind="stable")
    x = x[order]
    if weights is None:
        n = x.size
        hi = np.arange(1, n + 1) / n
        lo = np.arange(0, n) / n
    else:
        w = np.asarray(weights, dtype=float)[order]
        if np.any(w < 0) or not w.sum() > 0:
            raise StatsDomainError("weights must be non-negative with positive sum")
        c = np.cumsum(w)
        hi = c / c[-1]
        lo = np.concatenate([[0.0], hi[:-1]])
    F = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(np.abs(hi - F)), np.max(np.abs(lo - F))))


def restrict(x, a: float, b: float, weights=None):
    """Samples (and weights) falling in [a, b]."""
    x = np.asarray(x, dtype=float)
    keep = (x >= a) & (x <= b)
    if weights is None:
        return x[keep], None
    return x[keep], np.asarray(weights, dtype=float)[keep]


def fmt(x: float) -> str:
    """Full-precision decimal form used in CSV/JSON outputs."""
    return format(float(x), ".17g")


@dataclass
class Histogram:
    lo: float
    hi: float
    bins: int
    mode: str = "count"  # or "length"
    counts: np.ndarray = field(init=False)
    underflow: float = 0.0
    overflow: float = 0.0
    total: float = 0.0

    def __post_init__(self):
        if not self.hi > self.lo:
            raise StatsDomainError("histogram range must have lo < hi")
        if self.bins < 1:
            raise StatsDomainError("need at least one bin")
        if self.mode not in ("count", "length"):
            raise StatsDomainError(f"unknown weight mode {self.mode!r}")
        self.counts = np.zeros(self.bins)

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.bins + 1)

    def add(self, values):
        """Add observations; in length mode each weighs its own value."""
        x = np.asarray(values, dtype=float).ravel()
        w = x if self.mode == "length" else np.ones_like(x)
        under = x < self.lo
        over = x >= self.hi
        inside = ~(under | over)
        idx = np.floor((x[inside] - self.lo) / (self.hi - self.lo) * self.bins).astype(int)
        idx = np.clip(idx, 0, self.bins - 1)
        self.counts += np.bincount(idx, weights=w[inside], minlength=self.bins)
        self.underflow += math.fsum(w[under])
        self.overflow += math.fsum(w[over])
        self.total += math.fsum(w)
        return self

    def conserved(self, rtol: float = 1e-9) -> bool:
        s = math.fsum(self.counts) + self.underflow + self.overflow
        return abs(s - self.total) <= rtol * max(abs(self.total), 1.0)

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write("bin_lo,bin_hi,weight\n")
        e = self.edges
        for k in range(self.bins):
            buf.write(f"{fmt(e[k])},{fmt(e[k + 1])},{fmt(self.counts[k])}\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_csv())


@dataclass(frozen=True)
class MomentEstimate:
    order: int
    estimate: float
    stderr: float


def sample_moments(x, orders=(1, 2, 3, 4)):
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise StatsDomainError("need at least two samples for moment errors")
    out = []
    for k in orders:
        xk = x ** k
        out.append(MomentEstimate(k, float(xk.mean()), float(xk.std(ddof=1) / math.sqrt(n))))
    return out


__all__ = ["ks_statistic", "restrict", "Histogram", "MomentEstimate", "sample_moments", "fmt",
           "StatsDomainError"]

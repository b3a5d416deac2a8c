"""Goodness-of-fit helpers and the report record shared by the statistical checks."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as _st

__all__ = ["StatReport", "ks_statistic", "ks_two_sample", "chi_square", "merge_bins"]


@dataclass
class StatReport:
    """Outcome of one statistical or numerical check.

    ``direction="below"`` means the check passes when ``statistic < threshold``
    (distances, errors); ``"above"`` when ``statistic > threshold`` (p-values).
    ``passed`` may be stricter than the bound (extra conditions recorded in
    ``metadata``) but never looser.
    """

    name: str
    statistic: float
    threshold: float
    sample_size: int
    passed: bool
    direction: str = "below"
    metadata: dict = field(default_factory=dict)
    details: list = field(default_factory=list)

    def __post_init__(self):
        if self.direction not in ("below", "above"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.passed and not self.within_bound():
            raise ValueError(f"{self.name}: passed flag contradicts statistic {self.statistic} vs {self.threshold}")

    def within_bound(self) -> bool:
        s = self.statistic
        if s is None or (isinstance(s, float) and math.isnan(s)):
            return False
        return s < self.threshold if self.direction == "below" else s > self.threshold

    def summary(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        rel = "<" if self.direction == "below" else ">"
        note = self.metadata.get("note")
        tail = f" ({note})" if note else ""
        return f"{word} {self.name}: {self.statistic:.6g} {rel} {self.threshold:.6g}? n={self.sample_size}{tail}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": _plain(self.statistic),
            "threshold": _plain(self.threshold),
            "sample_size": int(self.sample_size),
            "passed": bool(self.passed),
            "direction": self.direction,
            "metadata": _plain(self.metadata),
            "details": _plain(self.details),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StatReport":
        return cls(d["name"], d["statistic"], d["threshold"], d["sample_size"], d["passed"],
                   d.get("direction", "below"), d.get("metadata", {}), d.get("details", []))


def _plain(v):
    """Convert numpy scalars/arrays and tuples into JSON-friendly values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def ks_statistic(sample: Sequence[float], cdf: Callable) -> tuple[float, float]:
    """One-sample Kolmogorov-Smirnov distance and exact p-value against a continuous ``cdf``.

    ``cdf`` is called on each sorted sample point.
    """
    x = np.sort(np.asarray(sample, dtype=float))
    m = x.size
    if m == 0:
        raise ValueError("empty sample")
    F = np.fromiter((cdf(v) for v in x), dtype=float, count=m)
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))
    return d, float(_st.kstwo.sf(d, m))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    res = _st.ks_2samp(a, b)
    return float(res.statistic), float(res.pvalue)


def merge_bins(counts: Sequence[float], expected: Sequence[float], minimum: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Merge neighbouring bins, in the given order, until every expected count is at least ``minimum``.

    A short remainder at the end is folded into the last complete bin.
    """
    counts = np.asarray(counts, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if counts.shape != expected.shape:
        raise ValueError("counts and expected differ in shape")
    if counts.size == 0:
        raise ValueError("no bins")
    oc, oe = [], []
    c_acc = e_acc = 0.0
    for c, e in zip(counts, expected):
        c_acc += c
        e_acc += e
        if e_acc >= minimum:
            oc.append(c_acc)
            oe.append(e_acc)
            c_acc = e_acc = 0.0
    if c_acc or e_acc:
        if oc:
            oc[-1] += c_acc
            oe[-1] += e_acc
        else:
            oc.append(c_acc)
            oe.append(e_acc)
    return np.array(oc), np.array(oe)


def chi_square(counts: Sequence[float], expected: Sequence[float], ddof: int = 0,
               minimum: float = 5.0) -> tuple[float, float, int]:
    """Pearson chi-square after bin merging; returns (statistic, p-value, degrees of freedom).

    With a single merged bin there is nothing to test and the p-value is 1.
    """
    c, e = merge_bins(counts, expected, minimum)
    if np.any(e <= 0):
        raise ValueError("expected counts must be positive")
    stat = float(np.sum((c - e) ** 2 / e))
    df = len(c) - 1 - ddof
    if df <= 0:
        return stat, 1.0, 0
    return stat, float(_st.chi2.sf(stat, df)), df


def dumps(report: StatReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True)

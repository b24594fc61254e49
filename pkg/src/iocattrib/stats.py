"""Distribution summaries and the two-sample Z test.

Quantiles use linear interpolation between order statistics at position
p * (n - 1); the spread measure pair (median, IQR) is what the summary
tables report for skewed count data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    std: float
    median: float
    q1: float
    q3: float

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


@dataclass(frozen=True)
class ZTestResult:
    z: float
    p_value: float
    n_a: int
    n_b: int
    mean_a: float
    mean_b: float
    warnings: tuple[str, ...] = ()


def _quantile(sorted_values: list[float], p: float) -> float:
    """Linear interpolation between order statistics at p * (n - 1)."""
    n = len(sorted_values)
    if n == 1:
        return sorted_values[0]
    pos = p * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac


def summarize_distribution(values: list[float]) -> DistributionSummary:
    """Mean, sample SD (n-1), median, and interpolated quartiles."""
    if not values:
        raise ValidationError("cannot summarize an empty list")
    data = sorted(float(v) for v in values)
    n = len(data)
    mean = sum(data) / n
    if n > 1:
        std = math.sqrt(sum((v - mean) ** 2 for v in data) / (n - 1))
    else:
        std = 0.0
    return DistributionSummary(
        mean=mean,
        std=std,
        median=_quantile(data, 0.5),
        q1=_quantile(data, 0.25),
        q3=_quantile(data, 0.75),
    )


def z_test(sample_a: list[float], sample_b: list[float]) -> ZTestResult:
    """Two-sample unpooled-variance Z test with a two-tailed p value.

    Sample sizes below 30 produce a warning (the normal approximation is
    a large-sample tool); sizes below 2 are an error.
    """
    n_a, n_b = len(sample_a), len(sample_b)
    if n_a < 2 or n_b < 2:
        raise ValidationError("z test requires at least 2 values per sample")
    warnings = []
    if n_a < 30 or n_b < 30:
        warnings.append("sample size below 30; normal approximation may be poor")
    mean_a = sum(sample_a) / n_a
    mean_b = sum(sample_b) / n_b
    var_a = sum((v - mean_a) ** 2 for v in sample_a) / (n_a - 1)
    var_b = sum((v - mean_b) ** 2 for v in sample_b) / (n_b - 1)
    se = math.sqrt(var_a / n_a + var_b / n_b)
    if se == 0.0:
        z = 0.0 if mean_a == mean_b else math.copysign(math.inf, mean_a - mean_b)
    else:
        z = (mean_a - mean_b) / se
    p = 1.0 if math.isnan(z) else math.erfc(abs(z) / math.sqrt(2.0))
    return ZTestResult(
        z=z,
        p_value=min(1.0, p),
        n_a=n_a,
        n_b=n_b,
        mean_a=mean_a,
        mean_b=mean_b,
        warnings=tuple(warnings),
    )

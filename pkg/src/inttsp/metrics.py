"""Evaluation quantities for comparing runs."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Sequence


def mean_ratio(times_a: Sequence[float], times_b: Sequence[float]) -> float:
    """Mean over instances of ``b_i / a_i``; ``a`` is the baseline column."""
    if len(times_a) != len(times_b):
        raise ValueError(f"paired columns differ in length: {len(times_a)} vs {len(times_b)}")
    if not times_a:
        raise ValueError("no instances to compare")
    if any(t <= 0 for t in times_a) or any(t <= 0 for t in times_b):
        raise ValueError("running times must be positive")
    return sum(b / a for a, b in zip(times_a, times_b)) / len(times_a)


def p_used(s1: Iterable[Hashable], s2: Iterable[Hashable]) -> Fraction:
    """Share of the pre-generated SECs ``s1`` that the basic run also needed."""
    a, b = set(s1), set(s2)
    if not a:
        raise ValueError("p_used needs a nonempty pre-generated SEC set")
    return Fraction(len(a & b), len(a))


def p_cov(s1: Iterable[Hashable], s2: Iterable[Hashable]) -> Fraction:
    """Share of the basic run's SECs ``s2`` that were pre-generated."""
    a, b = set(s1), set(s2)
    if not b:
        raise ValueError("p_cov needs a nonempty final-model SEC set")
    return Fraction(len(a & b), len(b))


@dataclass(frozen=True)
class CurvePoint:
    iterations: int  # K, the group
    runs: int
    x: float
    mean_subtours: float


def subtour_curve(reports, resolution: int = 10) -> list[CurvePoint]:
    """Mean subtour count per iteration, grouped by total iteration count K.

    Iteration ``k`` of a K-iteration run sits at ``resolution*(k-1)/(K-1)``;
    single-iteration runs sit at 0.
    """
    groups: dict[int, list[list[int]]] = defaultdict(list)
    for r in reports:
        if not r.complete:
            raise ValueError(f"run on {r.instance} did not finish")
        counts = [rec.subtours for rec in r.per_iteration]
        groups[len(counts)].append(counts)
    out = []
    for k_total in sorted(groups):
        runs = groups[k_total]
        for k in range(k_total):
            x = 0.0 if k_total == 1 else resolution * k / (k_total - 1)
            mean = sum(c[k] for c in runs) / len(runs)
            out.append(CurvePoint(k_total, len(runs), x, mean))
    return out


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    samples: int
    mean: float
    stderr: float


def sqrt_asymptotic(lengths: Iterable[tuple[int, float]], scale: float = 1.0) -> list[AsymptoticRow]:
    """Per-n mean and standard error of ``(value / scale) / sqrt(n)``.

    Pass ``scale=2**14`` for lengths of scaled random Euclidean instances.
    """
    by_n: dict[int, list[float]] = defaultdict(list)
    for n, value in lengths:
        by_n[n].append(value / scale / math.sqrt(n))
    rows = []
    for n in sorted(by_n):
        xs = by_n[n]
        mean = sum(xs) / len(xs)
        if len(xs) > 1:
            var = sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)
            se = math.sqrt(var / len(xs))
        else:
            se = 0.0
        rows.append(AsymptoticRow(n, len(xs), mean, se))
    return rows


@dataclass(frozen=True)
class IterationStats:
    n: int
    runs: int
    mean: float
    mode: int
    histogram: dict[int, int]


def iteration_stats(reports) -> list[IterationStats]:
    by_n: dict[int, list[int]] = defaultdict(list)
    for r in reports:
        by_n[r.n].append(r.iterations)
    out = []
    for n in sorted(by_n):
        its = by_n[n]
        hist: dict[int, int] = defaultdict(int)
        for k in its:
            hist[k] += 1
        mode = min(hist, key=lambda k: (-hist[k], k))
        out.append(IterationStats(n, len(its), sum(its) / len(its), mode, dict(sorted(hist.items()))))
    return out

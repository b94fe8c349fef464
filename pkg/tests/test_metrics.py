import math
from fractions import Fraction

import pytest

from inttsp.engine import IterationRecord, RunReport
from inttsp.metrics import (iteration_stats, mean_ratio, p_cov, p_used, sqrt_asymptotic,
                            subtour_curve)


def report(n, subtours, name="x"):
    recs = [IterationRecord(100 + i, s, 0) for i, s in enumerate(subtours)]
    return RunReport(name, n, "basic", "hybrid", "optimal", len(recs), 0, 0.1, 100, None,
                     recs, {}, [])


def test_mean_ratio():
    assert mean_ratio([1.5, 2.5], [1.5, 2.5]) == 1.0
    assert mean_ratio([2, 4], [1, 2]) == 0.5
    assert mean_ratio([1], [3]) == 3.0
    with pytest.raises(ValueError):
        mean_ratio([1], [1, 2])
    with pytest.raises(ValueError):
        mean_ratio([0], [1])


def test_p_used_p_cov():
    assert p_used({1, 2}, {1, 2}) == 1
    assert p_used({1, 2}, {3}) == 0
    assert p_used(range(6), [0, 1, 2, 9]) == Fraction(1, 2)
    assert p_cov(range(10), range(4)) == 1
    assert p_cov({1}, {2}) == 0
    assert p_cov({0, 1, 99}, range(8)) == Fraction(1, 4)
    with pytest.raises(ValueError):
        p_used([], [1])
    with pytest.raises(ValueError):
        p_cov([1], [])


def test_subtour_curve():
    pts = subtour_curve([report(10, [9, 3, 1])])
    assert [(p.x, p.mean_subtours) for p in pts] == [(0.0, 9), (5.0, 3), (10.0, 1)]
    pts = subtour_curve([report(10, [4, 1]), report(10, [2, 1]), report(10, [1])])
    assert [(p.iterations, p.x, p.mean_subtours) for p in pts] == [
        (1, 0.0, 1.0), (2, 0.0, 3.0), (2, 10.0, 1.0)]
    incomplete = report(10, [2])
    incomplete.status = "limit_reached"
    with pytest.raises(ValueError):
        subtour_curve([incomplete])


def test_sqrt_asymptotic():
    rows = sqrt_asymptotic([(n, math.sqrt(n)) for n in (4, 9, 9, 16)])
    assert [(r.n, r.samples, r.mean, r.stderr) for r in rows] == [
        (4, 1, 1.0, 0.0), (9, 2, 1.0, 0.0), (16, 1, 1.0, 0.0)]
    assert sqrt_asymptotic([(4, 2 * 16384)], scale=16384)[0].mean == 1.0


def test_iteration_stats():
    reps = [report(8, [1] * k) for k in (2, 3, 3, 5)]
    (s,) = iteration_stats(reps)
    assert s.mean == 3.25 and s.mode == 3 and s.histogram == {2: 1, 3: 2, 5: 1}

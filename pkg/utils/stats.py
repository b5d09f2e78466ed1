"""
Statistics for the harness: Welch test, coverage band, log-log slopes
"""
import math
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from common.schemas.bench import BenchRecord
from common.schemas.reports import SlopeRow, WelchResult
from common.schemas.scorer import MeasureKind, Variant


def welch_test(cp: Sequence[float], icp: Sequence[float], alpha: float = 0.01) -> WelchResult:
    """
    One-sided Welch test of H0: mean fuzziness of ICP <= mean fuzziness of CP

    The statistic is (mean(icp) - mean(cp)) / sqrt(var_cp/n_cp + var_icp/n_icp)
    with sample variances (ddof=1); degrees of freedom follow
    Welch-Satterthwaite and the p-value is the upper tail of Student's t.

    With both variances zero the degrees of freedom fall back to
    n_cp + n_icp - 2 and the statistic is 0 or +/-inf.

    Raises:
        ValueError: if either sample has fewer than 2 values
    """
    a = np.asarray(cp, dtype=np.float64)
    b = np.asarray(icp, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("Welch test needs at least 2 values per sample")

    va = float(np.var(a, ddof=1)) / a.size
    vb = float(np.var(b, ddof=1)) / b.size
    diff = float(np.mean(b) - np.mean(a))
    se2 = va + vb

    if se2 == 0.0:
        df = float(a.size + b.size - 2)
        t = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    else:
        df = se2 ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
        t = diff / math.sqrt(se2)

    p_value = float(stats.t.sf(t, df))
    return WelchResult(t_statistic=t, degrees_of_freedom=df, p_value=p_value, alpha=alpha, reject=p_value < alpha)


def binomial_upper_band(epsilon: float, trials: int) -> float:
    """epsilon + 2 * sqrt(epsilon * (1 - epsilon) / trials)"""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return epsilon + 2.0 * math.sqrt(epsilon * (1.0 - epsilon) / trials)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """
    Least-squares slope of log(y) against log(x)

    Non-positive values are dropped; None if fewer than two distinct x remain.
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    keep = (xs > 0) & (ys > 0)
    xs, ys = xs[keep], ys[keep]
    if np.unique(xs).size < 2:
        return None
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


SeriesKey = Tuple[str, MeasureKind, Variant]


def summarize_slopes(
    records: Iterable[BenchRecord], n_min: Optional[int] = None, n_max: Optional[int] = None
) -> List[SlopeRow]:
    """
    Slopes per (task, measure, variant) over n in [n_min, n_max]

    Cells with an error, a timeout or no completed prediction are left
    out. Seeds are averaged per n before fitting.
    """
    series: Dict[SeriesKey, Dict[int, List[BenchRecord]]] = defaultdict(lambda: defaultdict(list))
    for record in records:
        if record.error is not None or record.timed_out or record.predictions_completed == 0:
            continue
        if (n_min is not None and record.n < n_min) or (n_max is not None and record.n > n_max):
            continue
        series[(record.task, record.measure, record.variant)][record.n].append(record)

    rows: List[SlopeRow] = []
    for (task, measure, variant), by_n in sorted(series.items(), key=lambda item: (item[0][0], item[0][1].value, item[0][2].value)):
        ns = sorted(by_n)
        predict = [float(np.mean([r.mean_predict_seconds for r in by_n[n]])) for n in ns]
        train = [float(np.mean([r.train_seconds for r in by_n[n]])) for n in ns]
        rows.append(
            SlopeRow(
                task=task,
                measure=measure,
                variant=variant,
                points=len(ns),
                n_min=ns[0],
                n_max=ns[-1],
                predict_slope=loglog_slope(ns, predict),
                train_slope=loglog_slope(ns, train),
            )
        )
    return rows

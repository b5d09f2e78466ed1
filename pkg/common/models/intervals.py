"""
Interval sets over the extended real line
"""
import math
from dataclasses import dataclass
from typing import Iterable, List, Tuple, Union

Endpoint = Union[float, str]


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")
        # infinite endpoints are never attained
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_closed", False)

    def contains(self, value: float) -> bool:
        above = value > self.lo or (self.lo_closed and value == self.lo)
        below = value < self.hi or (self.hi_closed and value == self.hi)
        return above and below

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


def _token(value: float) -> Endpoint:
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return value


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint, non-empty intervals"""
    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        items = tuple(self.intervals)
        for left, right in zip(items, items[1:]):
            touching = left.hi == right.lo and (left.hi_closed or right.lo_closed)
            if left.hi > right.lo or touching:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", items)

    @classmethod
    def from_closed(cls, bounds: Iterable[Tuple[float, float]]) -> "IntervalSet":
        """Merge closed intervals (rays allowed) into a normalized set"""
        merged: List[List[float]] = []
        for lo, hi in sorted(bounds):
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return cls(tuple(Interval(lo, hi) for lo, hi in merged))

    @classmethod
    def real_line(cls) -> "IntervalSet":
        return cls((Interval(-math.inf, math.inf),))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, value: float) -> bool:
        return any(interval.contains(value) for interval in self.intervals)

    def is_subset_of(self, other: "IntervalSet") -> bool:
        """Every interval lies inside a single interval of other"""
        for inner in self.intervals:
            if not any(
                (outer.lo < inner.lo or (outer.lo == inner.lo and (outer.lo_closed or not inner.lo_closed)))
                and (outer.hi > inner.hi or (outer.hi == inner.hi and (outer.hi_closed or not inner.hi_closed)))
                for outer in other.intervals
            ):
                return False
        return True

    def close_to(self, other: "IntervalSet", tol: float) -> bool:
        """Same number of intervals with every finite endpoint within tol; infinite endpoints must match"""
        if len(self) != len(other):
            return False
        for a, b in zip(self.intervals, other.intervals):
            for x, y in ((a.lo, b.lo), (a.hi, b.hi)):
                if math.isinf(x) or math.isinf(y):
                    if x != y:
                        return False
                elif abs(x - y) > tol:
                    return False
        return True

    def to_list(self) -> List[List[Endpoint]]:
        """JSON-friendly endpoints with "-inf"/"inf" tokens"""
        return [[_token(i.lo), _token(i.hi)] for i in self.intervals]

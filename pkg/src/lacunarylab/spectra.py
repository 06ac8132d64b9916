"""Semicircle-law reference values and moment comparison reports."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

CATALAN_MAX = 30


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m > CATALAN_MAX:
        raise OverflowError(f"catalan({m}) is outside the supported range 0..{CATALAN_MAX}")
    return math.factorial(2 * m) // (math.factorial(m) * math.factorial(m + 1))


def semicircle_density(t: float) -> float:
    if t * t >= 4.0:
        return 0.0
    return math.sqrt(4.0 - t * t) / (2.0 * math.pi)


def semicircle_cdf(t: float) -> float:
    if t <= -2.0:
        return 0.0
    if t >= 2.0:
        return 1.0
    return 0.5 + t * math.sqrt(4.0 - t * t) / (4.0 * math.pi) + math.asin(t / 2.0) / math.pi


def semicircle_moment(K: int) -> int:
    if K < 0:
        raise ValueError("K must be nonnegative")
    return 0 if K % 2 else catalan(K // 2)


@dataclass
class MomentRow:
    K: int
    estimate: float
    std_error: float
    reference: float
    abs_deviation: float
    passed: bool


@dataclass
class MomentReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def row(self, K: int) -> MomentRow:
        for r in self.rows:
            if r.K == K:
                return r
        raise KeyError(K)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    CSV_COLUMNS = ("K", "estimate", "std_error", "reference", "deviation", "pass")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.K, repr(float(r.estimate)), repr(float(r.std_error)),
                        repr(float(r.reference)), repr(float(r.abs_deviation)),
                        int(r.passed)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, metadata: Optional[dict] = None) -> "MomentReport":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            rows.append(MomentRow(int(rec["K"]), float(rec["estimate"]), float(rec["std_error"]),
                                  float(rec["reference"]), float(rec["deviation"]),
                                  bool(int(rec["pass"]))))
        return cls(rows, dict(metadata or {}))

    def to_dict(self) -> dict:
        return {"metadata": self.metadata,
                "rows": [{"K": r.K, "estimate": r.estimate, "std_error": r.std_error,
                          "reference": r.reference, "deviation": r.abs_deviation,
                          "pass": r.passed} for r in self.rows]}


def compare_moments(estimates: Mapping, k_sigma: float = 4.0, abs_floor=0.0,
                    metadata: Optional[dict] = None) -> MomentReport:
    """Check ``|estimate - reference| <= max(k_sigma * SE, floor)`` per moment order.

    ``estimates`` maps ``K -> (estimate, std_error)``.  ``abs_floor`` is a number or
    a mapping ``K -> floor`` (missing orders get 0).
    """
    rows = []
    for K in sorted(estimates):
        est, se = estimates[K]
        ref = semicircle_moment(K)
        floor = abs_floor.get(K, 0.0) if isinstance(abs_floor, Mapping) else abs_floor
        dev = abs(est - ref)
        rows.append(MomentRow(K, float(est), float(se), float(ref), dev,
                              dev <= max(k_sigma * se, floor)))
    return MomentReport(rows, dict(metadata or {}))

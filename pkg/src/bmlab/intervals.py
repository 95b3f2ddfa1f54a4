"""Minkowski-sum interval collections and their disjoint splittings.

The frequency side of a bilinear form with inputs supported on intervals A
and B lives on -A-B = {-a-b}.  For staircase symbols these sums form a
one-parameter family of half-open intervals; the combinatorial question is
how many pairwise-disjoint subfamilies are needed to cover the family.  A
greedy interval-graph coloring answers it exactly (colors used = maximum
point overlap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curves import SequencePair

__all__ = [
    "HalfOpenInterval",
    "IntervalCollection",
    "ColoringResult",
    "HypothesisReport",
    "neg_minkowski_sum",
    "build_hyp_collection",
    "min_disjoint_split",
    "max_point_overlap",
    "check_hypothesis",
]


@dataclass(frozen=True)
class HalfOpenInterval:
    """Interval [lo, hi) or (lo, hi]; ``closure`` is 'right_open' or 'left_open'."""

    lo: float
    hi: float
    closure: str = "right_open"

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.closure not in ("right_open", "left_open"):
            raise ValueError("closure must be 'right_open' ([lo,hi)) or 'left_open' ((lo,hi])")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.closure == "right_open":
            return (x >= self.lo) & (x < self.hi)
        return (x > self.lo) & (x <= self.hi)

    def overlaps(self, other: "HalfOpenInterval") -> bool:
        """True if the two intervals share a point; touching endpoints only
        count when both sides include the shared endpoint."""
        if self.hi < other.lo or other.hi < self.lo:
            return False
        if self.hi == other.lo:
            return self.closure == "left_open" and other.closure == "right_open"
        if other.hi == self.lo:
            return other.closure == "left_open" and self.closure == "right_open"
        return True

    def as_dict(self):
        bracket = "[lo,hi)" if self.closure == "right_open" else "(lo,hi]"
        return {"lo": self.lo, "hi": self.hi, "closure": bracket}


def neg_minkowski_sum(A: HalfOpenInterval, B: HalfOpenInterval) -> HalfOpenInterval:
    """The interval {-a-b : a in A, b in B} with tracked closure.

    -[a,b) - [c,d) = (-b-d, -a-c] and -(a,b] - (c,d] = [-b-d, -a-c) exactly.
    Mixed closures produce a fully open set; it is reported right-closed,
    a superset by one endpoint, which keeps disjointness checks conservative.
    """
    lo = -A.hi - B.hi
    hi = -A.lo - B.lo
    if A.closure == "right_open" and B.closure == "right_open":
        closure = "left_open"
    elif A.closure == "left_open" and B.closure == "left_open":
        closure = "right_open"
    else:
        closure = "left_open"
    return HalfOpenInterval(lo=lo, hi=hi, closure=closure)


@dataclass(frozen=True)
class IntervalCollection:
    items: tuple[HalfOpenInterval, ...]
    origin: str = "custom"
    first_index: int = 0

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if self.origin not in ("hyp1", "hyp2", "edges", "custom"):
            raise ValueError(f"unknown origin tag: {self.origin}")

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def index_of(self, k: int) -> int:
        """Sequence index j of the k-th item."""
        return self.first_index + k


def build_hyp_collection(seq: SequencePair, which: str) -> IntervalCollection:
    """The negated Minkowski-sum family attached to a sequence pair.

    For decreasing pairs, ``hyp1`` pairs the step [a_{j+1}, a_j) with the
    column [b_j, b_0) and ``hyp2`` pairs it with (b_inf, b_j), represented
    here as [b_inf, b_j) so that the two-closure algebra stays exact (the
    representation is a superset by one endpoint, conservative for
    disjointness).  For increasing pairs ``hyp1`` builds the nested family
    -(u_0, u_j] - [v_j, v_{j+1}).
    """
    if which not in ("hyp1", "hyp2"):
        raise ValueError("which must be 'hyp1' or 'hyp2'")
    first, last = seq.first_index(), seq.last_index()
    items = []
    if seq.direction == "increasing":
        if which != "hyp1":
            raise ValueError("increasing pairs support only the hyp1-style family")
        u0 = seq.a_at(first)
        for j in range(first + 1, last):
            A = HalfOpenInterval(u0, seq.a_at(j), closure="left_open")
            B = HalfOpenInterval(seq.b_at(j), seq.b_at(j + 1), closure="right_open")
            items.append(neg_minkowski_sum(A, B))
        return IntervalCollection(items=tuple(items), origin="hyp1", first_index=first + 1)
    if which == "hyp1":
        b0 = seq.b_at(first)
        # the j = first term pairs with the empty column [b_0, b_0); skip it
        start = first + 1
        for j in range(start, last):
            A = HalfOpenInterval(seq.a_at(j + 1), seq.a_at(j), closure="right_open")
            B = HalfOpenInterval(seq.b_at(j), b0, closure="right_open")
            items.append(neg_minkowski_sum(A, B))
        return IntervalCollection(items=tuple(items), origin="hyp1", first_index=start)
    if seq.b_inf is None or not math.isfinite(seq.b_inf):
        raise ValueError("limit required: hyp2 needs a finite b_inf")
    for j in range(first, last):
        A = HalfOpenInterval(seq.a_at(j + 1), seq.a_at(j), closure="right_open")
        B = HalfOpenInterval(seq.b_inf, seq.b_at(j), closure="right_open")
        items.append(neg_minkowski_sum(A, B))
    return IntervalCollection(items=tuple(items), origin="hyp2", first_index=first)


@dataclass
class ColoringResult:
    num_colors: int
    assignment: list[int]
    certificate: dict[int, list[HalfOpenInterval]]

    def verify(self) -> bool:
        """Re-scan each color class for pairwise disjointness and check that
        the number of colors matches the maximum point overlap."""
        for group in self.certificate.values():
            ordered = sorted(group, key=lambda iv: (iv.lo, iv.hi))
            for left, right in zip(ordered, ordered[1:]):
                if left.overlaps(right):
                    return False
        universe = [iv for group in self.certificate.values() for iv in group]
        return self.num_colors == max_point_overlap(universe)


def max_point_overlap(intervals) -> int:
    """Exact maximum number of intervals sharing a point (clique number).

    Candidates: every endpoint and every midpoint of consecutive distinct
    endpoints; with half-open data this hits every combinatorial cell.
    """
    ivs = list(intervals)
    if not ivs:
        return 0
    ends = np.unique(np.array([v for iv in ivs for v in (iv.lo, iv.hi)], dtype=float))
    mids = 0.5 * (ends[:-1] + ends[1:])
    cand = np.concatenate([ends, mids])
    best = 0
    for x in cand:
        count = sum(bool(iv.contains(x)) for iv in ivs)
        best = max(best, count)
    return best


def min_disjoint_split(coll: IntervalCollection | list) -> ColoringResult:
    """Greedy interval-graph coloring: optimal color count for intervals.

    Sort by lo (ties by hi), give each interval the smallest color whose
    most recent interval does not overlap it.  Touching half-open endpoints
    never overlap.
    """
    ivs = list(coll)
    if not ivs:
        raise ValueError("nonempty collection required")
    order = sorted(range(len(ivs)), key=lambda k: (ivs[k].lo, ivs[k].hi))
    last_in_color: list[HalfOpenInterval] = []
    assignment = [-1] * len(ivs)
    for k in order:
        iv = ivs[k]
        for color, tail in enumerate(last_in_color):
            if not tail.overlaps(iv):
                last_in_color[color] = iv
                assignment[k] = color
                break
        else:
            assignment[k] = len(last_in_color)
            last_in_color.append(iv)
    certificate: dict[int, list[HalfOpenInterval]] = {}
    for k, color in enumerate(assignment):
        certificate.setdefault(color, []).append(ivs[k])
    return ColoringResult(
        num_colors=len(last_in_color), assignment=assignment, certificate=certificate
    )


@dataclass
class HypothesisReport:
    hypothesis: str
    J: int
    n: int
    stable: bool
    per_color_lacunary: list[bool]
    per_color_min_ratio: list[float]
    coloring: ColoringResult
    intervals: IntervalCollection

    def as_dict(self):
        rows = []
        for iv, color in zip(self.intervals, self.coloring.assignment):
            row = iv.as_dict()
            row["color"] = color
            rows.append(row)
        return {
            "hypothesis": self.hypothesis,
            "J": self.J,
            "n": self.n,
            "stable": self.stable,
            "per_color_lacunary": self.per_color_lacunary,
            "intervals": rows,
        }


def _lacunary_flag(group: list[HalfOpenInterval], q_min: float = 1.01):
    """Heuristic: midpoint magnitudes grow geometrically within the class.

    Reported, not certified; a proper two-sided square-function measurement
    lives in the engine module.
    """
    mids = sorted(abs(0.5 * (iv.lo + iv.hi)) for iv in group)
    if len(mids) < 2:
        return True, math.inf
    ratios = []
    for a, b in zip(mids, mids[1:]):
        ratios.append(math.inf if a == 0 else b / a)
    worst = min(ratios)
    return worst >= q_min, worst


def check_hypothesis(seq: SequencePair, which: str, J: int) -> HypothesisReport:
    """Color the family at truncation J and re-check at 2J for stability.

    ``seq`` must carry at least 2J steps; build it at the doubled truncation.
    """
    if J < 2:
        raise ValueError("J must be at least 2")
    if seq.J < 2 * J:
        raise ValueError(f"stability check at 2J={2 * J} needs a pair built with J >= {2 * J}")
    coll = build_hyp_collection(seq.truncate(J), which)
    coloring = min_disjoint_split(coll)
    coll2 = build_hyp_collection(seq.truncate(2 * J), which)
    coloring2 = min_disjoint_split(coll2)
    flags, ratios = [], []
    for color in range(coloring.num_colors):
        group = coloring.certificate[color]
        flag, ratio = _lacunary_flag(group)
        flags.append(bool(flag))
        ratios.append(float(ratio))
    return HypothesisReport(
        hypothesis=which,
        J=J,
        n=coloring.num_colors,
        stable=coloring2.num_colors == coloring.num_colors,
        per_color_lacunary=flags,
        per_color_min_ratio=ratios,
        coloring=coloring,
        intervals=coll,
    )

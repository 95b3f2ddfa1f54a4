"""Convex curve families, dyadic-slope sequences, and sequence classifiers.

A curve here is an increasing, strictly convex C^1 function gamma on an open
(or half-open) interval, carried together with its derivative.  The central
construction solves gamma'(a_j) = 2^-j by bisection and records b_j =
gamma(a_j); the resulting pairs of strictly monotone sequences feed the
interval combinatorics and the symbol builders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

__all__ = [
    "CurveSpec",
    "SequencePair",
    "TruncationError",
    "power_law",
    "hyperboloid",
    "exponential",
    "monomial",
    "circle_arc",
    "rational",
    "arctan_curve",
    "custom_curve",
    "piecewise_linear_curve",
    "renormalize",
    "build_dyadic_slope_sequence",
    "classify_sequence",
    "slope_band_check",
    "derivative_consistency",
]

BISECT_MAX_ITER = 200
CLASSIFY_TOL = 1e-10


class TruncationError(ValueError):
    """A requested dyadic slope is outside the range of gamma'."""

    def __init__(self, message, max_feasible_j):
        super().__init__(message)
        self.max_feasible_j = max_feasible_j


@dataclass(frozen=True)
class CurveSpec:
    """An evaluable convex curve with derivative and working domain.

    ``domain`` endpoints may be infinite; finite endpoints are treated as
    evaluable (the families below extend continuously to them).  ``a_limit``
    and ``b_limit`` record lim a_j and lim gamma at the flat end of the
    domain, when known.
    """

    family: str
    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float]
    c: Optional[float] = None
    a_limit: Optional[float] = None
    b_limit: Optional[float] = None

    def __call__(self, xi):
        return self.gamma(np.asarray(xi, dtype=float))

    def slope(self, xi):
        return self.dgamma(np.asarray(xi, dtype=float))


def power_law(c: float) -> CurveSpec:
    """gamma(xi) = |xi|^-c on xi < 0, c > 0."""
    if c <= 0:
        raise ValueError("power_law needs c > 0")
    return CurveSpec(
        family="power_law",
        gamma=lambda x: np.abs(x) ** (-c),
        dgamma=lambda x: c * np.abs(x) ** (-c - 1.0),
        domain=(-math.inf, 0.0),
        c=c,
        a_limit=-math.inf,
        b_limit=0.0,
    )


def hyperboloid() -> CurveSpec:
    """gamma(xi) = sqrt(1 + xi^2), working branch (0, 1/sqrt(3)]."""
    return CurveSpec(
        family="hyperboloid",
        gamma=lambda x: np.sqrt(1.0 + x * x),
        dgamma=lambda x: x / np.sqrt(1.0 + x * x),
        domain=(0.0, 1.0 / math.sqrt(3.0)),
        a_limit=0.0,
        b_limit=1.0,
    )


def exponential() -> CurveSpec:
    """gamma(xi) = 2^xi on the real line."""
    ln2 = math.log(2.0)
    return CurveSpec(
        family="exponential",
        gamma=lambda x: np.exp2(x),
        dgamma=lambda x: ln2 * np.exp2(x),
        domain=(-math.inf, math.inf),
        a_limit=-math.inf,
        b_limit=0.0,
    )


def monomial(c: float) -> CurveSpec:
    """gamma(xi) = xi^c / c on (0, 1], c > 1."""
    if c <= 1:
        raise ValueError("monomial needs c > 1 for an increasing slope")
    return CurveSpec(
        family="monomial",
        gamma=lambda x: x**c / c,
        dgamma=lambda x: x ** (c - 1.0),
        domain=(0.0, 1.0),
        c=c,
        a_limit=0.0,
        b_limit=0.0,
    )


def circle_arc() -> CurveSpec:
    """gamma(xi) = -sqrt(1 - xi^2) on (0, 1/sqrt(2)]."""
    return CurveSpec(
        family="circle_arc",
        gamma=lambda x: -np.sqrt(1.0 - x * x),
        dgamma=lambda x: x / np.sqrt(1.0 - x * x),
        domain=(0.0, 1.0 / math.sqrt(2.0)),
        a_limit=0.0,
        b_limit=-1.0,
    )


def rational(c: float) -> CurveSpec:
    """gamma(xi) = xi / (xi + c) on (-inf, -c), c > 0."""
    if c <= 0:
        raise ValueError("rational needs c > 0")
    return CurveSpec(
        family="rational",
        gamma=lambda x: x / (x + c),
        dgamma=lambda x: c / (x + c) ** 2,
        domain=(-math.inf, -c),
        c=c,
        a_limit=-math.inf,
        b_limit=1.0,
    )


def arctan_curve() -> CurveSpec:
    """gamma(xi) = arctan(xi) on (-inf, 0]."""
    return CurveSpec(
        family="arctan",
        gamma=np.arctan,
        dgamma=lambda x: 1.0 / (1.0 + x * x),
        domain=(-math.inf, 0.0),
        a_limit=-math.inf,
        b_limit=-math.pi / 2.0,
    )


def custom_curve(gamma, dgamma, domain, a_limit=None, b_limit=None) -> CurveSpec:
    return CurveSpec(
        family="custom",
        gamma=gamma,
        dgamma=dgamma,
        domain=(float(domain[0]), float(domain[1])),
        a_limit=a_limit,
        b_limit=b_limit,
    )


def piecewise_linear_curve(vertices) -> CurveSpec:
    """Curve interpolating vertices (a_j, b_j), a decreasing; slope is a step.

    Used to compare a vertex polygon against the generic epigraph machinery.
    The derivative is only weakly monotone, so this curve is not suitable for
    dyadic slope solving.
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two vertices")
    a = pts[:, 0]
    b = pts[:, 1]
    if not (np.all(np.diff(a) < 0) and np.all(np.diff(b) < 0)):
        raise ValueError("vertices must be strictly decreasing in both coordinates")
    xs = a[::-1]
    ys = b[::-1]
    slopes = np.diff(ys) / np.diff(xs)

    def gamma(x):
        return np.interp(np.asarray(x, dtype=float), xs, ys)

    def dgamma(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    return CurveSpec(
        family="piecewise_linear",
        gamma=gamma,
        dgamma=dgamma,
        domain=(float(xs[0]), float(xs[-1])),
        a_limit=float(xs[0]),
        b_limit=float(ys[0]),
    )


def renormalize(curve: CurveSpec, mode: str = "unit_slope_origin") -> CurveSpec:
    """Shift a curve into one of the two standard positions.

    ``unit_slope_origin``: translate so that the point with gamma' = 1 sits at
    the origin with value 0.  ``vanishing_limits``: translate so that the flat
    end of the domain sits at 0 with limit value 0.  Pure translations; slopes
    are unchanged.
    """
    if mode == "unit_slope_origin":
        x0 = _bisect_slope(curve, 1.0)
        if x0 is None:
            raise ValueError("slope 1 is not attained on the curve domain")
        y0 = float(curve.gamma(x0))
        dx, dy = x0, y0
    elif mode == "vanishing_limits":
        limits = (curve.a_limit, curve.b_limit)
        if any(v is None or not math.isfinite(v) for v in limits):
            raise ValueError("vanishing_limits needs finite sequence and value limits")
        dx, dy = limits
    else:
        raise ValueError(f"unknown renormalization mode: {mode}")

    base_g, base_d = curve.gamma, curve.dgamma
    lo, hi = curve.domain
    return CurveSpec(
        family=curve.family + "_shifted",
        gamma=lambda x, g=base_g, dx=dx, dy=dy: g(np.asarray(x, dtype=float) + dx) - dy,
        dgamma=lambda x, d=base_d, dx=dx: d(np.asarray(x, dtype=float) + dx),
        domain=(lo - dx, hi - dx),
        c=curve.c,
        a_limit=None if curve.a_limit is None else curve.a_limit - dx,
        b_limit=None if curve.b_limit is None else curve.b_limit - dy,
    )


# --- sequences ----------------------------------------------------------------


@dataclass(frozen=True)
class SequencePair:
    """Truncated sequence pair (a_j, b_j), j = j0 .. j0 + J.

    ``a`` and ``b`` are parallel arrays; entry k stores index j = j0 + k.
    Most families start at j0 = 0; families whose slope range excludes 1
    (the hyperboloid branch) start at j0 = 1.
    """

    a: np.ndarray
    b: np.ndarray
    direction: str = "decreasing"
    j0: int = 0
    a_inf: Optional[float] = None
    b_inf: Optional[float] = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
            raise ValueError("a and b must be parallel 1-d arrays, length >= 2")
        da, db = np.diff(a), np.diff(b)
        if self.direction == "decreasing":
            ok = np.all(da < 0) and np.all(db < 0)
        elif self.direction == "increasing":
            ok = np.all(da > 0) and np.all(db > 0)
        else:
            raise ValueError("direction must be 'decreasing' or 'increasing'")
        if not ok:
            raise ValueError(f"sequences are not strictly {self.direction}")

    @property
    def J(self) -> int:
        return len(self.a) - 1

    @property
    def indices(self) -> range:
        return range(self.j0, self.j0 + len(self.a))

    def a_at(self, j: int) -> float:
        return float(self.a[j - self.j0])

    def b_at(self, j: int) -> float:
        return float(self.b[j - self.j0])

    def first_index(self) -> int:
        return self.j0

    def last_index(self) -> int:
        return self.j0 + self.J

    def truncate(self, J: int) -> "SequencePair":
        if J < 1 or J > self.J:
            raise ValueError(f"cannot truncate to J={J} (have J={self.J})")
        return replace(self, a=self.a[: J + 1], b=self.b[: J + 1])


def _slope_at(curve: CurveSpec, x: float) -> float:
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        return float(curve.dgamma(np.float64(x)))


def _expand_bracket(curve: CurveSpec, target: float):
    """Find [lo, hi] inside the domain with dgamma(lo) <= target <= dgamma(hi)."""
    dlo, dhi = curve.domain
    # interior anchor
    if math.isfinite(dlo) and math.isfinite(dhi):
        lo, hi = dlo + (dhi - dlo) * 1e-9, dhi
    elif math.isfinite(dhi):
        hi = dhi
        lo = dhi - 1.0
    elif math.isfinite(dlo):
        lo = dlo + 1e-9
        hi = dlo + 1.0
    else:
        lo, hi = -1.0, 1.0
    for _ in range(2000):
        if _slope_at(curve, lo) <= target:
            break
        if math.isfinite(dlo):
            step = (lo - dlo) * 0.5
            if step <= 0 or lo - step <= dlo:
                lo = np.nextafter(dlo, dhi)
                break
            lo -= step
        else:
            lo = lo * 2.0 if lo < -1 else lo - max(1.0, abs(lo))
    for _ in range(2000):
        if _slope_at(curve, hi) >= target:
            break
        if math.isfinite(dhi):
            step = (dhi - hi) * 0.5
            if step <= 0 or hi + step >= dhi:
                hi = dhi
                break
            hi += step
        else:
            hi = hi * 2.0 if hi > 1 else hi + max(1.0, abs(hi))
    if _slope_at(curve, lo) > target or _slope_at(curve, hi) < target:
        return None
    return lo, hi


def _bisect_slope(curve: CurveSpec, target: float, max_iter: int = BISECT_MAX_ITER) -> Optional[float]:
    """Solve dgamma(x) = target by bisection; None if the slope is unattained."""
    bracket = _expand_bracket(curve, target)
    if bracket is None:
        # a finite domain endpoint may attain the target up to rounding
        for end in curve.domain:
            if math.isfinite(end) and abs(_slope_at(curve, end) - target) <= 1e-12 * target:
                return end
        return None
    lo, hi = bracket
    flo = _slope_at(curve, lo) - target
    if flo == 0.0:
        return lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _slope_at(curve, mid) - target
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def build_dyadic_slope_sequence(curve: CurveSpec, J: int, max_iter: int = BISECT_MAX_ITER) -> SequencePair:
    """Solve gamma'(a_j) = 2^-j for J+1 consecutive indices and set b_j = gamma(a_j).

    Indices start at 0 when slope 1 is attained, otherwise at 1; a missing
    slope deeper in the range raises :class:`TruncationError` carrying the
    largest feasible J.
    """
    if J < 1:
        raise ValueError("J must be positive")
    j0 = 0
    first = _bisect_slope(curve, 1.0, max_iter)
    if first is None:
        j0 = 1
        first = _bisect_slope(curve, 0.5, max_iter)
        if first is None:
            raise TruncationError("truncation exceeds curve range (no feasible start)", 0)
    xs = [first]
    for j in range(j0 + 1, j0 + J + 1):
        x = _bisect_slope(curve, 2.0**-j, max_iter)
        if x is None:
            raise TruncationError(
                f"truncation exceeds curve range at j={j}; largest feasible J is {j - 1 - j0}",
                j - 1 - j0,
            )
        xs.append(x)
    a = np.array(xs, dtype=float)
    b = np.asarray(curve.gamma(a), dtype=float)
    direction = "decreasing" if a[1] < a[0] else "increasing"
    a_inf = curve.a_limit
    b_inf = curve.b_limit
    return SequencePair(a=a, b=b, direction=direction, j0=j0, a_inf=a_inf, b_inf=b_inf)


# --- classification -----------------------------------------------------------


@dataclass
class Classification:
    labels: list[str]
    lacunary_q: Optional[float] = None
    min_diff_ratio: Optional[float] = None
    max_diff_ratio: Optional[float] = None
    convex_failures: list[int] = field(default_factory=list)
    concave_failures: list[int] = field(default_factory=list)

    def __contains__(self, label):
        return label in self.labels


def classify_sequence(seq: SequencePair, tol: float = CLASSIFY_TOL) -> Classification:
    """Label |a_j| as convex / concave / lacunary(q) / arithmetic, with witnesses.

    Convexity and concavity compare consecutive difference magnitudes of
    |a_j|; equality within ``tol`` counts for both (hence "arithmetic").
    Lacunarity requires |a_j| increasing with min ratio q > 1.  Failing
    indices are reported rather than guessed around.
    """
    if seq.J < 3:
        raise ValueError("classification needs J >= 3")
    alpha = np.abs(seq.a)
    d = np.diff(alpha)
    if np.all(d > 0):
        pass
    elif np.all(d < 0):
        pass
    else:
        raise ValueError("classification undefined: |a_j| is not strictly monotone")
    dd = np.abs(d)
    scale = np.maximum(dd[1:], dd[:-1])
    grow = dd[1:] - dd[:-1]  # entry k compares steps into index k+1 vs k
    convex_fail = [seq.j0 + 1 + k for k in range(len(grow)) if grow[k] < -tol * scale[k]]
    concave_fail = [seq.j0 + 1 + k for k in range(len(grow)) if grow[k] > tol * scale[k]]
    labels = []
    if not convex_fail:
        labels.append("convex")
    if not concave_fail:
        labels.append("concave")
    if not convex_fail and not concave_fail:
        labels.append("arithmetic")
    q = None
    if np.all(d > 0):
        with np.errstate(divide="ignore"):
            ratios = np.where(alpha[:-1] > 0, alpha[1:] / alpha[:-1], np.inf)
        q = float(np.min(ratios))
        if q > 1.0 + tol:
            labels.append("lacunary")
    if not labels:
        labels.append("none")
    with np.errstate(divide="ignore", invalid="ignore"):
        dr = dd[1:] / dd[:-1]
    dr = dr[np.isfinite(dr)]
    return Classification(
        labels=labels,
        lacunary_q=q,
        min_diff_ratio=float(np.min(dr)) if len(dr) else None,
        max_diff_ratio=float(np.max(dr)) if len(dr) else None,
        convex_failures=convex_fail,
        concave_failures=concave_fail,
    )


def slope_band_check(curve: CurveSpec, lo: float, hi: float, samples: int = 10_000):
    """Sampled inf/sup of gamma' on [lo, hi) and the within-one-octave flag."""
    if not lo < hi:
        raise ValueError("empty interval")
    dlo, dhi = curve.domain
    if lo < dlo or hi > dhi + 1e-15:
        raise ValueError("interval leaves the curve domain")
    xs = lo + (hi - lo) * np.arange(samples) / samples
    vals = np.asarray(curve.dgamma(xs), dtype=float)
    inf_slope = float(np.min(vals))
    sup_slope = float(np.max(vals))
    band_ok = bool(inf_slope > 0.0 and sup_slope <= 2.0 * inf_slope)
    return inf_slope, sup_slope, band_ok


def derivative_consistency(curve: CurveSpec, points, rel_step: float = 1e-6) -> float:
    """Max relative gap between dgamma and a central difference of gamma."""
    pts = np.asarray(points, dtype=float)
    h = rel_step * np.maximum(1.0, np.abs(pts))
    approx = (curve.gamma(pts + h) - curve.gamma(pts - h)) / (2.0 * h)
    exact = np.asarray(curve.dgamma(pts), dtype=float)
    return float(np.max(np.abs(approx - exact) / np.maximum(np.abs(exact), 1e-300)))

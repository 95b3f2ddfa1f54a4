"""Whitney tile geometry over polygonal epigraphs and the discretized model form.

Each boundary triangle of a polygonal curve (vertices on the curve, slopes in
(0,1)) is pulled back by the segment's anisotropic map to the normalized
right triangle {0 <= y <= x <= w} whose hypotenuse lies on the main diagonal.
Whitney squares for the diagonal, side 2^k and centers on the 2^(k-10)
lattice, cover that triangle off its hypotenuse; pushing them forward gives
rectangle covers whose edges generate the interval collections and frequency
cubes of the discretized trilinear form.

The lattice family is astronomically large at production constants, so cover
construction selects squares per sample point (scale from the diagonal gap,
center snapped to the lattice) and verifies the two dilation conditions for
every selected square; nothing is ever admitted unchecked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .bumps import adapted_bump, fejer_sq_cdf, fejer_sq_spectrum
from .curves import SequencePair
from .engine import SampledFunction, apply_bilinear
from .intervals import HalfOpenInterval
from .symbols import SymbolSpec

__all__ = [
    "WhitneySquare",
    "TileRect",
    "MultiTile",
    "PolygonalGeometry",
    "CoverReport",
    "enumerate_whitney_squares",
    "build_cover",
    "edge_interval_collections",
    "cube_condition",
    "enumerate_multitiles",
    "k_interval",
    "chi_values",
    "mollified_partition",
    "partition_check",
    "build_adjoint_symbol",
    "model_sum_eval",
    "r2_samples",
]

LATTICE_EXP = 10  # centers live on 2^(k - LATTICE_EXP) Z^2 for side 2^k


@dataclass(frozen=True)
class WhitneySquare:
    """Axis-aligned square, side 2^k, center on the scale lattice."""

    cx: float
    cy: float
    k: int
    lattice_exp: int = LATTICE_EXP

    @property
    def side(self) -> float:
        return 2.0**self.k

    def satisfies(self, C0: float) -> bool:
        """Dilation by C0 misses the diagonal, dilation by 4 C0 meets it.

        For an axis-aligned square both reduce to exact comparisons of the
        center gap |cx - cy| against multiples of the side.
        """
        gap = abs(self.cx - self.cy)
        s = self.side
        return C0 * s < gap <= 4.0 * C0 * s

    def corners(self) -> np.ndarray:
        h = 0.5 * self.side
        return np.array(
            [
                [self.cx - h, self.cy - h],
                [self.cx + h, self.cy - h],
                [self.cx + h, self.cy + h],
                [self.cx - h, self.cy + h],
            ]
        )


def enumerate_whitney_squares(
    C0: float,
    window: tuple[float, float, float, float],
    scale_range: tuple[int, int],
    lattice_exp: int = LATTICE_EXP,
    max_count: int = 2_000_000,
) -> list[WhitneySquare]:
    """Every lattice square meeting the window that passes both conditions.

    ``scale_range`` is an inclusive pair (k_min, k_max).  The literal lattice
    is extremely fine; the enumeration walks only the diagonal band allowed
    by the conditions and refuses (with a hint) beyond ``max_count``
    candidates.
    """
    k_min, k_max = scale_range
    if k_min > k_max:
        raise ValueError("empty scale range")
    xlo, xhi, ylo, yhi = window
    out = []
    for k in range(k_min, k_max + 1):
        s = 2.0**k
        delta = 2.0 ** (k - lattice_exp)
        # center ranges for squares meeting the window
        pxlo = math.ceil((xlo - s / 2) / delta)
        pxhi = math.floor((xhi + s / 2) / delta)
        # the band C0*2^lattice_exp < |px - py| <= 4*C0*2^lattice_exp
        dlo = math.floor(C0 * 2.0**lattice_exp)
        dhi = math.floor(4.0 * C0 * 2.0**lattice_exp)
        span = (pxhi - pxlo + 1) * 2 * max(0, dhi - dlo)
        if span > max_count:
            raise ValueError(
                "lattice enumeration too large; shrink the window, coarsen "
                "lattice_exp, or use build_cover for constructive selection"
            )
        pylo = math.ceil((ylo - s / 2) / delta)
        pyhi = math.floor((yhi + s / 2) / delta)
        for px in range(pxlo, pxhi + 1):
            for sign in (1, -1):
                for d in range(dlo + 1, dhi + 1):
                    py = px - sign * d
                    if py < pylo or py > pyhi:
                        continue
                    sq = WhitneySquare(cx=px * delta, cy=py * delta, k=k, lattice_exp=lattice_exp)
                    if sq.satisfies(C0):
                        out.append(sq)
    return out


# --- polygon geometry ----------------------------------------------------------


@dataclass(frozen=True)
class PolygonalGeometry:
    """Vertices (a_j, b_j), j = first .. first + n, decreasing in both coords."""

    vertices: np.ndarray
    first_index: int = 0

    def __post_init__(self):
        pts = np.asarray(self.vertices, dtype=float)
        object.__setattr__(self, "vertices", pts)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError("need at least two vertices")
        if not (np.all(np.diff(pts[:, 0]) < 0) and np.all(np.diff(pts[:, 1]) < 0)):
            raise ValueError("vertices must be strictly decreasing in both coordinates")

    @classmethod
    def from_sequence(cls, seq: SequencePair) -> "PolygonalGeometry":
        return cls(vertices=np.column_stack([seq.a, seq.b]), first_index=seq.first_index())

    def segment_indices(self) -> range:
        return range(self.first_index, self.first_index + len(self.vertices) - 1)

    def _row(self, j: int) -> int:
        row = j - self.first_index
        if row < 0 or row >= len(self.vertices) - 1:
            raise ValueError(f"segment {j} outside the vertex range")
        return row

    def anchor(self, j: int) -> tuple[float, float]:
        row = self._row(j)
        return tuple(self.vertices[row])

    def width(self, j: int) -> float:
        row = self._row(j)
        return float(self.vertices[row, 0] - self.vertices[row + 1, 0])

    def slope(self, j: int) -> float:
        row = self._row(j)
        (a0, b0), (a1, b1) = self.vertices[row], self.vertices[row + 1]
        return float((b0 - b1) / (a0 - a1))

    def triangle(self, j: int) -> np.ndarray:
        """Vertices (a_j, b_j), (a_{j+1}, b_j), (a_{j+1}, b_{j+1})."""
        row = self._row(j)
        (a0, b0), (a1, b1) = self.vertices[row], self.vertices[row + 1]
        return np.array([[a0, b0], [a1, b0], [a1, b1]])

    def curve_height(self, xi) -> np.ndarray:
        """Piecewise-linear interpolant, end segments extended linearly."""
        xs = self.vertices[::-1, 0]
        ys = self.vertices[::-1, 1]
        xi = np.asarray(xi, dtype=float)
        out = np.interp(xi, xs, ys)
        s_lo = (ys[1] - ys[0]) / (xs[1] - xs[0])
        s_hi = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        out = np.where(xi < xs[0], ys[0] + s_lo * (xi - xs[0]), out)
        out = np.where(xi > xs[-1], ys[-1] + s_hi * (xi - xs[-1]), out)
        return out

    def epigraph_contains(self, xi, eta, tol: float = 0.0) -> np.ndarray:
        return np.asarray(eta, dtype=float) >= self.curve_height(xi) - tol


@dataclass(frozen=True)
class TileRect:
    """Pushforward of a Whitney square through a segment's anisotropic map.

    The generating square S = I x J sits in normalized coordinates; the
    rectangle is (a_j, b_j) + (-I) x (-s_j J), so its xi-side has the
    square's length and its eta-side is shorter by the factor s_j.
    """

    j: int
    square: WhitneySquare
    anchor: tuple[float, float]
    s_j: float

    @property
    def I(self) -> tuple[float, float]:
        h = 0.5 * self.square.side
        return (self.square.cx - h, self.square.cx + h)

    @property
    def Jn(self) -> tuple[float, float]:
        h = 0.5 * self.square.side
        return (self.square.cy - h, self.square.cy + h)

    @property
    def xi_range(self) -> tuple[float, float]:
        a, _ = self.anchor
        ilo, ihi = self.I
        return (a - ihi, a - ilo)

    @property
    def eta_range(self) -> tuple[float, float]:
        _, b = self.anchor
        jlo, jhi = self.Jn
        return (b - self.s_j * jhi, b - self.s_j * jlo)

    @property
    def aspect(self) -> float:
        (xlo, xhi), (elo, ehi) = self.xi_range, self.eta_range
        return (ehi - elo) / (xhi - xlo)

    def edge1(self) -> tuple[float, float]:
        """xi-extent (edge parallel to the horizontal axis)."""
        return self.xi_range

    def edge2(self) -> tuple[float, float]:
        """eta-extent (edge parallel to the vertical axis)."""
        return self.eta_range

    def edge3(self) -> tuple[float, float]:
        """-edge1 - edge2; equals K shifted by -(a_j + b_j)."""
        (xlo, xhi), (elo, ehi) = self.xi_range, self.eta_range
        return (-xhi - ehi, -xlo - elo)

    def corners(self) -> np.ndarray:
        (xlo, xhi), (elo, ehi) = self.xi_range, self.eta_range
        return np.array([[xlo, elo], [xhi, elo], [xhi, ehi], [xlo, ehi]])


def k_interval(rect: TileRect) -> HalfOpenInterval:
    """The output-frequency interval I + s_j J of the generating square."""
    ilo, ihi = rect.I
    jlo, jhi = rect.Jn
    return HalfOpenInterval(ilo + rect.s_j * jlo, ihi + rect.s_j * jhi, closure="right_open")


def r2_samples(n: int) -> np.ndarray:
    """Deterministic low-discrepancy points in the unit square (R2 sequence)."""
    g = 1.3247179572447460  # plastic constant
    idx = np.arange(1, n + 1)
    return np.column_stack([np.mod(idx / g, 1.0), np.mod(idx / g**2, 1.0)])


@dataclass
class CoverReport:
    j: int
    rects: list[TileRect]
    cover_ok: bool
    containment_ok: bool
    witnesses: list[tuple[float, float]]
    containment_failures: list[int]
    samples_used: int
    alpha: float
    C0: float

    def as_dict(self):
        return {
            "j": self.j,
            "alpha": self.alpha,
            "C0": self.C0,
            "num_rects": len(self.rects),
            "cover_ok": self.cover_ok,
            "containment_ok": self.containment_ok,
            "witnesses": [list(w) for w in self.witnesses],
            "containment_failures": self.containment_failures,
            "samples": self.samples_used,
        }


def build_cover(
    polygon: PolygonalGeometry,
    j: int,
    alpha: float = 0.9,
    C0: float = 16.0,
    samples: int = 10_000,
    lattice_exp: int = LATTICE_EXP,
) -> CoverReport:
    """Select Whitney squares whose alpha-shrunk rectangles cover T_j off its
    hypotenuse, and check that every rectangle stays inside the epigraph.

    Selection is constructive: each quasi-random sample of the normalized
    triangle picks the dyadic scale whose condition band brackets its
    diagonal gap and snaps a center to the lattice; every selected square is
    then re-verified against both dilation conditions.  Uncovered samples are
    reported as witnesses, never raised.
    """
    if not 0.0 < alpha < 0.999:
        raise ValueError("alpha must lie in (0, 0.999)")
    if alpha < 0.8:
        raise ValueError("alpha below 0.8 breaks the snapped-center margin")
    w = polygon.width(j)
    s_j = polygon.slope(j)
    a_j, b_j = polygon.anchor(j)

    uv = r2_samples(samples)
    x = w * np.maximum(uv[:, 0], uv[:, 1])
    y = w * np.minimum(uv[:, 0], uv[:, 1])
    gap = x - y
    keep = gap > w * 1e-12
    x, y, gap = x[keep], y[keep], gap[keep]

    # scale whose condition band brackets the gap; centers snapped to the
    # quarter-side sub-lattice 2^(k-2) Z^2, a sub-lattice of the full one
    k = np.floor(np.log2(gap / C0)).astype(int) - 1
    s = 2.0**k
    delta = 2.0 ** (k - 2)
    cx = np.round(x / delta) * delta
    cy = np.round(y / delta) * delta
    for _ in range(3):
        cg = cx - cy
        high = cg > 4.0 * C0 * s
        low = cg <= C0 * s
        if not (np.any(high) or np.any(low)):
            break
        cy = np.where(high, cy + delta, cy)
        cy = np.where(low, cy - delta, cy)

    cg = cx - cy
    cond_ok = (cg > C0 * s) & (cg <= 4.0 * C0 * s)
    in_shrink = (np.abs(x - cx) <= 0.5 * alpha * s) & (np.abs(y - cy) <= 0.5 * alpha * s)
    covered = cond_ok & in_shrink
    witnesses = [(float(a_j - xx), float(b_j - s_j * yy)) for xx, yy in zip(x[~covered], y[~covered])]

    keys = np.column_stack([k, np.round(cx / delta), np.round(cy / delta)])[covered]
    uniq, first_pos = np.unique(keys, axis=0, return_index=True)
    order = np.argsort(first_pos)
    rects = []
    sel = np.flatnonzero(covered)
    for pos in first_pos[order]:
        i = sel[pos]
        sq = WhitneySquare(cx=float(cx[i]), cy=float(cy[i]), k=int(k[i]), lattice_exp=lattice_exp)
        rects.append(TileRect(j=j, square=sq, anchor=(a_j, b_j), s_j=s_j))

    containment_failures = []
    if rects:
        ts = np.linspace(0.0, 1.0, 25)
        xlo = np.array([r.xi_range[0] for r in rects])[:, None]
        xhi = np.array([r.xi_range[1] for r in rects])[:, None]
        elo = np.array([r.eta_range[0] for r in rects])[:, None]
        ehi = np.array([r.eta_range[1] for r in rects])[:, None]
        edge_x = np.concatenate(
            [xlo + (xhi - xlo) * ts, xlo + (xhi - xlo) * ts,
             np.repeat(xlo, 25, axis=1), np.repeat(xhi, 25, axis=1)], axis=1
        )
        edge_y = np.concatenate(
            [np.repeat(elo, 25, axis=1), np.repeat(ehi, 25, axis=1),
             elo + (ehi - elo) * ts, elo + (ehi - elo) * ts], axis=1
        )
        ok = np.all(polygon.epigraph_contains(edge_x, edge_y), axis=1)
        containment_failures = [int(i) for i in np.flatnonzero(~ok)]

    return CoverReport(
        j=j,
        rects=rects,
        cover_ok=bool(np.all(covered)),
        containment_ok=not containment_failures,
        witnesses=witnesses,
        containment_failures=containment_failures,
        samples_used=int(len(x)),
        alpha=alpha,
        C0=C0,
    )


def _dilate(iv: tuple[float, float], factor: float) -> tuple[float, float]:
    lo, hi = iv
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return (c - factor * h, c + factor * h)


def _max_overlap_closed(intervals: Sequence[tuple[float, float]]) -> int:
    """Sweep line; at a shared coordinate opens precede closes, so touching
    closed intervals count as overlapping (conservative)."""
    if not intervals:
        return 0
    events = sorted(
        [(lo, 0) for lo, _ in intervals] + [(hi, 1) for _, hi in intervals]
    )
    best = cur = 0
    for _, kind in events:
        if kind == 0:
            cur += 1
            best = max(best, cur)
        else:
            cur -= 1
    return best


def edge_interval_collections(rects: Sequence[TileRect], alpha: float) -> dict:
    """Dilated edge-interval families and their maximal overlap counts.

    For each rectangle the three edges are its xi-extent, its eta-extent and
    the negated sum of the two; each family is dilated by 1/alpha about
    interval centers before the overlap count.
    """
    if not rects:
        raise ValueError("nonempty rectangle list required")
    fams = {1: [], 2: [], 3: []}
    for r in rects:
        fams[1].append(_dilate(r.edge1(), 1.0 / alpha))
        fams[2].append(_dilate(r.edge2(), 1.0 / alpha))
        fams[3].append(_dilate(r.edge3(), 1.0 / alpha))
    return {
        "intervals": fams,
        "max_overlap": {i: _max_overlap_closed(fams[i]) for i in fams},
    }


# --- frequency cubes and multi-tiles --------------------------------------------


def cube_condition(center: tuple[float, float, float], side: float, C0: float, variant: str = "line") -> bool:
    """Dilation conditions for cubes in frequency 3-space.

    ``line`` measures against the diagonal line {(t,t,t)}: the C0-dilate
    misses it iff the center-coordinate spread exceeds C0 * side, the
    10 C0-dilate meets it iff the spread is at most 10 C0 * side.  ``plane``
    measures against {xi + eta + theta = 0} through the center sum.
    """
    if variant == "line":
        spread = max(center) - min(center)
        return C0 * side < spread <= 10.0 * C0 * side
    if variant == "plane":
        total = abs(sum(center))
        return 1.5 * C0 * side < total <= 15.0 * C0 * side
    raise ValueError("variant must be 'line' or 'plane'")


@dataclass(frozen=True)
class MultiTile:
    """Space interval plus transformed frequency cube for one segment.

    omega1 = -I, omega2 = -s_j J, omega3 = (1 + s_j) K for a generating cube
    I x J x K; the space interval length is base^(-j) for the configured
    exponent base.
    """

    I_P: tuple[float, float]
    omega1: tuple[float, float]
    omega2: tuple[float, float]
    omega3: tuple[float, float]
    j: int
    scale_k: int
    cube_center: tuple[float, float, float]
    rect_key: int = 0

    @property
    def j_P(self) -> int:
        return self.j


def _omega3_family(
    rect: TileRect,
    C0: float,
    alpha: float,
    variant: str,
    lattice_exp: int,
    stride_frac: float = 0.25,
) -> list[tuple[tuple[float, float], tuple[float, float, float]]]:
    """Third-coordinate cubes whose stretched images cover supp phi_K.

    Returns (omega3, cube_center) pairs; omega3 = (1 + s_j) K'.  Coverage
    target is the (1/sqrt(alpha))-dilation of K = I + s_j J, matching the
    plateau of the wide third-slot prefilter.
    """
    s = rect.square.side
    s_j = rect.s_j
    K = k_interval(rect)
    target = _dilate((K.lo, K.hi), 1.0 / math.sqrt(alpha))
    stretch = 1.0 + s_j
    delta = 2.0 ** (rect.square.k - lattice_exp)
    stride = max(1, int(round(stride_frac * s / delta)))
    c_pred = 0.5 * (K.lo + K.hi) / stretch
    base_slot = int(round(c_pred / delta))
    out = []
    span = int(math.ceil((target[1] - target[0]) / (stretch * stride * delta))) + 4
    for step in range(-span, span + 1):
        cK = (base_slot + step * stride) * delta
        lo3 = stretch * (cK - 0.5 * s)
        hi3 = stretch * (cK + 0.5 * s)
        if hi3 < target[0] - 0.25 * stretch * s or lo3 > target[1] + 0.25 * stretch * s:
            continue
        center = (rect.square.cx, rect.square.cy, cK)
        if cube_condition(center, s, C0, variant):
            out.append(((lo3, hi3), center))
    return out


def enumerate_multitiles(
    C0: float,
    exponent_base: int,
    j: int,
    rects: Sequence[TileRect],
    space_len: float,
    window: Optional[tuple[float, float]] = None,
    variant: str = "line",
    alpha: float = 0.9,
    lattice_exp: int = LATTICE_EXP,
) -> list[MultiTile]:
    """Multi-tiles for one segment: frequency cubes paired with space tiles.

    The space tiles partition [0, space_len) dyadically with length
    base^(-j) per the scale relation; ``space_len`` must be an integer
    multiple of that length.  ``window``, when given, restricts the third
    cube coordinate.
    """
    tile_len = float(exponent_base) ** (-j)
    count = space_len / tile_len
    if abs(count - round(count)) > 1e-9 or round(count) < 1:
        raise ValueError("space_len must be a positive integer multiple of base^(-j)")
    count = int(round(count))
    tiles = []
    for key, rect in enumerate(rects):
        if rect.j != j:
            raise ValueError("rect segment index does not match j")
        fam = _omega3_family(rect, C0, alpha, variant, lattice_exp)
        if window is not None:
            fam = [fc for fc in fam if window[0] <= fc[1][2] <= window[1]]
        for (om3, center) in fam:
            ilo, ihi = rect.I
            jlo, jhi = rect.Jn
            om1 = (-ihi, -ilo)
            om2 = (-rect.s_j * jhi, -rect.s_j * jlo)
            for m in range(count):
                tiles.append(
                    MultiTile(
                        I_P=(m * tile_len, (m + 1) * tile_len),
                        omega1=om1,
                        omega2=om2,
                        omega3=om3,
                        j=j,
                        scale_k=rect.square.k,
                        cube_center=center,
                        rect_key=key,
                    )
                )
    if window is not None and not tiles:
        raise ValueError("window too small to contain any cube")
    return tiles


# --- mollified partition of unity ------------------------------------------------


def omega3_partition_check(
    rect: TileRect,
    C0: float,
    alpha: float = 0.9,
    n: int = 10_000,
    variant: str = "line",
    lattice_exp: int = LATTICE_EXP,
) -> float:
    """Max gap between the summed third-slot pieces and the wide output bump.

    The pieces are the output-interval bumps weighted to partition the bump
    that is 1 on K and supported on its (1/sqrt(alpha))-dilation.
    """
    fam = [om for om, _ in _omega3_family(rect, C0, alpha, variant, lattice_exp)]
    if not fam:
        raise ValueError("no admissible third-slot cubes for this rectangle")
    K = k_interval(rect)
    plateau_wide = math.sqrt(alpha)
    supp = _dilate((K.lo, K.hi), 1.0 / plateau_wide)
    pad = 0.5 * (supp[1] - supp[0])
    xs = np.linspace(supp[0] - pad, supp[1] + pad, n)
    phi = adapted_bump(xs, supp[0], supp[1], plateau=plateau_wide)
    raw = [adapted_bump(xs, lo, hi, plateau=alpha) for lo, hi in fam]
    total = np.sum(raw, axis=0)
    pieces = np.zeros_like(xs)
    for bval in raw:
        pieces += np.where(total > 0.0, phi * bval / np.where(total > 0, total, 1.0), 0.0)
    return float(np.max(np.abs(pieces - phi)))


def _base_radius(exponent_base: int) -> float:
    return 4.0 ** (-float(exponent_base))


def chi_values(x, interval: tuple[float, float], j: int, exponent_base: int) -> np.ndarray:
    """1_I convolved with the scale-j dilate of the mollifier, exactly.

    The kernel at scale j is lam * rho(lam x) with lam = base^(-j), so the
    convolution is a difference of two exact kernel CDFs.
    """
    lam = float(exponent_base) ** (-j)
    r0 = _base_radius(exponent_base)
    lo, hi = interval
    x = np.asarray(x, dtype=float)
    return fejer_sq_cdf(lam * (x - lo), r0) - fejer_sq_cdf(lam * (x - hi), r0)


def mollified_partition(interval: tuple[float, float], j0: int, exponent_base: int, n: int = 2048):
    """Sampled chi for one interval: (x grid over 3 widths, chi values)."""
    lo, hi = interval
    pad = hi - lo
    xs = np.linspace(lo - pad, hi + pad, n)
    return xs, chi_values(xs, interval, j0, exponent_base)


def partition_check(
    j0: int,
    exponent_base: int,
    window: tuple[float, float],
    n: int = 512,
    tail: float = 1e-8,
    max_tiles: int = 200_000,
) -> float:
    """Max |1 - sum of same-scale tile mollifications| on the window interior.

    The scale relation ties the tile length to base^(-j0); tiles are summed
    one by one out to a margin where the kernel mass beyond contributes less
    than ``tail`` per side.  The kernel decays like the inverse cube of
    distance, so scales whose kernel is much wider than the tile (j0 well
    above 0) need astronomically many tiles and are rejected.
    """
    tile_len = float(exponent_base) ** (-j0)
    lam = 1.0 / tile_len
    r0 = _base_radius(exponent_base)
    lo_m, hi_m = tile_len, tile_len
    while fejer_sq_cdf(-lam * hi_m, r0) > tail and hi_m < 1e9 * tile_len:
        hi_m *= 2.0
    while hi_m - lo_m > 1e-3 * tile_len:
        mid = 0.5 * (lo_m + hi_m)
        if fejer_sq_cdf(-lam * mid, r0) > tail:
            lo_m = mid
        else:
            hi_m = mid
    halfw = hi_m
    wlo, whi = window
    m_lo = math.floor((wlo - halfw) / tile_len)
    m_hi = math.ceil((whi + halfw) / tile_len)
    if m_hi - m_lo > max_tiles:
        raise ValueError(
            "kernel much wider than the tiles at this scale; use a smaller j0"
        )
    inset = tile_len
    xs = np.linspace(wlo + inset, whi - inset, n)
    # per-tile chi = difference of edge CDFs; evaluate every edge in one
    # batch and difference along the tile axis
    edges = np.arange(m_lo, m_hi + 2) * tile_len
    cdf = fejer_sq_cdf(lam * (xs[None, :] - edges[:, None]), r0)
    total = np.sum(cdf[:-1] - cdf[1:], axis=0)
    return float(np.max(np.abs(1.0 - total)))


# --- discretized model form ------------------------------------------------------


def _pad_freqs(M: int, L: float):
    return np.arange(-M // 2, M // 2) / L


def _chi_coeffs(interval: tuple[float, float], j: int, exponent_base: int, M: int, L: float) -> np.ndarray:
    """Centered Fourier coefficients of the periodized mollified cutoff."""
    lam = float(exponent_base) ** (-j)
    r0 = _base_radius(exponent_base)
    xi = _pad_freqs(M, L)
    lo, hi = interval
    with np.errstate(divide="ignore", invalid="ignore"):
        box = np.where(
            xi == 0.0,
            hi - lo,
            (np.exp(-2j * np.pi * xi * lo) - np.exp(-2j * np.pi * xi * hi)) / (2j * np.pi * xi),
        )
    return box * fejer_sq_spectrum(xi / lam, r0) / L


def _product_integral(u_hat: np.ndarray, v_hat: np.ndarray, L: float) -> complex:
    """Period integral of u*v from centered coefficient arrays (slot 0 pairs
    with the absent +Nyquist slot and is dropped)."""
    return L * np.sum(u_hat * np.roll(v_hat[::-1], 1))


def _int_shift(value: float, L: float) -> int:
    slots = value * L
    if abs(slots - round(slots)) > 1e-9:
        raise ValueError(
            "parameter mismatch: modulation centers must sit on the frequency lattice 1/L"
        )
    return int(round(slots))


def build_adjoint_symbol(rects: Sequence[TileRect], alpha: float) -> SymbolSpec:
    """Sum over rectangles of the tensor tile bumps, anchored per segment."""
    data = []
    for r in rects:
        ilo, ihi = r.I
        jlo, jhi = r.Jn
        a, b = r.anchor
        data.append((a, b, (-ihi, -ilo), (-r.s_j * jhi, -r.s_j * jlo)))

    def ev(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for a, b, om1, om2 in data:
            out = out + adapted_bump(xi - a, om1[0], om1[1], alpha) * adapted_bump(
                eta - b, om2[0], om2[1], alpha
            )
        return out

    return SymbolSpec(evaluator=ev, kind="smooth_adapted", bbox=None, label="tile_bump_sum")


def model_sum_eval(
    f: SampledFunction,
    g: SampledFunction,
    h: SampledFunction,
    tiles: Sequence[MultiTile],
    rects: Sequence[TileRect],
    seq: SequencePair,
    alpha: float,
    exponent_base: int,
) -> dict:
    """Evaluate the discretized trilinear model form and its direct counterpart.

    Model side: sum over multi-tiles of the integral of the mollified space
    cutoff times the three tile projections of the modulated, prefiltered
    inputs.  Direct side: the tile-bump symbol applied as a bilinear
    multiplier against raw f, g, paired with raw h.  With all bumps cut from
    the shared profile the two agree exactly up to rounding; ``deviation``
    is their relative gap.  Anchors must sit on the frequency lattice.
    """
    if not (f.N == g.N == h.N) or not (f.L == g.L == h.L):
        raise ValueError("common grid required")
    N, L = f.N, f.L
    M = 4 * N
    freqs_pad = _pad_freqs(M, L)
    plateau_wide = math.sqrt(alpha)

    by_j: dict[int, list[MultiTile]] = {}
    for t in tiles:
        by_j.setdefault(t.j, []).append(t)
    rects_by_key = {key: r for key, r in enumerate(rects)}

    def pad_coeffs(fn: SampledFunction) -> np.ndarray:
        out = np.zeros(M, dtype=complex)
        c = fn.coeffs()
        out[(M - N) // 2 : (M + N) // 2] = c
        return out

    cf, cg, ch = pad_coeffs(f), pad_coeffs(g), pad_coeffs(h)

    def prefilter(c: np.ndarray, edges: list[tuple[float, float]]) -> np.ndarray:
        # support (1/alpha)-dilate of the edge, plateau its (1/sqrt(alpha))-dilate
        acc = None
        for lo, hi in edges:
            b = adapted_bump(freqs_pad, *_dilate((lo, hi), 1.0 / alpha), plateau=plateau_wide)
            acc = b if acc is None else 1.0 - (1.0 - acc) * (1.0 - b)
        return c * acc

    def shifted(c: np.ndarray, shift_slots: int) -> np.ndarray:
        idx = np.arange(M) + shift_slots
        ok = (idx >= 0) & (idx < M)
        return np.where(ok, c[np.clip(idx, 0, M - 1)], 0.0)

    model_value = 0.0 + 0.0j
    model_abs = 0.0
    for j, group in sorted(by_j.items()):
        a_j, b_j = seq.a_at(j), seq.b_at(j)
        sa, sb = _int_shift(a_j, L), _int_shift(b_j, L)
        keys = sorted({t.rect_key for t in group})
        edges1 = [rects_by_key[k].edge1() for k in keys]
        edges2 = [rects_by_key[k].edge2() for k in keys]
        edges3 = [rects_by_key[k].edge3() for k in keys]
        cfj = prefilter(cf, edges1)
        cgj = prefilter(cg, edges2)
        chj = prefilter(ch, edges3)

        # third-slot partition weights per rectangle
        fam_by_key: dict[int, list[tuple[float, float]]] = {}
        for t in group:
            fam_by_key.setdefault(t.rect_key, [])
            if t.omega3 not in fam_by_key[t.rect_key]:
                fam_by_key[t.rect_key].append(t.omega3)

        psi3: dict[tuple[int, tuple[float, float]], np.ndarray] = {}
        for key, fam in fam_by_key.items():
            rect = rects_by_key[key]
            K = k_interval(rect)
            supp = _dilate((K.lo, K.hi), 1.0 / plateau_wide)
            phi_K = adapted_bump(freqs_pad, supp[0], supp[1], plateau=plateau_wide)
            raw = [adapted_bump(freqs_pad, lo, hi, plateau=alpha) for lo, hi in fam]
            total = np.sum(raw, axis=0)
            for om3, b in zip(fam, raw):
                psi3[(key, om3)] = np.where(total > 0.0, phi_K * b / np.where(total > 0, total, 1.0), 0.0)

        group_value = 0.0 + 0.0j
        uv_cache: dict[int, np.ndarray] = {}
        q_cache: dict[tuple[int, tuple[float, float]], np.ndarray] = {}
        for t in group:
            key = t.rect_key
            if key not in uv_cache:
                u_hat = adapted_bump(freqs_pad, *t.omega1, plateau=alpha) * shifted(cfj, sa)
                v_hat = adapted_bump(freqs_pad, *t.omega2, plateau=alpha) * shifted(cgj, sb)
                u = np.fft.ifft(np.fft.ifftshift(u_hat)) * M
                v = np.fft.ifft(np.fft.ifftshift(v_hat)) * M
                uv_cache[key] = u * v
            qkey = (key, t.omega3)
            if qkey not in q_cache:
                w_hat = psi3[qkey] * shifted(chj, -sa - sb)
                wv = np.fft.ifft(np.fft.ifftshift(w_hat)) * M
                q = uv_cache[key] * wv
                q_cache[qkey] = np.fft.fftshift(np.fft.fft(q)) / M
            q_hat = q_cache[qkey]
            chi_hat = _chi_coeffs(t.I_P, t.j, exponent_base, M, L)
            group_value += _product_integral(chi_hat, q_hat, L)
        model_value += group_value
        model_abs += abs(group_value)

    adjoint_value = 0.0 + 0.0j
    for j, group in sorted(by_j.items()):
        keys = sorted({t.rect_key for t in group})
        sym = build_adjoint_symbol([rects_by_key[k] for k in keys], alpha)
        B = apply_bilinear(sym, f, g)
        b_hat = np.fft.fftshift(np.fft.fft(B.samples)) / B.N
        h_pad = np.zeros(B.N, dtype=complex)
        h_pad[(B.N - N) // 2 : (B.N + N) // 2] = h.coeffs()
        adjoint_value += _product_integral(b_hat, h_pad, L)

    deviation = abs(model_value - adjoint_value) / (abs(adjoint_value) + 1e-30)
    return {
        "model_value": complex(model_value),
        "adjoint_value": complex(adjoint_value),
        "deviation": float(deviation),
        "model_abs": float(model_abs),
        "num_tiles": len(tiles),
    }

"""Frequency-plane symbol constructors and decomposition identities.

Every symbol is a {0,1}-valued (or smoothly adapted [0,1]-valued) function
on the (xi, eta) plane packaged with a bounding box.  Evaluators implement
the half-open boundary conventions literally, so the staircase/boundary
decomposition of an epigraph and the rectangle-minus-complement rewrite hold
exactly at every grid point, not just almost everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bumps import adapted_bump
from .curves import CurveSpec, SequencePair, piecewise_linear_curve

__all__ = [
    "SymbolSpec",
    "FrequencyGrid",
    "staircase_symbol",
    "increasing_staircase_symbol",
    "boundary_piece_symbol",
    "epigraph_symbol",
    "polygonal_epigraph_symbol",
    "exponential_paraproduct_symbols",
    "hyp2_rewrite_pair",
    "reflected_symbol",
    "constant_symbol",
    "rectangle_symbol",
    "sample_symbol",
    "bitmap_to_pgm",
]


@dataclass(frozen=True)
class SymbolSpec:
    """A multiplier symbol: vectorized evaluator plus support metadata.

    ``bbox`` is (xi_lo, xi_hi, eta_lo, eta_hi) outside which the symbol
    vanishes, or None for unbounded support.
    """

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    kind: str = "sharp_indicator"
    bbox: Optional[tuple[float, float, float, float]] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("sharp_indicator", "smooth_adapted"):
            raise ValueError("kind must be sharp_indicator or smooth_adapted")

    def __call__(self, xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.asarray(self.evaluator(xi, eta), dtype=float)
        return out


def constant_symbol(value: float = 1.0) -> SymbolSpec:
    return SymbolSpec(
        evaluator=lambda xi, eta: np.full(np.broadcast(xi, eta).shape, float(value)),
        bbox=None,
        label=f"const({value})",
    )


def rectangle_symbol(xi_iv, eta_iv) -> SymbolSpec:
    """Indicator of [xi_lo, xi_hi) x [eta_lo, eta_hi)."""
    (xlo, xhi), (elo, ehi) = xi_iv, eta_iv

    def ev(xi, eta):
        return ((xi >= xlo) & (xi < xhi) & (eta >= elo) & (eta < ehi)).astype(float)

    return SymbolSpec(evaluator=ev, bbox=(xlo, xhi, elo, ehi), label="rectangle")


def staircase_symbol(seq: SequencePair) -> SymbolSpec:
    """Sum over j of 1_[a_{j+1}, a_j)(xi) * 1_[b_j, b_top)(eta), decreasing pairs.

    b_top is the first stored b; the leading step is empty and the sum runs
    from the next index through the truncation.
    """
    if seq.direction != "decreasing":
        raise ValueError("use increasing_staircase_symbol for increasing pairs")
    first, last = seq.first_index(), seq.last_index()
    a = seq.a
    b = seq.b
    b_top = float(b[0])

    def ev(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for k in range(1, len(a) - 1):
            step = (xi >= a[k + 1]) & (xi < a[k]) & (eta >= b[k]) & (eta < b_top)
            out = np.maximum(out, step.astype(float))
        return out

    bbox = (float(a[-1]), float(a[1]), float(b[-1]), b_top)
    return SymbolSpec(evaluator=ev, bbox=bbox, label="staircase")


def increasing_staircase_symbol(u: SequencePair, v: SequencePair) -> SymbolSpec:
    """Sum over j of 1_(u_0, u_j](xi) * 1_[v_j, v_{j+1})(eta), increasing pairs."""
    if u.direction != "increasing" or v.direction != "increasing":
        raise ValueError("increasing staircase needs strictly increasing pairs")
    if len(u.a) != len(v.a):
        raise ValueError("u and v must share the truncation")
    uu = u.a
    vv = v.a
    u0 = float(uu[0])

    def ev(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for k in range(1, len(uu) - 1):
            step = (xi > u0) & (xi <= uu[k]) & (eta >= vv[k]) & (eta < vv[k + 1])
            out = np.maximum(out, step.astype(float))
        return out

    bbox = (u0, float(uu[-2]), float(vv[1]), float(vv[-1]))
    return SymbolSpec(evaluator=ev, bbox=bbox, label="increasing_staircase")


def boundary_piece_symbol(curve: CurveSpec, seq: SequencePair, j: int) -> SymbolSpec:
    """Indicator of {a_{j+1} <= xi < a_j, gamma(xi) <= eta < b_j}."""
    if j < seq.first_index() or j >= seq.last_index():
        raise ValueError(f"piece index {j} outside [{seq.first_index()}, {seq.last_index()})")
    alo, ahi = seq.a_at(j + 1), seq.a_at(j)
    btop = seq.b_at(j)

    def ev(xi, eta):
        strip = (xi >= alo) & (xi < ahi)
        g = np.where(strip, curve.gamma(np.where(strip, xi, 0.5 * (alo + ahi))), 0.0)
        return (strip & (eta >= g) & (eta < btop)).astype(float)

    return SymbolSpec(
        evaluator=ev,
        bbox=(alo, ahi, seq.b_at(j + 1), btop),
        label=f"boundary_piece[{j}]",
    )


def epigraph_symbol(curve: CurveSpec, restriction: tuple[float, float]) -> SymbolSpec:
    """Indicator of {xi in [lo, hi), eta >= gamma(xi)} (closed at the graph)."""
    lo, hi = float(restriction[0]), float(restriction[1])
    if not lo < hi:
        raise ValueError("empty restriction interval")

    anchor = 0.5 * (lo + hi) if math.isfinite(lo) else hi - 1.0

    def ev(xi, eta):
        strip = (xi >= lo) & (xi < hi)
        safe = np.where(strip, xi, anchor)
        g = np.where(strip, curve.gamma(safe), np.inf)
        return (strip & (eta >= g)).astype(float)

    return SymbolSpec(evaluator=ev, bbox=None, label="epigraph")


def polygonal_epigraph_symbol(vertices) -> SymbolSpec:
    """Indicator of the region on or above the polygonal curve through
    ``vertices``, restricted to the xi-range [a_last, a_first).

    Vertices must be strictly decreasing in both coordinates and every
    segment slope must lie in (0, 1); the offending segment index is
    reported otherwise.
    """
    pts = np.asarray(vertices, dtype=float)
    a = pts[:, 0]
    b = pts[:, 1]
    if not (np.all(np.diff(a) < 0) and np.all(np.diff(b) < 0)):
        raise ValueError("vertices must be strictly decreasing in both coordinates")
    slopes = np.diff(b) / np.diff(a)
    for k, s in enumerate(slopes):
        if not 0.0 < s < 1.0:
            raise ValueError(f"segment {k} has slope {s} outside (0, 1)")
    xs = a[::-1]
    ys = b[::-1]

    def ev(xi, eta):
        strip = (xi >= xs[0]) & (xi < xs[-1])
        g = np.interp(np.asarray(xi, dtype=float), xs, ys)
        return (strip & (eta >= g)).astype(float)

    return SymbolSpec(
        evaluator=ev,
        bbox=None,
        label="polygonal_epigraph",
    )


def exponential_paraproduct_symbols(J: int):
    """The three staircase pieces inscribed in eta = 2^xi, truncated at J.

    m1: steps [-(j+1), -j) x [2^-j, 1) for j = 0..J.
    m2: columns (0, j) x [2^j, 2^{j+1}) for j = 1..J (open xi-interval).
    m3: quadrant {xi <= 0, eta >= 1}.
    """
    if J < 1:
        raise ValueError("J must be positive")

    def ev1(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for j in range(0, J + 1):
            step = (xi >= -(j + 1)) & (xi < -j) & (eta >= 2.0**-j) & (eta < 1.0)
            out = np.maximum(out, step.astype(float))
        return out

    def ev2(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for j in range(1, J + 1):
            step = (xi > 0.0) & (xi < j) & (eta >= 2.0**j) & (eta < 2.0 ** (j + 1))
            out = np.maximum(out, step.astype(float))
        return out

    def ev3(xi, eta):
        return ((xi <= 0.0) & (eta >= 1.0)).astype(float)

    m1 = SymbolSpec(evaluator=ev1, bbox=(-(J + 1.0), 0.0, 2.0**-J, 1.0), label="exp_m1")
    m2 = SymbolSpec(evaluator=ev2, bbox=(0.0, float(J), 2.0, 2.0 ** (J + 1)), label="exp_m2")
    m3 = SymbolSpec(evaluator=ev3, bbox=None, label="exp_m3")
    return m1, m2, m3


def hyp2_rewrite_pair(seq: SequencePair):
    """Rectangle and complement staircase whose difference is the staircase.

    rect = 1_{a_inf < xi < a_first} * 1_{b_inf < eta < b_top}; complement =
    sum over j of 1_[a_{j+1}, a_j)(xi) * 1_(b_inf, b_j)(eta).  When a_inf is
    -infinity the rectangle's xi-side is truncated to [a_last, a_first) and
    flagged.  rect - complement equals the staircase pointwise for xi in the
    resolved strip [a_last, a_first).
    """
    if seq.direction != "decreasing":
        raise ValueError("rewrite applies to decreasing pairs")
    if seq.b_inf is None or not math.isfinite(seq.b_inf):
        raise ValueError("limit required: rewrite needs a finite b_inf")
    b_inf = float(seq.b_inf)
    a = seq.a
    b = seq.b
    b_top = float(b[0])
    tail_truncated = seq.a_inf is None or not math.isfinite(seq.a_inf)
    a_lo = float(a[-1]) if tail_truncated else float(seq.a_inf)

    def ev_rect(xi, eta):
        inside = (xi > a_lo) & (xi < a[0]) & (eta > b_inf) & (eta < b_top)
        if tail_truncated:
            inside = inside & (xi >= a[-1])
        return inside.astype(float)

    def ev_comp(xi, eta):
        out = np.zeros(np.broadcast(xi, eta).shape)
        for k in range(0, len(a) - 1):
            step = (xi >= a[k + 1]) & (xi < a[k]) & (eta > b_inf) & (eta < b[k])
            out = np.maximum(out, step.astype(float))
        return out

    rect = SymbolSpec(
        evaluator=ev_rect,
        bbox=(a_lo, float(a[0]), b_inf, b_top),
        label="rewrite_rect" + ("_tail_truncated" if tail_truncated else ""),
    )
    comp = SymbolSpec(
        evaluator=ev_comp,
        bbox=(float(a[-1]), float(a[0]), b_inf, b_top),
        label="rewrite_complement",
    )
    return rect, comp


def reflected_symbol(sym: SymbolSpec) -> SymbolSpec:
    """Swap the roles of xi and eta."""
    bbox = None
    if sym.bbox is not None:
        xlo, xhi, elo, ehi = sym.bbox
        bbox = (elo, ehi, xlo, xhi)
    return SymbolSpec(
        evaluator=lambda xi, eta: sym.evaluator(eta, xi),
        kind=sym.kind,
        bbox=bbox,
        label=sym.label + "_reflected",
    )


# --- sampling -----------------------------------------------------------------


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform cell-center sampling of a frequency window."""

    window: tuple[float, float, float, float]  # xi_lo, xi_hi, eta_lo, eta_hi
    nx: int
    ny: int

    def xi_values(self) -> np.ndarray:
        xlo, xhi, _, _ = self.window
        return xlo + (xhi - xlo) * (np.arange(self.nx) + 0.5) / self.nx

    def eta_values(self) -> np.ndarray:
        _, _, elo, ehi = self.window
        return elo + (ehi - elo) * (np.arange(self.ny) + 0.5) / self.ny


def sample_symbol(sym: SymbolSpec, grid: Optional[FrequencyGrid] = None, nx: int = 256, ny: int = 256) -> np.ndarray:
    """Row-major bitmap: entry [i, k] is the symbol at (xi_i, eta_k).

    Without an explicit grid the symbol's own bounding box is used; an
    unbounded symbol then has no usable window and is rejected.
    """
    if grid is None:
        if sym.bbox is None:
            raise ValueError("unbounded symbol needs an explicit sampling window")
        grid = FrequencyGrid(window=sym.bbox, nx=nx, ny=ny)
    xi = grid.xi_values()[:, None]
    eta = grid.eta_values()[None, :]
    return sym(xi, eta)


def bitmap_to_pgm(bitmap: np.ndarray) -> str:
    """Plain PGM (P2) text; rows run from the top of the eta axis down."""
    scaled = np.clip(np.rint(np.asarray(bitmap, dtype=float) * 255), 0, 255).astype(int)
    rows = scaled.T[::-1]
    lines = [f"P2", f"{rows.shape[1]} {rows.shape[0]}", "255"]
    for row in rows:
        lines.append(" ".join(str(v) for v in row))
    return "\n".join(lines) + "\n"

"""Independent oracles kept deliberately naive.

These recompute results by brute force (direct double sums, exhaustive
coloring, point sampling) so the fast implementations are checked against
code that shares none of their structure.
"""

import numpy as np


def bilinear_double_sum(sym, f, g):
    """Direct double frequency sum of the bilinear action, on the 2N grid."""
    c, d = f.coeffs(), g.coeffs()
    freqs = f.freqs()
    M = sym(freqs[:, None], freqs[None, :])
    n_out = 2 * f.N
    xs = f.L * np.arange(n_out) / n_out
    out = np.zeros(n_out, dtype=complex)
    for i in range(f.N):
        if c[i] == 0:
            continue
        for j in range(f.N):
            w = M[i, j] * c[i] * d[j]
            if w == 0:
                continue
            out += w * np.exp(2j * np.pi * (freqs[i] + freqs[j]) * xs)
    return out


def exact_chromatic_number(intervals):
    """Smallest number of colors by exhaustive search (use only for <= 8)."""
    n = len(intervals)
    adj = [[intervals[i].overlaps(intervals[j]) for j in range(n)] for i in range(n)]

    def feasible(k):
        colors = [-1] * n

        def place(i):
            if i == n:
                return True
            used = {colors[j] for j in range(i) if adj[i][j]}
            for col in range(k):
                if col not in used:
                    colors[i] = col
                    if place(i + 1):
                        return True
            colors[i] = -1
            return False

        return place(0)

    for k in range(1, n + 1):
        if feasible(k):
            return k
    return n


def whitney_conditions_by_sampling(square, C0, n=1000):
    """(C0-dilate misses diagonal, 4C0-dilate meets it), by point sampling.

    The first condition samples the dilated square densely and requires a
    strictly one-sided xi - eta sign; the second scans diagonal points for
    membership in the larger dilate.
    """
    rng = np.random.default_rng(12345)
    s = square.side

    def misses(lam):
        half = 0.5 * lam * s
        pts = rng.uniform(-half, half, size=(n, 2))
        d = (square.cx + pts[:, 0]) - (square.cy + pts[:, 1])
        # also take the corners, where the extremes live
        for ex in (-half, half):
            for ey in (-half, half):
                d = np.append(d, (square.cx + ex) - (square.cy + ey))
        return bool(np.all(d > 0) or np.all(d < 0))

    def meets(lam):
        half = 0.5 * lam * s
        t = np.linspace(
            min(square.cx, square.cy) - half, max(square.cx, square.cy) + half, n
        )
        inside = (np.abs(t - square.cx) <= half) & (np.abs(t - square.cy) <= half)
        return bool(np.any(inside))

    return misses(C0), meets(4 * C0)

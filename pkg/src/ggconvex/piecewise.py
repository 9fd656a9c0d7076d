"""Exact piecewise-linear convex functions on the real line.

Internal machinery behind conjugation, biconjugation and the duality
transforms.  A convex piecewise-linear function is stored as its knots and
values plus one tail slope per side; a tail slope of -inf (left) or +inf
(right) encodes a hard domain end (the function is +inf beyond the knot).
With this encoding the Legendre transform is an exact, closed operation:
knots and slopes swap roles, hard ends become linear tails and vice versa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["PLConvex", "lower_convex_hull"]

_SLOPE_SLACK = 1e-6   # relative slack when validating slope monotonicity
_KNOT_MERGE = 1e-12   # relative threshold for merging near-duplicate knots


def lower_convex_hull(t: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of points (t, v), t strictly increasing.

    Andrew's monotone chain, keeping only strict vertices (collinear interior
    points are dropped).  Runs in linear time.
    """
    n = len(t)
    if n != len(v):
        raise ValueError("t and v must have equal length")
    stack: list[int] = []
    for i in range(n):
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            # pop b unless a->b->i turns strictly left (b strictly below chord)
            cross = (t[b] - t[a]) * (v[i] - v[a]) - (t[i] - t[a]) * (v[b] - v[a])
            if cross <= 0.0:
                stack.pop()
            else:
                break
        stack.append(i)
    return np.asarray(stack, dtype=np.intp)


def _strictly_increasing_filter(x: list[float], y: list[float]):
    """Drop entries whose abscissa does not clear the previous one by a
    relative margin; collapses the degenerate micro-edges that appear when
    nearly-collinear data is hulled."""
    xs: list[float] = []
    ys: list[float] = []
    for xi, yi in zip(x, y):
        if not xs or xi > xs[-1] + _KNOT_MERGE * max(1.0, abs(xi), abs(xs[-1])):
            xs.append(xi)
            ys.append(yi)
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


@dataclass(frozen=True)
class PLConvex:
    """A convex piecewise-linear function with explicit tail slopes.

    ``left``/``right`` are the slopes used beyond the first/last knot;
    ``left = -inf`` (resp. ``right = +inf``) means the function is +inf
    there, i.e. the domain ends at the knot.
    """

    knots: np.ndarray
    values: np.ndarray
    left: float
    right: float

    def __post_init__(self) -> None:
        k = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.ndim != 1 or k.shape != v.shape or len(k) == 0:
            raise ValueError("knots/values must be equal-length 1-D arrays, nonempty")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(v))):
            raise ValueError("knots and values must be finite")
        if np.any(np.diff(k) <= 0):
            raise ValueError("knots must be strictly increasing")
        if math.isnan(self.left) or math.isnan(self.right):
            raise ValueError("tail slopes must not be nan")
        k.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)
        slopes = self.edge_slopes()
        all_slopes = np.concatenate(([self.left], slopes, [self.right]))
        scale = 1.0 + np.max(np.abs(slopes)) if len(slopes) else 1.0
        finite = all_slopes[np.isfinite(all_slopes)]
        if len(finite) >= 2 and np.any(np.diff(finite) < -_SLOPE_SLACK * scale):
            raise ValueError("slopes not nondecreasing: function is not convex")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_samples(cls, t: np.ndarray, g: np.ndarray,
                     extend_left: bool = False,
                     extend_right: bool = False) -> "PLConvex":
        """Greatest convex minorant of samples (t, g); +inf entries are
        treated as 'outside the domain'.

        Tails default to hard domain ends (the sampled function is +inf
        beyond its grid); ``extend_*`` switches a side to linear extension
        with the boundary hull slope instead.
        """
        t = np.asarray(t, dtype=float)
        g = np.asarray(g, dtype=float)
        finite = np.isfinite(g)
        if not np.any(finite):
            raise ValueError("no finite sample values: improper function")
        if np.any(np.isneginf(g)):
            raise ValueError("-inf sample values have no convex-hull representation")
        tf, gf = t[finite], g[finite]
        idx = lower_convex_hull(tf, gf)
        knots, values = tf[idx], gf[idx]
        slopes = np.diff(values) / np.diff(knots) if len(knots) > 1 else np.array([])
        left = slopes[0] if (extend_left and len(slopes)) else -math.inf
        right = slopes[-1] if (extend_right and len(slopes)) else math.inf
        return cls(knots, values, left, right)

    @classmethod
    def affine(cls, slope: float, intercept: float) -> "PLConvex":
        return cls(np.array([0.0]), np.array([float(intercept)]),
                   float(slope), float(slope))

    # -- basic queries -----------------------------------------------------

    def edge_slopes(self) -> np.ndarray:
        if len(self.knots) < 2:
            return np.asarray([], dtype=float)
        return np.diff(self.values) / np.diff(self.knots)

    def domain(self) -> tuple[float, float]:
        """Interval on which the function is finite."""
        lo = self.knots[0] if self.left == -math.inf else -math.inf
        hi = self.knots[-1] if self.right == math.inf else math.inf
        return lo, hi

    def slope_range(self) -> tuple[float, float]:
        """Closure of the set of subgradients (= domain of the conjugate).

        A hard domain end contributes an unbounded subgradient at its knot,
        so under the tail encoding this is exactly the tail-slope pair."""
        return self.left, self.right

    def eval(self, t) -> np.ndarray:
        """Values at ``t`` (scalar or array); +inf outside the domain."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        k, v = self.knots, self.values
        out = np.interp(tq, k, v)
        below = tq < k[0]
        above = tq > k[-1]
        if np.any(below):
            out[below] = (v[0] + self.left * (tq[below] - k[0])
                          if self.left != -math.inf else math.inf)
        if np.any(above):
            out[above] = (v[-1] + self.right * (tq[above] - k[-1])
                          if self.right != math.inf else math.inf)
        return out[0] if scalar else out

    # -- the Legendre transform -------------------------------------------

    def conjugate(self) -> "PLConvex":
        """Exact convex conjugate sup_t { s t - f(t) }.

        Knots of the conjugate are this function's slopes; its tail slopes
        are this function's extreme knots.  Finite tail slopes here become
        hard domain ends of the conjugate and vice versa.
        """
        k, v = self.knots, self.values
        edges = self.edge_slopes()
        s_list: list[float] = []
        w_list: list[float] = []
        if self.left != -math.inf:
            s_list.append(self.left)
            w_list.append(k[0] * self.left - v[0])
        for i, e in enumerate(edges):
            s_list.append(e)
            w_list.append(k[i] * e - v[i])
        if self.right != math.inf:
            s_list.append(self.right)
            w_list.append(k[-1] * self.right - v[-1])
        left = k[0] if self.left == -math.inf else -math.inf
        right = k[-1] if self.right == math.inf else math.inf
        if not s_list:
            # point-domain function: conjugate is the affine s -> k0*s - v0
            return PLConvex.affine(k[0], -v[0])
        s_arr, w_arr = _strictly_increasing_filter(s_list, w_list)
        return PLConvex(s_arr, w_arr, left, right)

    def clamped_tangent_eval(self, t, s_lo: float = -math.inf,
                             s_hi: float = math.inf) -> np.ndarray:
        """Double conjugate sup_{s in [s_lo, s_hi]} { t s - f*(s) }, exactly.

        Equals the function itself where its subgradients lie inside
        [s_lo, s_hi]; elsewhere it continues with the clamped tangent.  The
        value is assembled as v_j + (t - k_j) * s so that querying a knot
        abscissa reproduces its stored value bit-for-bit, which keeps the
        envelope below the original samples in floating point.
        """
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        k, v = self.knots, self.values
        edges = self.edge_slopes()
        # raw slope of the segment each query falls in ([left] + edges + [right])
        seg = np.searchsorted(k, tq, side="right")  # 0 => below first knot
        slopes_ext = np.concatenate(([self.left], edges, [self.right]))
        raw = slopes_ext[seg]
        s_star = np.clip(raw, s_lo, s_hi)
        unclamped_end = ~np.isfinite(s_star)
        s_safe = np.where(unclamped_end, 0.0, s_star)
        # supporting knot: the one whose subgradient interval contains s_star
        j = (np.searchsorted(edges, s_safe, side="left")
             if len(edges) else np.zeros(len(tq), dtype=np.intp))
        out = v[j] + (tq - k[j]) * s_safe
        if np.any(unclamped_end):
            # hard tail with no clamp: the sup is the function itself there
            out[unclamped_end] = self.eval(tq[unclamped_end])
        return out[0] if scalar else out

    # -- algebra ------------------------------------------------------------

    def add(self, other: "PLConvex") -> "PLConvex":
        """Pointwise sum; domain is the intersection of the two domains."""
        lo = max(self.domain()[0], other.domain()[0])
        hi = min(self.domain()[1], other.domain()[1])
        if lo > hi:
            raise ValueError("disjoint domains: sum is identically +inf")
        pool = np.concatenate((self.knots, other.knots))
        pool = pool[(pool >= lo) & (pool <= hi)]
        for end in (lo, hi):
            if np.isfinite(end):
                pool = np.append(pool, end)
        knots = np.unique(pool)
        values = self.eval(knots) + other.eval(knots)
        left = self.left + other.left    # -inf dominates
        right = self.right + other.right  # +inf dominates
        return PLConvex(knots, values, left, right)

    def add_affine(self, slope: float, intercept: float) -> "PLConvex":
        return PLConvex(self.knots,
                        self.values + slope * self.knots + intercept,
                        self.left + slope, self.right + slope)

    def compose_affine_arg(self, a: float, b: float) -> "PLConvex":
        """The function t -> f(a t + b), a != 0."""
        if a == 0.0:
            raise ValueError("a must be nonzero")
        knots = (self.knots - b) / a
        values = self.values
        if a > 0:
            left, right = a * self.left, a * self.right
        else:
            knots, values = knots[::-1], values[::-1]
            left, right = a * self.right, a * self.left
        return PLConvex(np.ascontiguousarray(knots),
                        np.ascontiguousarray(values), left, right)

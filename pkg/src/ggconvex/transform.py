"""Multiplicative convex conjugation and its calculus.

All operations run through the convex representation g = log o f o exp:
the multiplicative conjugate of f is exp o g* o log, where g* is the
ordinary Fenchel conjugate.  Conjugates are computed by taking the lower
convex hull of the sampled g and reading the exact piecewise-linear
conjugate off the hull (knots and slopes swap), then sampling the result
on the requested dual grid.  A brute-force O(n^2) conjugate is kept as an
independent test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gridfn import ConvexRep, GridFunction, LogGrid, Tail
from .piecewise import PLConvex

__all__ = [
    "TransformParams",
    "fenchel_conjugate",
    "fenchel_conjugate_brute",
    "gg_conjugate",
    "gg_biconjugate",
    "mult_inf_convolution",
    "conjugate_calculus",
    "duality_transform",
]

FULL_COVER = (-math.inf, math.inf)


@dataclass(frozen=True)
class TransformParams:
    """Parameters of the general order-reversing involution
    T(f)(x) = A * x^log(B) * f*(B * x^C)."""

    A: float
    B: float
    C: float

    def __post_init__(self) -> None:
        if not (self.A > 0 and self.B > 0):
            raise ValueError("A and B must be positive")
        if self.C == 0:
            raise ValueError("C must be nonzero")


# -- convex-representation level ------------------------------------------------


def _pl_from_gridfn(f: GridFunction) -> PLConvex:
    return PLConvex.from_samples(
        f.grid.t, f.log_values,
        extend_left=f.tail_lo is Tail.EXTEND,
        extend_right=f.tail_hi is Tail.EXTEND)


def fenchel_conjugate(rep: ConvexRep, dual_t: np.ndarray) -> ConvexRep:
    """Discrete Legendre transform g*(s) = sup_t { t s - g(t) } on a slope grid.

    The sup over the samples is exact: lower hull, then each dual slope is
    matched to the hull vertex whose subgradient interval contains it.
    Ties (a slope equal to a hull edge) resolve to the smaller abscissa.
    """
    dual_t = np.asarray(dual_t, dtype=float)
    g = np.asarray(rep.g, dtype=float)
    if not np.any(np.isfinite(g)):
        raise ValueError("improper input: g is identically +inf")
    if np.any(np.isneginf(g)):
        return ConvexRep(dual_t, np.full_like(dual_t, math.inf))
    pl = PLConvex.from_samples(rep.t, g)
    return ConvexRep(dual_t, pl.conjugate().eval(dual_t))


def fenchel_conjugate_brute(rep: ConvexRep, dual_t: np.ndarray) -> ConvexRep:
    """O(n*m) reference: max over sample points, no hull. Test oracle."""
    dual_t = np.asarray(dual_t, dtype=float)
    finite = np.isfinite(rep.g)
    if not np.any(finite):
        raise ValueError("improper input: g is identically +inf")
    if np.any(np.isneginf(rep.g)):
        return ConvexRep(dual_t, np.full_like(dual_t, math.inf))
    t, g = rep.t[finite], rep.g[finite]
    vals = np.max(np.outer(dual_t, t) - g[None, :], axis=1)
    return ConvexRep(dual_t, vals)


# -- grid-function level ---------------------------------------------------------


def _conjugate_cover(f: GridFunction, pl: PLConvex) -> tuple[float, float]:
    """Dual region where the computed conjugate reflects the un-windowed
    function: slopes whose maximizer stays off the grid boundary.  A side
    whose window end is not part of the hull (or not even in dom f) puts no
    restriction on that side."""
    edges = pl.edge_slopes()
    lo, hi = -math.inf, math.inf
    t = f.grid.t
    if len(edges):
        if pl.knots[0] == t[0] and f.tail_lo is Tail.TRUNCATE:
            lo = edges[0]
        if pl.knots[-1] == t[-1] and f.tail_hi is Tail.TRUNCATE:
            hi = edges[-1]
    else:
        if pl.knots[0] == t[0] and f.tail_lo is Tail.TRUNCATE:
            lo = math.inf  # single finite value on the boundary: nothing trusted
        if pl.knots[0] == t[-1] and f.tail_hi is Tail.TRUNCATE:
            hi = -math.inf
    in_cover = f.cover
    if in_cover is not None:
        # restrict further to slopes attained strictly inside the input cover
        a, b = in_cover
        inside = (pl.knots[:-1] >= a) & (pl.knots[1:] <= b) if len(edges) else np.array([], dtype=bool)
        if np.any(inside):
            lo = max(lo, float(edges[np.argmax(inside)]))
            hi = min(hi, float(edges[len(inside) - 1 - np.argmax(inside[::-1])]))
        else:
            lo, hi = math.inf, -math.inf
    return lo, hi


def _constant_gridfn(grid: LogGrid, log_value: float) -> GridFunction:
    return GridFunction(grid, np.full(grid.n, log_value),
                        tail_lo=Tail.EXTEND, tail_hi=Tail.EXTEND,
                        cover=FULL_COVER)


def gg_conjugate(f: GridFunction, dual_grid: LogGrid | None = None) -> GridFunction:
    """Multiplicative conjugate f*(y) = sup_x exp(log x log y) / f(x).

    Computed as exp o g* o log with g the convex representation of f.  If f
    vanishes anywhere the conjugate is identically +inf; if f is identically
    +inf the conjugate is identically 0.  The result carries the dual cover
    interval on which it is exact for the un-windowed f.
    """
    if dual_grid is None:
        dual_grid = f.grid
    if np.any(np.isposinf(dual_grid.x)) or np.any(dual_grid.x <= 0):
        raise ValueError("dual grid must consist of positive finite points")
    lv = f.log_values
    if np.any(np.isneginf(lv)):
        return GridFunction(dual_grid, np.full(dual_grid.n, math.inf),
                            cover=FULL_COVER)
    if not np.any(np.isfinite(lv)):
        return _constant_gridfn(dual_grid, -math.inf)
    pl = _pl_from_gridfn(f)
    conj = pl.conjugate()
    cover = _conjugate_cover(f, pl)
    return GridFunction(dual_grid, conj.eval(dual_grid.t),
                        tail_lo=Tail.EXTEND, tail_hi=Tail.EXTEND, cover=cover)


def gg_biconjugate(f: GridFunction, dual_grid: LogGrid | None = None) -> GridFunction:
    """Conjugate twice with matched grids: the multiplicative convex
    envelope of f, restricted to dual slopes inside the dual grid's window.

    Always <= f pointwise.  The second conjugation is evaluated directly off
    the first conjugate's exact piecewise form (tangent anchored at hull
    vertices), which keeps the <= direction exact in floating point instead
    of losing it to resampling noise.
    """
    if dual_grid is None:
        dual_grid = f.grid
    lv = f.log_values
    if np.any(np.isneginf(lv)):
        # f has a zero: conjugate is +inf everywhere, biconjugate is 0
        return _constant_gridfn(f.grid, -math.inf)
    if not np.any(np.isfinite(lv)):
        # f identically +inf: conjugate is 0, whose conjugate is +inf again
        return GridFunction(f.grid, np.full(f.grid.n, math.inf), cover=FULL_COVER)
    pl = _pl_from_gridfn(f)
    s_lo, s_hi = math.log(dual_grid.x_min), math.log(dual_grid.x_max)
    vals = pl.clamped_tangent_eval(f.grid.t, s_lo, s_hi)
    edges = pl.edge_slopes()
    if len(edges):
        inside = (edges >= s_lo) & (edges <= s_hi)
        if np.any(inside):
            ka = pl.knots[:-1][inside][0]
            kb = pl.knots[1:][inside][-1]
            cover = (float(ka), float(kb))
        else:
            cover = (math.inf, -math.inf)
    else:
        cover = FULL_COVER
    return GridFunction(f.grid, vals, tail_lo=f.tail_lo, tail_hi=f.tail_hi,
                        cover=cover)


def mult_inf_convolution(f: GridFunction, g: GridFunction) -> GridFunction:
    """(f (*) g)(x) = inf over grid pairs x1*x2 = x of f(x1)*g(x2).

    Computed as the additive min-plus convolution of the two convex
    representations on the shared log grid (0*inf resolves to +inf, zeros
    propagate through finite partners).  The result lives on the product
    grid [x1_min*x2_min, x1_max*x2_max] with the common spacing.
    """
    if abs(f.grid.dt - g.grid.dt) > 1e-12 * f.grid.dt:
        raise ValueError("grids must share the log spacing")
    a, b = f.log_values, g.log_values
    n, m = len(a), len(b)
    nz = n + m - 1
    out_grid = LogGrid(f.grid.x_min * g.grid.x_min,
                       f.grid.x_max * g.grid.x_max, nz)

    fin_a, fin_b = np.isfinite(a), np.isfinite(b)
    zero_a, zero_b = np.isneginf(a), np.isneginf(b)
    dom_a, dom_b = a < math.inf, b < math.inf
    # indices where some pairing makes the product 0: a zero against any
    # in-domain partner (0 * finite = 0; 0 * inf resolves to +inf)
    zero_out = (np.convolve(zero_a.astype(float), dom_b.astype(float)) > 0.5) | \
               (np.convolve(dom_a.astype(float), zero_b.astype(float)) > 0.5)

    aa = np.where(fin_a, a, math.inf)
    bb = np.where(fin_b, b, math.inf)
    vals = np.full(nz, math.inf)
    for k in range(nz):
        i0, i1 = max(0, k - m + 1), min(k, n - 1)
        seg = aa[i0:i1 + 1] + bb[k - i1:k - i0 + 1][::-1]
        vals[k] = np.min(seg)
    vals = np.where(zero_out, -math.inf, vals)
    return GridFunction(out_grid, vals)


_CALC_RULES = ("scale-value", "scale-arg", "power-arg", "mul-power")


def conjugate_calculus(f: GridFunction, rule: str, a: float,
                       dual_grid: LogGrid | None = None) -> GridFunction:
    """Assemble the conjugate of a transformed f from a precomputed f*.

    Rules (all built from the exact piecewise conjugate of f):
      scale-value: [A f]*        = f* / A               (A > 0)
      scale-arg:   [f(Ax)]*(y)   = f*(y) * y^(-log A)   (A > 0)
      power-arg:   [f(x^A)]*(y)  = f*(y^(1/A))          (A != 0)
      mul-power:   [f(x) x^A]*(y)= f*(y / e^A)          (A real)
    """
    if rule not in _CALC_RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {_CALC_RULES}")
    if rule in ("scale-value", "scale-arg") and not a > 0:
        raise ValueError(f"rule {rule} requires A > 0")
    if rule == "power-arg" and a == 0:
        raise ValueError("rule power-arg requires A != 0")
    if dual_grid is None:
        dual_grid = f.grid
    lv = f.log_values
    if np.any(np.isneginf(lv)):
        return GridFunction(dual_grid, np.full(dual_grid.n, math.inf),
                            cover=FULL_COVER)
    if not np.any(np.isfinite(lv)):
        return _constant_gridfn(dual_grid, -math.inf)
    pl = _pl_from_gridfn(f)
    conj = pl.conjugate()
    cover = _conjugate_cover(f, pl)
    s = dual_grid.t
    if rule == "scale-value":
        out = conj.eval(s) - math.log(a)
    elif rule == "scale-arg":
        out = conj.eval(s) - math.log(a) * s
    elif rule == "power-arg":
        out = conj.eval(s / a)
        cover = tuple(sorted((cover[0] * a, cover[1] * a)))
    else:  # mul-power
        out = conj.eval(s - a)
        cover = (cover[0] + a, cover[1] + a)
    return GridFunction(dual_grid, out, tail_lo=Tail.EXTEND, tail_hi=Tail.EXTEND,
                        cover=cover)


def duality_transform(f: GridFunction, p: TransformParams,
                      out_grid: LogGrid | None = None) -> GridFunction:
    """T(f)(x) = A * x^log(B) * f*(B x^C), the general involutive
    order-reversing transform family; (1, 1, 1) is plain conjugation.

    Evaluated exactly off the piecewise conjugate: in log coordinates
    log T(f)(t) = log A + t log B + g*(log B + C t).  The involution
    property presumes f is multiplicatively convex, proper and lower
    semicontinuous; other inputs are transformed through their convex
    envelope.
    """
    if out_grid is None:
        out_grid = f.grid
    lv = f.log_values
    if np.any(np.isneginf(lv)):
        return GridFunction(out_grid, np.full(out_grid.n, math.inf),
                            cover=FULL_COVER)
    if not np.any(np.isfinite(lv)):
        return _constant_gridfn(out_grid, -math.inf)
    pl = _pl_from_gridfn(f)
    conj = pl.conjugate()
    s_lo, s_hi = _conjugate_cover(f, pl)
    t = out_grid.t
    logB, logA = math.log(p.B), math.log(p.A)
    out = conj.eval(logB + p.C * t) + logB * t + logA
    # trusted where the inner argument lands inside the conjugate's cover
    bounds = sorted(((s_lo - logB) / p.C, (s_hi - logB) / p.C))
    cover = (bounds[0], bounds[1])
    return GridFunction(out_grid, out, tail_lo=Tail.EXTEND, tail_hi=Tail.EXTEND,
                        cover=cover)

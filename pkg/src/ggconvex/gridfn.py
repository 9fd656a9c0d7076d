"""Functions f: (0, inf) -> [0, inf] sampled on log-uniform grids.

A ``GridFunction`` stores the sampled values on the log scale (so 0 and
+inf map to -inf/+inf) and interpolates multiplicatively: linear in
(log x, log f).  Power functions A*x^B are therefore represented exactly,
and the convex representation g = log o f o exp used by the conjugation
machinery is just the stored array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .extreal import ExtendedPositive, ep_exp, format_token, parse_token

__all__ = [
    "Tail",
    "LogGrid",
    "GridFunction",
    "ConvexRep",
    "GGAffine",
    "ExpFunction",
    "Indicator",
    "Polynomial",
    "SampleTable",
    "make_grid_function",
    "to_convex_rep",
    "from_convex_rep",
    "check_gg_convex",
    "check_gg_concave",
    "classify_convexities",
    "second_order_gg_test",
    "gg_jensen_check",
    "reciprocal",
    "pointwise_min",
    "pointwise_max",
    "read_csv",
    "write_csv",
]

LOG_SLACK = 1e-9        # relative slack for midpoint/chord tests on log values
ZERO_CLAMP = 1e-300     # values below this are treated as the zero variant
DEFAULT_N = 2048
DEFAULT_X_MIN = 1e-4
DEFAULT_X_MAX = 1e4


class Tail(Enum):
    """Behaviour outside the grid window."""

    TRUNCATE = "truncate-to-infinity"
    EXTEND = "extend-last-slope"


@dataclass(frozen=True)
class LogGrid:
    """n points, exp of a uniform partition of [log x_min, log x_max]."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if not (0.0 < self.x_min < self.x_max):
            raise ValueError(f"need 0 < x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n < 2:
            raise ValueError("need at least 2 grid points")

    @property
    def t(self) -> np.ndarray:
        """Log-scale abscissae."""
        return np.linspace(math.log(self.x_min), math.log(self.x_max), self.n)

    @property
    def x(self) -> np.ndarray:
        return np.exp(self.t)

    @property
    def dt(self) -> float:
        return (math.log(self.x_max) - math.log(self.x_min)) / (self.n - 1)

    @classmethod
    def default(cls) -> "LogGrid":
        return cls(DEFAULT_X_MIN, DEFAULT_X_MAX, DEFAULT_N)

    @classmethod
    def centered(cls, center: float, decades: float = 4.0, n: int = DEFAULT_N + 1) -> "LogGrid":
        """Grid symmetric about ``center`` in log space, so that for odd n
        the center is exactly a grid point."""
        if center <= 0:
            raise ValueError("center must be positive")
        h = 10.0 ** decades
        return cls(center / h, center * h, n)


@dataclass(frozen=True)
class ConvexRep:
    """The convex representation g = log o f o exp on a uniform t-grid."""

    t: np.ndarray
    g: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if t.shape != g.shape or t.ndim != 1 or len(t) < 1:
            raise ValueError("t and g must be equal-length 1-D arrays")
        if np.any(np.isnan(g)) or np.any(np.isnan(t)):
            raise ValueError("nan in convex representation")
        t.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class GridFunction:
    """Samples of f on a LogGrid, stored as log-values in [-inf, +inf].

    ``cover`` is optional metadata set by the transform operations: the open
    interval of log-x (or dual log-y) arguments on which the computed values
    are trusted to reflect the underlying, un-windowed function.
    """

    grid: LogGrid
    log_values: np.ndarray
    tail_lo: Tail = Tail.TRUNCATE
    tail_hi: Tail = Tail.TRUNCATE
    cover: tuple[float, float] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        lv = np.asarray(self.log_values, dtype=float)
        if lv.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {lv.shape}")
        if np.any(np.isnan(lv)):
            raise ValueError("nan log-values")
        finite = lv < math.inf
        if np.any(finite):
            idx = np.flatnonzero(finite)
            if idx[-1] - idx[0] + 1 != len(idx):
                raise ValueError("effective domain must be a contiguous index range")
        lv.flags.writeable = False
        object.__setattr__(self, "log_values", lv)

    # -- construction -------------------------------------------------------

    @classmethod
    def from_values(cls, grid: LogGrid, values, **kw) -> "GridFunction":
        """From float values in [0, inf]; tiny positives clamp to zero."""
        v = np.asarray(values, dtype=float)
        if np.any(v < 0) or np.any(np.isnan(v)):
            raise ValueError("values must lie in [0, inf]")
        v = np.where(v < ZERO_CLAMP, 0.0, v)
        with np.errstate(divide="ignore"):
            return cls(grid, np.log(v), **kw)

    # -- accessors ----------------------------------------------------------

    @property
    def values(self) -> np.ndarray:
        """Float view of the samples (0.0 / inf for the non-finite variants)."""
        with np.errstate(over="ignore"):
            v = np.exp(self.log_values)
        return np.where(v < ZERO_CLAMP, 0.0, v)

    def value(self, i: int) -> ExtendedPositive:
        return ep_exp(float(self.log_values[i]))

    @property
    def domain_mask(self) -> np.ndarray:
        return self.log_values < math.inf

    def is_proper(self) -> bool:
        """Positive everywhere and finite somewhere."""
        return bool(np.all(self.log_values > -math.inf)
                    and np.any(self.log_values < math.inf))

    # -- evaluation ----------------------------------------------------------

    def log_at(self, x) -> np.ndarray:
        """log f at positive abscissae, by linear interpolation in
        (log x, log f); exact at grid points."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xq = np.atleast_1d(x)
        if np.any(xq <= 0) or np.any(np.isnan(xq)):
            raise ValueError("abscissae must be positive")
        tq = np.log(xq)
        t = self.grid.t
        lv = self.log_values
        pos = np.searchsorted(t, tq, side="left")
        out = np.empty_like(tq)

        # snap queries within rounding distance of a node onto the node, so
        # that querying by x = exp(t_i) is exact despite the log/exp round trip
        snap_tol = np.maximum(1e-14, 8 * np.finfo(float).eps * np.abs(tq))
        lo_n = np.clip(pos - 1, 0, len(t) - 1)
        hi_n = np.clip(pos, 0, len(t) - 1)
        use_hi = np.abs(t[hi_n] - tq) <= np.abs(t[lo_n] - tq)
        nearest = np.where(use_hi, hi_n, lo_n)
        exact = np.abs(t[nearest] - tq) <= snap_tol
        out[exact] = lv[nearest[exact]]
        tq = np.where(exact, t[nearest], tq)

        inside = (tq >= t[0]) & (tq <= t[-1])
        interior = inside & ~exact
        if np.any(interior):
            hi = np.clip(pos[interior], 1, len(t) - 1)
            lo = hi - 1
            glo, ghi = lv[lo], lv[hi]
            # strictly between grid points: +inf on either side dominates,
            # else a zero endpoint extends its zero region (open at the
            # finite end), else plain linear interpolation
            theta = (tq[interior] - t[lo]) / (t[hi] - t[lo])
            with np.errstate(invalid="ignore"):
                lin = glo + theta * (ghi - glo)
            res = np.where(np.isposinf(glo) | np.isposinf(ghi), math.inf,
                           np.where(np.isneginf(glo) | np.isneginf(ghi), -math.inf, lin))
            out[interior] = res

        below = tq < t[0]
        above = tq > t[-1]
        if np.any(below):
            out[below] = self._tail_log(tq[below], side=-1)
        if np.any(above):
            out[above] = self._tail_log(tq[above], side=+1)
        return out[0] if scalar else out

    def _tail_log(self, tq: np.ndarray, side: int) -> np.ndarray:
        t, lv = self.grid.t, self.log_values
        tail = self.tail_lo if side < 0 else self.tail_hi
        if tail is Tail.TRUNCATE:
            return np.full_like(tq, math.inf)
        fin = np.flatnonzero(np.isfinite(lv))
        if len(fin) < 2:
            return np.full_like(tq, math.inf)
        i, j = (fin[0], fin[1]) if side < 0 else (fin[-2], fin[-1])
        slope = (lv[j] - lv[i]) / (t[j] - t[i])
        anchor = fin[0] if side < 0 else fin[-1]
        return lv[anchor] + slope * (tq - t[anchor])

    def eval(self, x: float) -> ExtendedPositive:
        return ep_exp(float(self.log_at(x)))

    def values_at(self, x) -> np.ndarray:
        with np.errstate(over="ignore"):
            v = np.exp(self.log_at(x))
        return np.where(v < ZERO_CLAMP, 0.0, v)


# -- built-in function descriptors -------------------------------------------


@dataclass(frozen=True)
class GGAffine:
    """A * x^B: the straight lines of multiplicative geometry."""

    A: float
    B: float

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise ValueError("coefficient A must be positive")

    def log_eval(self, t: np.ndarray) -> np.ndarray:
        return math.log(self.A) + self.B * t


@dataclass(frozen=True)
class ExpFunction:
    def log_eval(self, t: np.ndarray) -> np.ndarray:
        return np.exp(t)


@dataclass(frozen=True)
class Indicator:
    """level on [lo, hi], +inf outside."""

    lo: float
    hi: float
    level: float = 1.0

    def __post_init__(self) -> None:
        if not (0 < self.lo <= self.hi):
            raise ValueError("need a nonempty interval 0 < lo <= hi")
        if not self.level > 0:
            raise ValueError("level must be positive")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with nonnegative coefficients, constant term first."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        c = tuple(float(v) for v in self.coeffs)
        if len(c) == 0 or any(v < 0 for v in c) or all(v == 0 for v in c):
            raise ValueError("need nonnegative coefficients, not all zero")
        object.__setattr__(self, "coeffs", c)

    def log_eval(self, t: np.ndarray) -> np.ndarray:
        terms = [math.log(c) + k * t for k, c in enumerate(self.coeffs) if c > 0]
        m = np.maximum.reduce(terms)
        return m + np.log(sum(np.exp(term - m) for term in terms))


@dataclass(frozen=True)
class SampleTable:
    """User samples (x_i, f_i); values may be 0 or inf."""

    x: tuple[float, ...]
    f: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.x) != len(self.f) or len(self.x) < 1:
            raise ValueError("need equal-length nonempty x and f")
        if any(v <= 0 or math.isnan(v) or math.isinf(v) for v in self.x):
            raise ValueError("sample abscissae must be positive finite")
        if list(self.x) != sorted(set(self.x)):
            raise ValueError("sample abscissae must be strictly increasing")
        if any(v < 0 or math.isnan(v) for v in self.f):
            raise ValueError("sample values must lie in [0, inf]")


Descriptor = GGAffine | ExpFunction | Indicator | Polynomial | SampleTable


def make_grid_function(desc: Descriptor, grid: LogGrid | None = None,
                       tail_lo: Tail = Tail.TRUNCATE,
                       tail_hi: Tail = Tail.TRUNCATE) -> GridFunction:
    """Sample a built-in descriptor (or user table) onto a grid."""
    if grid is None:
        grid = LogGrid.default()
    t = grid.t
    if isinstance(desc, (GGAffine, ExpFunction, Polynomial)):
        lv = desc.log_eval(t)
    elif isinstance(desc, Indicator):
        inside = (grid.x >= desc.lo) & (grid.x <= desc.hi)
        if not np.any(inside):
            # point interval between grid nodes: keep a one-point domain at
            # the node nearest to the interval's log-midpoint
            mid = 0.5 * (math.log(desc.lo) + math.log(desc.hi))
            inside = np.zeros(grid.n, dtype=bool)
            inside[int(np.argmin(np.abs(t - mid)))] = True
        lv = np.where(inside, math.log(desc.level), math.inf)
    elif isinstance(desc, SampleTable):
        tab_t = np.log(np.asarray(desc.x, dtype=float))
        vals = np.asarray(desc.f, dtype=float)
        vals = np.where((vals > 0) & (vals < ZERO_CLAMP), 0.0, vals)
        with np.errstate(divide="ignore"):
            tab_g = np.log(vals)
        if len(desc.x) == 1:
            nearest = int(np.argmin(np.abs(t - tab_t[0])))
            lv = np.full(grid.n, math.inf)
            lv[nearest] = tab_g[0]
        else:
            lv = _interp_table(tab_t, tab_g, t)
    else:
        raise TypeError(f"unknown descriptor {type(desc).__name__}")
    return GridFunction(grid, lv, tail_lo=tail_lo, tail_hi=tail_hi)


def _interp_table(tab_t: np.ndarray, tab_g: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Log-log interpolation of a sample table onto grid abscissae; +inf
    outside the table's range."""
    out = np.full_like(t, math.inf)
    inside = (t >= tab_t[0]) & (t <= tab_t[-1])
    if not np.any(inside):
        raise ValueError("sample table does not intersect the grid window")
    pos = np.searchsorted(tab_t, t[inside], side="left")
    pos = np.clip(pos, 1, len(tab_t) - 1)
    lo, hi = pos - 1, pos
    exact_lo = tab_t[lo] == t[inside]
    glo, ghi = tab_g[lo], tab_g[hi]
    theta = (t[inside] - tab_t[lo]) / (tab_t[hi] - tab_t[lo])
    with np.errstate(invalid="ignore"):
        lin = glo + theta * (ghi - glo)
    res = np.where(np.isposinf(glo) | np.isposinf(ghi), math.inf,
                   np.where(np.isneginf(glo) | np.isneginf(ghi), -math.inf, lin))
    res = np.where(exact_lo, glo, res)
    exact_hi = tab_t[hi] == t[inside]
    res = np.where(exact_hi, ghi, res)
    out[inside] = res
    return out


# -- convex representation ----------------------------------------------------


def to_convex_rep(f: GridFunction) -> ConvexRep:
    return ConvexRep(f.grid.t, f.log_values.copy())


def from_convex_rep(rep: ConvexRep, grid: LogGrid | None = None,
                    **kw) -> GridFunction:
    if grid is None:
        t = rep.t
        grid = LogGrid(math.exp(t[0]), math.exp(t[-1]), len(t))
    if grid.n != len(rep.t):
        raise ValueError("grid size does not match representation")
    return GridFunction(grid, rep.g.copy(), **kw)


# -- convexity tests -----------------------------------------------------------


@dataclass(frozen=True)
class ConvexityVerdict:
    holds: bool
    counterexample: tuple[int, int] | None = None


def _ext_chord(a: float, b: float, lam: float) -> float:
    """lam*a + (1-lam)*b with (+inf dominating -inf), lam in (0,1)."""
    if math.isinf(a) and a > 0 or math.isinf(b) and b > 0:
        return math.inf
    if math.isinf(a) or math.isinf(b):
        return -math.inf
    return lam * a + (1.0 - lam) * b


def _discrete_convex(u: np.ndarray, v: np.ndarray,
                     slack: float = LOG_SLACK) -> tuple[bool, tuple[int, int] | None]:
    """Adjacent-triple chord test: v_mid <= chord(v_lo, v_hi) at every
    interior point, with extended-value conventions.  Complete for sorted
    abscissae because piecewise-linear local convexity is global."""
    for i in range(1, len(u) - 1):
        lam = (u[i + 1] - u[i]) / (u[i + 1] - u[i - 1])
        chord = _ext_chord(v[i - 1], v[i + 1], lam)
        if v[i] == -math.inf:
            continue
        if chord == math.inf:
            continue
        tol = slack * max(1.0, abs(chord)) if math.isfinite(chord) else 0.0
        if chord == -math.inf or v[i] > chord + tol:
            return False, (i - 1, i + 1)
    return True, None


def check_gg_convex(f: GridFunction, slack: float = LOG_SLACK) -> ConvexityVerdict:
    """Discrete midpoint convexity of log f over log x (adjacent triples)."""
    holds, pair = _discrete_convex(f.grid.t, f.log_values, slack)
    return ConvexityVerdict(holds, pair)


def check_gg_concave(f: GridFunction, slack: float = LOG_SLACK) -> ConvexityVerdict:
    """Midpoint concavity of log f; the 0*inf = 0 convention corresponds to
    -inf dominating +inf on the log scale, i.e. convexity of -log f with the
    roles of the infinities swapped."""
    holds, pair = _discrete_convex(f.grid.t, -f.log_values, slack)
    return ConvexityVerdict(holds, pair)


@dataclass(frozen=True)
class ConvexityFlags:
    aa: bool
    ag: bool
    ga: bool
    gg: bool
    nondecreasing: bool


def classify_convexities(f: GridFunction, slack: float = LOG_SLACK) -> ConvexityFlags:
    """Midpoint tests in all four coordinate systems plus a monotone flag.

    AA uses (x, f); AG uses (x, log f); GA uses (log x, f); GG uses
    (log x, log f).  The chord test handles the non-uniform spacing of the
    x coordinate.
    """
    t = f.grid.t
    x = f.grid.x
    lv = f.log_values
    with np.errstate(over="ignore"):
        v = f.values
    aa, _ = _discrete_convex(x, v, slack)
    ag, _ = _discrete_convex(x, lv, slack)
    ga, _ = _discrete_convex(t, v, slack)
    gg, _ = _discrete_convex(t, lv, slack)
    with np.errstate(invalid="ignore"):
        diffs = np.diff(lv)
    diffs = np.where(np.isnan(diffs), 0.0, diffs)  # inf-to-inf steps are flat
    nondec = bool(np.all(diffs >= -slack * np.minimum(
        np.maximum(1.0, np.abs(lv[:-1])), 1e300)))
    return ConvexityFlags(aa=aa, ag=ag, ga=ga, gg=gg, nondecreasing=nondec)


def second_order_gg_test(f: Callable[[float], float],
                         fprime: Callable[[float], float],
                         fsecond: Callable[[float], float],
                         x: float, tol: float = 1e-9) -> bool:
    """Pointwise differential criterion:
    x*(f''(x) f(x) - f'(x)^2) + f(x) f'(x) >= 0."""
    if x <= 0:
        raise ValueError("x must be positive")
    fx = f(x)
    if not fx > 0:
        raise ValueError("f(x) must be positive for the differential test")
    expr = x * (fsecond(x) * fx - fprime(x) ** 2) + fx * fprime(x)
    return expr >= -tol * max(1.0, abs(expr))


@dataclass(frozen=True)
class JensenResult:
    lhs: float
    rhs: float
    holds: bool


def gg_jensen_check(f: GridFunction, values: Sequence[float],
                    probs: Sequence[float], tol: float = 1e-9) -> JensenResult:
    """Compare f(geometric mean of X) against the geometric mean of f(X)."""
    v = np.asarray(values, dtype=float)
    p = np.asarray(probs, dtype=float)
    if v.shape != p.shape:
        raise ValueError("values and probs must have equal length")
    gmean = math.exp(float(np.dot(p, np.log(v))))
    lhs = float(f.log_at(gmean))
    logs = f.log_at(v)
    if np.any(np.isposinf(logs)):
        rhs = math.inf
    elif np.any(np.isneginf(logs)):
        rhs = -math.inf
    else:
        rhs = float(np.dot(p, logs))
    if rhs == math.inf or lhs == -math.inf:
        holds = True
    elif rhs == -math.inf:
        holds = False
    else:
        holds = lhs <= rhs + tol * max(1.0, abs(rhs))
    def _exp(t: float) -> float:
        return math.exp(t) if t < 700 else math.inf
    return JensenResult(lhs=_exp(lhs), rhs=_exp(rhs), holds=holds)


# -- pointwise combinations -----------------------------------------------------


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise ValueError("grid mismatch")


def pointwise_min(f: GridFunction, g: GridFunction) -> GridFunction:
    _same_grid(f, g)
    return GridFunction(f.grid, np.minimum(f.log_values, g.log_values))


def pointwise_max(f: GridFunction, g: GridFunction) -> GridFunction:
    _same_grid(f, g)
    return GridFunction(f.grid, np.maximum(f.log_values, g.log_values))


def reciprocal(f: GridFunction) -> GridFunction:
    """1/f with 1/0 = inf and 1/inf = 0."""
    return GridFunction(f.grid, -f.log_values, tail_lo=f.tail_lo, tail_hi=f.tail_hi)


# -- CSV serialization -----------------------------------------------------------


def write_csv(path, f: GridFunction, version: str = "0.1.0") -> None:
    g = f.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# ggconvex v{version} x_min={float(g.x_min)!r} "
                 f"x_max={float(g.x_max)!r} n={g.n}\n")
        fh.write("x,f\n")
        for x, lv in zip(g.x, f.log_values):
            fh.write(f"{float(x)!r},{format_token(ep_exp(float(lv)))}\n")


def read_csv(path) -> GridFunction:
    xs: list[float] = []
    vs: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if s.lower() == "x,f":
                continue
            parts = s.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'x,value', got {s!r}")
            try:
                x = float(parts[0])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad abscissa {parts[0]!r}") from exc
            if x <= 0:
                raise ValueError(f"line {lineno}: abscissa must be positive")
            try:
                val = parse_token(parts[1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from exc
            xs.append(x)
            vs.append(float(np.log(val.as_float())) if val.is_finite
                      else (math.inf if val.is_infinite else -math.inf))
    if len(xs) < 2:
        raise ValueError("need at least two grid rows")
    x_arr = np.asarray(xs)
    t_arr = np.log(x_arr)
    steps = np.diff(t_arr)
    if np.any(steps <= 0) or np.max(steps) - np.min(steps) > 1e-6 * np.mean(np.abs(steps)):
        raise ValueError("grid abscissae must be log-uniform and increasing")
    grid = LogGrid(x_arr[0], x_arr[-1], len(x_arr))
    return GridFunction(grid, np.asarray(vs))

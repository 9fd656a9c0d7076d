"""Arithmetic on [0, +inf] with explicit zero/infinity variants.

The rest of the toolkit works with positive functions and functionals that
may legitimately attain 0 or +inf.  This module centralises the product,
reciprocal and logarithm conventions (0 * inf = inf in convex mode,
0 * inf = 0 in concave mode, 1/0 = inf, 1/inf = 0, log 0 = -inf) so that
no other module needs to special-case them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "MulMode",
    "ExtendedPositive",
    "EP_ZERO",
    "EP_INF",
    "ep_mul",
    "ep_recip",
    "ep_log",
    "ep_exp",
    "parse_token",
    "format_token",
]


class MulMode(Enum):
    """Which convention resolves the 0 * inf product."""

    CONVEX = "convex"    # 0 * inf = inf
    CONCAVE = "concave"  # 0 * inf = 0


@dataclass(frozen=True, order=True, slots=True)
class ExtendedPositive:
    """A value in [0, +inf].

    Zero and infinity are explicit variants created through :meth:`zero` and
    :meth:`infinity`; finite values are strictly positive reals.  Ordering is
    zero < every finite < infinity.  Instances are immutable and hashable.
    """

    _raw: float  # float in [0, inf]; 0.0/inf back the zero/infinity variants

    def __post_init__(self) -> None:
        if math.isnan(self._raw) or self._raw < 0.0:
            raise ValueError(f"not a value in [0, +inf]: {self._raw!r}")

    @classmethod
    def zero(cls) -> "ExtendedPositive":
        return cls(0.0)

    @classmethod
    def infinity(cls) -> "ExtendedPositive":
        return cls(math.inf)

    @classmethod
    def finite(cls, value: float) -> "ExtendedPositive":
        """A strictly positive finite value; rejects 0 and inf."""
        v = float(value)
        if not (0.0 < v < math.inf):
            raise ValueError(f"finite variant requires 0 < value < inf, got {value!r}")
        return cls(v)

    @classmethod
    def from_float(cls, value: float) -> "ExtendedPositive":
        """Map a float in [0, inf] onto the matching variant."""
        return cls(float(value))

    @property
    def is_zero(self) -> bool:
        return self._raw == 0.0

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self._raw)

    @property
    def is_finite(self) -> bool:
        return 0.0 < self._raw < math.inf

    @property
    def value(self) -> float:
        """The finite value; raises on the zero/infinity variants."""
        if not self.is_finite:
            raise ValueError(f"no finite value for {self!r}")
        return self._raw

    def as_float(self) -> float:
        """Float view (0.0/inf for the non-finite variants), for kernels."""
        return self._raw

    def __float__(self) -> float:
        return self._raw

    def __repr__(self) -> str:
        return f"ExtendedPositive({format_token(self)!r})"


EP_ZERO = ExtendedPositive.zero()
EP_INF = ExtendedPositive.infinity()


def ep_mul(a: ExtendedPositive, b: ExtendedPositive,
           mode: MulMode = MulMode.CONVEX) -> ExtendedPositive:
    """Product with the 0 * inf convention selected by ``mode``."""
    x, y = a.as_float(), b.as_float()
    if (x == 0.0 and math.isinf(y)) or (math.isinf(x) and y == 0.0):
        return EP_INF if mode is MulMode.CONVEX else EP_ZERO
    return ExtendedPositive.from_float(x * y)


def ep_recip(a: ExtendedPositive) -> ExtendedPositive:
    """Reciprocal with 1/0 = inf and 1/inf = 0."""
    if a.is_zero:
        return EP_INF
    if a.is_infinite:
        return EP_ZERO
    return ExtendedPositive.finite(1.0 / a.value)


def ep_log(a: ExtendedPositive) -> float:
    """Extended logarithm: log 0 = -inf, log inf = +inf."""
    if a.is_zero:
        return -math.inf
    if a.is_infinite:
        return math.inf
    return math.log(a.value)


def ep_exp(t: float) -> ExtendedPositive:
    """Extended exponential, inverse of :func:`ep_log` on all variants.
    Arguments beyond the float range saturate to the zero/infinity variants."""
    if math.isnan(t):
        raise ValueError("exp of nan")
    if t == -math.inf:
        return EP_ZERO
    if t == math.inf:
        return EP_INF
    try:
        return ExtendedPositive.from_float(math.exp(t))
    except OverflowError:
        return EP_INF


def parse_token(token: str) -> ExtendedPositive:
    """Parse the text form used in CSV grids: "0", "inf" or a decimal."""
    s = token.strip()
    if s == "0":
        return EP_ZERO
    if s in ("inf", "+inf", "Infinity"):
        return EP_INF
    try:
        v = float(s)
    except ValueError as exc:
        raise ValueError(f"bad value token {token!r}") from exc
    return ExtendedPositive.from_float(v)


def format_token(a: ExtendedPositive) -> str:
    if a.is_zero:
        return "0"
    if a.is_infinite:
        return "inf"
    return repr(a.value)

"""Stochastic order decisions for discrete distributions.

Implements the usual, convex and increasing convex orders, their
multiplicative (log-transformed) variants, the sign-change crossing
criterion, the independent-product construction, and the consistency test
of order verdicts against risk functionals.  All comparisons run on the
knot set of the two distributions; piecewise linearity/constancy between
knots makes that complete.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .riskmeasures import (FiniteProbSpace, PositiveRandomVariable,
                           RiskMeasureSpec, _log_evaluate)

__all__ = [
    "DiscreteDistribution",
    "OrderVerdict",
    "stop_loss",
    "order_leq",
    "ga_order_leq",
    "sign_change_count",
    "single_crossing_ga_cx",
    "independent_product",
    "consistency_test",
    "ConsistencyResult",
    "distribution_from_json",
    "distribution_to_json",
]

MEAN_RTOL = 1e-9          # relative tolerance for equal-mean checks
STOP_LOSS_ATOL = 1e-12    # absolute stop-loss slack, scaled by atom magnitude
MAX_EMBED_STATES = 10080  # cap for the common equiprobable embedding


@dataclass(frozen=True)
class DiscreteDistribution:
    """Sorted atoms with strictly positive probabilities summing to one.

    ``probs_exact`` optionally carries the probabilities as exact fractions
    (available when constructed from rational strings); the equiprobable
    embedding used by :func:`consistency_test` requires it.
    """

    atoms: np.ndarray
    probs: np.ndarray
    probs_exact: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        a = np.asarray(self.atoms, dtype=float)
        p = np.asarray(self.probs, dtype=float)
        if a.ndim != 1 or a.shape != p.shape or len(a) < 1:
            raise ValueError("atoms and probs must be equal-length 1-D arrays")
        if np.any(np.diff(a) <= 0):
            raise ValueError("atoms must be strictly increasing")
        if np.any(~np.isfinite(a)):
            raise ValueError("atoms must be finite")
        if np.any(p <= 0):
            raise ValueError("probabilities must be strictly positive")
        if abs(float(np.sum(p)) - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        if self.probs_exact is not None:
            if len(self.probs_exact) != len(a) or sum(self.probs_exact) != 1:
                raise ValueError("exact probabilities must match atoms and sum to 1")
        a.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_pairs(cls, atoms: Sequence[float],
                   probs: Sequence[Fraction | float | str]) -> "DiscreteDistribution":
        exact: list[Fraction] | None = []
        fl: list[float] = []
        for q in probs:
            if isinstance(q, (Fraction, str, int)):
                frac = Fraction(q)
                if exact is not None:
                    exact.append(frac)
                fl.append(float(frac))
            else:
                exact = None
                fl.append(float(q))
        return cls(np.asarray(atoms, dtype=float), np.asarray(fl),
                   tuple(exact) if exact is not None else None)

    def cdf(self, t) -> np.ndarray:
        """Right-continuous distribution function."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.atoms, t, side="right")
        cum = np.concatenate(([0.0], np.cumsum(self.probs)))
        return cum[idx]

    def mean(self) -> float:
        return float(np.dot(self.atoms, self.probs))

    def log_mean(self) -> float:
        if np.any(self.atoms <= 0):
            raise ValueError("log mean requires positive atoms")
        return float(np.dot(np.log(self.atoms), self.probs))

    def geometric_mean(self) -> float:
        return math.exp(self.log_mean())

    def log_transformed(self) -> "DiscreteDistribution":
        if np.any(self.atoms <= 0):
            raise ValueError("log transform requires positive atoms")
        return DiscreteDistribution(np.log(self.atoms), self.probs.copy(),
                                    self.probs_exact)


@dataclass(frozen=True)
class OrderVerdict:
    holds: bool
    witness: float | None = None          # a violated test point, on failure
    checked_knots: tuple[float, ...] = ()


def stop_loss(F: DiscreteDistribution, t: float) -> float:
    """E[(X - t)+] as an exact finite sum."""
    return float(np.dot(F.probs, np.maximum(F.atoms - t, 0.0)))


def _knots(F: DiscreteDistribution, G: DiscreteDistribution) -> np.ndarray:
    return np.unique(np.concatenate((F.atoms, G.atoms)))


def order_leq(F: DiscreteDistribution, G: DiscreteDistribution,
              mode: str) -> OrderVerdict:
    """Decide F <= G in the usual (st), convex (cx) or increasing convex
    (icx) order.

    st compares distribution functions (F above G everywhere); icx compares
    stop-loss transforms at the knots of both distributions; cx adds the
    equal-means requirement.  Knot checks are complete because both sides
    are piecewise linear (or constant) between knots.
    """
    if mode not in ("st", "cx", "icx"):
        raise ValueError(f"unknown mode {mode!r}")
    knots = _knots(F, G)
    if mode == "st":
        dF, dG = F.cdf(knots), G.cdf(knots)
        bad = dF < dG - STOP_LOSS_ATOL
        if np.any(bad):
            return OrderVerdict(False, float(knots[np.argmax(bad)]), tuple(knots))
        return OrderVerdict(True, None, tuple(knots))
    if mode == "cx":
        mF, mG = F.mean(), G.mean()
        if abs(mF - mG) > MEAN_RTOL * max(1.0, abs(mF), abs(mG)):
            # a concrete violated hinge: (x - t)+ below all atoms when
            # E F > E G, the reversed hinge (t - x)+ above all atoms otherwise
            t_viol = float(knots[0] - 1.0) if mF > mG else float(knots[-1] + 1.0)
            return OrderVerdict(False, t_viol, tuple(knots))
    scale = max(1.0, float(np.max(np.abs(knots))))
    slack = STOP_LOSS_ATOL * scale
    for t in knots:
        if stop_loss(F, float(t)) > stop_loss(G, float(t)) + slack:
            return OrderVerdict(False, float(t), tuple(knots))
    return OrderVerdict(True, None, tuple(knots))


def ga_order_leq(F: DiscreteDistribution, G: DiscreteDistribution,
                 mode: str) -> OrderVerdict:
    """The multiplicative orders: F <= G in ga-cx (resp. ga-icx) iff the
    log-transformed distributions are ordered in cx (resp. icx)."""
    if mode not in ("ga-cx", "ga-icx"):
        raise ValueError(f"unknown mode {mode!r}")
    if np.any(F.atoms <= 0) or np.any(G.atoms <= 0):
        raise ValueError("multiplicative orders require positive atoms")
    base = order_leq(F.log_transformed(), G.log_transformed(),
                     "cx" if mode == "ga-cx" else "icx")
    witness = base.witness
    if witness is not None and math.isfinite(witness):
        witness = math.exp(witness)  # report in the original scale
    return OrderVerdict(base.holds, witness,
                        tuple(math.exp(t) for t in base.checked_knots))


def sign_change_count(F: DiscreteDistribution, G: DiscreteDistribution,
                      zero_tol: float = 1e-12):
    """Sign changes of G - F (distribution functions) along the joint knots.

    Zeros are dropped before counting, matching the usual S^- convention.
    Returns (count, reduced sign sequence as +1/-1 entries).
    """
    knots = _knots(F, G)
    diff = G.cdf(knots) - F.cdf(knots)
    signs = [1 if d > zero_tol else -1 for d in diff if abs(d) > zero_tol]
    reduced: list[int] = []
    for s in signs:
        if not reduced or reduced[-1] != s:
            reduced.append(s)
    return len(reduced) - 1 if reduced else 0, tuple(reduced)


@dataclass(frozen=True)
class CrossingResult:
    applicable: bool
    implied: bool
    count: int
    sequence: tuple[int, ...]


def single_crossing_ga_cx(F: DiscreteDistribution,
                          G: DiscreteDistribution) -> CrossingResult:
    """Sufficient single-crossing criterion for the ga-cx order: equal
    geometric means plus exactly one sign change of G - F with pattern
    [+, -].  When applicable, the direct ga-cx test must agree; this is
    asserted here."""
    if np.any(F.atoms <= 0) or np.any(G.atoms <= 0):
        raise ValueError("criterion requires positive atoms")
    count, seq = sign_change_count(F, G)
    gm_equal = abs(F.log_mean() - G.log_mean()) <= MEAN_RTOL * max(
        1.0, abs(F.log_mean()), abs(G.log_mean()))
    applicable = bool(gm_equal and count == 1 and seq == (1, -1))
    if not applicable:
        return CrossingResult(False, False, count, seq)
    direct = ga_order_leq(F, G, "ga-cx")
    if not direct.holds:
        raise AssertionError(
            "single-crossing criterion applicable but direct ga-cx test fails; "
            f"witness {direct.witness}")
    return CrossingResult(True, True, count, seq)


def independent_product(F: DiscreteDistribution,
                        Z: DiscreteDistribution,
                        merge_rtol: float = 1e-12) -> DiscreteDistribution:
    """Distribution of X*Z for independent X ~ F, Z ~ Z (positive atoms).

    Atom products are merged when equal within a relative tolerance."""
    if np.any(F.atoms <= 0) or np.any(Z.atoms <= 0):
        raise ValueError("independent product requires positive atoms")
    prod = np.outer(F.atoms, Z.atoms).ravel()
    pr = np.outer(F.probs, Z.probs).ravel()
    exact = None
    if F.probs_exact is not None and Z.probs_exact is not None:
        exact = [a * b for a in F.probs_exact for b in Z.probs_exact]
    order = np.argsort(prod, kind="stable")
    prod, pr = prod[order], pr[order]
    if exact is not None:
        exact = [exact[i] for i in order]
    atoms: list[float] = []
    probs: list[float] = []
    eprobs: list[Fraction] = []
    for i, (a, p) in enumerate(zip(prod, pr)):
        if atoms and a <= atoms[-1] * (1.0 + merge_rtol):
            probs[-1] += p
            if exact is not None:
                eprobs[-1] += exact[i]
        else:
            atoms.append(float(a))
            probs.append(float(p))
            if exact is not None:
                eprobs.append(exact[i])
    return DiscreteDistribution(np.asarray(atoms), np.asarray(probs),
                                tuple(eprobs) if exact is not None else None)


# -- consistency against risk functionals ----------------------------------------


def embed_equiprobable(F: DiscreteDistribution,
                       states: int) -> PositiveRandomVariable:
    """Realize F as a random variable on ``states`` equiprobable states."""
    if F.probs_exact is None:
        raise ValueError("embedding requires exact rational probabilities")
    counts = []
    for q in F.probs_exact:
        c = q * states
        if c.denominator != 1:
            raise ValueError(f"probability {q} not representable on {states} states")
        counts.append(int(c))
    values = np.repeat(F.atoms, counts)
    return PositiveRandomVariable(values)


def common_state_count(F: DiscreteDistribution, G: DiscreteDistribution) -> int:
    if F.probs_exact is None or G.probs_exact is None:
        raise ValueError("consistency embedding requires rational probabilities")
    lcm = 1
    for q in list(F.probs_exact) + list(G.probs_exact):
        lcm = lcm * q.denominator // math.gcd(lcm, q.denominator)
    if lcm > MAX_EMBED_STATES:
        raise ValueError(f"common equiprobable space needs {lcm} states "
                         f"(cap {MAX_EMBED_STATES})")
    return lcm


@dataclass(frozen=True)
class ConsistencyResult:
    ordered: bool
    rho_F: float
    rho_G: float
    consistent: bool


def consistency_test(spec: RiskMeasureSpec, F: DiscreteDistribution,
                     G: DiscreteDistribution, mode: str = "ga-cx",
                     tol: float = 1e-9) -> ConsistencyResult:
    """Check that an order verdict propagates to the risk functional:
    F <= G in ga-cx (or ga-icx for monotone functionals) should force
    rho(F) <= rho(G).

    The functional is assumed law-invariant and multiplicatively convex
    (screen with :func:`ggconvex.riskmeasures.axiom_check`); for ga-icx it
    must additionally be monotone.  Both laws are realized on a common
    equiprobable space (least common multiple of the probability
    denominators, capped at 10080 states) so that a law-invariant
    functional can be evaluated.
    """
    verdict = ga_order_leq(F, G, mode)
    states = common_state_count(F, G)
    P = FiniteProbSpace.uniform(states)
    XF = embed_equiprobable(F, states)
    XG = embed_equiprobable(G, states)
    rF = math.exp(_log_evaluate(spec, XF.log, P.probs))
    rG = math.exp(_log_evaluate(spec, XG.log, P.probs))
    consistent = (rF <= rG + tol * max(1.0, abs(rG))) if verdict.holds else True
    return ConsistencyResult(ordered=verdict.holds, rho_F=rF, rho_G=rG,
                             consistent=consistent)


# -- JSON format -------------------------------------------------------------------


def distribution_from_json(text: str) -> DiscreteDistribution:
    """Parse {"atoms": [...], "probs": [...]}; probabilities may be decimal
    numbers or rational strings like "1/3"."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad JSON: {exc}") from exc
    if not isinstance(doc, dict) or "atoms" not in doc or "probs" not in doc:
        raise ValueError("expected an object with 'atoms' and 'probs'")
    atoms = doc["atoms"]
    raw = doc["probs"]
    if not isinstance(atoms, list) or not isinstance(raw, list):
        raise ValueError("'atoms' and 'probs' must be arrays")
    probs: list[Fraction | float] = []
    for item in raw:
        if isinstance(item, str):
            probs.append(Fraction(item))
        elif isinstance(item, int):
            probs.append(Fraction(item))
        elif isinstance(item, float):
            probs.append(item)
        else:
            raise ValueError(f"bad probability entry {item!r}")
    return DiscreteDistribution.from_pairs(atoms, probs)


def distribution_to_json(F: DiscreteDistribution) -> str:
    if F.probs_exact is not None:
        probs = [str(q) for q in F.probs_exact]
    else:
        probs = [float(p) for p in F.probs]
    return json.dumps({"atoms": [float(a) for a in F.atoms], "probs": probs},
                      sort_keys=True)

"""Stochastic order decisions and their consistency with risk functionals."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ggconvex.orders import (DiscreteDistribution, consistency_test,
                             distribution_from_json, distribution_to_json,
                             ga_order_leq, independent_product, order_leq,
                             sign_change_count, single_crossing_ga_cx,
                             stop_loss)
from ggconvex.riskmeasures import OrliczSpec, RiskMeasureSpec


def equi(atoms):
    m = len(atoms)
    return DiscreteDistribution.from_pairs(atoms, [Fraction(1, m)] * m)


POINT1 = equi([1.0])
SPREAD = equi([0.5, 2.0])
F13 = equi([1.0, 3.0])
G04 = equi([0.0, 4.0])
F14 = equi([1.0, 4.0])


class TestStopLoss:
    def test_fully_active(self):
        assert stop_loss(F13, 0.5) == pytest.approx(F13.mean() - 0.5)

    def test_inactive(self):
        assert stop_loss(F13, 3.0) == 0.0
        assert stop_loss(F13, 10.0) == 0.0

    def test_interior(self):
        assert stop_loss(F13, 2.0) == pytest.approx(0.5)


class TestOrderLeq:
    def test_reflexive(self):
        for mode in ("st", "cx", "icx"):
            assert order_leq(F13, F13, mode).holds

    def test_point_mass_at_mean_cx(self):
        pm = equi([2.0])
        v = order_leq(pm, G04, "cx")
        assert v.holds
        # oracle: hinge of the constant is dominated at every knot
        for t in (-1.0, 0.0, 2.0, 4.0, 5.0):
            assert stop_loss(pm, t) <= stop_loss(G04, t) + 1e-12

    def test_mean_preserving_spread(self):
        assert order_leq(F13, G04, "cx").holds

    def test_mean_mismatch_fails_with_witness(self):
        shifted = equi([1.5, 3.5])
        v = order_leq(F13, shifted, "cx")
        assert not v.holds and v.witness is not None
        # the reversed hinge at the witness actually violates
        t = v.witness
        lower_hinge_F = t - F13.mean() if t > 3.0 else None
        if lower_hinge_F is not None:
            assert t - F13.mean() > t - shifted.mean()

    def test_st_dominance(self):
        up = equi([2.0, 5.0])
        assert order_leq(F13, up, "st").holds
        assert not order_leq(up, F13, "st").holds

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            order_leq(F13, G04, "xyz")


class TestGaOrder:
    def test_point_vs_spread(self):
        assert ga_order_leq(POINT1, SPREAD, "ga-cx").holds

    def test_unequal_geometric_means_fail(self):
        unequal = equi([1.0, 2.0])
        v = ga_order_leq(POINT1, unequal, "ga-cx")
        assert not v.holds
        assert v.witness is not None and v.witness > 0

    def test_st_implies_ga_icx(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            m = int(rng.integers(2, 5))
            base = np.exp(np.sort(rng.standard_normal(m)))
            base = np.unique(base)
            F = equi(base)
            up = equi(np.unique(base * np.exp(rng.uniform(0.1, 1.0))))
            if order_leq(F, up, "st").holds:
                assert ga_order_leq(F, up, "ga-icx").holds
                assert order_leq(F, up, "icx").holds

    def test_icx_verdicts_order_geometric_means(self):
        rng = np.random.default_rng(36)
        found = 0
        for _ in range(100):
            F = equi(np.unique(np.exp(rng.standard_normal(3))))
            G = equi(np.unique(np.exp(rng.standard_normal(3))))
            if len(F.atoms) < 2 or len(G.atoms) < 2:
                continue
            if ga_order_leq(F, G, "ga-icx").holds:
                found += 1
                assert F.geometric_mean() <= G.geometric_mean() * (1 + 1e-9)
            if ga_order_leq(F, G, "ga-cx").holds:
                assert F.geometric_mean() == pytest.approx(
                    G.geometric_mean(), rel=1e-9)
        assert found > 0

    def test_rejects_nonpositive_atoms(self):
        with pytest.raises(ValueError):
            ga_order_leq(G04, F13, "ga-cx")

    def test_brute_force_oracle_agreement(self):
        # positive verdicts: no convex piecewise-linear test function of the
        # logs may separate; negative verdicts: the witness hinge separates
        rng = np.random.default_rng(32)
        for _ in range(60):
            mF, mG = int(rng.integers(2, 6)), int(rng.integers(2, 6))
            F = equi(np.unique(np.exp(rng.standard_normal(mF))))
            G = equi(np.unique(np.exp(rng.standard_normal(mG))))
            v = ga_order_leq(F, G, "ga-cx")
            lF, pF = np.log(F.atoms), F.probs
            lG, pG = np.log(G.atoms), G.probs
            if v.holds:
                for _ in range(50):
                    knots = np.sort(rng.uniform(-3, 3, 4))
                    slopes = np.sort(rng.uniform(-4, 4, 5))

                    def phi(u):
                        val = slopes[0] * (u - knots[0])
                        for k, s_lo, s_hi in zip(knots, slopes[:-1], slopes[1:]):
                            val = val + (s_hi - s_lo) * np.maximum(u - k, 0.0)
                        return val

                    assert float(pF @ phi(lF)) <= float(pG @ phi(lG)) + 1e-9
            elif v.witness is not None and math.isfinite(v.witness):
                w = math.log(v.witness)
                hinge_F = float(pF @ np.maximum(lF - w, 0.0))
                hinge_G = float(pG @ np.maximum(lG - w, 0.0))
                mean_gap = abs(float(pF @ lF) - float(pG @ lG))
                assert hinge_F > hinge_G - 1e-15 or mean_gap > 1e-9


class TestSignChanges:
    def test_identical(self):
        count, seq = sign_change_count(F13, F13)
        assert count == 0 and seq == ()

    def test_single_crossing(self):
        count, seq = sign_change_count(POINT1, SPREAD)
        assert count == 1 and seq == (1, -1)

    def test_three_crossings(self):
        F = equi([1.0, 2.0, 3.0, 4.0])
        G = DiscreteDistribution.from_pairs(
            [0.5, 1.5, 2.5, 3.5, 4.5],
            ["3/10", "1/10", "2/10", "1/10", "3/10"])
        count, seq = sign_change_count(F, G)
        assert count == 3
        assert seq == (1, -1, 1, -1)


class TestSingleCrossing:
    def test_applicable_and_agrees(self):
        res = single_crossing_ga_cx(POINT1, SPREAD)
        assert res.applicable and res.implied

    def test_not_applicable_unequal_gmeans(self):
        res = single_crossing_ga_cx(POINT1, equi([1.0, 2.0]))
        assert not res.applicable and not res.implied

    def test_not_applicable_two_crossings(self):
        # equal geometric means, but G - F cuts more than once
        F = equi([0.8, 1.25])
        atoms = [0.5, 0.9, 1.1, 1.0 / (0.5 * 0.9 * 1.1)]
        G = equi(sorted(atoms))
        assert G.geometric_mean() == pytest.approx(F.geometric_mean(), abs=1e-12)
        res = single_crossing_ga_cx(F, G)
        count, _ = sign_change_count(F, G)
        if count != 1:
            assert not res.applicable


class TestIndependentProduct:
    def test_unit_point_mass(self):
        res = independent_product(F14, equi([1.0]))
        assert np.allclose(res.atoms, F14.atoms)
        assert np.allclose(res.probs, F14.probs)

    def test_geometric_mean_multiplies(self):
        rng = np.random.default_rng(33)
        for _ in range(20):
            F = equi(np.unique(np.exp(rng.standard_normal(3))))
            Z = equi(np.unique(np.exp(rng.standard_normal(2))))
            prod = independent_product(F, Z)
            assert prod.geometric_mean() == pytest.approx(
                F.geometric_mean() * Z.geometric_mean(), rel=1e-12)

    def test_four_atom_product_and_order(self):
        Z = equi([0.5, 2.0])  # unit geometric mean
        prod = independent_product(F14, Z)
        assert len(prod.atoms) <= 4
        assert ga_order_leq(F14, prod, "ga-cx").holds

    def test_exact_probabilities_propagate(self):
        prod = independent_product(F14, equi([0.5, 2.0]))
        assert prod.probs_exact is not None
        assert sum(prod.probs_exact) == 1


class TestConsistency:
    def test_geometric_mean_degenerate_equality(self):
        res = consistency_test(RiskMeasureSpec.geometric_mean(), POINT1, SPREAD)
        assert res.ordered and res.consistent
        assert res.rho_F == pytest.approx(res.rho_G, rel=1e-12)

    def test_p_norm_half_value(self):
        res = consistency_test(RiskMeasureSpec.p_norm(0.5), POINT1, SPREAD)
        assert res.ordered and res.consistent
        assert res.rho_F == pytest.approx(1.0)
        assert res.rho_G == pytest.approx(1.125)

    def test_monotone_specs_on_icx_pairs(self):
        rng = np.random.default_rng(34)
        specs = [RiskMeasureSpec.geometric_mean(), RiskMeasureSpec.p_norm(0.5),
                 RiskMeasureSpec.orlicz_premium(OrliczSpec.power(0.5)),
                 RiskMeasureSpec.exp_avar_log(0.5)]
        for _ in range(40):
            F = equi(np.unique(np.exp(rng.standard_normal(3))))
            zl = rng.uniform(-0.6, 0.6, 2)
            zl = zl - zl.mean() + rng.uniform(0.0, 0.5)
            Z = equi(np.exp(np.sort(zl)))
            G = independent_product(F, Z)
            for spec in specs:
                res = consistency_test(spec, F, G, mode="ga-icx")
                assert not (res.ordered and not res.consistent)

    def test_remark_equivalence_on_positive_verdicts(self):
        # on ga-cx pairs the geometric mean of f(X) is dominated for
        # multiplicatively convex f
        rng = np.random.default_rng(35)
        for _ in range(40):
            F = equi(np.unique(np.exp(rng.standard_normal(3))))
            zl = rng.uniform(-0.8, 0.8, 2)
            zl = zl - zl.mean()
            G = independent_product(F, equi(np.exp(np.sort(zl))))
            if not ga_order_leq(F, G, "ga-cx").holds:
                continue
            for f in (np.exp, lambda v: v ** 2, np.sqrt):
                gF = float(F.probs @ np.log(f(F.atoms)))
                gG = float(G.probs @ np.log(f(G.atoms)))
                assert gF <= gG + 1e-9

    def test_requires_rational_probabilities(self):
        F = DiscreteDistribution(np.array([1.0, 2.0]), np.array([0.3, 0.7]))
        with pytest.raises(ValueError, match="rational"):
            consistency_test(RiskMeasureSpec.geometric_mean(), F, SPREAD)

    def test_embedding_cap(self):
        big = DiscreteDistribution.from_pairs(
            [1.0, 2.0], [Fraction(1, 10081), Fraction(10080, 10081)])
        with pytest.raises(ValueError, match="states"):
            consistency_test(RiskMeasureSpec.geometric_mean(), big, SPREAD)


class TestJson:
    def test_round_trip_exact(self):
        js = distribution_to_json(F14)
        back = distribution_from_json(js)
        assert np.array_equal(back.atoms, F14.atoms)
        assert back.probs_exact == F14.probs_exact

    def test_decimal_probs(self):
        d = distribution_from_json('{"atoms": [1.0, 2.0], "probs": [0.25, 0.75]}')
        assert d.probs_exact is None
        assert np.allclose(d.probs, [0.25, 0.75])

    def test_malformed(self):
        with pytest.raises(ValueError):
            distribution_from_json('{"atoms": [1.0]}')
        with pytest.raises(ValueError):
            distribution_from_json('not json')
        with pytest.raises(ValueError):
            distribution_from_json('{"atoms": [2.0, 1.0], "probs": [0.5, 0.5]}')

"""Risk functionals, premia, conjugates, dual representations, axioms."""

import math

import numpy as np
import pytest

from ggconvex.extreal import EP_INF
from ggconvex.riskmeasures import (FiniteProbSpace, OrliczSpec,
                                   PositiveRandomVariable, RiskMeasureSpec,
                                   ScenarioMeasure, _orlicz_bisect, avar,
                                   axiom_check, dual_representation_eval,
                                   entropy_dual_pnorm, evaluate,
                                   geometric_mean, geometric_mean_under,
                                   orlicz_premium, p_norm, random_instance,
                                   rho_gg_conjugate)

P2 = FiniteProbSpace(np.array([0.5, 0.5]))
X14 = PositiveRandomVariable(np.array([1.0, 4.0]))


class TestGeometricMean:
    def test_two_point(self):
        assert geometric_mean(X14, P2) == pytest.approx(2.0)

    def test_constant(self):
        X = PositiveRandomVariable(np.full(5, 3.7))
        assert geometric_mean(X, FiniteProbSpace.uniform(5)) == pytest.approx(3.7)

    def test_geometric_progression(self):
        X = PositiveRandomVariable(np.array([2.0, 8.0, 32.0]))
        assert geometric_mean(X, FiniteProbSpace.uniform(3)) == pytest.approx(8.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            geometric_mean(X14, FiniteProbSpace.uniform(3))


class TestScenarioMean:
    def test_base_measure(self):
        Q = ScenarioMeasure(np.ones(2))
        assert geometric_mean_under(X14, P2, Q) == pytest.approx(2.0)

    def test_point_mass(self):
        Q = ScenarioMeasure.point_mass(P2, 1)
        assert geometric_mean_under(X14, P2, Q) == pytest.approx(4.0)

    def test_tilted(self):
        Q = ScenarioMeasure(np.array([0.5, 1.5]))
        assert geometric_mean_under(X14, P2, Q) == pytest.approx(
            math.exp(0.75 * math.log(4.0)))

    def test_invalid_density(self):
        with pytest.raises(ValueError):
            ScenarioMeasure(np.array([0.5, 0.7])).validate_on(P2)


class TestPNorm:
    def test_mean_at_one(self):
        assert p_norm(X14, P2, 1.0) == pytest.approx(2.5)

    def test_half(self):
        assert p_norm(X14, P2, 0.5) == pytest.approx(2.25)

    def test_small_p_approaches_geometric_mean(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            X, P = random_instance(rng)
            assert p_norm(X, P, 1e-6) == pytest.approx(
                geometric_mean(X, P), abs=1e-4)

    def test_rejects_nonpositive_p(self):
        with pytest.raises(ValueError):
            p_norm(X14, P2, 0.0)


class TestOrliczPremium:
    def test_power_one_is_mean(self):
        assert orlicz_premium(X14, P2, OrliczSpec.power(1.0)) == pytest.approx(2.5)

    def test_log_affine_is_geometric_mean(self):
        assert orlicz_premium(X14, P2, OrliczSpec.log_affine()) == pytest.approx(
            2.0, abs=1e-11)

    def test_power_two_closed_form(self):
        assert orlicz_premium(X14, P2, OrliczSpec.power(2.0)) == pytest.approx(
            math.sqrt(8.5), abs=1e-9)

    def test_return_measure_properties(self):
        rng = np.random.default_rng(10)
        for phi in (OrliczSpec.power(2.0), OrliczSpec.log_affine(),
                    OrliczSpec.exponential()):
            for _ in range(10):
                X, P = random_instance(rng)
                lam = math.exp(rng.uniform(-1, 1))
                h = orlicz_premium(X, P, phi)
                h_scaled = orlicz_premium(
                    PositiveRandomVariable(lam * X.values), P, phi)
                assert h_scaled == pytest.approx(lam * h, rel=1e-9)
                bigger = PositiveRandomVariable(X.values * (1 + rng.random()))
                assert orlicz_premium(bigger, P, phi) >= h - 1e-9
            one = PositiveRandomVariable(np.ones(3))
            assert orlicz_premium(one, FiniteProbSpace.uniform(3), phi) == \
                pytest.approx(1.0, abs=1e-11)

    def test_table_left_continuity(self):
        phi = OrliczSpec.table((0.5, 1.0, 2.0), (0.2, 1.0, 3.0))
        # value on (0.5, 1] is 1, so phi(1) = 1 despite the jump at 1
        assert phi.eval(np.array([1.0]))[0] == 1.0
        assert phi.eval(np.array([1.0 + 1e-12]))[0] == 3.0
        assert phi.eval(np.array([3.0]))[0] == math.inf
        X = PositiveRandomVariable(np.array([1.0, 1.5]))
        k = orlicz_premium(X, P2, phi)
        assert 1.0 <= k <= 1.5

    def test_table_validation(self):
        with pytest.raises(ValueError):
            OrliczSpec.table((1.0, 0.5), (1.0, 2.0))
        with pytest.raises(ValueError):
            OrliczSpec.table((0.5, 1.0), (2.0, 1.0))
        with pytest.raises(ValueError):
            OrliczSpec.table((0.5, 2.0), (0.2, 0.4))  # never reaches 1 at 1

    def test_bisection_iteration_budget(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            X, P = random_instance(rng)
            _, iters = _orlicz_bisect(X.values, P.probs, OrliczSpec.power(2.0), 1e-12)
            assert iters <= 60


class TestAvar:
    P4 = FiniteProbSpace.uniform(4)

    def test_full_range_is_mean(self):
        assert avar([1, 2, 3, 4], self.P4, 0.0) == pytest.approx(2.5)

    def test_max_at_one(self):
        assert avar([1, 2, 3, 4], self.P4, 1.0) == 4.0

    def test_interior(self):
        assert avar([1, 2, 3, 4], self.P4, 0.5) == pytest.approx(3.5)

    def test_piecewise_oracle(self):
        # integrate the staircase quantile directly
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(2, 9))
            P = FiniteProbSpace.uniform(n)
            v = rng.normal(size=n)
            lam = rng.uniform(0.0, 0.99)
            alphas = np.linspace(lam + 1e-9, 1.0, 20001)
            vs = np.sort(v)
            cum = np.cumsum(P.probs)
            q = vs[np.searchsorted(cum, alphas - 1e-12, side="left").clip(0, n - 1)]
            approx = float(np.mean(q))
            assert avar(v, P, lam) == pytest.approx(approx, abs=2e-3)

    def test_rejects_bad_lambda(self):
        with pytest.raises(ValueError):
            avar([1.0], FiniteProbSpace.uniform(1), 1.5)


class TestEvaluate:
    def test_penalized_singleton_collapses(self):
        spec = RiskMeasureSpec.penalized_geometric(
            [ScenarioMeasure(np.ones(2))], [1.0])
        assert evaluate(spec, X14, P2).value == pytest.approx(2.0)

    def test_worst_case_hits_max(self):
        spec = RiskMeasureSpec.worst_case_geometric(
            [ScenarioMeasure(np.ones(2)), ScenarioMeasure.point_mass(P2, 1)])
        assert evaluate(spec, X14, P2).value == pytest.approx(4.0)

    def test_exp_avar_log_zero_is_geometric_mean(self):
        spec = RiskMeasureSpec.exp_avar_log(0.0)
        assert evaluate(spec, X14, P2).value == pytest.approx(2.0)

    def test_entropic_monetary_matches_p_norm(self):
        gamma = 0.7

        def entropic(z, probs):
            a = np.log(probs) + gamma * z
            m = float(np.max(a))
            return (m + math.log(float(np.sum(np.exp(a - m))))) / gamma

        spec = RiskMeasureSpec.exp_monetary_log(entropic, name="entropic")
        rng = np.random.default_rng(14)
        for _ in range(10):
            X, P = random_instance(rng)
            assert evaluate(spec, X, P).value == pytest.approx(
                p_norm(X, P, gamma), rel=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            RiskMeasureSpec.p_norm(-1.0)
        with pytest.raises(ValueError):
            RiskMeasureSpec.worst_case_geometric([])
        with pytest.raises(ValueError):
            RiskMeasureSpec.penalized_geometric(
                [ScenarioMeasure(np.ones(2))], [1.5])
        with pytest.raises(ValueError):
            RiskMeasureSpec.exp_avar_log(1.5)


class TestRhoConjugate:
    def test_geometric_mean_indicator(self):
        spec = RiskMeasureSpec.geometric_mean()
        Ye = PositiveRandomVariable(np.full(2, math.e))
        assert rho_gg_conjugate(spec, Ye, P2).value == pytest.approx(1.0)
        other = PositiveRandomVariable(np.array([1.2, 3.0]))
        assert rho_gg_conjugate(spec, other, P2) == EP_INF
        # the generic ascent detects the divergence as well
        assert rho_gg_conjugate(spec, other, P2, method="ascent") == EP_INF

    def test_p_norm_entropy_form(self):
        p = 0.5
        w = X14.values ** p
        w = w / float(P2.probs @ w)
        Y = PositiveRandomVariable(np.exp(w))
        spec = RiskMeasureSpec.p_norm(p)
        ent = float(P2.probs @ (w * np.log(w)))
        closed = rho_gg_conjugate(spec, Y, P2)
        assert closed.value == pytest.approx(math.exp(ent / p), rel=1e-12)
        ascent = rho_gg_conjugate(spec, Y, P2, method="ascent")
        assert ascent.value == pytest.approx(closed.value, rel=1e-6)

    def test_order_reversal(self):
        # E[X] >= G[X] pointwise, so the conjugates order the other way
        gm, pn = RiskMeasureSpec.geometric_mean(), RiskMeasureSpec.p_norm(1.0)
        rng = np.random.default_rng(15)
        for _ in range(5):
            Y, P = random_instance(rng, n=3)
            a = rho_gg_conjugate(pn, Y, P, method="ascent")
            b = rho_gg_conjugate(gm, Y, P, method="ascent")
            assert a.as_float() <= b.as_float() * (1 + 1e-6) or b.is_infinite


class TestDualRepresentation:
    def test_geometric_mean_exact(self):
        spec = RiskMeasureSpec.geometric_mean()
        Ye = PositiveRandomVariable(np.full(2, math.e))
        res = dual_representation_eval(spec, X14, P2, [Ye])
        assert res.value == pytest.approx(2.0)
        assert abs(res.gap) < 1e-12
        assert res.monotone_marker and res.homogeneity_marker

    def test_p_norm_entropic_maximizer(self):
        p = 0.5
        w = X14.values ** p
        w = w / float(P2.probs @ w)
        Y = PositiveRandomVariable(np.exp(w))
        res = dual_representation_eval(RiskMeasureSpec.p_norm(p), X14, P2, [Y])
        assert abs(res.gap) < 1e-8

    def test_constant_one_family_is_lower_bound(self):
        one = PositiveRandomVariable(np.ones(2))
        for spec in (RiskMeasureSpec.geometric_mean(),
                     RiskMeasureSpec.p_norm(0.5)):
            res = dual_representation_eval(spec, X14, P2, [one])
            direct = evaluate(spec, X14, P2).value
            assert res.value <= direct + 1e-9

    def test_lower_bound_over_random_families(self):
        rng = np.random.default_rng(16)
        spec = RiskMeasureSpec.p_norm(0.5)
        for _ in range(10):
            X, P = random_instance(rng, n=4)
            fam = [PositiveRandomVariable(np.exp(np.abs(rng.standard_normal(4))))
                   for _ in range(5)]
            res = dual_representation_eval(spec, X, P, fam)
            assert res.value <= evaluate(spec, X, P).value + 1e-9


class TestEntropyDual:
    def test_constant(self):
        X = PositiveRandomVariable(np.full(3, 2.5))
        res = entropy_dual_pnorm(X, FiniteProbSpace.uniform(3), 2.0)
        assert res.value == pytest.approx(2.5)
        assert res.entropy == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(res.optimizer.density, 1.0)

    def test_two_point_p1(self):
        res = entropy_dual_pnorm(X14, P2, 1.0)
        assert res.value == pytest.approx(2.5)
        assert np.allclose(res.optimizer.density, [0.4, 1.6])

    def test_matches_p_norm(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            X, P = random_instance(rng)
            p = float(rng.choice([0.25, 0.5, 1.0, 2.0]))
            assert abs(entropy_dual_pnorm(X, P, p).value
                       - p_norm(X, P, p)) < 1e-10


class TestAxiomCheck:
    def test_geometric_mean_pattern(self):
        rep = axiom_check(RiskMeasureSpec.geometric_mean(),
                          FiniteProbSpace.uniform(6), trials=150, seed=1)
        assert rep.monotone.status == "unrefuted"
        assert rep.positively_homogeneous.status == "unrefuted"
        assert rep.normalized.status == "unrefuted"
        assert rep.gg_convex.status == "unrefuted"
        assert rep.law_invariant.status == "unrefuted"
        assert rep.aa_convex.status == "refuted"
        assert rep.aa_convex.counterexample is not None

    def test_p_norm_half_same_pattern(self):
        rep = axiom_check(RiskMeasureSpec.p_norm(0.5),
                          FiniteProbSpace.uniform(6), trials=150, seed=1)
        assert rep.gg_convex.status == "unrefuted"
        assert rep.aa_convex.status == "refuted"

    def test_orlicz_square_is_aa_convex(self):
        rep = axiom_check(RiskMeasureSpec.orlicz_premium(OrliczSpec.power(2.0)),
                          FiniteProbSpace.uniform(5), trials=100, seed=2)
        assert rep.aa_convex.status == "unrefuted"
        assert rep.gg_convex.status == "unrefuted"

    def test_ga_convex_normalizers_give_gg_convex_premium(self):
        # premia built from the multiplicatively-convex normalizer families
        # (powers, log-affine) must stay unrefuted for GG-convexity
        for phi in (OrliczSpec.power(0.5), OrliczSpec.power(2.0),
                    OrliczSpec.log_affine()):
            rep = axiom_check(RiskMeasureSpec.orlicz_premium(phi),
                              FiniteProbSpace.uniform(5), trials=100, seed=3)
            assert rep.gg_convex.status == "unrefuted"
            assert rep.ga_convex.status == "unrefuted"

    def test_implication_structure_on_builtins(self):
        # AG + monotone forces GG; positive homogeneity collapses GA into GG
        specs = [RiskMeasureSpec.geometric_mean(), RiskMeasureSpec.p_norm(0.5),
                 RiskMeasureSpec.p_norm(2.0), RiskMeasureSpec.exp_avar_log(0.5),
                 RiskMeasureSpec.orlicz_premium(OrliczSpec.exponential())]
        for spec in specs:
            rep = axiom_check(spec, FiniteProbSpace.uniform(5), trials=120, seed=4)
            if rep.ag_convex.status == "unrefuted" \
                    and rep.monotone.status == "unrefuted":
                assert rep.gg_convex.status == "unrefuted"
            if rep.positively_homogeneous.status == "unrefuted" \
                    and rep.ga_convex.status == "unrefuted":
                assert rep.gg_convex.status == "unrefuted"

    def test_deterministic(self):
        a = axiom_check(RiskMeasureSpec.p_norm(0.5), FiniteProbSpace.uniform(4),
                        trials=50, seed=9)
        b = axiom_check(RiskMeasureSpec.p_norm(0.5), FiniteProbSpace.uniform(4),
                        trials=50, seed=9)
        assert a == b


class TestMixtureFunctionals:
    def test_expectation_of_gg_convex_is_gg_convex(self):
        # E[f(X)] and G[f(X)] inherit multiplicative convexity from f
        rng = np.random.default_rng(18)
        for f, desc in ((np.exp, "exp"), (lambda v: v ** 2, "square")):
            for _ in range(300):
                n = int(rng.integers(2, 9))
                p = np.full(n, 1.0 / n)
                lx, ly = rng.standard_normal(n), rng.standard_normal(n)
                lam = rng.uniform(0.05, 0.95)
                mix = np.exp(lam * lx + (1 - lam) * ly)
                for agg in (lambda v: float(p @ v),
                            lambda v: math.exp(float(p @ np.log(v)))):
                    lhs = agg(f(mix))
                    rhs = agg(f(np.exp(lx))) ** lam * agg(f(np.exp(ly))) ** (1 - lam)
                    assert lhs <= rhs * (1 + 1e-12)

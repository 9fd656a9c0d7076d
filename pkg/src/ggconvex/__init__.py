"""ggconvex: numerical toolkit for multiplicative (log-log) convex analysis.

Conjugation, inf-convolution and duality transforms for positive functions
of a positive variable; return risk measures (geometric means, p-norms,
Orlicz premia, scenario-based and AV@R-based functionals) with their dual
representations on finite probability spaces; and multiplicative stochastic
orders with consistency checks.
"""

__version__ = "0.1.0"

from .extreal import (EP_INF, EP_ZERO, ExtendedPositive, MulMode, ep_exp,
                      ep_log, ep_mul, ep_recip)
from .gridfn import (ConvexRep, ExpFunction, GGAffine, GridFunction,
                     Indicator, LogGrid, Polynomial, SampleTable, Tail,
                     check_gg_concave, check_gg_convex, classify_convexities,
                     from_convex_rep, gg_jensen_check, make_grid_function,
                     pointwise_max, pointwise_min, reciprocal,
                     second_order_gg_test, to_convex_rep)
from .orders import (DiscreteDistribution, OrderVerdict, consistency_test,
                     ga_order_leq, independent_product, order_leq,
                     sign_change_count, single_crossing_ga_cx, stop_loss)
from .riskmeasures import (FiniteProbSpace, OrliczSpec,
                           PositiveRandomVariable, RiskMeasureSpec,
                           ScenarioMeasure, avar, axiom_check,
                           dual_representation_eval, entropy_dual_pnorm,
                           evaluate, geometric_mean, geometric_mean_under,
                           orlicz_premium, p_norm, rho_gg_conjugate)
from .transform import (TransformParams, conjugate_calculus, duality_transform,
                        fenchel_conjugate, fenchel_conjugate_brute,
                        gg_biconjugate, gg_conjugate, mult_inf_convolution)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Submodular maximization under supermodular cost constraints."""
from .setfn import (SetFunction, FunctionSet, from_callable, modular, cardinality,
                    check_structure, curvature_report, curvature_supermodular_weak,
                    curvature_supermodular_strict, curvature_submodular)
from .families import (WeightedCoverage, PowerCost, EdgeCountCost, JumpCost,
                       make_tightness, make_random_instance)
from .greedy import (BeforeOverflow, FirstOverflow, ContinueTo, run_ratio_marginal,
                     run_baseline)
from .exact import primal_opt, dual_opt, pareto_frontier
from .dual import DualConfig, solve_dual

__version__ = "0.1.0"

"""Numerical verification of generalized-convexity classes and Hermite-Hadamard-type inequalities."""

from .classes import ClassVerdict, GridSpec, Status
from .funclib import FunctionSpec, Interval, Monotonicity, WeightSpec, check_monotone, eval_function, make_function, make_weight
from .quadrature import QuadResult, integrate, integrate_log, mean_value
from .search import OracleConfig, SearchResult, SearchSpace, replay, search_violation, sweep_margin
from .theorems import HolderParams, InequalityReport, TheoremId, Verdict, YoungParams, run_oracle

__version__ = "0.1.0"

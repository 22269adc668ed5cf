"""DEA efficiency under variable returns to scale and maximal reference sets.

The numerical core is a dense two-phase simplex (:mod:`dea_mrs.lp`) with a
small branch-and-bound layer on top (:mod:`dea_mrs.milp`). The pivot loop is
compiled with numba when available; set ``DEA_MRS_JIT=0`` to force the plain
numpy loop.
"""

from ._kernels import backend
from .dataset import Dataset, Dmu, load_csv, parse_csv, save_csv, table1, to_csv, validate
from .dea import (
    AdditiveResult,
    MultiplierSolution,
    RadialResult,
    additive_evaluate,
    bcc_evaluate,
    multiplier_evaluate,
    ram_evaluate,
    ram_weights,
)
from .errors import ConfigurationError, DatasetError, DeaError, NotInTechnology, ParseError, SolverError, ValidationError
from .lp import DEFAULT_TOL, LpProblem, LpSolution, Tolerances
from .mrs import (
    MrsResult,
    bcc_mrs,
    filter_pareto_efficient,
    mrs_additive_milp,
    mrs_dual_milp,
    mrs_for_projection,
    mrs_lp_procedure,
    mrs_primal_milp,
    oracle_mrs,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveResult",
    "ConfigurationError",
    "DEFAULT_TOL",
    "Dataset",
    "DatasetError",
    "DeaError",
    "Dmu",
    "LpProblem",
    "LpSolution",
    "MrsResult",
    "MultiplierSolution",
    "NotInTechnology",
    "ParseError",
    "RadialResult",
    "SolverError",
    "Tolerances",
    "ValidationError",
    "additive_evaluate",
    "backend",
    "bcc_evaluate",
    "bcc_mrs",
    "filter_pareto_efficient",
    "load_csv",
    "mrs_additive_milp",
    "mrs_dual_milp",
    "mrs_for_projection",
    "mrs_lp_procedure",
    "mrs_primal_milp",
    "multiplier_evaluate",
    "oracle_mrs",
    "parse_csv",
    "ram_evaluate",
    "ram_weights",
    "save_csv",
    "table1",
    "to_csv",
    "validate",
]

"""Short discrete logarithms from one quantum run: output simulation, lattice post-processing, bounds."""

from .bounds import optimize_params, success_lower_bound, work_log2
from .errors import NontrivialGcdError, ParameterError, ReductionFailure
from .estimators import QuantumOutputSampler, ShortDlogSolver, check_pairs
from .group import (GroupContext, GroupElement, ProblemInstance, factor_from_short_dlog,
                    make_rsa_instance, make_safe_prime_instance)
from .lattice import LatticeSpec, babai_nearest_plane, enum_bounds, lagrange_reduce
from .postprocess import RecoveryParams, RecoveryReport, meet_in_the_middle, recover_d
from .simulator import SimulatorConfig, sample_pair

__version__ = "0.1.0"

__all__ = [
    "GroupContext", "GroupElement", "ProblemInstance", "make_safe_prime_instance", "make_rsa_instance",
    "factor_from_short_dlog", "SimulatorConfig", "sample_pair", "LatticeSpec", "lagrange_reduce",
    "babai_nearest_plane", "enum_bounds", "RecoveryParams", "RecoveryReport", "recover_d",
    "meet_in_the_middle", "success_lower_bound", "work_log2", "optimize_params",
    "QuantumOutputSampler", "ShortDlogSolver", "check_pairs",
    "ParameterError", "NontrivialGcdError", "ReductionFailure",
]

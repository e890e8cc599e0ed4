"""Exact optimal transductive error rates for finite classes over finite label spaces."""

__version__ = "0.1.0"

from .metric import LabelSpace, loss, metric_space, validate, zero_one_space  # noqa: E402
from .oig import (AssignmentProblem, BehaviorTable, LearnerAssignment,  # noqa: E402
                  build_problem, evaluate, evaluate_apportioned)
from .matching import (BipartiteGraph, deficiency, optimal_zero_one,  # noqa: E402
                       prune_degrees, r_matching)
from .minimax import (AgnosticProblem, agnostic_minimax, brute_force_minimax,  # noqa: E402
                      local_search_minimax, solve)
from .apportion import (Apportionment, derive_apportionments,  # noqa: E402
                        two_factor_learner, verify_factor_two)

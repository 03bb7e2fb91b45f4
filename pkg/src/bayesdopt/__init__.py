"""Bayesian D-optimal approximate designs by a monotone multiplicative algorithm."""

from .design_core import (
    DesignProblem,
    DesignSpace,
    DiscretePrior,
    InformationAtoms,
    as_weights,
    assemble_information,
    criterion_phi,
    equivalence_gap,
    evaluate,
    extended_phi,
    sensitivities_d,
    uniform_weights,
)
from .errors import (
    BoundViolated,
    DesignError,
    Infeasible,
    MonotonicityViolated,
    ParseError,
    SimplexDrift,
    SingularInformation,
    TooLarge,
    ValidationError,
)
from .mm_solver import (
    IterationRecord,
    IterationTrace,
    SolverConfig,
    Status,
    alpha_schedule,
    check_convergence,
    mm_step,
    solve,
)
from .models import (
    LogisticSpec,
    linear_atoms,
    linear_problem,
    logistic_atoms,
    logistic_problem,
    paper_example_problem,
)

__version__ = "0.1.0"

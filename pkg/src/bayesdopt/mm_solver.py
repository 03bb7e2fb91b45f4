"""
Multiplicative MM algorithm with overrelaxation for Bayesian D-optimal designs.

Each iteration rescales the weights by their sensitivities,

    w_i <- w_i * (d_i(w) - alpha) / (m - alpha),

with ``alpha = (a / 2) * min_i d_i(w)`` and ``a`` in ``[0, 1]``.  ``a = 0`` is
the basic multiplicative algorithm; ``a > 0`` lengthens every step by the
factor ``m / (m - alpha) <= 2``.  Any ``alpha <= min_i d_i / 2`` gives a
strict increase of the criterion, and the solver checks this at runtime.

Iteration stops once the equivalence-theorem gap satisfies
``max_i d_i <= m + epsilon``.
"""

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .design_core import as_weights, evaluate, uniform_weights
from .errors import BoundViolated, MonotonicityViolated, SimplexDrift, ValidationError

logger = logging.getLogger(__name__)


class Status(enum.Enum):
    CONVERGED = "Converged"
    ITER_LIMIT = "IterLimit"


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for :func:`solve`.

    Parameters
    ----------
    a : float
        Overrelaxation coefficient in ``[0, 1]``.
    epsilon : float
        Stop when ``max_i d_i <= m + epsilon``.
    max_iter : int
        Maximum number of multiplicative steps.
    monotonicity_slack : float
        Allowed absolute decrease of the criterion between iterates before
        :class:`MonotonicityViolated` is raised.
    simplex_tol : float
        Allowed drift of ``sum(w)`` away from one.  Weights are never
        renormalized, so drift is reported instead of hidden.
    """

    a: float = 1.0
    epsilon: float = 1e-3
    max_iter: int = 100_000
    monotonicity_slack: float = 1e-12
    simplex_tol: float = 1e-10

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValidationError(f"must lie in [0, 1], got {self.a}", "a")
        if not self.epsilon > 0:
            raise ValidationError(f"must be > 0, got {self.epsilon}", "epsilon")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValidationError(f"must be a positive integer, got {self.max_iter}", "max_iter")
        if self.monotonicity_slack < 0:
            raise ValidationError("must be >= 0", "monotonicity_slack")


@dataclass(frozen=True)
class IterationRecord:
    t: int
    phi: float
    min_d: float
    max_d: float
    alpha: float


@dataclass
class IterationTrace:
    """One record per evaluated iterate ``w^(0), w^(1), ...``.

    The last record belongs to the returned design.  ``iterations`` counts
    evaluated iterates (sensitivity passes), so a run that converges after
    ``T`` multiplicative steps reports ``T + 1``; ``steps`` is ``T``.
    """

    records: list = field(default_factory=list)
    status: Status = None

    def append(self, record):
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    @property
    def iterations(self):
        return len(self.records)

    @property
    def steps(self):
        return max(len(self.records) - 1, 0)

    @property
    def phi(self):
        return np.array([r.phi for r in self.records])

    @property
    def alpha(self):
        return np.array([r.alpha for r in self.records])


def alpha_schedule(d, a):
    """Overrelaxation ``(a / 2) * min_i d_i``."""
    return (a / 2.0) * float(np.min(d))


def mm_step(w, d, alpha, m):
    """One multiplicative update ``w_i (d_i - alpha) / (m - alpha)``.

    Raises
    ------
    BoundViolated
        If ``alpha > min_i d_i / 2``.
    """
    w = np.asarray(w, dtype=float)
    d = np.asarray(d, dtype=float)
    if alpha > 0.5 * d.min():
        raise BoundViolated(
            f"alpha={alpha!r} exceeds half the smallest sensitivity {0.5 * d.min()!r}"
        )
    return w * (d - alpha) / (m - alpha)


def check_convergence(d, m, epsilon):
    return bool(np.max(d) <= m + epsilon)


def solve(problem, w0=None, config=None):
    """Run the overrelaxed multiplicative algorithm from ``w0``.

    Parameters
    ----------
    problem : DesignProblem
    w0 : array_like, optional
        Strictly positive starting design; uniform by default.
    config : SolverConfig, optional

    Returns
    -------
    w : ndarray
        Final design.  With ``IterLimit`` status this is the last (and, by
        monotonicity, best) iterate, with no optimality claim.
    trace : IterationTrace

    Raises
    ------
    MonotonicityViolated
        If the criterion drops by more than ``config.monotonicity_slack``,
        or the weights leave the simplex; either means numerical breakdown.
    SingularInformation
        If the starting design has a singular information matrix.
    """
    config = config or SolverConfig()
    m = problem.m
    if w0 is None:
        w = uniform_weights(problem.n)
    else:
        w = as_weights(w0, problem.n).copy()
        if np.any(w <= 0):
            raise ValidationError("starting design must be strictly positive", "start")

    trace = IterationTrace()
    prev_phi = None
    t = 0
    while True:
        phi, d = evaluate(problem, w)
        if prev_phi is not None and phi < prev_phi - config.monotonicity_slack:
            raise MonotonicityViolated(
                f"criterion fell from {prev_phi!r} to {phi!r} at iteration {t}"
            )
        alpha = alpha_schedule(d, config.a)
        trace.append(IterationRecord(t, phi, float(d.min()), float(d.max()), alpha))
        if check_convergence(d, m, config.epsilon):
            trace.status = Status.CONVERGED
            break
        if t >= config.max_iter:
            trace.status = Status.ITER_LIMIT
            logger.warning("stopped after %d steps, gap %.3g", t, d.max() - m)
            break
        w = mm_step(w, d, alpha, m)
        drift = abs(w.sum() - 1.0)
        if drift > config.simplex_tol or np.any(w < 0):
            raise SimplexDrift(f"iterate left the simplex at step {t} (drift {drift:.3g})")
        prev_phi = phi
        t += 1
    return w, trace

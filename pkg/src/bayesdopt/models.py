"""Fisher information atoms for concrete regression models."""

from dataclasses import dataclass

import numpy as np

from .design_core import DesignProblem, DesignSpace, DiscretePrior, InformationAtoms
from .errors import ValidationError


@dataclass(frozen=True)
class LogisticSpec:
    """Logistic regression ``P(y=1 | x, theta) = sigmoid(x' theta)``."""

    space: DesignSpace
    prior: DiscretePrior

    def __post_init__(self):
        if self.space.p != self.prior.support.shape[1]:
            raise ValidationError(
                f"design points have length {self.space.p} but parameters have "
                f"length {self.prior.support.shape[1]}",
                "design_points",
            )


def _outer_products(points):
    return np.einsum("ip,iq->ipq", points, points)


def logistic_weight(eta):
    """``exp(eta) / (1 + exp(eta))**2`` computed as ``s (1 - s)`` with ``s = sigmoid(eta)``."""
    eta = np.asarray(eta, dtype=float)
    # exp(-|eta|) never overflows; the weight is symmetric in eta
    e = np.exp(-np.abs(eta))
    s = 1.0 / (1.0 + e)
    return s * (e * s)


def logistic_atoms(spec):
    """``A_i(theta_k) = x_i x_i' * w(x_i' theta_k)`` for every design/prior pair."""
    x = spec.space.points
    eta = x @ spec.prior.support.T  # (n, K)
    weight = logistic_weight(eta)
    atoms = weight[:, :, None, None] * _outer_products(x)[:, None]
    return InformationAtoms(atoms)


def linear_atoms(space):
    """Atoms ``x_i x_i'`` of the homoscedastic linear model, with ``K = 1``."""
    return InformationAtoms(_outer_products(space.points)[:, None])


def logistic_problem(points, prior):
    space = DesignSpace(points)
    return DesignProblem(space, prior, logistic_atoms(LogisticSpec(space, prior)))


def linear_problem(points):
    """Locally D-optimal design for a linear model (point-mass prior at 0)."""
    space = DesignSpace(points)
    prior = DiscretePrior.point_mass(np.zeros(space.p))
    return DesignProblem(space, prior, linear_atoms(space))


def paper_example_points():
    i = np.arange(1, 31)
    return np.column_stack([np.ones(30), i / 10 - 1])


def paper_example_prior():
    grid = np.arange(-2, 3, dtype=float)
    support = np.array([(a, b) for a in grid for b in grid])
    return DiscretePrior(support, np.full(25, 1 / 25))


def paper_example_problem():
    """Logistic model on ``x_i = (1, i/10 - 1)``, ``i = 1..30``, with a uniform
    prior on the 5 x 5 integer grid ``{-2, ..., 2}^2``."""
    return logistic_problem(paper_example_points(), paper_example_prior())

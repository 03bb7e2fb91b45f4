"""
Independent reference computations used by the test and audit suites.

Nothing here is called by the solver.  The routines deliberately take
different numerical routes from :mod:`bayesdopt.design_core`:

* :func:`det_poly_cauchy_binet` expands ``det M(w, theta)`` as a polynomial
  in ``w`` by summing squared ``m x m`` minors of ``G = (A_1^{1/2}, ...,
  A_n^{1/2})``; every coefficient is a square and hence nonnegative.
* :func:`minorizer_Q` is the surrogate that makes the multiplicative update
  a minorization-maximization step.
* :func:`grid_search_maximizer` enumerates a lattice on the simplex.
* :func:`finite_difference_gradient` differentiates the criterion numerically.
"""

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .design_core import (
    DesignProblem,
    DesignSpace,
    DiscretePrior,
    InformationAtoms,
    as_weights,
    criterion_phi,
    evaluate,
    extended_phi,
)
from .errors import Infeasible, SingularInformation, TooLarge

MAX_MN = 24
MAX_M = 3
MAX_GRID_N = 4
MAX_GRID_RESOLUTION = 100


@dataclass(frozen=True)
class DetPolynomial:
    """Homogeneous polynomial ``sum_j c_j prod_i w_i^{e_ji}`` of degree ``m``.

    ``terms`` maps exponent tuples to coefficients.
    """

    terms: dict
    n: int
    m: int

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        total = 0.0
        for exps, coef in self.terms.items():
            total += coef * math.prod(w[i] ** e for i, e in enumerate(exps) if e)
        return total

    @property
    def coefficients(self):
        return np.array(list(self.terms.values()))


def _psd_sqrt(A, clamp=1e-12):
    vals, vecs = np.linalg.eigh(A)
    vals = np.where(vals < clamp, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.T


def _leibniz_det(B):
    size = B.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(size)):
        inversions = sum(
            1 for a in range(size) for b in range(a + 1, size) if perm[a] > perm[b]
        )
        term = -1.0 if inversions % 2 else 1.0
        for row, col in enumerate(perm):
            term *= B[row, col]
        total += term
    return total


def det_poly_cauchy_binet(atoms):
    """Expand ``det(sum_i w_i A_i)`` for one fixed parameter value.

    Parameters
    ----------
    atoms : array_like, shape (n, m, m)
        The positive semidefinite matrices ``A_i``.

    Returns
    -------
    DetPolynomial

    Raises
    ------
    TooLarge
        If ``m > 3`` or ``m * n > 24``.
    """
    atoms = np.asarray(atoms, dtype=float)
    n, m = atoms.shape[0], atoms.shape[1]
    if m > MAX_M or m * n > MAX_MN:
        raise TooLarge(f"m={m}, n={n} exceeds enumeration limits (m <= {MAX_M}, mn <= {MAX_MN})")
    G = np.hstack([_psd_sqrt(A) for A in atoms])
    owner = np.repeat(np.arange(n), m)  # column -> design point
    terms = defaultdict(float)
    for cols in itertools.combinations(range(m * n), m):
        h = _leibniz_det(G[:, cols]) ** 2
        exps = [0] * n
        for c in cols:
            exps[owner[c]] += 1
        terms[tuple(exps)] += h
    return DetPolynomial(dict(terms), n, m)


def minorizer_Q(problem, w, w_tilde):
    """``sum_i d_i(w~) w~_i log(w_i / w~_i) + phi(w~)``.

    Lies below ``phi(w)`` everywhere and touches it at ``w = w~``.  Terms
    with ``w~_i = 0`` contribute nothing.
    """
    w = as_weights(w, problem.n)
    w_tilde = as_weights(w_tilde, problem.n)
    phi_t, d_t = evaluate(problem, w_tilde)
    on = w_tilde > 0
    return float(np.sum(d_t[on] * w_tilde[on] * np.log(w[on] / w_tilde[on])) + phi_t)


def simplex_grid(n, resolution):
    """All ``w`` with ``w_i = j_i / resolution``, ``j_i >= 0`` integers summing to ``resolution``."""
    # stars and bars
    for bars in itertools.combinations(range(resolution + n - 1), n - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(resolution + n - 2 - prev)
        yield np.array(parts) / resolution


def grid_search_maximizer(problem, resolution):
    """Best lattice point of the simplex at the given resolution.

    Raises
    ------
    TooLarge
        If ``n > 4`` or ``resolution > 100``.
    Infeasible
        If every lattice point has a singular information matrix.
    """
    if problem.n > MAX_GRID_N or resolution > MAX_GRID_RESOLUTION or resolution < 1:
        raise TooLarge(
            f"n={problem.n}, resolution={resolution} outside n <= {MAX_GRID_N}, "
            f"1 <= resolution <= {MAX_GRID_RESOLUTION}"
        )
    best, best_phi = None, -math.inf
    for w in simplex_grid(problem.n, resolution):
        try:
            phi = extended_phi(problem, w)
        except SingularInformation:
            continue
        if phi > best_phi:
            best, best_phi = w, phi
    if best is None:
        raise Infeasible("every grid point has a singular information matrix")
    return best


def grid_slack(problem, w_grid, resolution):
    """Largest change in ``phi`` between ``w_grid`` and an adjacent lattice point.

    Neighbours move ``1 / resolution`` of mass from one coordinate to another.
    Singular neighbours are skipped.
    """
    phi0 = criterion_phi(problem, w_grid)
    step = 1.0 / resolution
    slack = 0.0
    for i, j in itertools.permutations(range(problem.n), 2):
        if w_grid[i] < step - 1e-12:
            continue
        v = w_grid.copy()
        v[i] -= step
        v[j] += step
        v = np.clip(v, 0.0, None)
        try:
            slack = max(slack, abs(extended_phi(problem, v) - phi0))
        except SingularInformation:
            continue
    return slack


def finite_difference_gradient(problem, w, h=1e-6):
    """Central differences of the criterion along each unnormalized coordinate."""
    w = np.asarray(w, dtype=float)
    grad = np.empty(problem.n)
    for i in range(problem.n):
        e = np.zeros(problem.n)
        e[i] = h
        grad[i] = (extended_phi(problem, w + e) - extended_phi(problem, w - e)) / (2 * h)
    return grad


def random_psd(rng, m, rank=None):
    rank = m if rank is None else rank
    B = rng.normal(size=(m, rank))
    A = B @ B.T
    return 0.5 * (A + A.T)


def random_problem(rng, n, m, K, rank=None, max_tries=200, max_cond=1e6):
    """Random problem whose uniform design is well conditioned.

    Atoms are ``B B'`` with Gaussian ``B`` of the given rank (random in
    ``1..m`` when ``rank`` is None, raised where needed so that the ranks
    under each prior point add up to at least ``m``).  The prior is a random probability
    vector on Gaussian support points.  Draws are rejected until every
    ``M(uniform, theta_k)`` has condition number at most ``max_cond``.
    """
    for _ in range(max_tries):
        atoms = np.empty((n, K, m, m))
        for k in range(K):
            if rank is None:
                ranks = rng.integers(1, m + 1, size=n)
                if ranks.sum() < m:
                    ranks[0] = m
            else:
                ranks = np.full(n, rank)
            for i in range(n):
                atoms[i, k] = random_psd(rng, m, int(ranks[i]))
        probs = rng.uniform(0.1, 1.0, size=K)
        probs /= probs.sum()
        prior = DiscretePrior(rng.normal(size=(K, m)), probs)
        problem = DesignProblem(
            DesignSpace(rng.normal(size=(n, m))), prior, InformationAtoms(atoms)
        )
        M = np.tensordot(np.full(n, 1.0 / n), atoms, axes=1)
        if np.all(np.linalg.cond(M) <= max_cond):
            return problem
    raise Infeasible(f"no nonsingular random problem with n={n}, m={m} in {max_tries} tries")


def random_interior_weights(rng, n, low=0.05):
    w = rng.uniform(low, 1.0, size=n)
    return w / w.sum()

r"""
Problem data model and the Bayesian D-optimality criterion.

A design problem is a finite design space ``x_1, ..., x_n``, a prior with
finite support ``theta_1, ..., theta_K`` and probabilities ``pi_k``, and the
per-unit Fisher information atoms ``A_i(theta_k)`` (each ``m x m``).  For an
approximate design ``w`` on the simplex the criterion is

.. math:: \phi(w) = \sum_k \pi_k \log\det M(w, \theta_k),
          \qquad M(w, \theta) = \sum_i w_i A_i(\theta),

and its sensitivity function is

.. math:: d_i(w) = \sum_k \pi_k \operatorname{tr}(M(w, \theta_k)^{-1} A_i(\theta_k)),

which is also the gradient of ``phi`` extended to unnormalized weights.

Atoms are stored as a dense array of shape ``(n, K, m, m)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularInformation, ValidationError

SUM_TOL = 1e-12
SYMMETRY_TOL = 1e-12
PSD_REL_TOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DesignSpace:
    """Finite set of candidate design points, one row per point."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValidationError("need a non-empty (n, p) array", "design_points")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("non-finite coordinate", "design_points")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def p(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class DiscretePrior:
    """Prior with finitely many support points ``support[k]`` of mass ``probs[k]``."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=float)
        if sup.ndim == 1:
            sup = sup[:, None]
        probs = np.asarray(self.probs, dtype=float)
        if sup.ndim != 2 or sup.shape[0] < 1:
            raise ValidationError("need a non-empty (K, m) array", "prior.support")
        if probs.shape != (sup.shape[0],):
            raise ValidationError(
                f"expected {sup.shape[0]} probabilities, got shape {probs.shape}",
                "prior.probs",
            )
        if not np.all(probs > 0):
            raise ValidationError("every probability must be > 0", "prior.probs")
        if abs(probs.sum() - 1.0) > SUM_TOL:
            raise ValidationError(
                f"probabilities sum to {probs.sum()!r}, not 1", "prior.probs"
            )
        object.__setattr__(self, "support", _frozen(sup))
        object.__setattr__(self, "probs", _frozen(probs))

    @property
    def K(self):
        return self.support.shape[0]

    @classmethod
    def point_mass(cls, theta):
        return cls(np.atleast_2d(np.asarray(theta, dtype=float)), np.ones(1))

    @classmethod
    def uniform(cls, support):
        support = np.asarray(support, dtype=float)
        return cls(support, np.full(len(support), 1.0 / len(support)))


@dataclass(frozen=True)
class InformationAtoms:
    """Fisher information of one unit at ``x_i`` under ``theta_k``.

    ``atoms[i, k]`` is the symmetric positive semidefinite ``m x m`` matrix
    ``A_i(theta_k)``.
    """

    atoms: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.atoms, dtype=float)
        if a.ndim != 4 or a.shape[2] != a.shape[3] or 0 in a.shape:
            raise ValidationError(
                f"expected shape (n, K, m, m), got {a.shape}", "atoms"
            )
        if not np.all(np.isfinite(a)):
            raise ValidationError("non-finite entry", "atoms")
        asym = np.abs(a - np.swapaxes(a, -1, -2)).max()
        if asym > SYMMETRY_TOL:
            raise ValidationError(f"asymmetry {asym:.3g} exceeds {SYMMETRY_TOL}", "atoms")
        eig = np.linalg.eigvalsh(a)
        bad = eig[..., 0] < -PSD_REL_TOL * np.maximum(eig[..., -1], 0.0)
        if np.any(bad):
            i, k = np.argwhere(bad)[0]
            raise ValidationError(
                f"atom is not positive semidefinite (min eigenvalue {eig[i, k, 0]:.3g})",
                f"atoms[{i}][{k}]",
            )
        object.__setattr__(self, "atoms", _frozen(a))

    @property
    def n(self):
        return self.atoms.shape[0]

    @property
    def K(self):
        return self.atoms.shape[1]

    @property
    def m(self):
        return self.atoms.shape[2]


@dataclass(frozen=True)
class DesignProblem:
    space: DesignSpace
    prior: DiscretePrior
    atoms: InformationAtoms
    # (K, m, n*m): the atoms for each prior point laid side by side, used as
    # right-hand sides when solving against M(w, theta_k).
    _rhs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.atoms.n != self.space.n:
            raise ValidationError(
                f"{self.atoms.n} atoms rows for {self.space.n} design points", "atoms"
            )
        if self.atoms.K != self.prior.K:
            raise ValidationError(
                f"{self.atoms.K} atom columns for {self.prior.K} prior points", "atoms"
            )
        if self.prior.support.shape[1] != self.atoms.m:
            raise ValidationError(
                f"prior points have length {self.prior.support.shape[1]}, "
                f"atoms are {self.atoms.m}x{self.atoms.m}",
                "prior.support",
            )
        n, K, m = self.n, self.K, self.m
        rhs = np.ascontiguousarray(self.atoms.atoms.transpose(1, 2, 0, 3)).reshape(K, m, n * m)
        object.__setattr__(self, "_rhs", _frozen(rhs))

    @property
    def n(self):
        return self.atoms.n

    @property
    def K(self):
        return self.atoms.K

    @property
    def m(self):
        return self.atoms.m


def as_weights(w, n=None):
    """Validate a design and return it as a float array.

    A valid design has nonnegative entries summing to one within ``1e-12``.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValidationError(f"weights must be a non-empty vector, got shape {w.shape}", "weights")
    if n is not None and w.size != n:
        raise ValidationError(f"expected {n} weights, got {w.size}", "weights")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValidationError("weights must be finite and nonnegative", "weights")
    if abs(w.sum() - 1.0) > SUM_TOL:
        raise ValidationError(f"weights sum to {w.sum()!r}, not 1", "weights")
    return w


def uniform_weights(n):
    return np.full(n, 1.0 / n)


def assemble_information(problem, w, k):
    """Return ``M(w, theta_k) = sum_i w_i A_i(theta_k)``."""
    w = as_weights(w, problem.n)
    if not 0 <= k < problem.K:
        raise IndexError(f"prior index {k} out of range for K={problem.K}")
    return np.tensordot(w, problem.atoms.atoms[:, k], axes=1)


def _information_stack(problem, w):
    # (K, m, m)
    return np.tensordot(w, problem.atoms.atoms, axes=1)


def _cholesky(M):
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        pass
    for k, Mk in enumerate(M):
        try:
            np.linalg.cholesky(Mk)
        except np.linalg.LinAlgError:
            raise SingularInformation(
                f"information matrix for prior point {k} is not positive definite",
                prior_index=k,
            ) from None
    raise SingularInformation("information matrix is not positive definite")


def _log_dets(L):
    diag = np.diagonal(L, axis1=-2, axis2=-1)
    if not np.all(diag > 0) or not np.all(np.isfinite(diag)):
        k = int(np.argwhere(~(diag > 0) | ~np.isfinite(diag))[0, 0])
        raise SingularInformation(
            f"information matrix for prior point {k} is numerically singular",
            prior_index=k,
        )
    return 2.0 * np.log(diag).sum(axis=-1)


def _cho_solve(L, B):
    """Solve ``L L' X = B`` for a stack of lower-triangular ``L`` by substitution.

    Loops over the ``m`` rows and is vectorized over the stack and the columns
    of ``B``; ``m`` is small, so this beats a general batched solver.
    """
    m = L.shape[-1]
    Y = np.empty_like(B)
    for r in range(m):
        acc = B[:, r, :] - np.einsum("kj,kjc->kc", L[:, r, :r], Y[:, :r, :])
        Y[:, r, :] = acc / L[:, r, r, None]
    X = np.empty_like(B)
    for r in range(m - 1, -1, -1):
        acc = Y[:, r, :] - np.einsum("kj,kjc->kc", L[:, r + 1:, r], X[:, r + 1:, :])
        X[:, r, :] = acc / L[:, r, r, None]
    return X


def _accumulate(probs, values):
    # k ascending, sequential, so results do not depend on BLAS reduction order
    total = probs[0] * values[0]
    for k in range(1, len(probs)):
        total = total + probs[k] * values[k]
    return total


def evaluate(problem, w):
    """Criterion and sensitivities at ``w`` from one factorization per prior point.

    ``w`` is not checked against the simplex; any nonnegative vector is
    accepted, which evaluates the homogeneous extension of the criterion.

    Returns
    -------
    phi : float
    d : ndarray, shape (n,)

    Raises
    ------
    SingularInformation
        If some ``M(w, theta_k)`` is not positive definite.
    """
    n, K, m = problem.n, problem.K, problem.m
    L = _cholesky(_information_stack(problem, w))
    log_dets = _log_dets(L)
    # M^{-1} [A_1 ... A_n] through the Cholesky factor, never forming M^{-1}
    Z = _cho_solve(L, problem._rhs)
    traces = np.trace(Z.reshape(K, m, n, m), axis1=1, axis2=3)
    phi = float(_accumulate(problem.prior.probs, log_dets))
    d = _accumulate(problem.prior.probs, traces)
    return phi, d


def criterion_phi(problem, w):
    """Bayesian D-criterion ``sum_k pi_k log det M(w, theta_k)`` in nats."""
    w = as_weights(w, problem.n)
    L = _cholesky(_information_stack(problem, w))
    return float(_accumulate(problem.prior.probs, _log_dets(L)))


def extended_phi(problem, w):
    """Criterion for arbitrary nonnegative (unnormalized) weights.

    ``det M`` is homogeneous of degree ``m`` in ``w``, so
    ``extended_phi(c * w) == extended_phi(w) + m * log(c)``.
    """
    w = np.asarray(w, dtype=float)
    L = _cholesky(_information_stack(problem, w))
    return float(_accumulate(problem.prior.probs, _log_dets(L)))


def sensitivities_d(problem, w):
    """Sensitivity function ``d_i(w)``; satisfies ``sum_i w_i d_i = m``."""
    w = as_weights(w, problem.n)
    return evaluate(problem, w)[1]


def equivalence_gap(d, m):
    """``max_i d_i - m``: zero exactly at a maximizer of the criterion."""
    d = np.asarray(d, dtype=float)
    if d.size == 0:
        raise ValidationError("empty sensitivity vector", "d")
    return float(d.max() - m)


def make_problem(points, prior, atoms):
    """Convenience constructor from plain arrays."""
    space = points if isinstance(points, DesignSpace) else DesignSpace(points)
    atoms = atoms if isinstance(atoms, InformationAtoms) else InformationAtoms(atoms)
    return DesignProblem(space, prior, atoms)

"""Property checks over randomly generated problems."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bayesdopt import (
    SolverConfig,
    alpha_schedule,
    check_convergence,
    criterion_phi,
    evaluate,
    linear_problem,
    mm_step,
    sensitivities_d,
    solve,
)
from bayesdopt.oracle import (
    det_poly_cauchy_binet,
    minorizer_Q,
    random_interior_weights,
    random_problem,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 3)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, m=dims, n=st.integers(1, 10), K=st.integers(1, 5))
def test_normalization_identity(seed, m, n, K):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, K)
    w = random_interior_weights(rng, n)
    d = sensitivities_d(problem, w)
    assert abs(w @ d - m) <= 1e-10
    assert np.all(d >= 0)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, m=dims, n=st.integers(1, 4))
def test_cauchy_binet_matches_determinant(seed, m, n):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, 1)
    atoms = problem.atoms.atoms[:, 0]
    poly = det_poly_cauchy_binet(atoms)
    assert np.all(poly.coefficients >= -1e-12)
    w = rng.dirichlet(np.ones(n))
    direct = np.linalg.det(np.tensordot(w, atoms, axes=1))
    assert abs(poly(w) - direct) <= 1e-9 * abs(direct)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, m=dims, n=st.integers(2, 8), K=st.integers(1, 4))
def test_minorizer_below_criterion(seed, m, n, K):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, K, rank=m)
    w = random_interior_weights(rng, n)
    wt = random_interior_weights(rng, n)
    assert minorizer_Q(problem, w, wt) <= criterion_phi(problem, w) + 1e-10
    assert minorizer_Q(problem, wt, wt) == criterion_phi(problem, wt)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, m=dims, n=st.integers(2, 8), a=st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]))
def test_step_is_monotone_and_stays_on_simplex(seed, m, n, a):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, 3)
    w = random_interior_weights(rng, n)
    phi, d = evaluate(problem, w)
    new = mm_step(w, d, alpha_schedule(d, a), m)
    assert np.all(new >= 0) and abs(new.sum() - 1) <= 1e-12
    assert criterion_phi(problem, new) >= phi - 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=seeds, m=dims, n=st.integers(2, 8))
def test_overrelaxation_scales_basic_step(seed, m, n):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, 2)
    w = random_interior_weights(rng, n)
    d = sensitivities_d(problem, w)
    alpha = alpha_schedule(d, 1.0)
    factor = m / (m - alpha)
    basic = mm_step(w, d, 0.0, m) - w
    relaxed = mm_step(w, d, alpha, m) - w
    np.testing.assert_allclose(relaxed, factor * basic, rtol=0, atol=1e-12)
    assert 1.0 <= factor <= 2.0


@settings(max_examples=20, deadline=None)
@given(seed=seeds, m=st.integers(1, 2), n=st.integers(2, 5))
def test_zero_weights_stay_zero(seed, m, n):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, n, m, 2, rank=m)
    w = random_interior_weights(rng, n)
    w[0] = 0.0
    w /= w.sum()
    try:
        d = sensitivities_d(problem, w)
    except Exception:
        return
    for _ in range(5):
        w = mm_step(w, d, alpha_schedule(d, 1.0), m)
        assert w[0] == 0.0
        d = sensitivities_d(problem, w)


def test_fixed_point_at_certified_optimum():
    problem = linear_problem([[1, -1], [1, 0], [1, 1]])
    w = np.array([0.5, 0.0, 0.5])
    d = sensitivities_d(problem, w)
    assert check_convergence(d, 2, 1e-10)
    for a in (0.0, 0.5, 1.0):
        assert np.max(np.abs(mm_step(w, d, alpha_schedule(d, a), 2) - w)) < 1e-10


@settings(max_examples=10, deadline=None)
@given(seed=seeds)
def test_converged_solution_is_a_fixed_point(seed):
    rng = np.random.default_rng(seed)
    problem = random_problem(rng, 4, 2, 2, rank=1)
    w, trace = solve(problem, config=SolverConfig(epsilon=1e-9, max_iter=200_000))
    d = sensitivities_d(problem, w)
    step = mm_step(w, d, alpha_schedule(d, 1.0), 2)
    assert np.max(np.abs(step - w)) < 1e-8

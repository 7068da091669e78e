import math

import numpy as np
import pytest

from ardnet import linalg, netgen, solver
from ardnet.errors import InvalidInputError, SingularSystemError
from ardnet.solver import ConstraintMode, Problem, Shrinkage, SolverConfig

from oracles import objective_double_loop, proximal_gradient_reference


def random_instance(rng, n, K, N1=None):
    N1 = N1 or n
    M = netgen.rdp_matrix(rng.uniform(size=n))
    G = netgen.sample_adjacency(M, rng)
    W = rng.integers(0, 2, size=(K, n)).astype(float)
    return Problem(W @ G[:, :N1], W), G


def invertible_traits(rng, K, N2):
    while True:
        W = rng.integers(0, 2, size=(K, N2)).astype(float)
        if np.linalg.matrix_rank(W) == N2:
            return W


def test_problem_rejects_mismatched_shapes():
    with pytest.raises(InvalidInputError, match="3x4.*2x4"):
        Problem(np.zeros((3, 4)), np.zeros((2, 4)))
    with pytest.raises(InvalidInputError):
        Problem(np.zeros((2, 5)), np.zeros((2, 4)))
    with pytest.raises(InvalidInputError):
        Problem(np.zeros((2, 2)), np.full((2, 2), 0.5))


def test_objective_zero_at_truth(rng):
    problem, G = random_instance(rng, 8, 3)
    assert solver.objective(G, problem, 0.0) == 0.0


def test_objective_at_zero(rng):
    problem, _ = random_instance(rng, 8, 3)
    assert solver.objective(np.zeros((8, 8)), problem, 5.0) == pytest.approx(0.5 * np.sum(problem.Y**2))


def test_objective_matches_double_loop(rng):
    W = rng.integers(0, 2, size=(2, 3)).astype(float)
    Y = rng.integers(0, 4, size=(2, 2)).astype(float)
    M = rng.standard_normal((3, 2))
    got = solver.objective(M, Problem(Y, W), 1.3)
    assert abs(got - objective_double_loop(M, Y, W, 1.3)) <= 1e-10


def test_objective_shape_check(rng):
    problem, _ = random_instance(rng, 5, 2)
    with pytest.raises(InvalidInputError):
        solver.objective(np.zeros((4, 5)), problem, 1.0)


def test_default_penalty_values():
    # 2 * 21 * (10 + sqrt(10))
    assert solver.default_penalty(100, 100, 10) == pytest.approx(552.815661727072, abs=1e-9)
    assert solver.default_penalty(1, 1, 1) == 12.0
    with pytest.raises(InvalidInputError):
        solver.default_penalty(0, 1, 1)


@pytest.mark.parametrize("dims", [(1, 1, 1), (100, 100, 10), (30, 80, 7)])
def test_default_penalty_quadrupling(dims):
    N1, N2, K = dims
    # With every size multiplied by 4 the sqrt terms double, so only the +1 spoils exact scaling.
    base = solver.default_penalty(N1, N2, K)
    quad = solver.default_penalty(4 * N1, 4 * N2, 4 * K)
    correction = 2.0 * (math.sqrt(N2) + math.sqrt(K))
    assert quad == pytest.approx(4 * base - 2 * correction, rel=1e-12)


def test_symmetrize_example():
    out = solver.symmetrize(np.array([[0.5, -0.2], [0.4, 0.3]]), 2)
    np.testing.assert_array_equal(out, [[0.0, 0.2], [0.2, 0.0]])


def test_symmetrize_fixed_point(rng):
    a = rng.uniform(size=(5, 5))
    a = a + a.T
    np.fill_diagonal(a, 0)
    tail = rng.uniform(size=(3, 5))
    m = np.vstack([a, tail])
    np.testing.assert_array_equal(solver.symmetrize(m, 5), m)


def test_symmetrize_all_negative(rng):
    np.testing.assert_array_equal(solver.symmetrize(-rng.uniform(0.1, 1, size=(6, 4)), 4), np.zeros((6, 4)))


def test_symmetrize_tail_rows_only_clamped():
    m = np.array([[0.0, 1.0], [3.0, 0.0], [-1.0, 0.25]])
    np.testing.assert_array_equal(solver.symmetrize(m, 2), [[0, 2.0], [2.0, 0], [0, 0.25]])


def test_symmetrize_rejects_large_n1():
    with pytest.raises(InvalidInputError):
        solver.symmetrize(np.zeros((3, 2)), 4)


def test_gradient_step_stationary(rng):
    problem, G = random_instance(rng, 6, 3)
    L = solver.step_constant(problem)
    np.testing.assert_allclose(solver.gradient_step(G, problem, 0.0, L), G, atol=1e-10)


def test_gradient_step_full_shrinkage(rng):
    problem, _ = random_instance(rng, 6, 3)
    Z = rng.standard_normal((6, 6))
    L = solver.step_constant(problem)
    C = Z - (problem.W.T @ problem.W @ Z - problem.W.T @ problem.Y) / L
    lam = 1.01 * L * np.linalg.norm(C, 2)
    np.testing.assert_array_equal(solver.gradient_step(Z, problem, lam, L), np.zeros((6, 6)))


def test_gradient_step_composition(rng):
    W = rng.integers(0, 2, size=(3, 4)).astype(float)
    Y = rng.integers(0, 3, size=(3, 3)).astype(float)
    problem = Problem(Y, W)
    Z = rng.standard_normal((4, 3))
    L = 2.5
    plain = Z - (W.T @ W @ Z - W.T @ Y) / L
    expected = linalg.soft_threshold_singular_values(plain, 0.8 / L)
    np.testing.assert_allclose(solver.gradient_step(Z, problem, 0.8, L), expected, atol=1e-10)
    literal = linalg.soft_threshold_singular_values(plain, 0.8)
    np.testing.assert_allclose(solver.gradient_step(Z, problem, 0.8, L, Shrinkage.LITERAL), literal, atol=1e-10)


def test_gradient_step_rejects_bad_L(rng):
    problem, _ = random_instance(rng, 4, 2)
    with pytest.raises(InvalidInputError):
        solver.gradient_step(np.zeros((4, 4)), problem, 1.0, 0.0)


def test_fit_exact_recovery_unpenalised(rng):
    n = 20
    M = netgen.rdp_matrix(rng.uniform(size=n))
    G = netgen.sample_adjacency(M, rng)
    W = invertible_traits(rng, n, n)
    problem = Problem(W @ G, W)
    exact = solver.exact_least_squares(problem)
    result = solver.fit(problem, SolverConfig(lam=0.0, epsilon=1e-9, max_iterations=200000))
    assert result.converged
    assert np.max(np.abs(result.estimate - solver.symmetrize(exact, n))) <= 1e-4


def test_fit_zero_when_penalty_dominates(rng):
    problem, _ = random_instance(rng, 15, 4)
    lam = linalg.spectral_norm(problem.W.T @ problem.Y)
    for mode in ConstraintMode:
        result = solver.fit(problem, SolverConfig(lam=lam, constraint_mode=mode))
        np.testing.assert_array_equal(result.estimate, np.zeros((15, 15)))
        assert result.converged


def test_fit_result_contract(rng):
    problem, _ = random_instance(rng, 20, 4)
    result = solver.fit(problem)
    assert result.lam == solver.default_penalty(20, 20, 4)
    assert result.converged == (result.final_change <= 1e-4)
    assert len(result.objective_trace) == result.iterations_used + 1
    top = result.estimate[:20, :20]
    assert np.array_equal(top, top.T)
    assert np.all(np.diag(top) == 0)
    assert np.all(result.estimate >= 0)


def test_fit_not_converged_is_not_an_error(rng):
    problem, _ = random_instance(rng, 20, 4)
    result = solver.fit(problem, SolverConfig(epsilon=1e-14, max_iterations=3))
    assert result.iterations_used == 3
    assert not result.converged


def test_fit_objective_sanity_unconstrained(rng):
    for _ in range(5):
        problem, _ = random_instance(rng, 12, 3)
        M0 = rng.uniform(size=(12, 12))
        config = SolverConfig(constraint_mode="unconstrained", initial_guess=M0)
        result = solver.fit(problem, config)
        assert result.final_objective <= solver.objective(M0, problem, result.lam) + 1e-8


def test_fit_matches_plain_proximal_gradient(rng):
    problem, _ = random_instance(rng, 10, 4)
    lam = 0.5 * solver.default_penalty(10, 10, 4)
    result = solver.fit(problem, SolverConfig(lam=lam, constraint_mode="unconstrained", epsilon=1e-10))
    ref = proximal_gradient_reference(problem.Y, problem.W, lam)
    ref_obj = solver.objective(ref, problem, lam)
    assert abs(result.final_objective - ref_obj) <= 1e-3 * abs(ref_obj)


def test_fit_deterministic(rng):
    problem, _ = random_instance(rng, 25, 5)
    a = solver.fit(problem)
    b = solver.fit(problem)
    assert np.array_equal(a.estimate, b.estimate)
    assert a.objective_trace == b.objective_trace


def test_fit_per_iteration_projection_constraints(rng):
    problem, _ = random_instance(rng, 20, 4, N1=12)
    result = solver.fit(problem, SolverConfig(per_iteration_projection=True, clamp_upper_at_one=True))
    top = result.estimate[:12, :12]
    assert np.array_equal(top, top.T)
    assert np.all(np.diag(top) == 0)
    assert result.estimate.min() >= 0 and result.estimate.max() <= 1


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SolverConfig(epsilon=0)
    with pytest.raises(InvalidInputError):
        SolverConfig(max_iterations=0)
    with pytest.raises(InvalidInputError):
        SolverConfig(lam=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(constraint_mode="sideways")


def test_exact_least_squares_identity(rng):
    G = netgen.sample_adjacency(netgen.rdp_matrix(rng.uniform(size=6)), rng)
    np.testing.assert_array_equal(solver.exact_least_squares(Problem(G, np.eye(6))), G)


def test_exact_least_squares_tall(rng):
    G = netgen.sample_adjacency(netgen.rdp_matrix(rng.uniform(size=8)), rng)
    W = invertible_traits(rng, 14, 8)
    np.testing.assert_allclose(solver.exact_least_squares(Problem(W @ G, W)), G, atol=1e-8)


def test_exact_least_squares_wide_is_singular(rng):
    W = rng.integers(0, 2, size=(3, 6)).astype(float)
    with pytest.raises(SingularSystemError):
        solver.exact_least_squares(Problem(np.zeros((3, 6)), W))

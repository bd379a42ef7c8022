import logging

import numpy as np
import pytest

from DAdmmSim.src import ProblemFactory
from DAdmmSim.src.DistributedOptimizer import StopRule, d_admm
from DAdmmSim.src.errors import BudgetExceededError, ConfigurationError
from DAdmmSim.src.NetworkGraph import greedy_color
from DAdmmSim.src.ProblemFactory import (
    BpdnInstance,
    BpdnNodeSolver,
    ConsensusInstance,
    LassoInstance,
    LassoNodeSolver,
    SvmInstance,
    build_instance,
    consensus_node_solve,
    dct_matrix,
    gen_gaussian_cs,
    gen_partial_dct_cs,
    gen_separable_svm,
    partition_cols,
    partition_rows,
    reference_bpdn,
    reference_consensus,
    reference_svm,
    solve_lasso_reference,
    svm_classify,
    svm_node_solve,
)
from DAdmmSim.src.ProxSolvers import ProxResult

from .conftest import active_set_qp, grid_minimize_1d


def test_consensus_node_solve_minimizes_its_objective():
    solve = consensus_node_solve(3.0)
    v, c = np.array([1.5]), 0.75
    expected = grid_minimize_1d(
        lambda x: (x - 3.0) ** 2 + 1.5 * x + 0.75 * x**2, -50.0, 50.0
    )
    assert solve(v, c)[0] == pytest.approx(expected, abs=1e-8)
    assert solve(np.zeros(1), 0.0)[0] == pytest.approx(3.0)
    with pytest.raises(ValueError):
        solve(v, -1.0)


def test_reference_consensus():
    assert reference_consensus(np.array([1.0, 2.0, 6.0])) == pytest.approx(3.0)


def test_bpdn_node_solve_meets_optimality_conditions():
    rng = np.random.default_rng(5)
    A_p, b_p = rng.normal(size=(5, 8)), rng.normal(size=5)
    v, c = rng.normal(size=8), 0.5
    solver = BpdnNodeSolver(A_p, b_p, beta=1.0, node_count=2)
    x = solver(v, c)

    gradient = 2 * A_p.T @ (A_p @ x - b_p) + v + 2 * c * x
    weight = solver.weight
    active = x != 0
    np.testing.assert_allclose(
        gradient[active], -weight * np.sign(x[active]), atol=1e-6
    )
    assert np.all(np.abs(gradient[~active]) <= weight + 1e-6)


def test_bpdn_node_solve_warm_starts():
    rng = np.random.default_rng(6)
    solver = BpdnNodeSolver(rng.normal(size=(4, 6)), rng.normal(size=4), 0.5, 3)
    v = rng.normal(size=6)
    first = solver(v, 1.0)
    np.testing.assert_allclose(solver(v, 1.0), first, atol=1e-8)


def test_bpdn_node_solve_budget():
    rng = np.random.default_rng(6)
    solver = BpdnNodeSolver(
        rng.normal(size=(4, 6)), rng.normal(size=4), 0.5, 3, max_iter=1
    )
    with pytest.raises(BudgetExceededError) as info:
        solver(np.ones(6), 0.1)
    assert info.value.best_iterate is not None


def test_reference_bpdn_on_identity():
    b = np.array([3.0, -0.2, 1.0])
    np.testing.assert_allclose(reference_bpdn(np.eye(3), b, 1.0), [2.5, 0.0, 0.5])


def test_lasso_node_solve_minimizes_scalar_dual():
    solver = LassoNodeSolver(
        A_p=np.array([[1.0, -2.0, 0.5]]),
        b=np.array([0.7]),
        sigma=0.3,
        delta=0.1,
        node_count=2,
        max_iter=20_000,
    )
    v, c = np.array([0.2]), 0.4
    lam = solver(v, c)
    expected = grid_minimize_1d(
        lambda value: solver.node_objective(np.array([value]), v, c), -20.0, 20.0
    )
    assert solver.budget_hits == 0
    assert lam[0] == pytest.approx(expected, abs=1e-5)


def test_lasso_node_budget_hit_returns_best_iterate(monkeypatch):
    best = np.array([0.25, -0.5, 1.0])
    last = np.array([4.0, 4.0, 9.0])

    def capped(problem):
        return ProxResult(
            x=last,
            iterations=problem.max_iter,
            converged=False,
            step_change=1.0,
            best_x=best,
            best_objective=-1.0,
        )

    monkeypatch.setattr(ProblemFactory, "fista_solve", capped)
    solver = LassoNodeSolver(
        np.array([[1.0, 2.0], [0.5, -1.0]]),
        np.array([1.0, -1.0]),
        sigma=0.1,
        delta=0.01,
        node_count=1,
    )
    lam = solver(np.zeros(2), 0.0)
    np.testing.assert_array_equal(lam, best[:2])
    assert solver.hit_budget
    assert solver.budget_hits == 1


def test_lasso_node_budget_hit_warns_once():
    records = []

    class Collect(logging.Handler):
        def emit(self, record):
            records.append(record)

    handler = Collect(level=logging.WARNING)
    logger = logging.getLogger("DAdmmSim.src.ProblemFactory")
    logger.addHandler(handler)
    try:
        solver = LassoNodeSolver(
            np.array([[1.0, 2.0], [0.5, -1.0]]),
            np.array([1.0, -1.0]),
            sigma=0.1,
            delta=0.01,
            node_count=1,
            max_iter=1,
        )
        first = solver(np.zeros(2), 0.0)
        solver(np.zeros(2), 0.0)
    finally:
        logger.removeHandler(handler)

    assert first.shape == (2,)
    assert np.all(np.isfinite(first))
    assert solver.hit_budget
    assert solver.budget_hits == 2
    assert len([r for r in records if "budget" in r.getMessage()]) == 1


def test_lasso_instance_reference_is_feasible():
    A, b, _ = gen_gaussian_cs(10, 16, 2, 0.01, seed=3)
    instance = LassoInstance(A=A, b=b, sigma=0.1, delta=0.1, node_count=2)
    lam_star = instance.reference
    assert lam_star.shape == (10,)
    assert instance.is_feasible(instance.primal_reference)
    np.testing.assert_allclose(
        instance.recover_primal(np.tile(lam_star, (2, 1))),
        instance.primal_reference,
        atol=1e-12,
    )
    assert instance.primal_error(np.tile(lam_star, (2, 1))) == pytest.approx(0.0)


@pytest.mark.parametrize("delta", [0.1, 0.05])
def test_small_delta_recovers_the_unregularized_lasso(delta):
    # min ‖x‖₁ s.t. ‖x - b‖ ≤ 1 has the unique solution (3 - √0.75, 0).
    b = np.array([3.0, 0.5])
    _, x = solve_lasso_reference(np.eye(2), b, 1.0, delta)
    np.testing.assert_allclose(x, [3.0 - np.sqrt(0.75), 0.0], atol=1e-6)
    assert np.linalg.norm(x - b) == pytest.approx(1.0, abs=1e-6)


def test_large_delta_moves_the_lasso_solution():
    _, x = solve_lasso_reference(np.eye(2), np.array([3.0, 0.5]), 1.0, 1.0)
    assert x[1] > 0.1


@pytest.mark.slow
def test_d_admm_solves_lasso_on_two_nodes(path2):
    A, b, _ = gen_gaussian_cs(10, 16, 2, 0.01, seed=3)
    instance = LassoInstance(A=A, b=b, sigma=0.1, delta=0.1, node_count=2)
    stop = StopRule(instance.reference, tol=1e-7, max_steps=5000)
    trace = d_admm(instance.node_problems(), path2, greedy_color(path2), 1.0, stop)
    assert instance.primal_error(trace.estimate) <= 1e-2
    assert instance.is_feasible(instance.recover_primal(trace.estimate), slack=1e-2)


def test_svm_node_solve_with_active_constraint():
    solve = svm_node_solve(np.array([[1.0]]), np.array([[1.0]]))
    np.testing.assert_allclose(solve(np.zeros(2), 1.0), [1 / 3, -2 / 3], atol=1e-7)


def test_svm_node_solve_with_inactive_constraint():
    solve = svm_node_solve(np.array([[1.0]]), np.array([1.0]))
    np.testing.assert_allclose(solve(np.array([-8.0, 4.0]), 1.0), [2.0, -2.0])


def test_svm_node_solve_matches_active_set():
    rng = np.random.default_rng(12)
    data = gen_separable_svm(4, 2, 1.0, seed=12)
    v, c = rng.normal(size=3), 0.7
    solve = svm_node_solve(data.A, data.labels)
    G, h = solve.constraints
    Q = 2.0 * np.diag([1.0 + c, 1.0 + c, c])
    np.testing.assert_allclose(solve(v, c), active_set_qp(Q, v, G, h), atol=1e-6)


def test_svm_node_solve_rejects_bad_inputs():
    solve = svm_node_solve(np.array([[1.0]]), np.array([1.0]))
    with pytest.raises(ValueError):
        solve(np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        svm_node_solve(np.array([[1.0]]), np.array([2.0]))


def test_svm_projection_is_feasible():
    instance = gen_separable_svm(6, 2, 1.0, seed=1)
    solver = instance.node_problems()[0]
    z = solver.project(np.zeros(3))
    assert instance.is_feasible(z, slack=1e-7)


def test_reference_svm_is_the_maximum_margin_separator():
    instance = gen_separable_svm(20, 2, 1.0, seed=0)
    z = reference_svm(instance.A, instance.labels)
    margins = instance.margins(z)
    assert instance.is_feasible(z)
    for label in (1.0, -1.0):
        assert margins[instance.labels == label].min() == pytest.approx(1.0, abs=1e-5)
    np.testing.assert_array_equal(svm_classify(z, instance.A), instance.labels)


def test_svm_classify():
    z = np.array([1.0, 0.5])
    np.testing.assert_array_equal(svm_classify(z, np.array([[2.0], [0.0]])), [1, -1])


def test_gaussian_cs_data():
    A, b, x_true = gen_gaussian_cs(400, 500, 7, 0.0, seed=2)
    assert A.shape == (400, 500)
    norms = np.linalg.norm(A, axis=0)
    assert np.all((norms > 0.7) & (norms < 1.3))
    assert np.count_nonzero(x_true) == 7
    assert set(x_true[x_true != 0]) <= {-1.0, 1.0}
    np.testing.assert_allclose(b, A @ x_true)
    again = gen_gaussian_cs(400, 500, 7, 0.0, seed=2)
    np.testing.assert_array_equal(again[0], A)


def test_cs_shape_checks():
    with pytest.raises(ValueError):
        gen_gaussian_cs(10, 5, 2, 0.0, seed=0)
    with pytest.raises(ValueError):
        gen_partial_dct_cs(10, 20, 10, 0.0, seed=0)


def test_dct_matrix_is_orthonormal():
    C = dct_matrix(16)
    np.testing.assert_allclose(C @ C.T, np.eye(16), atol=1e-12)
    np.testing.assert_allclose(C[0], 0.25)


def test_partial_dct_rows_are_orthonormal():
    A, b, x_true = gen_partial_dct_cs(20, 64, 3, 0.01, seed=4)
    assert A.shape == (20, 64)
    np.testing.assert_allclose(A @ A.T, np.eye(20), atol=1e-12)
    assert np.count_nonzero(x_true) == 3
    assert b.shape == (20,)


def test_separable_svm_data():
    instance = gen_separable_svm(30, 3, 0.5, seed=9, P=3)
    assert isinstance(instance, SvmInstance)
    assert instance.A.shape == (30, 3)
    np.testing.assert_array_equal(instance.labels[:4], [1.0, -1.0, 1.0, -1.0])
    assert np.linalg.norm(instance.direction) == pytest.approx(1.0)
    assert np.all(instance.labels * (instance.A @ instance.direction) >= 0.5)
    assert instance.dimension == 4
    with pytest.raises(ValueError):
        gen_separable_svm(10, 2, 0.0, seed=0)


def test_partitions_are_contiguous_and_balanced():
    A = np.arange(40.0).reshape(10, 4)
    b = np.arange(10.0)
    blocks = partition_rows(A, b, 3)
    assert [A_p.shape[0] for A_p, _ in blocks] == [4, 3, 3]
    np.testing.assert_array_equal(blocks[1][1], [4.0, 5.0, 6.0])
    columns = partition_cols(A, 3)
    assert [A_p.shape[1] for A_p in columns] == [2, 1, 1]
    np.testing.assert_array_equal(np.hstack(columns), A)


def test_partition_rejects_bad_requests():
    A = np.zeros((3, 2))
    with pytest.raises(ValueError):
        partition_rows(A, np.zeros(3), 4)
    with pytest.raises(ValueError):
        partition_cols(A, 1, pattern="random")


def test_build_instance_defaults():
    consensus = build_instance("consensus", 10, seed=1)
    assert isinstance(consensus, ConsensusInstance)
    assert consensus.node_count == 10
    assert consensus.reference[0] == pytest.approx(consensus.theta.mean())

    bpdn = build_instance("bpdn", 5, seed=1)
    assert isinstance(bpdn, BpdnInstance)
    assert bpdn.A.shape == (60, 256)
    assert bpdn.beta == 1.0
    assert len(bpdn.node_problems()) == 5
    assert {problem.dimension for problem in bpdn.node_problems()} == {256}

    lasso = build_instance("lasso", 5, seed=1)
    assert lasso.A.shape == (50, 250)
    assert (lasso.sigma, lasso.delta) == (0.1, 1e-3)
    assert lasso.dimension == 50
    np.testing.assert_allclose(lasso.A @ lasso.A.T, np.eye(50), atol=1e-12)

    svm = build_instance("svm", 4, seed=1)
    assert svm.A.shape == (100, 4)
    assert svm.dimension == 5


def test_build_instance_overrides_and_errors():
    lasso = build_instance("lasso", 2, seed=0, matrix="gaussian", m=12, n=30, k=2)
    assert lasso.A.shape == (12, 30)
    assert lasso.sigma == 0.5
    with pytest.raises(ConfigurationError):
        build_instance("matrix-completion", 4)
    with pytest.raises(ConfigurationError):
        build_instance("bpdn", 4, matrix="fourier")
    with pytest.raises(ConfigurationError):
        build_instance("consensus", 4, beta=1.0)

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from dfwlearn.exceptions import DimensionError
from dfwlearn.objectives import (Adaboost, AtomMatrix, Iterate, KernelSpec, L1Ball, Lasso,
                                 Simplex, SvmDual, adaboost_weights, augmented_kernel,
                                 check_partition, gradient_entry, lambda_max,
                                 mean_pairwise_distance, objective_value, simplex_quadratic)

from conftest import make_lasso, make_svm


# ------------------------------------------------------------------ AtomMatrix

def test_atom_matrix_dense_and_sparse_storage():
    dense = AtomMatrix(np.ones((3, 4)))
    assert not dense.is_sparse and dense.shape == (3, 4)
    A = np.zeros((10, 4))
    A[2, 1] = 3.0
    sparse = AtomMatrix(A)
    assert sparse.is_sparse and sparse.nnz == 1
    idx, val = sparse.column_sparse(1)
    assert list(idx) == [2] and list(val) == [3.0]


def test_atom_matrix_from_columns_validates_indices():
    m = AtomMatrix.from_columns([(np.array([0, 2]), np.array([0.5, 1.0])), np.ones(3)], d=3)
    np.testing.assert_allclose(m.column(0), [0.5, 0, 1.0])
    with pytest.raises(ValueError):
        AtomMatrix.from_columns([(np.array([2, 0]), np.array([1.0, 1.0]))], d=3)
    with pytest.raises(ValueError):
        AtomMatrix.from_columns([(np.array([3]), np.array([1.0]))], d=3)
    with pytest.raises(ValueError):
        AtomMatrix.from_columns([np.ones(2)], d=3)


def test_atom_matrix_index_errors():
    m = AtomMatrix(np.eye(2))
    with pytest.raises(IndexError):
        m.column(2)
    with pytest.raises(ValueError):
        AtomMatrix(np.zeros((0, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 10_000))
def test_atom_matrix_sparse_matches_dense(d, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((d, n)) * (rng.random((d, n)) < 0.3)
    if not A.any():
        A[0, 0] = 1.0
    m, s = AtomMatrix(A), AtomMatrix(sp.csc_matrix(A))
    x, r = rng.standard_normal(n), rng.standard_normal(d)
    np.testing.assert_allclose(m.matvec(x), A @ x, atol=1e-12)
    np.testing.assert_allclose(s.rmatvec(r), A.T @ r, atol=1e-12)
    np.testing.assert_allclose(s.toarray(), A)


# ------------------------------------------------------------------ Iterate

def test_iterate_start_and_step():
    a = Iterate.start(3, L1Ball(2.0))
    assert a.support == {} and a.is_feasible()
    a.step(1.0, 1, -2.0)
    assert a.support == {1: -2.0}
    a.step(0.5, 0, 2.0)
    assert a.support == {0: 1.0, 1: -1.0}
    s = Iterate.start(3, Simplex())
    assert s.support == {0: 1.0} and s.is_feasible()


def test_iterate_drops_zeros_and_checks_feasibility():
    a = Iterate(2, L1Ball(1.0), {0: 1.0})
    a.step(0.5, 0, -1.0)
    assert a.support == {}
    assert not Iterate(2, L1Ball(1.0), {0: 1.1}).is_feasible()
    assert not Iterate(2, Simplex(), {0: 0.5}).is_feasible()
    with pytest.raises(ValueError):
        L1Ball(0.0)


# ------------------------------------------------------------------ values

def test_objective_value_examples():
    lasso = Lasso(AtomMatrix(np.eye(2)), np.array([1.0, 0.0]))
    assert objective_value(lasso, Iterate.start(2, L1Ball(1.0))) == 1.0
    svm = SvmDual(np.array([[1.0]]), np.array([1.0]), KernelSpec("linear"), C=1.0)
    assert objective_value(svm, Iterate.start(1, Simplex())) == pytest.approx(3.0)
    boost = Adaboost(AtomMatrix(np.array([[1.0, -1.0]])), temperature=1.0)
    assert objective_value(boost, Iterate(2, L1Ball(1.0), {0: 0.5, 1: 0.5})) == 0.0


def test_objective_value_rejects_infeasible_and_bad_shapes():
    lasso = Lasso(AtomMatrix(np.eye(2)), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        objective_value(lasso, Iterate(2, L1Ball(1.0), {0: 2.0}))
    with pytest.raises(DimensionError):
        Lasso(AtomMatrix(np.eye(2)), np.ones(3))
    with pytest.raises(DimensionError):
        lasso.value(np.ones(3))


def test_gradient_entry_examples():
    # atom indices are 0-based
    lasso = Lasso(AtomMatrix(np.eye(2)), np.array([1.0, 0.0]))
    assert gradient_entry(lasso, Iterate.start(2, L1Ball(1.0)), 0) == -2.0
    svm = SvmDual(np.array([[1.0]]), np.array([1.0]), KernelSpec("linear"), C=1.0)
    assert gradient_entry(svm, Iterate.start(1, Simplex()), 0) == pytest.approx(6.0)
    boost = Adaboost(AtomMatrix(np.array([[1.0, -1.0]])), temperature=1.0)
    assert gradient_entry(boost, Iterate(2, L1Ball(1.0), {0: 0.5, 1: 0.5}), 0) == -1.0
    with pytest.raises(IndexError):
        gradient_entry(lasso, Iterate.start(2, L1Ball(1.0)), 5)


def test_adaboost_weights_examples():
    boost = Adaboost(AtomMatrix(np.eye(2)), temperature=1.0)
    np.testing.assert_allclose(adaboost_weights(boost, np.zeros(2)), [0.5, 0.5])
    w = adaboost_weights(boost, np.array([np.log(2.0), 0.0]))
    np.testing.assert_allclose(w, [1 / 3, 2 / 3], atol=1e-15)
    with pytest.raises(TypeError):
        adaboost_weights(make_lasso(5, 3), np.zeros(5))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 15), st.integers(1, 15), st.floats(0.1, 5.0), st.integers(0, 10_000))
def test_adaboost_weights_are_a_distribution(d, n, T, seed):
    rng = np.random.default_rng(seed)
    boost = Adaboost(AtomMatrix(rng.standard_normal((d, n)) * 50), temperature=T)
    w = adaboost_weights(boost, rng.standard_normal(n))
    assert np.all(w >= 0) and abs(w.sum() - 1) <= 1e-12


def test_adaboost_is_overflow_safe():
    boost = Adaboost(AtomMatrix(np.array([[1.0], [-1.0]])), temperature=1e-3)
    f = boost.value(np.array([1e3]))
    assert np.isfinite(f) and np.isfinite(boost.gradient(np.array([1e3]))).all()


# ------------------------------------------------------------------ gradients

def _fd_check(obj, alpha, h=1e-6, rtol=1e-5):
    g = obj.gradient(alpha)
    scale = max(1.0, np.max(np.abs(g)))
    for j in range(obj.n):
        e = np.zeros(obj.n)
        e[j] = h
        fd = (obj.value(alpha + e) - obj.value(alpha - e)) / (2 * h)
        assert abs(fd - g[j]) <= rtol * scale, (j, fd, g[j])
        assert obj.gradient_entry(alpha, j) == pytest.approx(g[j], rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_finite_difference_gradients(seed):
    rng = np.random.default_rng(seed)
    d, n = rng.integers(1, 21, size=2)
    A = rng.standard_normal((d, n))
    alpha = rng.standard_normal(n) / n
    _fd_check(Lasso(AtomMatrix(A), rng.standard_normal(d)), alpha)
    _fd_check(Adaboost(AtomMatrix(A), temperature=rng.uniform(0.5, 3.0)), alpha)
    X = rng.standard_normal((3, n))
    svm = SvmDual(X, rng.choice([-1.0, 1.0], n), KernelSpec("rbf", 1.3), C=2.0)
    _fd_check(svm, np.abs(alpha))


# ------------------------------------------------------------------ kernels

def test_augmented_kernel_diagonal_and_psd():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((4, 10))
    y = rng.choice([-1.0, 1.0], 10)
    for kern in (KernelSpec("rbf", 0.7), KernelSpec("linear")):
        svm = SvmDual(X, y, kern, C=0.5)
        K = svm.kernel_matrix()
        np.testing.assert_allclose(K, K.T)
        np.testing.assert_allclose(np.diag(K), kern.diag(X) + 1 + 1 / 0.5)
        assert np.linalg.eigvalsh(K).min() >= -1e-8
    idx = np.arange(10)
    Kab = augmented_kernel(KernelSpec("linear"), 1.0, X, y, idx, X[:, :2], y[:2], idx[:2])
    assert Kab.shape == (10, 2)


def test_kernel_spec_validation_and_bandwidth_default():
    with pytest.raises(ValueError):
        KernelSpec("rbf", 0.0)
    with pytest.raises(ValueError):
        KernelSpec("poly", 1.0)
    X = np.array([[0.0, 3.0], [0.0, 4.0]])
    assert mean_pairwise_distance(X) == pytest.approx(5.0)
    svm = SvmDual(X, np.array([1.0, -1.0]))
    assert svm.kernel.bandwidth == pytest.approx(5.0)
    with pytest.raises(ValueError):
        SvmDual(X, np.array([1.0, 0.0]))


# ------------------------------------------------------------------ replicas

@pytest.mark.parametrize("kind", ["lasso", "boost", "svm"])
def test_cache_stays_consistent_with_scratch(kind):
    rng = np.random.default_rng(11)
    if kind == "svm":
        obj, dom = make_svm(30, 3, seed=2), Simplex()
    elif kind == "lasso":
        obj, dom = make_lasso(30, 8, seed=2), L1Ball(2.0)
    else:
        obj, dom = Adaboost(AtomMatrix(rng.standard_normal((8, 30))), 1.5), L1Ball(2.0)
    owned = np.arange(0, 30, 3)
    state = obj.make_state(owned, Iterate.start(obj.n, dom))
    for _ in range(25):
        j = int(rng.integers(obj.n))
        coef = 1.0 if isinstance(dom, Simplex) else float(rng.choice([-2.0, 2.0]))
        state.receive(j, obj.payload(j))
        state.step(float(rng.uniform(0, 1)), j, coef)
        full = obj.gradient(state.alpha)
        np.testing.assert_allclose(state.grad(), full[owned], rtol=1e-9, atol=1e-9)
        assert state.value == pytest.approx(obj.value(state.alpha), rel=1e-9, abs=1e-12)


def test_cache_gamma_zero_and_one():
    obj = make_lasso(10, 4, seed=1)
    state = obj.make_state(np.arange(10), Iterate.start(10, L1Ball(1.0)))
    state.step(1.0, 3, -1.0)
    before = state.grad().copy()
    state.step(0.0, 5, 1.0)
    np.testing.assert_array_equal(state.grad(), before)
    state.step(1.0, 7, 1.0)
    assert state.alpha.support == {7: 1.0}
    np.testing.assert_allclose(state.grad(), obj.gradient(Iterate(10, L1Ball(1.0), {7: 1.0})))


def test_state_needs_received_payload():
    obj = make_lasso(6, 3, seed=1)
    state = obj.make_state(np.array([0, 1]), Iterate.start(6, L1Ball(1.0)))
    with pytest.raises(KeyError):
        state.step(0.5, 4, 1.0)


# ------------------------------------------------------------------ helpers

def test_lambda_max_conventions():
    A = AtomMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))
    y = np.array([1.0, 1.0])
    assert lambda_max(A, y) == 3.0
    assert lambda_max(A, y, "A_y") == 3.0
    with pytest.raises(DimensionError):
        lambda_max(AtomMatrix(np.ones((2, 3))), y, "A_y")
    with pytest.raises(ValueError):
        lambda_max(A, y, "other")


def test_simplex_quadratic_and_partition_check():
    q = simplex_quadratic(4)
    assert q.value(np.full(4, 0.25)) == pytest.approx(0.25)
    check_partition([np.array([0, 2]), np.array([1])], 3)
    with pytest.raises(ValueError):
        check_partition([np.array([0, 1]), np.array([1, 2])], 3)
    with pytest.raises(ValueError):
        check_partition([np.array([0])], 2)

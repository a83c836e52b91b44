"""scikit-learn style estimators on top of the Frank-Wolfe solvers.

Each estimator solves centrally by default.  Setting ``topology`` runs the
distributed solver on a simulated network instead, and ``centers`` switches
to the approximate variant; the message ledger is then kept in ``ledger_``.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin, TransformerMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .approx import L1Metric, greedy_selection, solve_approx_dfw
from .distributed import (hub_exclusion, owner_map, parse_partition, partition_atoms,
                          solve_dfw)
from .fw import SolverConfig, solve_fw
from .netsim import parse_topology
from .objectives import (Adaboost, AtomMatrix, KernelSpec, L1Ball, Lasso, Simplex, SvmDual,
                         mean_pairwise_distance)


class _FrankWolfeBase(BaseEstimator):
    """Shared solver plumbing; subclasses build the objective."""

    def _solve(self, objective, domain):
        cfg = SolverConfig(epsilon=self.epsilon, max_iter=self.max_iter, step=self.step)
        self.ledger_ = None
        if self.topology is None:
            if self.centers is not None:
                raise ValueError("centers requires a topology")
            trace = solve_fw(objective, domain, cfg)
        else:
            topo = parse_topology(self.topology)
            scheme, fraction = parse_partition(self.partition)
            parts = partition_atoms(objective.n, topo.n_nodes, scheme, self.random_state,
                                    fraction, hub_exclusion(topo), allow_empty=True)
            if self.centers is None:
                trace, self.ledger_ = solve_dfw(objective, domain, parts, topo, cfg)
            else:
                trace, self.ledger_, _ = solve_approx_dfw(objective, domain, parts, topo, cfg,
                                                          self.centers)
            self.owner_ = owner_map(parts, objective.n)
        self.trace_ = trace
        self.n_iter_ = len(trace) - 1
        self.converged_ = trace.converged
        return trace.alpha.to_dense()


class FrankWolfeLasso(RegressorMixin, _FrankWolfeBase):
    """Least squares constrained to an l1 ball, features as atoms.

    Parameters
    ----------
    beta : float
        Radius of the l1 ball.
    epsilon : float
        Stop once the duality gap is at most this value.
    max_iter : int
    step : {"linesearch", "harmonic"}
    topology : str, optional
        Network spec such as ``"star:4"``; features are spread over its nodes.
    partition : str
        Atom partition scheme for the distributed solver.
    centers : str, optional
        Center schedule (``"fixed:m"``, ...) for the approximate solver.
    random_state : int
    """

    def __init__(self, beta=1.0, epsilon=1e-4, max_iter=1000, step="linesearch",
                 topology=None, partition="uniform", centers=None, random_state=0):
        self.beta = beta
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.step = step
        self.topology = topology
        self.partition = partition
        self.centers = centers
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, accept_sparse="csc", y_numeric=True)
        self.n_features_in_ = X.shape[1]
        obj = Lasso(AtomMatrix(X), y.astype(float))
        self.coef_ = self._solve(obj, L1Ball(float(self.beta)))
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, accept_sparse="csr")
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.asarray(X @ self.coef_).ravel()


def _binary_labels(y):
    classes = unique_labels(y)
    if classes.size != 2:
        raise ValueError(f"binary classification only, got {classes.size} classes")
    return classes, np.where(y == classes[1], 1.0, -1.0)


class FrankWolfeSVC(ClassifierMixin, _FrankWolfeBase):
    """Kernel L2-SVM trained in the dual over the simplex, examples as atoms.

    The decision function is ``sum_i alpha_i y_i (k(x_i, x) + 1)``.  With
    ``bandwidth=None`` the RBF bandwidth is the mean pairwise distance.
    """

    def __init__(self, C=1.0, kernel="rbf", bandwidth=None, epsilon=1e-4, max_iter=1000,
                 step="linesearch", topology=None, partition="uniform", centers=None,
                 random_state=0):
        self.C = C
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.step = step
        self.topology = topology
        self.partition = partition
        self.centers = centers
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, signs = _binary_labels(y)
        self.n_features_in_ = X.shape[1]
        pts = X.T.astype(float)
        if self.kernel == "rbf":
            bw = self.bandwidth or mean_pairwise_distance(pts, seed=self.random_state)
            kern = KernelSpec("rbf", bw)
        else:
            kern = KernelSpec(self.kernel)
        self.kernel_ = kern
        alpha = self._solve(SvmDual(pts, signs, kern, self.C), Simplex())
        self.support_ = np.flatnonzero(alpha)
        self.support_vectors_ = X[self.support_]
        self.dual_coef_ = alpha[self.support_] * signs[self.support_]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "dual_coef_")
        X = check_array(X)
        K = self.kernel_(self.support_vectors_.T, X.T)
        return self.dual_coef_ @ (K + 1.0)

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]


class FrankWolfeAdaBoost(ClassifierMixin, _FrankWolfeBase):
    """Boosting over fixed weak learners with a smoothed exponential loss.

    ``fit`` takes ``H`` with ``H[i, j]`` the output of weak learner ``j`` on
    example ``i``; learners are the atoms.
    """

    def __init__(self, beta=1.0, temperature=1.0, epsilon=1e-4, max_iter=1000,
                 step="linesearch", topology=None, partition="uniform", centers=None,
                 random_state=0):
        self.beta = beta
        self.temperature = temperature
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.step = step
        self.topology = topology
        self.partition = partition
        self.centers = centers
        self.random_state = random_state

    def fit(self, H, y):
        H, y = check_X_y(H, y)
        self.classes_, signs = _binary_labels(y)
        self.n_features_in_ = H.shape[1]
        obj = Adaboost(AtomMatrix(H * signs[:, None]), self.temperature)
        self.coef_ = self._solve(obj, L1Ball(float(self.beta)))
        return self

    def decision_function(self, H):
        check_is_fitted(self, "coef_")
        return check_array(H) @ self.coef_

    def predict(self, H):
        return self.classes_[(self.decision_function(H) > 0).astype(int)]


class GreedyKCenter(TransformerMixin, BaseEstimator):
    """Farthest-first m-center clustering under the l1 distance.

    The first center is the first sample.  ``transform`` returns l1
    distances to the centers.
    """

    def __init__(self, n_centers=1):
        self.n_centers = n_centers

    def fit(self, X, y=None):
        X = check_array(X)
        if self.n_centers < 1:
            raise ValueError("n_centers must be positive")
        self.n_features_in_ = X.shape[1]
        cs = greedy_selection(L1Metric(X.T), None, self.n_centers)
        self.center_indices_ = np.asarray(cs.centers)
        self.cluster_centers_ = X[self.center_indices_]
        self.radius_ = cs.radius
        return self

    def transform(self, X):
        check_is_fitted(self, "cluster_centers_")
        return cdist(check_array(X), self.cluster_centers_, "cityblock")

    def predict(self, X):
        return np.argmin(self.transform(X), axis=1)

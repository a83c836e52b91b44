"""Atom storage, feasible iterates and the three objective families.

Every objective has the form ``f(alpha) = g(A alpha)`` where the columns of
``A`` are the atoms.  Each family offers two routes:

* from-scratch evaluation (:meth:`Objective.value`, :meth:`Objective.gradient`)
  which reads the whole atom matrix and serves as a test oracle, and
* an incremental replica (:meth:`Objective.make_state`) that only holds a
  subset of the atoms plus whatever atoms it has been sent.  Both the
  centralized solver and every simulated node run on replicas.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist, pdist
from scipy.special import logsumexp

from .exceptions import DimensionError

DENSE_THRESHOLD = 0.5


class AtomMatrix:
    """Column-major collection of ``n`` atoms in ``R^d``.

    Stored dense when more than half of the entries are nonzero, otherwise
    as a CSC matrix with sorted row indices.
    """

    def __init__(self, data):
        if sp.issparse(data):
            mat = sp.csc_matrix(data, dtype=float)
        else:
            mat = np.asarray(data, dtype=float)
            if mat.ndim == 1:
                mat = mat[:, None]
            if mat.ndim != 2:
                raise DimensionError("atom matrix must be two-dimensional")
        d, n = mat.shape
        if d < 1 or n < 1:
            raise DimensionError(f"need d >= 1 and n >= 1, got shape {mat.shape}")
        nnz = mat.nnz if sp.issparse(mat) else int(np.count_nonzero(mat))
        if nnz > DENSE_THRESHOLD * d * n:
            self._data = mat.toarray() if sp.issparse(mat) else mat
        else:
            mat = sp.csc_matrix(mat)
            mat.sum_duplicates()
            mat.sort_indices()
            self._data = mat

    @classmethod
    def from_columns(cls, columns: Sequence, d: int) -> "AtomMatrix":
        """Build from dense vectors or ``(indices, values)`` pairs."""
        rows, cols, vals = [], [], []
        for j, col in enumerate(columns):
            if isinstance(col, tuple):
                idx = np.asarray(col[0], dtype=int)
                val = np.asarray(col[1], dtype=float)
                if idx.shape != val.shape:
                    raise DimensionError(f"column {j}: index/value length mismatch")
                if idx.size and (idx[0] < 0 or idx[-1] >= d or np.any(np.diff(idx) <= 0)):
                    raise DimensionError(
                        f"column {j}: indices must be strictly increasing in [0, {d})"
                    )
            else:
                dense = np.asarray(col, dtype=float)
                if dense.shape != (d,):
                    raise DimensionError(f"column {j} has length {dense.size}, expected {d}")
                idx = np.flatnonzero(dense)
                val = dense[idx]
            rows.append(idx)
            vals.append(val)
            cols.append(np.full(idx.size, j))
        n = len(columns)
        mat = sp.csc_matrix(
            (np.concatenate(vals) if vals else [], (np.concatenate(rows) if rows else [],
                                                      np.concatenate(cols) if cols else [])),
            shape=(d, n),
        )
        return cls(mat)

    @property
    def shape(self):
        return self._data.shape

    @property
    def d(self) -> int:
        return self._data.shape[0]

    @property
    def n(self) -> int:
        return self._data.shape[1]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._data)

    @property
    def nnz(self) -> int:
        return self._data.nnz if self.is_sparse else int(np.count_nonzero(self._data))

    def column(self, j: int) -> np.ndarray:
        self._check_index(j)
        if self.is_sparse:
            out = np.zeros(self.d)
            lo, hi = self._data.indptr[j], self._data.indptr[j + 1]
            out[self._data.indices[lo:hi]] = self._data.data[lo:hi]
            return out
        return self._data[:, j].copy()

    def column_sparse(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        self._check_index(j)
        if self.is_sparse:
            lo, hi = self._data.indptr[j], self._data.indptr[j + 1]
            return self._data.indices[lo:hi].copy(), self._data.data[lo:hi].copy()
        col = self._data[:, j]
        idx = np.flatnonzero(col)
        return idx, col[idx]

    def subset(self, indices) -> "AtomMatrix":
        indices = np.asarray(indices, dtype=int)
        return AtomMatrix(self._data[:, indices])

    def matvec(self, alpha: np.ndarray) -> np.ndarray:
        """``A @ alpha``."""
        return np.asarray(self._data @ alpha).ravel()

    def rmatvec(self, r: np.ndarray) -> np.ndarray:
        """``A.T @ r``."""
        return np.asarray(self._data.T @ r).ravel()

    def toarray(self) -> np.ndarray:
        return self._data.toarray() if self.is_sparse else self._data.copy()

    def col_inf_norms(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(abs(self._data).max(axis=0).todense()).ravel()
        return np.abs(self._data).max(axis=0)

    def _check_index(self, j):
        if not 0 <= j < self.n:
            raise IndexError(f"atom index {j} out of range [0, {self.n})")

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"AtomMatrix(d={self.d}, n={self.n}, {kind})"


# ---------------------------------------------------------------- domains


@dataclass(frozen=True)
class L1Ball:
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"l1 radius must be positive, got {self.beta}")


@dataclass(frozen=True)
class Simplex:
    pass


Domain = Union[L1Ball, Simplex]


@dataclass
class Iterate:
    """Sparse weight vector; ``support`` never stores explicit zeros."""

    n: int
    domain: Domain
    support: dict = field(default_factory=dict)

    @classmethod
    def start(cls, n: int, domain: Domain) -> "Iterate":
        """Zero for the l1 ball, vertex ``e_0`` for the simplex."""
        if isinstance(domain, Simplex):
            return cls(n, domain, {0: 1.0})
        return cls(n, domain, {})

    @classmethod
    def from_dense(cls, alpha, domain: Domain) -> "Iterate":
        alpha = np.asarray(alpha, dtype=float)
        return cls(alpha.size, domain, {int(j): float(alpha[j]) for j in np.flatnonzero(alpha)})

    def copy(self) -> "Iterate":
        return Iterate(self.n, self.domain, dict(self.support))

    def items(self):
        """Support entries in ascending index order."""
        return sorted(self.support.items())

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.n)
        for j, v in self.support.items():
            out[j] = v
        return out

    def l1_norm(self) -> float:
        return float(sum(abs(v) for _, v in self.items()))

    def step(self, gamma: float, j: int, coef: float) -> None:
        """In place ``alpha <- (1 - gamma) alpha + gamma * coef * e_j``."""
        if gamma == 1.0:
            self.support = {j: coef} if coef != 0.0 else {}
            return
        if gamma != 0.0:
            scale = 1.0 - gamma
            self.support = {i: v * scale for i, v in self.support.items()}
            self.support[j] = self.support.get(j, 0.0) + gamma * coef
        self.support = {i: v for i, v in self.support.items() if v != 0.0}

    def is_feasible(self, tol: float = 1e-12) -> bool:
        if isinstance(self.domain, L1Ball):
            return self.l1_norm() <= self.domain.beta * (1 + tol)
        vals = [v for _, v in self.items()]
        return bool(vals) and min(vals) >= 0 and abs(sum(vals) - 1.0) <= tol

    def allclose(self, other: "Iterate", atol: float = 1e-9) -> bool:
        keys = set(self.support) | set(other.support)
        return all(abs(self.support.get(k, 0.0) - other.support.get(k, 0.0)) <= atol for k in keys)


def _as_dense(alpha, n: int) -> np.ndarray:
    if isinstance(alpha, Iterate):
        if alpha.n != n:
            raise DimensionError(f"iterate has length {alpha.n}, objective has {n} atoms")
        return alpha.to_dense()
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (n,):
        raise DimensionError(f"iterate has shape {alpha.shape}, expected ({n},)")
    return alpha


# ---------------------------------------------------------------- kernels


@dataclass(frozen=True)
class KernelSpec:
    """Base kernel; ``kind`` is ``"linear"`` or ``"rbf"``."""

    kind: str = "rbf"
    bandwidth: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind == "rbf" and not self.bandwidth > 0:
            raise ValueError("rbf bandwidth must be positive")

    def __call__(self, Xa: np.ndarray, Xb: np.ndarray) -> np.ndarray:
        """Kernel matrix between the columns of ``Xa`` and ``Xb``."""
        if self.kind == "linear":
            return Xa.T @ Xb
        sq = cdist(Xa.T, Xb.T, "sqeuclidean")
        return np.exp(-sq / (2.0 * self.bandwidth**2))

    def diag(self, X: np.ndarray) -> np.ndarray:
        if self.kind == "linear":
            return np.einsum("ij,ij->j", X, X)
        return np.ones(X.shape[1])


def mean_pairwise_distance(X: np.ndarray, max_samples: int = 1000, seed: int = 0) -> float:
    """Average Euclidean distance between columns of ``X`` (subsampled)."""
    n = X.shape[1]
    if n < 2:
        return 1.0
    if n > max_samples:
        idx = np.random.default_rng(seed).choice(n, size=max_samples, replace=False)
        X = X[:, np.sort(idx)]
    dist = float(np.mean(pdist(X.T)))
    return dist if dist > 0 else 1.0


def augmented_kernel(kernel: KernelSpec, C: float, Xa, ya, ia, Xb, yb, ib) -> np.ndarray:
    """``y_i y_j (k(x_i, x_j) + 1) + [i == j] / C`` between two point sets."""
    K = np.outer(ya, yb) * (kernel(Xa, Xb) + 1.0)
    K += (np.asarray(ia)[:, None] == np.asarray(ib)[None, :]) / C
    return K


# ---------------------------------------------------------------- objectives


class Objective(ABC):
    """``f(alpha) = g(A alpha)`` over the atoms in :attr:`atoms`."""

    quadratic = False

    def __init__(self, atoms):
        self.atoms = atoms if isinstance(atoms, AtomMatrix) else AtomMatrix(atoms)

    @property
    def n(self) -> int:
        return self.atoms.n

    @property
    def d(self) -> int:
        return self.atoms.d

    @abstractmethod
    def value(self, alpha) -> float:
        """Objective value, evaluated from scratch."""

    @abstractmethod
    def gradient(self, alpha) -> np.ndarray:
        """Full gradient, evaluated from scratch."""

    def gradient_entry(self, alpha, j: int) -> float:
        if not 0 <= j < self.n:
            raise IndexError(f"atom index {j} out of range [0, {self.n})")
        return float(self.gradient(alpha)[j])

    @abstractmethod
    def make_state(self, owned, alpha: Iterate) -> "ObjectiveState":
        """Replica holding only the atoms in ``owned``."""

    @abstractmethod
    def restrict(self, indices) -> "Objective":
        """Same objective over a subset of the atoms (reindexed from 0)."""

    @property
    def payload_size(self) -> int:
        """Reals needed to ship one atom to another node."""
        return self.d

    def payload(self, j: int) -> np.ndarray:
        return self.atoms.column(j)


class Lasso(Objective):
    """``||y - A alpha||_2^2``."""

    quadratic = True

    def __init__(self, atoms, y):
        super().__init__(atoms)
        self.y = np.asarray(y, dtype=float).ravel()
        if self.y.shape != (self.d,):
            raise DimensionError(f"target has length {self.y.size}, atoms have d={self.d}")

    def value(self, alpha) -> float:
        r = self.y - self.atoms.matvec(_as_dense(alpha, self.n))
        return float(r @ r)

    def gradient(self, alpha) -> np.ndarray:
        z = self.atoms.matvec(_as_dense(alpha, self.n))
        return 2.0 * self.atoms.rmatvec(z - self.y)

    def make_state(self, owned, alpha):
        return LassoState(self, owned, alpha)

    def restrict(self, indices):
        return Lasso(self.atoms.subset(indices), self.y)


def _boost_value(z, T):
    return float(logsumexp(-z / T) - np.log(z.size))


def _boost_weights(z, T):
    s = -z / T
    w = np.exp(s - s.max())
    return w / w.sum()


class Adaboost(Objective):
    """``log((1/d) sum_i exp(-(A alpha)_i / T))``; rows of ``A`` are ``y_i h_j(x_i)``."""

    def __init__(self, atoms, temperature: float = 1.0):
        super().__init__(atoms)
        if not temperature > 0:
            raise ValueError("temperature must be positive")
        self.temperature = float(temperature)

    def _g(self, z):
        return _boost_value(z, self.temperature)

    def weights_of(self, z: np.ndarray) -> np.ndarray:
        return _boost_weights(z, self.temperature)

    def value(self, alpha) -> float:
        return self._g(self.atoms.matvec(_as_dense(alpha, self.n)))

    def gradient(self, alpha) -> np.ndarray:
        w = self.weights_of(self.atoms.matvec(_as_dense(alpha, self.n)))
        return -self.atoms.rmatvec(w) / self.temperature

    def make_state(self, owned, alpha):
        return AdaboostState(self, owned, alpha)

    def restrict(self, indices):
        return Adaboost(self.atoms.subset(indices), self.temperature)


class SvmDual(Objective):
    """L2-SVM dual ``alpha^T K~ alpha`` with the augmented kernel.

    Atoms are training points (columns of ``X``); ``k~`` is evaluated on
    demand.  Replicas keep an LRU cache of kernel rows.
    """

    quadratic = True

    def __init__(self, X, labels, kernel: KernelSpec | None = None, C: float = 1.0,
                 cache_rows: int = 256):
        atoms = X if isinstance(X, AtomMatrix) else AtomMatrix(X)
        super().__init__(atoms)
        self.X = self.atoms.toarray()
        self.labels = np.asarray(labels, dtype=float).ravel()
        if self.labels.shape != (self.n,):
            raise DimensionError(f"{self.labels.size} labels for {self.n} points")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")
        if not C > 0:
            raise ValueError("C must be positive")
        if kernel is None:
            kernel = KernelSpec("rbf", mean_pairwise_distance(self.X))
        self.kernel = kernel
        self.C = float(C)
        self.cache_rows = cache_rows

    def kernel_matrix(self, rows=None, cols=None) -> np.ndarray:
        rows = np.arange(self.n) if rows is None else np.asarray(rows)
        cols = np.arange(self.n) if cols is None else np.asarray(cols)
        return augmented_kernel(self.kernel, self.C, self.X[:, rows], self.labels[rows], rows,
                                self.X[:, cols], self.labels[cols], cols)

    def value(self, alpha) -> float:
        a = _as_dense(alpha, self.n)
        idx = np.flatnonzero(a)
        if idx.size == 0:
            return 0.0
        K = self.kernel_matrix(idx, idx)
        return float(a[idx] @ K @ a[idx])

    def gradient(self, alpha) -> np.ndarray:
        a = _as_dense(alpha, self.n)
        idx = np.flatnonzero(a)
        if idx.size == 0:
            return np.zeros(self.n)
        return 2.0 * self.kernel_matrix(None, idx) @ a[idx]

    @property
    def payload_size(self) -> int:
        return self.d + 1

    def payload(self, j: int) -> np.ndarray:
        return np.append(self.X[:, j], self.labels[j])

    def make_state(self, owned, alpha):
        return SvmState(self, owned, alpha)

    def restrict(self, indices):
        indices = np.asarray(indices)
        return SvmDual(self.X[:, indices], self.labels[indices], self.kernel, self.C,
                       self.cache_rows)


# ---------------------------------------------------------------- replicas


class ObjectiveState(ABC):
    """A node-local replica: own atoms, received atoms, iterate and caches.

    It holds a copy of the owned columns only, so gradient entries can be
    produced for owned atoms and nothing else.
    """

    def __init__(self, objective: Objective, owned, alpha: Iterate):
        self.owned = np.array(sorted(int(j) for j in owned), dtype=int)
        self._pos = {int(j): p for p, j in enumerate(self.owned)}
        self.alpha = alpha.copy()
        self.n = objective.n
        self.quadratic = objective.quadratic
        self.payload_size = objective.payload_size
        self._received: dict[int, np.ndarray] = {}

    def owns(self, j: int) -> bool:
        return j in self._pos

    def receive(self, j: int, payload: np.ndarray) -> None:
        if not self.owns(j):
            self._received[j] = np.asarray(payload, dtype=float)

    def known_payload(self, j: int) -> np.ndarray:
        if self.owns(j):
            return self.payload(j)
        try:
            return self._received[j]
        except KeyError:
            raise KeyError(f"atom {j} is neither local nor received") from None

    def partial_sum(self, grad: np.ndarray) -> float:
        """``sum_{j owned} alpha_j grad_j`` in ascending index order."""
        total = 0.0
        for j, v in self.alpha.items():
            p = self._pos.get(j)
            if p is not None:
                total += v * grad[p]
        return total

    @abstractmethod
    def payload(self, j: int) -> np.ndarray:
        """Data another node needs to use owned atom ``j``."""

    @abstractmethod
    def grad(self) -> np.ndarray:
        """Gradient entries for the owned atoms, aligned with :attr:`owned`."""

    @property
    @abstractmethod
    def value(self) -> float:
        ...

    @abstractmethod
    def inner_alpha_grad(self) -> float:
        """``<alpha, grad f(alpha)>`` from the cached composite alone."""

    @abstractmethod
    def value_along(self, gamma: float, j: int, coef: float) -> float:
        """``f((1 - gamma) alpha + gamma coef e_j)`` without mutating."""

    def curvature(self, j: int, coef: float) -> float:
        """Half the second derivative along ``s - alpha`` (quadratics only)."""
        raise NotImplementedError

    @abstractmethod
    def step(self, gamma: float, j: int, coef: float) -> None:
        """Apply the update to the iterate and every cache."""


class _CompositeState(ObjectiveState):
    """Replica caching ``z = A alpha``; used for Lasso and Adaboost."""

    def __init__(self, objective, owned, alpha):
        super().__init__(objective, owned, alpha)
        self.local = objective.atoms.subset(self.owned) if self.owned.size else None
        self.d = objective.d
        self.z = np.zeros(self.d)
        for j, v in alpha.items():
            self.z += v * self._atom(j, objective)

    def _atom(self, j, objective=None):
        if self.owns(j):
            return self.local.column(self._pos[j])
        if j in self._received:
            return self._received[j]
        if objective is not None:
            # initial support atoms are installed at setup
            col = objective.payload(j)
            self._received[j] = col
            return col
        raise KeyError(f"atom {j} is neither local nor received")

    def payload(self, j):
        return self.local.column(self._pos[j])

    def _moved(self, gamma, j, coef):
        return (1.0 - gamma) * self.z + (gamma * coef) * self._atom(j)

    def step(self, gamma, j, coef):
        self.z = self._moved(gamma, j, coef)
        self.alpha.step(gamma, j, coef)

    def _local_rmatvec(self, r):
        if self.local is None:
            return np.zeros(0)
        return self.local.rmatvec(r)


class LassoState(_CompositeState):
    def __init__(self, objective: Lasso, owned, alpha):
        super().__init__(objective, owned, alpha)
        self.y = objective.y

    def grad(self):
        return 2.0 * self._local_rmatvec(self.z - self.y)

    @property
    def value(self):
        r = self.y - self.z
        return float(r @ r)

    def inner_alpha_grad(self):
        return float(2.0 * self.z @ (self.z - self.y))

    def value_along(self, gamma, j, coef):
        r = self.y - self._moved(gamma, j, coef)
        return float(r @ r)

    def curvature(self, j, coef):
        diff = self.z - coef * self._atom(j)
        return float(diff @ diff)


class AdaboostState(_CompositeState):
    def __init__(self, objective: Adaboost, owned, alpha):
        super().__init__(objective, owned, alpha)
        self.temperature = objective.temperature

    def grad(self):
        w = _boost_weights(self.z, self.temperature)
        return -self._local_rmatvec(w) / self.temperature

    @property
    def value(self):
        return _boost_value(self.z, self.temperature)

    def inner_alpha_grad(self):
        w = _boost_weights(self.z, self.temperature)
        return float(-(w @ self.z) / self.temperature)

    def value_along(self, gamma, j, coef):
        return _boost_value(self._moved(gamma, j, coef), self.temperature)


class SvmState(ObjectiveState):
    """Replica caching ``u = (K~ alpha)`` on owned points and ``f`` itself.

    Updates need one kernel row between the owned points and the incoming
    point, so an iteration costs ``O(n_i)`` kernel evaluations.
    """

    def __init__(self, objective: SvmDual, owned, alpha):
        super().__init__(objective, owned, alpha)
        self.kernel = objective.kernel
        self.C = objective.C
        self.Xo = objective.X[:, self.owned]
        self.yo = objective.labels[self.owned]
        self._row = lru_cache(maxsize=objective.cache_rows)(self._kernel_row)
        self.u = np.zeros(self.owned.size)
        self._f = 0.0
        # initial support points are installed at setup
        for j, v in alpha.items():
            if not self.owns(j):
                self._received[j] = objective.payload(j)
            self.u = self.u + v * self._row(j)
        self._f = float(sum(v * self._k_alpha(j) for j, v in alpha.items()))

    def _point(self, j):
        if self.owns(j):
            p = self._pos[j]
            return self.Xo[:, p], self.yo[p]
        pl = self._received[j]
        return pl[:-1], pl[-1]

    def _kernel_row(self, j):
        x, y = self._point(j)
        return augmented_kernel(self.kernel, self.C, self.Xo, self.yo, self.owned,
                                x[:, None], np.array([y]), np.array([j]))[:, 0]

    def _k_alpha(self, j):
        """``(K~ alpha)_j`` from the support points."""
        x, y = self._point(j)
        items = self.alpha.items()
        if not items:
            return 0.0
        idx = np.array([i for i, _ in items])
        w = np.array([v for _, v in items])
        pts = [self._point(i) for i in idx]
        Xs = np.column_stack([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        row = augmented_kernel(self.kernel, self.C, Xs, ys, idx, x[:, None], np.array([y]),
                               np.array([j]))[:, 0]
        return float(w @ row)

    def _k_jj(self, j):
        x, _ = self._point(j)
        return float(self.kernel.diag(x[:, None])[0] + 1.0 + 1.0 / self.C)

    def payload(self, j):
        x, y = self._point(j)
        return np.append(x, y)

    def grad(self):
        return 2.0 * self.u

    @property
    def value(self):
        return self._f

    def inner_alpha_grad(self):
        return 2.0 * self._f

    def value_along(self, gamma, j, coef):
        ka = self._k_alpha(j)
        return ((1 - gamma) ** 2 * self._f + 2 * gamma * (1 - gamma) * coef * ka
                + (gamma * coef) ** 2 * self._k_jj(j))

    def curvature(self, j, coef):
        return max(0.0, self._f - 2.0 * coef * self._k_alpha(j) + coef**2 * self._k_jj(j))

    def step(self, gamma, j, coef):
        self._f = self.value_along(gamma, j, coef)
        if self.owned.size:
            self.u = (1.0 - gamma) * self.u + (gamma * coef) * self._row(j)
        self.alpha.step(gamma, j, coef)


# ---------------------------------------------------------------- helpers


def adaboost_weights(objective: Adaboost, alpha) -> np.ndarray:
    """Distribution over training points favouring the misclassified ones."""
    if not isinstance(objective, Adaboost):
        raise TypeError("adaboost_weights needs an Adaboost objective")
    return objective.weights_of(objective.atoms.matvec(_as_dense(alpha, objective.n)))


def objective_value(objective: Objective, alpha: Iterate) -> float:
    if isinstance(alpha, Iterate) and not alpha.is_feasible():
        raise ValueError("iterate is not feasible for its domain")
    return objective.value(alpha)


def gradient_entry(objective: Objective, alpha, j: int) -> float:
    return objective.gradient_entry(alpha, j)


def lambda_max(atoms: AtomMatrix, y, convention: str = "AT_y") -> float:
    """Smallest l1 penalty for which the LASSO solution is zero.

    ``"AT_y"`` computes ``||A^T y||_inf`` (the usual quantity);
    ``"A_y"`` computes ``||A y||_inf`` literally, defined only for square A.
    """
    y = np.asarray(y, dtype=float)
    if convention == "AT_y":
        return float(np.max(np.abs(atoms.rmatvec(y))))
    if convention == "A_y":
        if atoms.d != atoms.n:
            raise DimensionError("||A y||_inf needs a square atom matrix")
        return float(np.max(np.abs(atoms.matvec(y))))
    raise ValueError(f"unknown lambda_max convention {convention!r}")


def simplex_quadratic(d: int) -> Lasso:
    """``||alpha||^2`` on the simplex, written as Lasso with ``A = I``, ``y = 0``."""
    return Lasso(np.eye(d), np.zeros(d))


def check_partition(parts: Iterable, n: int) -> None:
    seen = np.zeros(n, dtype=int)
    for p in parts:
        np.add.at(seen, np.asarray(p, dtype=int), 1)
    if not np.all(seen == 1):
        raise ValueError("atom sets must partition range(n)")

"""Dataset ingestion (LIBSVM text format) and the synthetic LASSO generator."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ..objectives import AtomMatrix, L1Ball, lambda_max


class DataFormatError(ValueError):
    """Malformed dataset file."""


def load_libsvm(path, transpose: bool = False, n_features: int | None = None):
    """Read ``label idx:val ...`` lines with 1-based, increasing indices.

    Each line becomes one atom column unless ``transpose`` is set, in which
    case features become atoms (distributed-feature LASSO).  Returns
    ``(AtomMatrix, labels)``.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    labels, rows, cols, vals = [], [], [], []
    n_lines = 0
    max_idx = 0
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                labels.append(float(fields[0]))
            except ValueError:
                raise DataFormatError(f"line {lineno}: bad label {fields[0]!r}") from None
            prev = 0
            for tok in fields[1:]:
                idx_s, sep, val_s = tok.partition(":")
                if not sep:
                    raise DataFormatError(f"line {lineno}: expected idx:val, got {tok!r}")
                try:
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise DataFormatError(f"line {lineno}: non-numeric field {tok!r}") from None
                if idx <= prev:
                    raise DataFormatError(f"line {lineno}: indices must be increasing and >= 1")
                prev = idx
                if val != 0.0:
                    rows.append(idx - 1)
                    cols.append(n_lines)
                    vals.append(val)
            max_idx = max(max_idx, prev)
            n_lines += 1
    if n_lines == 0:
        raise DataFormatError(f"{path}: no examples")
    d = max_idx if n_features is None else n_features
    if d < max_idx:
        raise DataFormatError(f"feature index {max_idx} exceeds n_features={d}")
    d = max(d, 1)
    mat = sp.csc_matrix((vals, (rows, cols)), shape=(d, n_lines))
    if transpose:
        mat = sp.csc_matrix(mat.T)
    return AtomMatrix(mat), np.asarray(labels)


def write_libsvm(path, atoms: AtomMatrix, labels, transpose: bool = False) -> None:
    """Inverse of :func:`load_libsvm` (same ``transpose`` convention)."""
    mat = sp.csc_matrix(atoms.toarray())
    if transpose:
        mat = sp.csc_matrix(mat.T)
    labels = np.asarray(labels, dtype=float)
    if labels.size != mat.shape[1]:
        raise ValueError("one label per line is required")
    with Path(path).open("w") as fh:
        for j in range(mat.shape[1]):
            lo, hi = mat.indptr[j], mat.indptr[j + 1]
            order = np.argsort(mat.indices[lo:hi])
            feats = " ".join(f"{i + 1}:{float(v)!r}" for i, v in
                             zip(mat.indices[lo:hi][order], mat.data[lo:hi][order]))
            fh.write(f"{float(labels[j])!r} {feats}".rstrip() + "\n")


@dataclass(frozen=True)
class SynthLassoParams:
    d: int
    n: int
    density_atoms: float = 0.1
    density_alpha: float = 0.01
    noise_var: float = 1e-3
    seed: int = 0
    lambda_convention: str = "AT_y"

    def __post_init__(self):
        for name in ("density_atoms", "density_alpha"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        if self.d < 1 or self.n < 1:
            raise ValueError("d and n must be positive")
        if self.noise_var < 0:
            raise ValueError("noise variance must be nonnegative")


@dataclass
class SynthLasso:
    atoms: AtomMatrix
    y: np.ndarray
    alpha_true: np.ndarray
    lambda_max: float
    beta: float


def density_count(s: float, total: int) -> int:
    return max(1, int(round(s * total)))


def synth_lasso(params: SynthLassoParams) -> SynthLasso:
    """Sparse Gaussian design, sparse Gaussian truth, ``y = A alpha + noise``.

    The suggested radius is the l1 norm of the penalized solution at
    ``lambda = 0.1 * lambda_max``.
    """
    rng = np.random.default_rng(params.seed)
    d, n = params.d, params.n
    nnz = density_count(params.density_atoms, d * n)
    flat = rng.choice(d * n, size=nnz, replace=False)
    rows, cols = np.unravel_index(flat, (d, n))
    A = sp.csc_matrix((rng.standard_normal(nnz), (rows, cols)), shape=(d, n))
    atoms = AtomMatrix(A)
    k = density_count(params.density_alpha, n)
    alpha = np.zeros(n)
    alpha[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k)
    y = atoms.matvec(alpha) + rng.normal(0.0, math.sqrt(params.noise_var), size=d)
    lmax = lambda_max(atoms, y, params.lambda_convention)
    sol = lasso_penalized(atoms, y, 0.1 * lmax)
    beta = float(np.abs(sol).sum())
    if beta == 0.0:
        beta = float(np.abs(alpha).sum())
    return SynthLasso(atoms, y, alpha, lmax, beta)


def lasso_penalized(atoms: AtomMatrix, y, lam: float, max_iter: int = 5000,
                    tol: float = 1e-10) -> np.ndarray:
    """FISTA for ``0.5 ||y - A a||^2 + lam ||a||_1``."""
    y = np.asarray(y, dtype=float)
    # Lipschitz constant of the smooth part = largest singular value squared
    v = np.random.default_rng(0).standard_normal(atoms.n)
    for _ in range(100):
        v = atoms.rmatvec(atoms.matvec(v))
        nv = np.linalg.norm(v)
        if nv == 0:
            break
        v /= nv
    L = max(float(np.linalg.norm(atoms.matvec(v)) ** 2), 1e-12) * 1.01
    x = np.zeros(atoms.n)
    z = x.copy()
    t = 1.0
    for _ in range(max_iter):
        grad = atoms.rmatvec(atoms.matvec(z) - y)
        u = z - grad / L
        x_new = np.sign(u) * np.maximum(np.abs(u) - lam / L, 0.0)
        t_new = (1 + math.sqrt(1 + 4 * t * t)) / 2
        z = x_new + ((t - 1) / t_new) * (x_new - x)
        if np.linalg.norm(x_new - x) <= tol * max(1.0, np.linalg.norm(x)):
            x = x_new
            break
        x, t = x_new, t_new
    return x


def project_l1_ball(v, beta: float) -> np.ndarray:
    """Euclidean projection onto ``{x : ||x||_1 <= beta}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= beta:
        return v.copy()
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, u.size + 1)
    rho = np.nonzero(u * ks > css - beta)[0][-1]
    theta = (css[rho] - beta) / (rho + 1.0)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def l1_domain(beta: float) -> L1Ball:
    return L1Ball(beta)

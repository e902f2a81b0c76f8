#!/usr/bin/env python3
"""
Spectral Relaxation Module

Solves the relaxed signed normalized cut: the K smallest eigenpairs of the
normalized signed Laplacian L̄_sym give an orthonormal Y, and the relaxed
cluster indicators are Z = D̄^{-1/2} Y.

Small problems use a dense symmetric solver; larger ones run Lanczos
(ARPACK) on the shifted operator 2I − L̄_sym, whose largest eigenvalues are
the smallest of L̄_sym since its spectrum lies in [0, 2].
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import BadK, ConfigError, ConvergenceError
from .sgraph import SignedGraph, normalized_signed_laplacian, signed_degree

logger = logging.getLogger(__name__)

# above this size the sparse Lanczos path is used
DENSE_LIMIT = 2048

Matrix = Union[np.ndarray, sparse.spmatrix]


@dataclass(frozen=True, eq=False)
class RelaxedSolution:
    """Continuous relaxation output"""
    Z: np.ndarray
    Y: np.ndarray
    eigenvalues: np.ndarray

    @property
    def K(self) -> int:
        return self.Z.shape[1]

    def lower_bound(self) -> float:
        """Σ ν_j, a lower bound on the sNcut of any K-partition"""
        return float(np.sum(self.eigenvalues))


def _one_norm(L: Matrix) -> float:
    if sparse.issparse(L):
        return float(abs(L).sum(axis=0).max()) if L.nnz else 0.0
    return float(np.abs(L).sum(axis=0).max()) if L.size else 0.0


def _canonical_signs(Y: np.ndarray) -> np.ndarray:
    """Flip columns so each column's largest-magnitude entry is positive"""
    pivot = np.argmax(np.abs(Y), axis=0)
    signs = np.sign(Y[pivot, np.arange(Y.shape[1])])
    signs[signs == 0] = 1.0
    return Y * signs


def smallest_eigenpairs(L_sym: Matrix, K: int, tol: float = 1e-8,
                        seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    K smallest eigenpairs of a symmetric PSD matrix with spectrum in [0, 2]

    Args:
        L_sym: Symmetric matrix, dense or sparse
        K: Number of eigenpairs, 1 <= K <= n
        tol: Relative residual tolerance
        seed: Seed of the Lanczos start vector

    Returns:
        Tuple of (ascending eigenvalues, n×K orthonormal eigenvectors)
    """
    n = L_sym.shape[0]
    if not 1 <= K <= n:
        raise BadK(f"K must lie in [1, {n}], got {K}")
    if not tol > 0:
        raise ConfigError(f"tol must be > 0, got {tol}")

    if n <= DENSE_LIMIT or K >= n - 1:
        dense = L_sym.toarray() if sparse.issparse(L_sym) else np.asarray(L_sym, dtype=np.float64)
        values, vectors = scipy.linalg.eigh(dense, subset_by_index=[0, K - 1])
    else:
        shifted = (2.0 * sparse.identity(n, format='csr') - sparse.csr_matrix(L_sym)).tocsr()
        v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, size=n)
        ncv = min(n - 1, max(2 * K + 1, 20))
        logger.debug(f"🔍 Lanczos for {K} eigenpairs of an {n}×{n} operator (ncv={ncv})")
        try:
            mu, vectors = eigsh(shifted, k=K, which='LA', v0=v0, ncv=ncv,
                                maxiter=10 * n, tol=tol / 4)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(
                f"Lanczos did not converge for K={K}",
                {'converged': len(exc.eigenvalues), 'n': n},
            ) from None
        values = 2.0 - mu

    order = np.argsort(values, kind='stable')
    values = np.asarray(values[order], dtype=np.float64)
    vectors = _canonical_signs(np.asarray(vectors[:, order], dtype=np.float64))

    scale = max(_one_norm(L_sym), np.finfo(float).tiny)
    residuals = np.linalg.norm(L_sym @ vectors - vectors * values, axis=0)
    if np.any(residuals > tol * scale):
        worst = int(np.argmax(residuals))
        raise ConvergenceError(
            "Eigenpair residual above tolerance",
            {'index': worst, 'residual': float(residuals[worst]), 'limit': tol * scale},
        )
    return values, vectors


def relaxed_solution(g: SignedGraph, K: int, tol: float = 1e-8, seed: int = 0) -> RelaxedSolution:
    """
    Relaxed indicators Z = D̄^{-1/2} Y from the K smallest eigenvectors of L̄_sym

    Raises:
        IsolatedVertexError: some node has zero signed degree
        ConvergenceError: the eigensolver failed
    """
    L_sym = normalized_signed_laplacian(g)
    values, Y = smallest_eigenpairs(L_sym, K, tol=tol, seed=seed)
    Z = Y / np.sqrt(signed_degree(g))[:, None]
    logger.info(f"📈 Relaxed solution: n={g.n}, K={K}, Σν={values.sum():.6g}")
    return RelaxedSolution(Z=Z, Y=Y, eigenvalues=values)


def spectrum(g: SignedGraph, count: int = 0, tol: float = 1e-8, seed: int = 0) -> np.ndarray:
    """Smallest `count` eigenvalues of L̄_sym; all of them when count is 0"""
    L_sym = normalized_signed_laplacian(g)
    values, _ = smallest_eigenpairs(L_sym, count or g.n, tol=tol, seed=seed)
    return values

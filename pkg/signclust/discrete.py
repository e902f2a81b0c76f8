#!/usr/bin/env python3
"""
Discretization Module

Rounds the relaxed solution Z to a discrete cluster indicator X by
minimizing φ = ‖X − Z·R·Λ‖_F, alternating three steps:

- X step: each row goes to the column of its largest entry in ZRΛ, cluster
  amplitudes a_j = c/√|A_j| with ‖X‖_F = ‖Z‖_F
- R step: orthogonal Procrustes, R = UVᵀ from the SVD of ZᵀX
- Λ step: per-column least squares for the diagonal scaling

Sweeps stop when φ stops decreasing by more than tol. The full clustering
entry point runs several seeded restarts and keeps the lowest sNcut.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.stats import ortho_group

from .errors import (
    BadK,
    ConfigError,
    ConvergenceError,
    DegenerateRows,
    RankDeficient,
    SignedClusteringError,
)
from .metrics import MetricsReport, report
from .sgraph import Partition, SignedGraph, sncut
from .spectral import RelaxedSolution, relaxed_solution

logger = logging.getLogger(__name__)

# slack on the sweep-to-sweep decrease of φ
PHI_SLACK = 1e-12
LAMBDA_FLOOR = 1e-12
JITTER = 1e-10


@dataclass
class ClusterOptions:
    """Discretization and restart settings"""
    restarts: int = 8
    max_iter: int = 100
    tol: float = 1e-7
    eig_tol: float = 1e-8

    def validate(self) -> "ClusterOptions":
        if self.restarts < 1:
            raise ConfigError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol >= 0:
            raise ConfigError(f"tol must be >= 0, got {self.tol}")
        if not self.eig_tol > 0:
            raise ConfigError(f"eig_tol must be > 0, got {self.eig_tol}")
        return self


@dataclass(frozen=True, eq=False)
class DiscreteState:
    """One point of the alternation"""
    X: np.ndarray
    R: np.ndarray
    Lambda: np.ndarray
    phi: float
    labels: np.ndarray
    history: Tuple[float, ...] = ()
    iterations: int = 0
    converged: bool = False


def _diag(Lambda: np.ndarray) -> np.ndarray:
    Lambda = np.asarray(Lambda, dtype=np.float64)
    return np.diag(Lambda) if Lambda.ndim == 2 else Lambda


def _amplitude_indicator(labels: np.ndarray, K: int, z_norm: float) -> np.ndarray:
    """X with a_j = c/√|A_j| on cluster j, c = ‖Z‖_F/√(#nonempty clusters)"""
    sizes = np.bincount(labels, minlength=K)
    nonempty = int(np.count_nonzero(sizes))
    c = z_norm / np.sqrt(nonempty) if nonempty else 0.0
    amplitudes = np.zeros(K)
    amplitudes[sizes > 0] = c / np.sqrt(sizes[sizes > 0])
    X = np.zeros((labels.size, K))
    X[np.arange(labels.size), labels] = amplitudes[labels]
    return X


def phi(Z: np.ndarray, R: np.ndarray, Lambda: np.ndarray, X: np.ndarray) -> float:
    """‖X − ZRΛ‖_F"""
    return float(np.linalg.norm(X - (Z @ R) * _diag(Lambda)))


def init_rotation(Z: np.ndarray, seed: int = 0) -> np.ndarray:
    """
    Initial rotation from K mutually far-apart normalized rows of Z.

    The first row is drawn at random; each following row minimizes the
    accumulated absolute cosine to the rows already chosen. The chosen rows
    are orthogonalized by QR with a positive diagonal.

    Raises:
        DegenerateRows: every normalized row is the same
    """
    Z = np.asarray(Z, dtype=np.float64)
    n, K = Z.shape
    if K == 1:
        return np.ones((1, 1))

    norms = np.linalg.norm(Z, axis=1)
    V = np.divide(Z, norms[:, None], out=np.zeros_like(Z), where=norms[:, None] > 0)
    if n < 2 or np.ptp(V, axis=0).max() <= 1e-12:
        raise DegenerateRows("All rows of the relaxed solution point the same way", {'n': n, 'K': K})

    rng = np.random.default_rng(seed)
    chosen = np.zeros((K, K))
    chosen[:, 0] = V[rng.integers(n)]
    c = np.zeros(n)
    for j in range(1, K):
        c += np.abs(V @ chosen[:, j - 1])
        chosen[:, j] = V[np.argmin(c)]

    Q, upper = scipy.linalg.qr(chosen)
    signs = np.sign(np.diag(upper))
    signs[signs == 0] = 1.0
    return Q * signs


def restart_rotation(Z: np.ndarray, seed: int, restart: int) -> np.ndarray:
    """
    Starting rotation of one restart

    Restart 0 starts from init_rotation(Z, seed). Later restarts draw a
    Haar-random orthogonal matrix seeded with seed + restart, so their
    first assignments cover other directions of the embedding.
    """
    K = np.asarray(Z).shape[1]
    if restart == 0 or K == 1:
        return init_rotation(Z, seed)
    return np.asarray(ortho_group.rvs(K, random_state=seed + restart), dtype=np.float64)


def assign_X(Z: np.ndarray, R: np.ndarray, Lambda: np.ndarray) -> np.ndarray:
    """Row-argmax assignment of ZRΛ (lowest column wins ties) with the amplitude rule"""
    Z = np.asarray(Z, dtype=np.float64)
    labels = np.argmax((Z @ R) * _diag(Lambda), axis=1)
    return _amplitude_indicator(labels, Z.shape[1], float(np.linalg.norm(Z)))


def _rotation(M: np.ndarray) -> np.ndarray:
    U, s, Vt = scipy.linalg.svd(M)
    if s.size == 0 or s.min() <= np.finfo(float).eps * max(M.shape) * s.max():
        raise RankDeficient("Procrustes cross-product is rank deficient",
                            {'singular_values': s.tolist()})
    return U @ Vt


def procrustes_R(Z: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Orthogonal R maximizing tr(RᵀZᵀX): R = UVᵀ for ZᵀX = UΣVᵀ"""
    Z = np.asarray(Z, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if Z.shape != X.shape:
        raise ConfigError(f"Z and X shapes differ: {Z.shape} vs {X.shape}")
    return _rotation(Z.T @ X)


def fit_Lambda(Z: np.ndarray, R: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Diagonal Λ with λ_j = ⟨X^j, (ZR)^j⟩ / ‖(ZR)^j‖²; zeros become ±1e-12"""
    ZR = np.asarray(Z, dtype=np.float64) @ R
    numer = np.sum(np.asarray(X) * ZR, axis=0)
    denom = np.sum(ZR * ZR, axis=0)
    lam = np.divide(numer, denom, out=np.zeros_like(numer), where=denom > 0)
    lam = np.where(lam == 0, np.copysign(LAMBDA_FLOOR, lam), lam)
    return np.diag(lam)


def _repair_empty(labels: np.ndarray, S: np.ndarray, K: int, z_norm: float) -> np.ndarray:
    """Move worst-reconstructed rows of multi-member clusters into empty clusters"""
    labels = labels.copy()
    for _ in range(K):
        sizes = np.bincount(labels, minlength=K)
        empty = np.flatnonzero(sizes == 0)
        if not empty.size:
            return labels
        residual = np.linalg.norm(_amplitude_indicator(labels, K, z_norm) - S, axis=1)
        residual[sizes[labels] <= 1] = -np.inf
        if np.isneginf(residual).all():
            break
        labels[int(np.argmax(residual))] = empty[0]
    if np.any(np.bincount(labels, minlength=K) == 0):
        raise ConvergenceError("Empty-cluster repair failed", {'K': K, 'n': labels.size})
    return labels


def _assign(Z: np.ndarray, R: np.ndarray, Lambda: np.ndarray, z_norm: float) -> Tuple[np.ndarray, np.ndarray]:
    S = (Z @ R) * _diag(Lambda)
    labels = _repair_empty(np.argmax(S, axis=1), S, Z.shape[1], z_norm)
    return labels, _amplitude_indicator(labels, Z.shape[1], z_norm)


def _robust_rotation(Z: np.ndarray, X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    M = Z.T @ X
    try:
        return _rotation(M)
    except RankDeficient:
        logger.debug("⚠️ Rank-deficient Procrustes step, retrying with jitter")
        return _rotation(M + JITTER * rng.uniform(-1.0, 1.0, size=M.shape))


def discretize(rs: RelaxedSolution, seed: int = 0, max_iter: int = 100,
               tol: float = 1e-7,
               R0: Optional[np.ndarray] = None) -> Tuple[Partition, DiscreteState]:
    """
    Alternate X, R and Λ updates starting from R = R0 (init_rotation by default), Λ = I

    A sweep that would increase φ is discarded and ends the run, so the
    recorded φ history never increases.

    Args:
        rs: Relaxed solution
        seed: Seed for the initial rotation and jitter
        max_iter: Maximum number of sweeps, >= 1
        tol: Stop once a sweep lowers φ by less than this
        R0: Starting K×K orthogonal rotation

    Returns:
        Tuple of (partition read off X, final state)
    """
    if max_iter < 1:
        raise ConfigError(f"max_iter must be >= 1, got {max_iter}")
    Z = np.asarray(rs.Z, dtype=np.float64)
    n, K = Z.shape
    z_norm = float(np.linalg.norm(Z))
    rng = np.random.default_rng(seed)

    if R0 is None:
        R = init_rotation(Z, seed)
    else:
        R = np.asarray(R0, dtype=np.float64)
        if R.shape != (K, K):
            raise ConfigError(f"R0 must be {K}×{K}, got {R.shape}")
    Lam = np.eye(K)
    labels, X = _assign(Z, R, Lam, z_norm)
    current = phi(Z, R, Lam, X)
    history = [current]
    converged = False
    sweeps = 0

    for sweeps in range(1, max_iter + 1):
        R_new = _robust_rotation(Z, X, rng)
        Lam_new = fit_Lambda(Z, R_new, X)
        labels_new, X_new = _assign(Z, R_new, Lam_new, z_norm)
        value = phi(Z, R_new, Lam_new, X_new)
        if value > current + PHI_SLACK:
            converged = True
            break
        decrease = current - value
        R, Lam, labels, X, current = R_new, Lam_new, labels_new, X_new, value
        history.append(current)
        if decrease < tol:
            converged = True
            break

    logger.debug(f"🔁 Discretization seed={seed}: {sweeps} sweeps, φ={current:.6g}")
    state = DiscreteState(X=X, R=R, Lambda=Lam, phi=current, labels=labels,
                          history=tuple(history), iterations=sweeps, converged=converged)
    return Partition(labels, K), state


@dataclass
class ClusterResult:
    """Best restart plus everything computed along the way"""
    partition: Partition
    sncut: float
    relaxed: RelaxedSolution
    state: DiscreteState
    restart: int
    runs: List[Tuple[int, float, DiscreteState]] = field(default_factory=list)


class SignedSpectralClustering:
    """
    K-way signed normalized cut clustering.

    Features:
    - Relaxed solution computed once per fit
    - Seeded restarts of the discretization: the farthest-rows start, then random rotations
    - Lowest sNcut wins, earliest restart on ties
    """

    def __init__(self, K: int, seed: int = 0, options: Optional[ClusterOptions] = None):
        """Initialize the clustering"""
        if K < 2:
            raise BadK(f"K must be at least 2, got {K}")
        self.K = K
        self.seed = seed
        self.options = (options or ClusterOptions()).validate()

    def fit(self, g: SignedGraph) -> ClusterResult:
        """
        Cluster the graph

        Args:
            g: Signed graph without isolated vertices

        Returns:
            ClusterResult of the best restart
        """
        if self.K > g.n:
            raise BadK(f"K={self.K} exceeds the number of nodes {g.n}")
        opts = self.options
        rs = relaxed_solution(g, self.K, tol=opts.eig_tol, seed=self.seed)

        best: Optional[Tuple[float, int, Partition, DiscreteState]] = None
        runs = []
        failure: Optional[SignedClusteringError] = None
        for r in range(opts.restarts):
            try:
                R0 = restart_rotation(rs.Z, self.seed, r)
                p, state = discretize(rs, seed=self.seed + r, max_iter=opts.max_iter, tol=opts.tol, R0=R0)
            except (ConvergenceError, DegenerateRows, RankDeficient) as exc:
                logger.warning(f"⚠️ Restart {r} failed: {exc}")
                failure = exc
                continue
            value = sncut(g, p)
            runs.append((r, value, state))
            if best is None or value < best[0]:
                best = (value, r, p, state)

        if best is None:
            raise failure
        value, r, p, state = best
        logger.info(f"✅ Clustered {g.n} nodes into {self.K} clusters: sNcut={value:.6g} (restart {r})")
        return ClusterResult(partition=p, sncut=value, relaxed=rs, state=state, restart=r, runs=runs)

    def fit_predict(self, g: SignedGraph) -> Partition:
        return self.fit(g).partition


def cluster(g: SignedGraph, K: int, seed: int = 0,
            opts: Optional[ClusterOptions] = None) -> Tuple[Partition, MetricsReport]:
    """Cluster g into K clusters and report its sNcut"""
    result = SignedSpectralClustering(K, seed, opts).fit(g)
    return result.partition, report(g, result.partition)

#!/usr/bin/env python3
"""
Signed Graph Module

Core representation of signed weighted graphs together with the signed
degree, the signed Laplacian L̄ = D̄ − W, its normalized version and the
signed normalized cut objective. Weights live in a scipy csr matrix; all
objects are immutable after construction.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .errors import (
    BadK,
    ConflictError,
    DimensionMismatch,
    EmptyClusterError,
    GraphValidationError,
    IsolatedVertexError,
    ZeroVolumeError,
)

logger = logging.getLogger(__name__)

# Weights below this magnitude are structural zeros
ZERO_TOL = 1e-12

NodeSet = Union[Sequence[int], np.ndarray]


def _clean_weights(matrix) -> sparse.csr_matrix:
    """Convert to csr float64, drop near-zero entries and check the invariants"""
    weights = sparse.csr_matrix(matrix, dtype=np.float64, copy=True)
    if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
        raise GraphValidationError(f"Weight matrix must be square, got shape {weights.shape}")

    weights.data[np.abs(weights.data) < ZERO_TOL] = 0.0
    weights.eliminate_zeros()

    if weights.diagonal().any():
        loops = np.flatnonzero(weights.diagonal()).tolist()
        raise GraphValidationError("Self-loops are not allowed", {'nodes': loops[:10]})

    if weights.nnz:
        scale = float(np.abs(weights.data).max())
        asym = abs(weights - weights.T)
        if asym.nnz and asym.max() > 1e-12 * max(scale, 1.0):
            raise GraphValidationError("Weight matrix must be symmetric")
        weights = ((weights + weights.T) * 0.5).tocsr()
        weights.eliminate_zeros()

    weights.sort_indices()
    return weights


@dataclass(frozen=True, eq=False)
class SignedGraph:
    """
    Symmetric signed weight matrix with optional node names.

    Edges are the stored nonzeros; weights are dimensionless similarities
    (positive) or dissimilarities (negative). The diagonal is always zero.
    """
    weights: sparse.csr_matrix
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'weights', _clean_weights(self.weights))
        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != self.weights.shape[0]:
                raise DimensionMismatch(
                    f"Got {len(labels)} labels for {self.weights.shape[0]} nodes"
                )
            object.__setattr__(self, 'labels', labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @classmethod
    def from_dense(cls, matrix: np.ndarray, labels: Optional[Sequence[str]] = None) -> "SignedGraph":
        return cls(sparse.csr_matrix(np.asarray(matrix, dtype=np.float64)),
                   tuple(labels) if labels is not None else None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int, float]],
                   labels: Optional[Sequence[str]] = None) -> "SignedGraph":
        """
        Build a graph from undirected edges, applying the symmetric closure.

        Args:
            n: Node count
            edges: (i, j, w) triples; either orientation may appear, repeats
                must agree on the weight

        Returns:
            SignedGraph with w_ij = w_ji = w
        """
        seen = {}
        for i, j, w in edges:
            i, j, w = int(i), int(j), float(w)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphValidationError(f"Edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise GraphValidationError("Self-loops are not allowed", {'nodes': [i]})
            key = (min(i, j), max(i, j))
            if key in seen and seen[key] != w:
                raise ConflictError(f"Edge {key} declared with weights {seen[key]} and {w}")
            seen[key] = w

        if seen:
            keys = np.array(list(seen.keys()), dtype=np.int64)
            vals = np.array(list(seen.values()), dtype=np.float64)
            rows = np.concatenate([keys[:, 0], keys[:, 1]])
            cols = np.concatenate([keys[:, 1], keys[:, 0]])
            data = np.concatenate([vals, vals])
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            data = np.zeros(0)
        matrix = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        return cls(matrix, tuple(labels) if labels is not None else None)

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Undirected edges (i < j) in row-major order"""
        upper = sparse.triu(self.weights, k=1).tocsr()
        upper.sort_indices()
        for i in range(self.n):
            start, end = upper.indptr[i], upper.indptr[i + 1]
            for j, w in zip(upper.indices[start:end], upper.data[start:end]):
                yield i, int(j), float(w)

    @property
    def num_edges(self) -> int:
        return self.weights.nnz // 2

    @property
    def num_negative_edges(self) -> int:
        return int(np.count_nonzero(self.weights.data < 0)) // 2

    def node_names(self) -> List[str]:
        if self.labels is not None:
            return list(self.labels)
        return [str(i) for i in range(self.n)]

    def dense(self) -> np.ndarray:
        return self.weights.toarray()

    def subgraph(self, nodes: NodeSet) -> "SignedGraph":
        idx = _as_index(self, nodes)
        labels = tuple(self.labels[i] for i in idx) if self.labels is not None else None
        return SignedGraph(self.weights[idx][:, idx], labels)

    def isolated_vertices(self) -> np.ndarray:
        return np.flatnonzero(signed_degree(self) == 0)

    def drop_isolated(self) -> Tuple["SignedGraph", np.ndarray]:
        """Induced subgraph on the nodes with positive signed degree"""
        kept = np.flatnonzero(signed_degree(self) > 0)
        if len(kept) < self.n:
            logger.info(f"✂️ Dropping {self.n - len(kept)} isolated vertices")
        return self.subgraph(kept), kept


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of each node to one of K clusters"""
    assign: np.ndarray
    K: int

    def __post_init__(self):
        assign = np.asarray(self.assign)
        if assign.ndim != 1:
            raise DimensionMismatch("Partition assignment must be one-dimensional")
        if assign.size and not np.issubdtype(assign.dtype, np.integer):
            if not np.all(assign == np.round(assign)):
                raise GraphValidationError("Cluster ids must be integers")
        assign = assign.astype(np.int64)
        if int(self.K) < 1:
            raise BadK(f"K must be at least 1, got {self.K}")
        if assign.size and (assign.min() < 0 or assign.max() >= self.K):
            raise BadK(f"Cluster ids must lie in [0, {self.K - 1}]")
        assign.setflags(write=False)
        object.__setattr__(self, 'assign', assign)
        object.__setattr__(self, 'K', int(self.K))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel arbitrary cluster labels to 0..K-1 by first appearance"""
        mapping = {}
        assign = []
        for label in labels:
            if label not in mapping:
                mapping[label] = len(mapping)
            assign.append(mapping[label])
        return cls(np.array(assign, dtype=np.int64), max(len(mapping), 1))

    @property
    def n(self) -> int:
        return int(self.assign.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assign, minlength=self.K)

    def is_complete(self) -> bool:
        """True when no cluster is empty"""
        return bool(np.all(self.sizes() > 0))

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assign == j)

    def indicator(self, amplitudes: Optional[Sequence[float]] = None) -> np.ndarray:
        """N×K matrix with X^j_i = a_j on cluster j and 0 elsewhere"""
        amps = np.ones(self.K) if amplitudes is None else np.asarray(amplitudes, dtype=np.float64)
        X = np.zeros((self.n, self.K))
        X[np.arange(self.n), self.assign] = amps[self.assign]
        return X

    def canonical(self) -> "Partition":
        return Partition.from_labels(self.assign.tolist()) if self.n else self

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.assign, other.assign)

    def __hash__(self) -> int:
        return hash((self.K, self.assign.tobytes()))


def _as_index(g: SignedGraph, nodes: NodeSet) -> np.ndarray:
    idx = np.asarray(nodes)
    if idx.dtype == bool:
        if idx.size != g.n:
            raise DimensionMismatch(f"Boolean node mask has length {idx.size}, expected {g.n}")
        return np.flatnonzero(idx)
    idx = np.unique(idx.astype(np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= g.n):
        raise DimensionMismatch(f"Node index out of range for n={g.n}")
    return idx


def _complement(g: SignedGraph, idx: np.ndarray) -> np.ndarray:
    mask = np.ones(g.n, dtype=bool)
    mask[idx] = False
    return np.flatnonzero(mask)


def signed_degree(g: SignedGraph) -> np.ndarray:
    """d̄_i = Σ_j |w_ij|"""
    return np.asarray(abs(g.weights).sum(axis=1), dtype=np.float64).ravel()


def signed_laplacian(g: SignedGraph) -> sparse.csr_matrix:
    """L̄ = D̄ − W"""
    return (sparse.diags(signed_degree(g)) - g.weights).tocsr()


def _inv_sqrt_degree(g: SignedGraph) -> np.ndarray:
    d = signed_degree(g)
    isolated = np.flatnonzero(d == 0)
    if isolated.size:
        names = [g.node_names()[i] for i in isolated[:10]]
        raise IsolatedVertexError(
            f"{isolated.size} isolated vertices; prune or reconnect the graph",
            {'nodes': names},
        )
    return 1.0 / np.sqrt(d)


def normalized_signed_laplacian(g: SignedGraph) -> sparse.csr_matrix:
    """L̄_sym = I − D̄^{-1/2} W D̄^{-1/2}"""
    scale = sparse.diags(_inv_sqrt_degree(g))
    return (sparse.identity(g.n, format='csr') - scale @ g.weights @ scale).tocsr()


def _check_vector(g: SignedGraph, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (g.n,):
        raise DimensionMismatch(f"Vector has shape {x.shape}, expected ({g.n},)")
    return x


def quadratic_form(g: SignedGraph, x) -> float:
    """xᵀL̄x"""
    x = _check_vector(g, x)
    return float(x @ (signed_laplacian(g) @ x))


def pairwise_quadratic_form(g: SignedGraph, x) -> float:
    """½ Σ_ij |w_ij| (x_i − sgn(w_ij) x_j)², equal to xᵀL̄x"""
    x = _check_vector(g, x)
    coo = g.weights.tocoo()
    diff = x[coo.row] - np.sign(coo.data) * x[coo.col]
    return float(0.5 * np.sum(np.abs(coo.data) * diff ** 2))


def links_pos(g: SignedGraph, A: NodeSet, B: NodeSet) -> float:
    """Sum of positive weights w_ij with i in A and j in B"""
    block = g.weights[_as_index(g, A)][:, _as_index(g, B)]
    return float(block.data[block.data > 0].sum())


def links_neg(g: SignedGraph, A: NodeSet, B: NodeSet) -> float:
    """Sum of −w_ij over negative weights with i in A and j in B (nonnegative)"""
    block = g.weights[_as_index(g, A)][:, _as_index(g, B)]
    return float(-block.data[block.data < 0].sum())


def cut(g: SignedGraph, A: NodeSet) -> float:
    """cut(A, Ā): absolute weight crossing the boundary of A"""
    idx = _as_index(g, A)
    block = g.weights[idx][:, _complement(g, idx)]
    return float(np.abs(block.data).sum())


def vol(g: SignedGraph, A: NodeSet) -> float:
    """Sum of signed degrees over A"""
    return float(signed_degree(g)[_as_index(g, A)].sum())


def cluster_terms(g: SignedGraph, p: Partition) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-cluster cut(A_j, Ā_j), links⁻(A_j, A_j) and vol(A_j)"""
    if p.n != g.n:
        raise DimensionMismatch(f"Partition covers {p.n} nodes, graph has {g.n}")
    coo = g.weights.tocoo()
    ci = p.assign[coo.row]
    cj = p.assign[coo.col]
    boundary = ci != cj
    inner_neg = ~boundary & (coo.data < 0)
    cuts = np.bincount(ci[boundary], weights=np.abs(coo.data[boundary]), minlength=p.K)
    negs = np.bincount(ci[inner_neg], weights=-coo.data[inner_neg], minlength=p.K)
    vols = np.bincount(p.assign, weights=signed_degree(g), minlength=p.K)
    return cuts, negs, vols


def sncut(g: SignedGraph, p: Partition) -> float:
    """
    Signed normalized cut Σ_j [cut(A_j, Ā_j) + 2·links⁻(A_j, A_j)] / vol(A_j).

    Raises:
        EmptyClusterError: a cluster has no members
        ZeroVolumeError: a cluster consists of isolated vertices only
    """
    empty = np.flatnonzero(p.sizes() == 0) if p.n == g.n else None
    if empty is not None and empty.size:
        raise EmptyClusterError(f"{empty.size} empty clusters", {'clusters': empty.tolist()})
    cuts, negs, vols = cluster_terms(g, p)
    zero = np.flatnonzero(vols <= 0)
    if zero.size:
        raise ZeroVolumeError(f"{zero.size} clusters with zero volume", {'clusters': zero.tolist()})
    return float(np.sum((cuts + 2.0 * negs) / vols))


def sncut_rayleigh(g: SignedGraph, X: np.ndarray) -> float:
    """Σ_j (X^jᵀ L̄ X^j) / (X^jᵀ D̄ X^j) for an N×K amplitude matrix X"""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != g.n:
        raise DimensionMismatch(f"X has shape {X.shape}, expected ({g.n}, K)")
    numer = np.sum(X * (signed_laplacian(g) @ X), axis=0)
    denom = np.sum(X * (signed_degree(g)[:, None] * X), axis=0)
    zero = np.flatnonzero(denom <= 0)
    if zero.size:
        raise ZeroVolumeError(f"{zero.size} columns with zero D̄-norm", {'clusters': zero.tolist()})
    return float(np.sum(numer / denom))

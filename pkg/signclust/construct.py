#!/usr/bin/env python3
"""
Lexical Graph Construction Module

Builds a signed word graph from an embedding table and a thesaurus: a heat
kernel over Euclidean distances gives the distributional weights, and the
thesaurus overlays positive synonym and negative antonym terms,

    Ŵ = γ·W + β_ant·(T_ant ⊙ K) + β·(T ⊙ K)

where W is the thresholded kernel and K the unthresholded kernel evaluated on
thesaurus-linked pairs only.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, FrozenSet, Iterable, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import sparse

from .errors import (
    ConfigError,
    ConflictError,
    DimensionMismatch,
    EmptyVocabulary,
    ValidationError,
)
from .indexing import IndexConfig, NeighborIndex
from .sgraph import SignedGraph, signed_degree

logger = logging.getLogger(__name__)

Pair = Tuple[str, str]

# pairs per vectorised kernel evaluation
_KERNEL_CHUNK = 65536


def pair_key(a: str, b: str) -> Pair:
    """Canonical key of an unordered word pair"""
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    """Ordered vocabulary with one fixed-dimension vector per word"""
    words: Tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        words = tuple(self.words)
        vectors = np.array(self.vectors, dtype=np.float64)
        if not words:
            raise EmptyVocabulary("Embedding table is empty")
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise DimensionMismatch(
                f"Expected {len(words)} vectors, got array of shape {vectors.shape}"
            )
        if len(set(words)) != len(words):
            raise ConflictError("Embedding table contains duplicate words")
        if not np.all(np.isfinite(vectors)):
            raise ValidationError("Embedding vectors must be finite")
        vectors.setflags(write=False)
        object.__setattr__(self, 'words', words)
        object.__setattr__(self, 'vectors', vectors)

    @property
    def n(self) -> int:
        return len(self.words)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def index(self) -> Dict[str, int]:
        return {word: i for i, word in enumerate(self.words)}

    def subset(self, keep: Iterable[str]) -> "EmbeddingTable":
        """Restrict to the given words, preserving table order"""
        keep = set(keep)
        rows = [i for i, word in enumerate(self.words) if word in keep]
        if not rows:
            raise EmptyVocabulary("No embedding words survive the vocabulary filter")
        return EmbeddingTable(tuple(self.words[i] for i in rows), self.vectors[rows])


@dataclass(frozen=True)
class Thesaurus:
    """Unordered synonym and antonym pairs"""
    synonyms: FrozenSet[Pair] = frozenset()
    antonyms: FrozenSet[Pair] = frozenset()

    def __post_init__(self):
        synonyms = frozenset(pair_key(*pair) for pair in self.synonyms)
        antonyms = frozenset(pair_key(*pair) for pair in self.antonyms)
        for a, b in synonyms | antonyms:
            if a == b:
                raise ValidationError(f"Self-pair ({a}, {b}) in thesaurus")
        both = synonyms & antonyms
        if both:
            example = sorted(both)[0]
            raise ConflictError(f"Pair {example} is both synonym and antonym",
                                {'pairs': len(both)})
        object.__setattr__(self, 'synonyms', synonyms)
        object.__setattr__(self, 'antonyms', antonyms)

    def vocabulary(self) -> Set[str]:
        return {word for pair in self.synonyms | self.antonyms for word in pair}

    def is_synonym(self, a: str, b: str) -> bool:
        return pair_key(a, b) in self.synonyms

    def is_antonym(self, a: str, b: str) -> bool:
        return pair_key(a, b) in self.antonyms

    def restrict(self, words: Iterable[str]) -> Tuple["Thesaurus", int, int]:
        """
        Keep only pairs with both words in the vocabulary

        Returns:
            Tuple of (restricted thesaurus, dropped synonym pairs, dropped antonym pairs)
        """
        vocab = set(words)
        syn = frozenset(p for p in self.synonyms if p[0] in vocab and p[1] in vocab)
        ant = frozenset(p for p in self.antonyms if p[0] in vocab and p[1] in vocab)
        return (Thesaurus(syn, ant),
                len(self.synonyms) - len(syn),
                len(self.antonyms) - len(ant))


@dataclass
class KernelParams:
    """Heat-kernel and thesaurus overlay parameters"""
    sigma: float = 0.2
    thresh: float = 0.04
    gamma: float = 1.0
    beta: float = 1.0
    beta_ant: float = 1.0

    def validate(self) -> "KernelParams":
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if not self.thresh >= 0:
            raise ConfigError(f"thresh must be >= 0, got {self.thresh}")
        for name in ('gamma', 'beta', 'beta_ant'):
            if not getattr(self, name) >= 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if max(self.gamma, self.beta, self.beta_ant) <= 0:
            raise ConfigError("At least one of gamma, beta, beta_ant must be > 0")
        return self


@dataclass
class IngestionReport:
    """Summary of a lexical graph build"""
    vocab_size: int
    synonym_pairs: int
    antonym_pairs: int
    dropped_synonym_pairs: int
    dropped_antonym_pairs: int
    edge_count: int
    negative_edge_count: int
    isolated_vertices: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)


def _symmetric(n: int, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> sparse.csr_matrix:
    return sparse.csr_matrix(
        (np.concatenate([values, values]),
         (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    )


def kernel_values(vectors: np.ndarray, rows: np.ndarray, cols: np.ndarray, sigma: float) -> np.ndarray:
    """exp(−‖v_i − v_j‖² / σ) for each (rows[k], cols[k]) pair, in float64"""
    out = np.empty(len(rows), dtype=np.float64)
    for start in range(0, len(rows), _KERNEL_CHUNK):
        r = rows[start:start + _KERNEL_CHUNK]
        c = cols[start:start + _KERNEL_CHUNK]
        diff = vectors[r] - vectors[c]
        out[start:start + _KERNEL_CHUNK] = np.exp(-np.einsum('ij,ij->i', diff, diff) / sigma)
    return out


def heat_kernel_matrix(emb: EmbeddingTable, sigma: float, thresh: float,
                       index_config: Optional[IndexConfig] = None) -> SignedGraph:
    """
    Thresholded heat-kernel graph over the embedding table.

    W_ij = exp(−dist²/σ) when that value is at least thresh, else 0.

    Args:
        emb: Embedding table
        sigma: Kernel bandwidth, > 0
        thresh: Sparsification cutoff, >= 0

    Returns:
        SignedGraph with nonnegative weights and the table's words as labels
    """
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma}")
    if not thresh >= 0:
        raise ConfigError(f"thresh must be >= 0, got {thresh}")

    n = emb.n
    if thresh > 1.0:
        rows = cols = np.zeros(0, dtype=np.int64)
    elif thresh == 0.0:
        rows, cols = np.triu_indices(n, k=1)
    else:
        index = NeighborIndex(index_config)
        index.build_index(emb.vectors)
        rows, cols = index.pairs_within(-sigma * np.log(thresh))

    values = kernel_values(emb.vectors, rows, cols, sigma)
    keep = values >= thresh
    logger.info(f"🏗️ Heat kernel σ={sigma:g} thresh={thresh:g}: {int(keep.sum())} edges over {n} words")
    return SignedGraph(_symmetric(n, rows[keep], cols[keep], values[keep]), emb.words)


def thesaurus_matrices(thes: Thesaurus, words: Sequence[str]) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """
    Signed thesaurus matrices over an ordered vocabulary

    Returns:
        Tuple of (T with +1 synonyms / −1 antonyms, T_ant with only the −1 entries)
    """
    index = {word: i for i, word in enumerate(words)}
    n = len(words)

    def _entries(pairs, value):
        linked = [(index[a], index[b]) for a, b in sorted(pairs) if a in index and b in index]
        if not linked:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)
        idx = np.array(linked, dtype=np.int64)
        return idx[:, 0], idx[:, 1], np.full(len(linked), value, dtype=np.float64)

    sr, sc, sv = _entries(thes.synonyms, 1.0)
    ar, ac, av = _entries(thes.antonyms, -1.0)
    T_ant = _symmetric(n, ar, ac, av)
    T = _symmetric(n, np.concatenate([sr, ar]), np.concatenate([sc, ac]), np.concatenate([sv, av]))
    return T, T_ant


def thesaurus_kernel(emb: EmbeddingTable, T: sparse.spmatrix, sigma: float) -> sparse.csr_matrix:
    """Unthresholded kernel values on the sparsity pattern of T"""
    upper = sparse.triu(T, k=1).tocoo()
    values = kernel_values(emb.vectors, upper.row, upper.col, sigma)
    return _symmetric(emb.n, upper.row, upper.col, values)


def combine(Wk: SignedGraph, T: sparse.spmatrix, T_ant: sparse.spmatrix, params: KernelParams,
            kernel: Optional[sparse.spmatrix] = None) -> SignedGraph:
    """
    Ŵ = γ·Wk + β_ant·(T_ant ⊙ K) + β·(T ⊙ K)

    Args:
        Wk: Thresholded kernel graph
        T: Signed thesaurus matrix
        T_ant: Antonym-only thesaurus matrix
        params: Overlay weights
        kernel: Unthresholded kernel K on thesaurus pairs; defaults to Wk

    Returns:
        SignedGraph carrying Wk's labels
    """
    params.validate()
    shape = (Wk.n, Wk.n)
    K = Wk.weights if kernel is None else kernel
    for name, matrix in (('T', T), ('T_ant', T_ant), ('kernel', K)):
        if matrix.shape != shape:
            raise DimensionMismatch(f"{name} has shape {matrix.shape}, expected {shape}")

    combined = (params.gamma * Wk.weights
                + params.beta_ant * sparse.csr_matrix(T_ant).multiply(K)
                + params.beta * sparse.csr_matrix(T).multiply(K))
    return SignedGraph(sparse.csr_matrix(combined), Wk.labels)


class LexicalGraphBuilder:
    """
    Signed lexical graph construction from embeddings and a thesaurus.

    Features:
    - FAISS-backed thresholded heat kernel
    - Synonym/antonym overlay on the unthresholded kernel
    - Ingestion report with dropped thesaurus pairs and edge counts
    """

    def __init__(self, params: Optional[KernelParams] = None,
                 index_config: Optional[IndexConfig] = None):
        """Initialize the builder"""
        self.params = (params or KernelParams()).validate()
        self.index_config = index_config or IndexConfig()

    def build(self, emb: EmbeddingTable,
              thes: Optional[Thesaurus] = None) -> Tuple[SignedGraph, IngestionReport]:
        """
        Build the combined signed graph

        Args:
            emb: Embedding table
            thes: Optional thesaurus

        Returns:
            Tuple of (signed graph, ingestion report)
        """
        p = self.params
        Wk = heat_kernel_matrix(emb, p.sigma, p.thresh, self.index_config)

        dropped_syn = dropped_ant = 0
        restricted = Thesaurus()
        if thes is not None:
            restricted, dropped_syn, dropped_ant = thes.restrict(emb.words)
            if dropped_syn or dropped_ant:
                logger.info(f"⚠️ Dropped {dropped_syn} synonym and {dropped_ant} antonym pairs outside the vocabulary")

        T, T_ant = thesaurus_matrices(restricted, emb.words)
        K = thesaurus_kernel(emb, T, p.sigma)
        graph = combine(Wk, T, T_ant, p, kernel=K)

        report = IngestionReport(
            vocab_size=emb.n,
            synonym_pairs=len(restricted.synonyms),
            antonym_pairs=len(restricted.antonyms),
            dropped_synonym_pairs=dropped_syn,
            dropped_antonym_pairs=dropped_ant,
            edge_count=graph.num_edges,
            negative_edge_count=graph.num_negative_edges,
            isolated_vertices=int(np.count_nonzero(signed_degree(graph) == 0)),
        )
        logger.info(f"✅ Signed graph: {report.edge_count} edges, {report.negative_edge_count} negative")
        return graph, report

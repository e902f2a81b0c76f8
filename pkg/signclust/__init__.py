"""
Signed Spectral Clustering Components

Signed graphs and their normalized cut, the spectral relaxation and its
discretization, lexical graph construction from embeddings and thesauri,
and the evaluation suite for word clusters.
"""

__version__ = "1.0.0"

from .construct import EmbeddingTable, KernelParams, LexicalGraphBuilder, Thesaurus
from .discrete import ClusterOptions, SignedSpectralClustering, cluster, discretize
from .errors import SignedClusteringError
from .indexing import NeighborIndex
from .metrics import GoldClasses, MetricsReport, SimilarityPairs, report
from .sgraph import Partition, SignedGraph, sncut
from .spectral import RelaxedSolution, relaxed_solution

__all__ = [
    "EmbeddingTable",
    "KernelParams",
    "LexicalGraphBuilder",
    "Thesaurus",
    "ClusterOptions",
    "SignedSpectralClustering",
    "cluster",
    "discretize",
    "SignedClusteringError",
    "NeighborIndex",
    "GoldClasses",
    "MetricsReport",
    "SimilarityPairs",
    "report",
    "Partition",
    "SignedGraph",
    "sncut",
    "RelaxedSolution",
    "relaxed_solution",
]

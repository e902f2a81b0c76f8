#!/usr/bin/env python3
"""
Vector Indexing Module

Exact neighbour search over embedding vectors with a FAISS flat L2 index.
The heat kernel only keeps pairs whose kernel value clears the threshold,
which is a squared-distance radius; the index enumerates candidate pairs
inside that radius in row blocks so the full distance matrix is never built.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import faiss
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class IndexConfig:
    """Configuration for neighbour indexing"""
    index_type: str = "FLAT"
    metric: str = "l2"
    batch_size: int = 1024
    # float32 search slack, candidates are re-checked in float64
    radius_slack: float = 1e-3


class NeighborIndex:
    """
    Flat L2 index returning all vector pairs within a squared radius.

    Features:
    - Exact (non-approximate) FAISS flat index
    - Row-block batched range queries
    - Candidate pairs reported once, i < j
    """

    def __init__(self, config: Optional[IndexConfig] = None):
        """Initialize the index holder"""
        self.config = config or IndexConfig()
        if self.config.index_type != "FLAT" or self.config.metric != "l2":
            raise ValueError(f"Unsupported index {self.config.index_type}/{self.config.metric}")
        self.index = None
        self.vectors = None
        self.index_built = False

    def build_index(self, vectors: np.ndarray) -> None:
        """
        Add vectors to a flat L2 index

        Args:
            vectors: n×d matrix of embedding vectors
        """
        vectors = np.ascontiguousarray(vectors, dtype=np.float32)
        if vectors.ndim != 2:
            raise ValueError(f"Expected a 2-D matrix, got shape {vectors.shape}")
        logger.debug(f"🏗️ Building {self.config.index_type} index with {vectors.shape[0]} vectors")
        self.index = faiss.IndexFlatL2(vectors.shape[1])
        self.index.add(vectors)
        self.vectors = vectors
        self.index_built = True

    def pairs_within(self, radius_sq: float) -> Tuple[np.ndarray, np.ndarray]:
        """
        Candidate pairs (i < j) with squared distance up to radius_sq

        The search radius is inflated by the configured slack so float32
        rounding never loses a pair; callers re-check distances exactly.

        Args:
            radius_sq: Squared Euclidean radius

        Returns:
            Tuple of (rows, cols) index arrays
        """
        if not self.index_built:
            raise RuntimeError("Index not built. Call build_index() first.")

        n = self.vectors.shape[0]
        scale = float(np.mean(np.sum(self.vectors.astype(np.float64) ** 2, axis=1))) if n else 0.0
        search_radius = radius_sq * (1.0 + self.config.radius_slack) + self.config.radius_slack * max(scale, 1.0) * 1e-3

        rows, cols = [], []
        for start in range(0, n, self.config.batch_size):
            block = self.vectors[start:start + self.config.batch_size]
            lims, _, labels = self.index.range_search(block, float(search_radius))
            for offset in range(block.shape[0]):
                i = start + offset
                neighbours = labels[lims[offset]:lims[offset + 1]]
                neighbours = neighbours[neighbours > i]
                rows.append(np.full(neighbours.size, i, dtype=np.int64))
                cols.append(neighbours.astype(np.int64))

        if not rows:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        rows, cols = np.concatenate(rows), np.concatenate(cols)
        order = np.lexsort((cols, rows))
        logger.debug(f"📥 {rows.size} candidate pairs within radius² {radius_sq:.4g}")
        return rows[order], cols[order]

    def get_index_stats(self) -> dict:
        """Get index statistics"""
        if not self.index_built:
            return {'status': 'not_built'}
        return {
            'status': 'built',
            'index_type': self.config.index_type,
            'total_vectors': int(self.index.ntotal),
            'dimension': int(self.vectors.shape[1]),
            'metric': self.config.metric,
        }

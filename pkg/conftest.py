"""Shared pytest fixtures"""

from pathlib import Path

import numpy as np
import pytest
from scipy import sparse

from signclust.sgraph import SignedGraph

DATA_DIR = Path(__file__).resolve().parent / "data"


def random_signed_graph(n: int, rng: np.random.Generator, density: float = 0.6,
                        neg_frac: float = 0.4, connected: bool = True) -> SignedGraph:
    """Random symmetric signed graph; a positive path keeps every vertex non-isolated"""
    rows, cols = np.triu_indices(n, k=1)
    present = rng.random(rows.size) < density
    if connected:
        present |= cols == rows + 1
    weights = rng.uniform(0.2, 1.0, rows.size)
    weights = np.where(rng.random(rows.size) < neg_frac, -weights, weights)
    r, c, w = rows[present], cols[present], weights[present]
    matrix = sparse.csr_matrix((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                               shape=(n, n))
    return SignedGraph(matrix)


@pytest.fixture
def tiny_dir() -> Path:
    return DATA_DIR / "tiny_lexicon"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def two_cliques() -> SignedGraph:
    """Two disconnected positive 4-cliques"""
    W = np.zeros((8, 8))
    W[:4, :4] = 1.0
    W[4:, 4:] = 1.0
    np.fill_diagonal(W, 0.0)
    return SignedGraph.from_dense(W, [f"n{i}" for i in range(8)])


@pytest.fixture
def bridged_cliques() -> SignedGraph:
    """Two positive triangles joined by one negative edge"""
    W = np.zeros((6, 6))
    W[:3, :3] = 1.0
    W[3:, 3:] = 1.0
    np.fill_diagonal(W, 0.0)
    W[2, 3] = W[3, 2] = -1.0
    return SignedGraph.from_dense(W)

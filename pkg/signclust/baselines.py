#!/usr/bin/env python3
"""
Baselines Module

Reference points for the signed clustering: K-means on the raw embedding
vectors, and a label-permutation null distribution for the within-cluster
antonym count.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Sequence

import numpy as np
from sklearn.cluster import KMeans

from .construct import EmbeddingTable, Thesaurus
from .errors import BadK, ConfigError
from .metrics import count_nne
from .sgraph import Partition

logger = logging.getLogger(__name__)


def kmeans_partition(emb: EmbeddingTable, K: int, seed: int = 0, n_init: int = 10) -> Partition:
    """K-means over the embedding vectors"""
    if not 1 <= K <= emb.n:
        raise BadK(f"K must lie in [1, {emb.n}], got {K}")
    model = KMeans(n_clusters=K, n_init=n_init, random_state=seed)
    labels = model.fit_predict(emb.vectors)
    logger.info(f"📍 K-means baseline: {emb.n} words, K={K}, inertia={model.inertia_:.6g}")
    return Partition(labels.astype(np.int64), K)


@dataclass
class NullDistribution:
    """NNE of a partition against cluster-size-preserving random relabelings"""
    observed: int
    mean: float
    std: float
    p_value: float
    permutations: int

    def to_dict(self) -> Dict[str, float]:
        return {f"nne_null_{key}": value for key, value in asdict(self).items() if key != 'observed'}


def random_nne_null(p: Partition, thes: Thesaurus, labels: Sequence[str],
                    permutations: int = 1000, seed: int = 0) -> NullDistribution:
    """
    Permutation null for NNE

    Cluster sizes are preserved by shuffling the assignment vector. The
    one-sided p-value is the share of shuffles with NNE at most the
    observed value, with the usual +1 correction.
    """
    if permutations < 1:
        raise ConfigError(f"permutations must be >= 1, got {permutations}")
    observed = count_nne(p, thes, labels)
    index = {word: i for i, word in enumerate(labels)}
    pairs = np.array([(index[a], index[b]) for a, b in sorted(thes.antonyms)
                      if a in index and b in index], dtype=np.int64).reshape(-1, 2)

    rng = np.random.default_rng(seed)
    null = np.empty(permutations)
    for t in range(permutations):
        shuffled = rng.permutation(p.assign)
        null[t] = np.count_nonzero(shuffled[pairs[:, 0]] == shuffled[pairs[:, 1]])

    p_value = (1.0 + np.count_nonzero(null <= observed)) / (permutations + 1.0)
    return NullDistribution(observed=observed, mean=float(null.mean()), std=float(null.std()),
                            p_value=float(p_value), permutations=permutations)

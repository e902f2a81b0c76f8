#!/usr/bin/env python3
"""
Synthetic Experiments Module

Planted-partition signed graphs with known clusters, an exhaustive sNcut
oracle for small graphs, the NNE/NDC-versus-K curve, and a synthetic
lexicon whose antonyms are embedding-space neighbours.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .construct import EmbeddingTable, Thesaurus, pair_key
from .discrete import ClusterOptions, cluster
from .errors import BadK, ConfigError, TooLarge, ZeroVolumeError
from .metrics import GoldClasses, count_ndc, count_nne
from .sgraph import Partition, SignedGraph, signed_degree, signed_laplacian

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 12
_BATCH = 20000


@dataclass
class PlantedConfig:
    """Planted signed partition parameters"""
    n: int = 100
    K: int = 5
    p_in: float = 0.3
    p_out: float = 0.05
    frac_neg_out: float = 0.5
    w_low: float = 0.5
    w_high: float = 1.0
    seed: int = 0

    def validate(self) -> "PlantedConfig":
        for name in ('p_in', 'p_out', 'frac_neg_out'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if not 1 <= self.K <= self.n:
            raise ConfigError(f"Need n >= K >= 1, got n={self.n}, K={self.K}")
        if not 0.0 < self.w_low <= self.w_high:
            raise ConfigError(f"Need 0 < w_low <= w_high, got [{self.w_low}, {self.w_high}]")
        return self


class PlantedGraph(NamedTuple):
    graph: SignedGraph
    labels: np.ndarray
    isolated: np.ndarray


def planted_labels(n: int, K: int) -> np.ndarray:
    """Contiguous, balanced blocks"""
    labels = np.empty(n, dtype=np.int64)
    for j, block in enumerate(np.array_split(np.arange(n), K)):
        labels[block] = j
    return labels


def generate_planted(cfg: PlantedConfig) -> PlantedGraph:
    """
    Planted-partition signed graph

    Within-cluster pairs get a positive edge with probability p_in; cross
    pairs get an edge with probability p_out, negative with probability
    frac_neg_out. Magnitudes are uniform in [w_low, w_high].

    Returns:
        PlantedGraph(graph, true labels, isolated vertex indices)
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    labels = planted_labels(cfg.n, cfg.K)

    rows, cols = np.triu_indices(cfg.n, k=1)
    same = labels[rows] == labels[cols]
    present = rng.random(rows.size) < np.where(same, cfg.p_in, cfg.p_out)
    negative = ~same & (rng.random(rows.size) < cfg.frac_neg_out)
    magnitude = rng.uniform(cfg.w_low, cfg.w_high, size=rows.size)
    weights = np.where(negative, -magnitude, magnitude)

    r, c, w = rows[present], cols[present], weights[present]
    matrix = sparse.csr_matrix((np.concatenate([w, w]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                               shape=(cfg.n, cfg.n))
    graph = SignedGraph(matrix)
    isolated = graph.isolated_vertices()
    if isolated.size:
        logger.warning(f"⚠️ Planted graph has {isolated.size} isolated vertices")
    logger.info(f"🎲 Planted graph n={cfg.n}, K={cfg.K}: {graph.num_edges} edges, "
                f"{graph.num_negative_edges} negative")
    return PlantedGraph(graph, labels, isolated)


def iter_partitions(n: int, K: int) -> Iterator[Tuple[int, ...]]:
    """Restricted growth strings of length n using exactly K blocks"""
    if not 1 <= K <= n:
        return
    assign = [0] * n

    def _grow(i: int, used: int) -> Iterator[Tuple[int, ...]]:
        if i == n:
            if used == K:
                yield tuple(assign)
            return
        if used + (n - i) < K:
            return
        for block in range(min(used + 1, K)):
            assign[i] = block
            yield from _grow(i + 1, max(used, block + 1))

    yield from _grow(1, 1)


def _batch_sncut(L: np.ndarray, d: np.ndarray, batch: np.ndarray, K: int) -> np.ndarray:
    """sNcut of each row of a batch of assignments; inf where a cluster has zero volume"""
    X = (batch[:, :, None] == np.arange(K)).astype(np.float64)
    numer = np.sum(X * np.matmul(L, X), axis=1)
    denom = np.einsum('bik,i->bk', X, d)
    with np.errstate(divide='ignore', invalid='ignore'):
        terms = numer / denom
    terms[denom <= 0] = np.inf
    return terms.sum(axis=1)


def brute_force_min_sncut(g: SignedGraph, K: int) -> Tuple[Partition, float]:
    """
    Exhaustive sNcut minimum over all partitions into exactly K clusters

    Partitions with a zero-volume cluster are skipped; the first minimizer
    in enumeration order is returned.

    Raises:
        TooLarge: more than BRUTE_FORCE_LIMIT nodes
        BadK: K outside [1, n]
    """
    if g.n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"Exhaustive search supports n <= {BRUTE_FORCE_LIMIT}, got {g.n}")
    if not 1 <= K <= g.n:
        raise BadK(f"K must lie in [1, {g.n}], got {K}")

    L = signed_laplacian(g).toarray()
    d = signed_degree(g)
    best_value, best_assign = np.inf, None
    pending: List[Tuple[int, ...]] = []

    def _flush():
        nonlocal best_value, best_assign
        batch = np.array(pending, dtype=np.int64)
        values = _batch_sncut(L, d, batch, K)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_value, best_assign = float(values[i]), batch[i]
        pending.clear()

    for assign in iter_partitions(g.n, K):
        pending.append(assign)
        if len(pending) >= _BATCH:
            _flush()
    if pending:
        _flush()

    if best_assign is None:
        raise ZeroVolumeError(f"Every {K}-partition has a zero-volume cluster")
    return Partition(best_assign, K), best_value


def thesaurus_from_graph(g: SignedGraph) -> Thesaurus:
    """Positive edges as synonym pairs, negative edges as antonym pairs"""
    names = g.node_names()
    synonyms, antonyms = set(), set()
    for i, j, w in g.edges():
        (synonyms if w > 0 else antonyms).add(pair_key(names[i], names[j]))
    return Thesaurus(frozenset(synonyms), frozenset(antonyms))


def nne_ndc_curve(g: SignedGraph, thes: Optional[Thesaurus] = None,
                  K_range: Optional[Sequence[int]] = None, seed: int = 0,
                  opts: Optional[ClusterOptions] = None) -> List[Tuple[int, int, int]]:
    """
    Within-cluster antonym pairs and excess synonym components for each K

    K = 1 puts every node in one cluster and K = n makes singletons; other
    values run the clustering.

    Returns:
        List of (K, nne, ndc) rows
    """
    thes = thes if thes is not None else thesaurus_from_graph(g)
    labels = g.node_names()
    K_range = list(K_range) if K_range is not None else list(range(2, g.n + 1))
    rows = []
    for K in K_range:
        if not 1 <= K <= g.n:
            raise BadK(f"K must lie in [1, {g.n}], got {K}")
        if K == 1:
            p = Partition(np.zeros(g.n, dtype=np.int64), 1)
        elif K == g.n:
            p = Partition(np.arange(g.n), g.n)
        else:
            p, _ = cluster(g, K, seed=seed, opts=opts)
        rows.append((K, count_nne(p, thes, labels), count_ndc(p, thes, labels)))
        logger.info(f"📉 K={K}: nne={rows[-1][1]}, ndc={rows[-1][2]}")
    return rows


@dataclass
class LexiconConfig:
    """Synthetic lexicon with two indistinguishable sense poles per group"""
    groups: int = 4
    per_group: int = 50
    dim: int = 8
    separation: float = 6.0
    spread: float = 0.5
    synonyms_per_word: int = 2
    antonyms_per_word: int = 3
    seed: int = 0

    def validate(self) -> "LexiconConfig":
        if self.groups < 1 or self.per_group < 4:
            raise ConfigError("Need at least one group of at least 4 words")
        if self.dim < self.groups:
            raise ConfigError(f"dim must be >= groups, got dim={self.dim}, groups={self.groups}")
        if not self.spread > 0 or not self.separation >= 0:
            raise ConfigError("spread must be > 0 and separation >= 0")
        if self.synonyms_per_word < 0 or self.antonyms_per_word < 0:
            raise ConfigError("Pair counts must be >= 0")
        return self


class Lexicon(NamedTuple):
    embeddings: EmbeddingTable
    thesaurus: Thesaurus
    gold: GoldClasses


def generate_lexicon(cfg: LexiconConfig) -> Lexicon:
    """
    Embedded words in planted semantic groups with a generated thesaurus

    Each group is a Gaussian cloud around separation·e_g, randomly halved
    into two poles that embeddings cannot tell apart. Synonyms link words of
    one pole; antonyms link words of opposite poles, so every antonym pair is
    a pair of embedding-space neighbours. Gold classes are the poles.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    words: List[str] = []
    vectors: List[np.ndarray] = []
    gold = {}
    synonyms, antonyms = set(), set()

    for group in range(cfg.groups):
        centre = np.zeros(cfg.dim)
        centre[group] = cfg.separation
        points = centre + cfg.spread * rng.standard_normal((cfg.per_group, cfg.dim))
        pole = np.zeros(cfg.per_group, dtype=np.int64)
        pole[rng.permutation(cfg.per_group)[cfg.per_group // 2:]] = 1

        names = [f"g{group}p{pole[i]}w{i}" for i in range(cfg.per_group)]
        words.extend(names)
        vectors.extend(points)
        gold.update({name: f"g{group}p{pole[i]}" for i, name in enumerate(names)})

        members = [np.flatnonzero(pole == side) for side in (0, 1)]
        for side in members:
            for i in side:
                others = side[side != i]
                picks = rng.choice(others, size=min(cfg.synonyms_per_word, others.size), replace=False)
                synonyms.update(pair_key(names[i], names[j]) for j in picks)

        left, right = members
        size = min(left.size, right.size)
        for _ in range(cfg.antonyms_per_word):
            matched = rng.permutation(right)[:size]
            antonyms.update(pair_key(names[i], names[j]) for i, j in zip(left[:size], matched))

    emb = EmbeddingTable(tuple(words), np.array(vectors))
    thes = Thesaurus(frozenset(synonyms), frozenset(antonyms))
    logger.info(f"🎲 Synthetic lexicon: {emb.n} words, {len(synonyms)} synonym and {len(antonyms)} antonym pairs")
    return Lexicon(emb, thes, GoldClasses(gold))

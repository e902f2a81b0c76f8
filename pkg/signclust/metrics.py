#!/usr/bin/env python3
"""
Cluster Evaluation Module

Intrinsic and gold-standard quality measures for word clusters:
signed normalized cut, within-cluster antonym pairs (NNE), excess
disconnected synonym components (NDC), purity, entropy and accuracy on
high-similarity word pairs.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from sklearn.metrics import adjusted_rand_score
from sklearn.metrics.cluster import contingency_matrix

from .construct import Thesaurus
from .errors import ConfigError, ConflictError, DimensionMismatch, SingleClassError, ValidationError
from .sgraph import Partition, SignedGraph, sncut

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoldClasses:
    """Gold class label for a subset of words"""
    class_of: Dict[str, str]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]]) -> "GoldClasses":
        class_of: Dict[str, str] = {}
        for word, label in pairs:
            if class_of.get(word, label) != label:
                raise ConflictError(f"Word '{word}' has two gold classes",
                                    {'classes': [class_of[word], label]})
            class_of[word] = label
        return cls(class_of)

    def __len__(self) -> int:
        return len(self.class_of)


@dataclass(frozen=True)
class SimilarityPairs:
    """Rated word pairs, ratings on a 0-10 scale"""
    records: Tuple[Tuple[str, str, float], ...]

    def __post_init__(self):
        records = tuple((str(a), str(b), float(r)) for a, b, r in self.records)
        for a, b, rating in records:
            if not math.isfinite(rating) or not 0.0 <= rating <= 10.0:
                raise ValidationError(f"Rating for ({a}, {b}) must lie in [0, 10], got {rating}")
        object.__setattr__(self, 'records', records)

    def __len__(self) -> int:
        return len(self.records)

    def above(self, high_cut: float) -> List[Tuple[str, str, float]]:
        return [record for record in self.records if record[2] > high_cut]


@dataclass
class MetricsReport:
    """Evaluation results; fields stay None when their inputs were not supplied"""
    n: int
    sncut: Optional[float] = None
    nne: Optional[int] = None
    ndc: Optional[int] = None
    error: Optional[float] = None
    purity: Optional[float] = None
    entropy: Optional[float] = None
    simlex_accuracy: Optional[float] = None
    simlex_coverage: Optional[float] = None
    lookup_accuracy: Optional[float] = None
    lookup_coverage: Optional[float] = None
    combined_accuracy: Optional[float] = None
    combined_coverage: Optional[float] = None
    ignored: Dict[str, int] = field(default_factory=dict)
    extra: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Union[int, float]]:
        """Flat JSON-ready dict without the unset fields"""
        out: Dict[str, Union[int, float]] = {}
        for key in ('n', 'sncut', 'nne', 'ndc', 'error', 'purity', 'entropy',
                    'simlex_accuracy', 'simlex_coverage', 'lookup_accuracy', 'lookup_coverage',
                    'combined_accuracy', 'combined_coverage'):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        for key, value in sorted(self.ignored.items()):
            out[f"ignored_{key}"] = value
        out.update(sorted(self.extra.items()))
        return out


def _cluster_of(p: Partition, labels: Sequence[str]) -> Dict[str, int]:
    if len(labels) != p.n:
        raise DimensionMismatch(f"Got {len(labels)} labels for a partition of {p.n} nodes")
    return {word: int(c) for word, c in zip(labels, p.assign)}


def count_nne(p: Partition, thes: Thesaurus, labels: Sequence[str]) -> int:
    """Number of antonym pairs whose two words share a cluster"""
    cluster_of = _cluster_of(p, labels)
    return sum(
        1 for a, b in thes.antonyms
        if a in cluster_of and b in cluster_of and cluster_of[a] == cluster_of[b]
    )


def count_ndc(p: Partition, thes: Thesaurus, labels: Sequence[str], excess: bool = True) -> int:
    """
    Disconnected components of the within-cluster synonym subgraphs

    Every member word is a vertex; only synonym pairs inside one cluster are
    edges.

    Args:
        p: Partition over the labelled nodes
        thes: Thesaurus providing the synonym pairs
        labels: Word for each partition node
        excess: Count components - 1 per nonempty cluster; False counts all components

    Returns:
        Component count summed over clusters
    """
    cluster_of = _cluster_of(p, labels)
    index = {word: i for i, word in enumerate(labels)}
    edges = [(index[a], index[b]) for a, b in thes.synonyms
             if a in index and b in index and cluster_of[a] == cluster_of[b]]
    n = p.n
    if n == 0:
        return 0
    if edges:
        idx = np.array(edges, dtype=np.int64)
        graph = sparse.csr_matrix((np.ones(len(edges)), (idx[:, 0], idx[:, 1])), shape=(n, n))
    else:
        graph = sparse.csr_matrix((n, n))
    n_comp, comp = connected_components(graph, directed=False)

    # each component lies inside a single cluster
    comp_cluster = np.zeros(n_comp, dtype=np.int64)
    comp_cluster[comp] = p.assign
    per_cluster = np.bincount(comp_cluster, minlength=p.K)
    if excess:
        return int(np.maximum(per_cluster - 1, 0).sum())
    return int(per_cluster.sum())


def _gold_table(p: Partition, gold: GoldClasses, labels: Sequence[str]) -> np.ndarray:
    _cluster_of(p, labels)
    rows = [(gold.class_of[word], int(c)) for word, c in zip(labels, p.assign) if word in gold.class_of]
    if not rows:
        raise ValidationError("No partition word carries a gold class")
    classes, clusters = zip(*rows)
    # classes × clusters
    return contingency_matrix(list(classes), list(clusters))


def purity(p: Partition, gold: GoldClasses, labels: Sequence[str]) -> float:
    """Σ_r max_i n_r^i / n over the gold-labelled words"""
    table = _gold_table(p, gold, labels)
    return float(table.max(axis=0).sum() / table.sum())


def entropy(p: Partition, gold: GoldClasses, labels: Sequence[str]) -> float:
    """Size-weighted class entropy of the clusters, normalized by log q"""
    table = _gold_table(p, gold, labels).astype(np.float64)
    q = table.shape[0]
    if q < 2:
        raise SingleClassError("Entropy needs at least two gold classes among the clustered words")
    n = table.sum()
    sizes = table.sum(axis=0)
    with np.errstate(divide='ignore', invalid='ignore'):
        share = table / sizes
        terms = np.where(table > 0, share * np.log(share), 0.0)
    per_cluster = -terms.sum(axis=0) / math.log(q)
    return float(np.sum(sizes / n * per_cluster))


def _check_high_cut(high_cut: float) -> None:
    if not 0.0 < high_cut < 10.0:
        raise ConfigError(f"high_cut must lie in (0, 10), got {high_cut}")


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def simlex_eval(p: Partition, pairs: SimilarityPairs, labels: Sequence[str],
                high_cut: float = 8.0) -> Tuple[float, float]:
    """
    Co-clustering accuracy on high-similarity pairs

    Returns:
        Tuple of (accuracy among covered pairs, coverage of high pairs)
    """
    _check_high_cut(high_cut)
    cluster_of = _cluster_of(p, labels)
    high = pairs.above(high_cut)
    covered = [(a, b) for a, b, _ in high if a in cluster_of and b in cluster_of]
    hits = sum(1 for a, b in covered if cluster_of[a] == cluster_of[b])
    return _ratio(hits, len(covered)), _ratio(len(covered), len(high))


def thesaurus_lookup_eval(pairs: SimilarityPairs, thes: Thesaurus,
                          high_cut: float = 8.0) -> Tuple[float, float]:
    """Accuracy when a high-similarity pair counts as found iff the thesaurus lists it as synonyms"""
    _check_high_cut(high_cut)
    vocab = thes.vocabulary()
    high = pairs.above(high_cut)
    covered = [(a, b) for a, b, _ in high if a in vocab and b in vocab]
    hits = sum(1 for a, b in covered if thes.is_synonym(a, b))
    return _ratio(hits, len(covered)), _ratio(len(covered), len(high))


def combined_lookup_eval(p: Partition, pairs: SimilarityPairs, labels: Sequence[str],
                         thes: Thesaurus, high_cut: float = 8.0) -> Tuple[float, float]:
    """Thesaurus synonym look-up with co-clustering as the fallback"""
    _check_high_cut(high_cut)
    cluster_of = _cluster_of(p, labels)
    known = set(cluster_of) | thes.vocabulary()
    high = pairs.above(high_cut)
    covered = [(a, b) for a, b, _ in high if a in known and b in known]
    hits = sum(
        1 for a, b in covered
        if thes.is_synonym(a, b)
        or (a in cluster_of and b in cluster_of and cluster_of[a] == cluster_of[b])
    )
    return _ratio(hits, len(covered)), _ratio(len(covered), len(high))


def adjusted_rand(a: Union[Partition, Sequence[int]], b: Union[Partition, Sequence[int]]) -> float:
    """Adjusted Rand index between two assignments"""
    a = a.assign if isinstance(a, Partition) else np.asarray(a)
    b = b.assign if isinstance(b, Partition) else np.asarray(b)
    return float(adjusted_rand_score(a, b))


def report(g: Optional[SignedGraph], p: Partition, thes: Optional[Thesaurus] = None,
           gold: Optional[GoldClasses] = None, pairs: Optional[SimilarityPairs] = None,
           labels: Optional[Sequence[str]] = None, high_cut: float = 8.0,
           excess_ndc: bool = True) -> MetricsReport:
    """
    Assemble every metric the inputs allow

    Args:
        g: Signed graph for sNcut, optional
        p: Partition to evaluate
        thes: Thesaurus for NNE / NDC / look-up scores
        gold: Gold classes for purity and entropy
        pairs: Rated pairs for the high-similarity accuracy
        labels: Word per node; defaults to the graph's node names

    Returns:
        MetricsReport with the unavailable blocks left unset
    """
    if labels is None:
        if g is None:
            raise ValidationError("Node labels are required when no graph is given")
        labels = g.node_names()
    labels = list(labels)
    if g is not None and g.n != p.n:
        raise DimensionMismatch(f"Partition has {p.n} nodes, graph has {g.n}")

    result = MetricsReport(n=p.n)
    if g is not None:
        result.sncut = sncut(g, p)

    if thes is not None:
        result.nne = count_nne(p, thes, labels)
        result.ndc = count_ndc(p, thes, labels, excess=excess_ndc)
        result.error = (result.nne + result.ndc) / p.n
        _, dropped_syn, dropped_ant = thes.restrict(labels)
        result.ignored.update({'synonym_pairs': dropped_syn, 'antonym_pairs': dropped_ant})

    if gold is not None:
        result.purity = purity(p, gold, labels)
        result.entropy = entropy(p, gold, labels)
        result.ignored['gold_words'] = len(set(gold.class_of) - set(labels))

    if pairs is not None:
        result.simlex_accuracy, result.simlex_coverage = simlex_eval(p, pairs, labels, high_cut)
        if thes is not None:
            result.lookup_accuracy, result.lookup_coverage = thesaurus_lookup_eval(pairs, thes, high_cut)
            result.combined_accuracy, result.combined_coverage = combined_lookup_eval(
                p, pairs, labels, thes, high_cut)

    logger.debug(f"📊 Metrics: {result.to_dict()}")
    return result

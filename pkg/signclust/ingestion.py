#!/usr/bin/env python3
"""
Lexical Resource Ingestion Module

Readers and writers for every text format signclust consumes or produces:
word embeddings, thesaurus TSVs, signed-graph edge lists with their node
sidecar, partitions, gold classes, rated similarity pairs, spectrum and
curve CSVs. Parse failures carry the file name and line number.
"""

import io
import json
import logging
import math
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Set, TextIO, Tuple, Union

import numpy as np

from .construct import EmbeddingTable, Thesaurus, pair_key
from .errors import ConflictError, DimensionMismatch, EmptyVocabulary, ParseError
from .metrics import GoldClasses, SimilarityPairs
from .sgraph import Partition, SignedGraph

logger = logging.getLogger(__name__)

Source = Union[str, Path, io.IOBase, TextIO]
Dest = Union[str, Path, TextIO, None]

NODES_SUFFIX = ".nodes"


def _source_name(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return str(source)
    return getattr(source, 'name', '<stream>')


def _decode(line: Union[str, bytes], name: str, lineno: int) -> str:
    if isinstance(line, bytes):
        try:
            line = line.decode('utf-8')
        except UnicodeDecodeError as exc:
            raise _parse_error(f"Invalid UTF-8 at byte {exc.start}", name, lineno) from None
    return line.rstrip('\r\n')


def _iter_lines(source: Source) -> Iterator[Tuple[int, str]]:
    """Yield (line number, line without trailing newline) from a path or a text/byte stream"""
    name = _source_name(source)
    if isinstance(source, (str, Path)):
        if not os.path.exists(source):
            raise FileNotFoundError(f"Input file not found: {source}")
        with open(source, 'rb') as f:
            for lineno, line in enumerate(f, start=1):
                yield lineno, _decode(line, name, lineno)
        return
    lines = iter(source)
    lineno = 0
    while True:
        try:
            line = next(lines)
        except StopIteration:
            return
        except UnicodeDecodeError as exc:
            raise _parse_error(f"Invalid UTF-8 at byte {exc.start}", name, lineno + 1) from None
        lineno += 1
        yield lineno, _decode(line, name, lineno)


def _data_lines(source: Source) -> Iterator[Tuple[int, str]]:
    """Skip blank and '#' comment lines"""
    for lineno, line in _iter_lines(source):
        if line.strip() and not line.lstrip().startswith('#'):
            yield lineno, line


@contextmanager
def open_output(dest: Dest):
    if dest is None or dest == '-':
        yield sys.stdout
    elif isinstance(dest, (str, Path)):
        with open(dest, 'w', encoding='utf-8', newline='\n') as f:
            yield f
    else:
        yield dest


def _parse_error(message: str, name: str, lineno: int) -> ParseError:
    return ParseError(message, {'file': name, 'line': lineno})


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


# --- embeddings -------------------------------------------------------------

def load_embeddings(source: Source, vocab_filter: Optional[Set[str]] = None) -> EmbeddingTable:
    """
    Parse whitespace-separated embeddings, one "word v1 ... vd" record per line

    An optional "count dim" header line is recognized when both tokens are
    integers. Repeated words keep their first vector.

    Args:
        source: Path or stream
        vocab_filter: Keep only these words when given

    Returns:
        EmbeddingTable in first-seen order
    """
    name = _source_name(source)
    words: List[str] = []
    rows: List[List[float]] = []
    seen: Set[str] = set()
    dim: Optional[int] = None
    declared_dim: Optional[int] = None
    duplicates = 0

    for lineno, line in _iter_lines(source):
        tokens = line.split()
        if not tokens:
            continue
        if lineno == 1 and len(tokens) == 2 and _is_int(tokens[0]) and _is_int(tokens[1]):
            declared_dim = int(tokens[1])
            continue
        if len(tokens) < 2:
            raise _parse_error(f"Expected a word followed by a vector, got '{line[:40]}'", name, lineno)
        try:
            vector = [float(token) for token in tokens[1:]]
        except ValueError:
            raise _parse_error(f"Non-numeric vector component for '{tokens[0]}'", name, lineno) from None
        if not all(math.isfinite(v) for v in vector):
            raise _parse_error(f"Non-finite vector component for '{tokens[0]}'", name, lineno)

        expected = dim if dim is not None else declared_dim
        if expected is not None and len(vector) != expected:
            raise DimensionMismatch(
                f"Vector for '{tokens[0]}' has {len(vector)} components, expected {expected}",
                {'file': name, 'line': lineno},
            )
        dim = len(vector)

        word = tokens[0]
        if word in seen:
            duplicates += 1
            continue
        seen.add(word)
        if vocab_filter is not None and word not in vocab_filter:
            continue
        words.append(word)
        rows.append(vector)

    if duplicates:
        logger.warning(f"⚠️ {duplicates} repeated words in {name}; kept the first vector of each")
    if not words:
        raise EmptyVocabulary(f"No embedding vectors loaded from {name}", {'file': name})
    logger.info(f"📥 Loaded {len(words)} embeddings of dimension {dim} from {name}")
    return EmbeddingTable(tuple(words), np.array(rows, dtype=np.float64))


def write_embeddings(emb: EmbeddingTable, dest: Dest) -> None:
    with open_output(dest) as out:
        out.write(f"{emb.n} {emb.dim}\n")
        for word, vector in zip(emb.words, emb.vectors):
            out.write(word + " " + " ".join(repr(float(v)) for v in vector) + "\n")


def load_word_list(source: Source) -> Set[str]:
    """One word per line, e.g. a vocabulary filter"""
    return {line.strip() for _, line in _data_lines(source)}


# --- thesaurus --------------------------------------------------------------

_RELATIONS = ('syn', 'ant')


def load_thesaurus(source: Source) -> Thesaurus:
    """
    Parse "word1<TAB>word2<TAB>syn|ant" lines

    Repeated pairs are merged; a pair declared with both relations raises
    ConflictError.
    """
    name = _source_name(source)
    relation_of: Dict[Tuple[str, str], Tuple[str, int]] = {}

    for lineno, line in _data_lines(source):
        fields = line.split('\t')
        if len(fields) != 3:
            raise _parse_error(f"Expected 3 tab-separated fields, got {len(fields)}", name, lineno)
        a, b, rel = (field.strip() for field in fields)
        if rel not in _RELATIONS:
            raise _parse_error(f"Relation must be 'syn' or 'ant', got '{rel}'", name, lineno)
        if not a or not b:
            raise _parse_error("Empty word in thesaurus pair", name, lineno)
        if a == b:
            raise _parse_error(f"Self-pair '{a}'", name, lineno)
        key = pair_key(a, b)
        if key in relation_of and relation_of[key][0] != rel:
            raise ConflictError(
                f"Pair {key} declared as both synonym and antonym",
                {'file': name, 'line': lineno, 'first_line': relation_of[key][1]},
            )
        relation_of.setdefault(key, (rel, lineno))

    synonyms = frozenset(k for k, (rel, _) in relation_of.items() if rel == 'syn')
    antonyms = frozenset(k for k, (rel, _) in relation_of.items() if rel == 'ant')
    logger.info(f"📥 Loaded {len(synonyms)} synonym and {len(antonyms)} antonym pairs from {name}")
    return Thesaurus(synonyms, antonyms)


def write_thesaurus(thes: Thesaurus, dest: Dest) -> None:
    with open_output(dest) as out:
        for a, b in sorted(thes.synonyms):
            out.write(f"{a}\t{b}\tsyn\n")
        for a, b in sorted(thes.antonyms):
            out.write(f"{a}\t{b}\tant\n")


# --- signed graph -----------------------------------------------------------

def write_graph(g: SignedGraph, dest: Dest) -> None:
    """Edge list: header "n <count>", then "i j w" for each edge with i < j"""
    with open_output(dest) as out:
        out.write(f"n {g.n}\n")
        for i, j, w in g.edges():
            out.write(f"{i} {j} {w!r}\n")


def read_graph(source: Source, labels: Optional[Sequence[str]] = None) -> SignedGraph:
    name = _source_name(source)
    lines = _data_lines(source)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("Empty graph file", {'file': name}) from None
    tokens = header.split()
    if len(tokens) != 2 or tokens[0] != 'n' or not _is_int(tokens[1]) or int(tokens[1]) < 0:
        raise _parse_error(f"Expected header 'n <count>', got '{header[:40]}'", name, lineno)
    n = int(tokens[1])

    weights: Dict[Tuple[int, int], float] = {}
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) != 3:
            raise _parse_error(f"Expected 'i j w', got '{line[:40]}'", name, lineno)
        try:
            i, j, w = int(tokens[0]), int(tokens[1]), float(tokens[2])
        except ValueError:
            raise _parse_error(f"Malformed edge '{line[:40]}'", name, lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise _parse_error(f"Edge ({i}, {j}) out of range for n={n}", name, lineno)
        if i == j:
            raise _parse_error(f"Self-loop at node {i}", name, lineno)
        if not math.isfinite(w):
            raise _parse_error(f"Non-finite weight on edge ({i}, {j})", name, lineno)
        key = (min(i, j), max(i, j))
        if key in weights and weights[key] != w:
            raise _parse_error(f"Edge {key} repeated with weights {weights[key]!r} and {w!r}", name, lineno)
        weights[key] = w

    return SignedGraph.from_edges(n, ((i, j, w) for (i, j), w in weights.items()), labels)


def save_graph(g: SignedGraph, path: Union[str, Path]) -> None:
    """Write the edge list and, for labelled graphs, the "<path>.nodes" sidecar"""
    write_graph(g, path)
    if g.labels is not None:
        with open_output(str(path) + NODES_SUFFIX) as out:
            for label in g.labels:
                out.write(label + "\n")
    logger.info(f"💾 Saved graph with {g.n} nodes and {g.num_edges} edges to {path}")


def load_graph(path: Union[str, Path]) -> SignedGraph:
    """Read an edge list plus its node sidecar when one exists"""
    sidecar = str(path) + NODES_SUFFIX
    labels = None
    if os.path.exists(sidecar):
        labels = [line for _, line in _iter_lines(sidecar) if line]
    return read_graph(path, labels)


# --- partitions -------------------------------------------------------------

def write_partition(p: Partition, labels: Sequence[str], dest: Dest) -> None:
    """"label<TAB>cluster_id" per node in index order"""
    if len(labels) != p.n:
        raise DimensionMismatch(f"Got {len(labels)} labels for a partition of {p.n} nodes")
    with open_output(dest) as out:
        for label, cluster_id in zip(labels, p.assign):
            out.write(f"{label}\t{int(cluster_id)}\n")


def read_partition(source: Source) -> Tuple[Partition, List[str]]:
    """
    Parse a partition TSV

    Returns:
        Tuple of (Partition with K = max id + 1, node labels in file order)
    """
    name = _source_name(source)
    labels: List[str] = []
    assign: List[int] = []
    seen: Set[str] = set()
    for lineno, line in _data_lines(source):
        fields = line.split('\t')
        if len(fields) != 2 or not _is_int(fields[1].strip()):
            raise _parse_error("Expected 'label<TAB>cluster_id'", name, lineno)
        label, cluster_id = fields[0], int(fields[1])
        if cluster_id < 0:
            raise _parse_error(f"Negative cluster id {cluster_id}", name, lineno)
        if label in seen:
            raise _parse_error(f"Label '{label}' assigned twice", name, lineno)
        seen.add(label)
        labels.append(label)
        assign.append(cluster_id)
    if not labels:
        raise EmptyVocabulary(f"Partition file {name} is empty", {'file': name})
    return Partition(np.array(assign, dtype=np.int64), max(assign) + 1), labels


# --- evaluation resources ---------------------------------------------------

def load_gold_classes(source: Source) -> GoldClasses:
    """"word<TAB>class" lines"""
    name = _source_name(source)
    pairs = []
    for lineno, line in _data_lines(source):
        fields = line.split('\t')
        if len(fields) != 2 or not fields[0] or not fields[1].strip():
            raise _parse_error("Expected 'word<TAB>class'", name, lineno)
        pairs.append((fields[0], fields[1].strip()))
    return GoldClasses.from_pairs(pairs)


def write_gold_classes(gold: GoldClasses, dest: Dest) -> None:
    with open_output(dest) as out:
        for word, label in gold.class_of.items():
            out.write(f"{word}\t{label}\n")


def load_similarity_pairs(source: Source) -> SimilarityPairs:
    """
    Rated pairs, "word1<TAB>word2<TAB>rating"

    The SimLex-999 distribution is also accepted: a header line starting
    with "word1" locates the "SimLex999" rating column.
    """
    name = _source_name(source)
    rating_col = 2
    records = []
    for lineno, line in _data_lines(source):
        fields = line.split('\t')
        if lineno == 1 and fields[0].strip() == 'word1':
            columns = [field.strip() for field in fields]
            rating_col = columns.index('SimLex999') if 'SimLex999' in columns else 2
            continue
        if len(fields) <= rating_col:
            raise _parse_error(f"Expected at least {rating_col + 1} tab-separated fields", name, lineno)
        try:
            rating = float(fields[rating_col])
        except ValueError:
            raise _parse_error(f"Rating '{fields[rating_col]}' is not a number", name, lineno) from None
        if not math.isfinite(rating) or not 0.0 <= rating <= 10.0:
            raise _parse_error(f"Rating {rating} outside [0, 10]", name, lineno)
        records.append((fields[0].strip(), fields[1].strip(), rating))
    return SimilarityPairs(tuple(records))


# --- diagnostics ------------------------------------------------------------

def write_spectrum(eigenvalues: Sequence[float], dest: Dest) -> None:
    with open_output(dest) as out:
        out.write("index,eigenvalue\n")
        for idx, value in enumerate(eigenvalues):
            out.write(f"{idx},{float(value)!r}\n")


def write_curve(rows: Sequence[Tuple[int, int, int]], dest: Dest) -> None:
    with open_output(dest) as out:
        out.write("K,nne,ndc\n")
        for K, nne, ndc in rows:
            out.write(f"{K},{nne},{ndc}\n")


def write_json(payload: Dict[str, Any], dest: Dest) -> None:
    with open_output(dest) as out:
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


class LexiconIngestion:
    """
    Loads the inputs of a lexical graph build in one step.

    Features:
    - Embedding table with optional vocabulary filter file
    - Optional thesaurus
    - Existence checks before any parsing starts
    """

    def __init__(self, config: Optional[Dict] = None):
        """Initialize lexicon ingestion"""
        self.config = config or {}

    def ingest(self, embeddings_path: str, thesaurus_path: Optional[str] = None,
               vocab_path: Optional[str] = None) -> Tuple[EmbeddingTable, Optional[Thesaurus]]:
        """
        Load embeddings (restricted to the vocabulary file) and the thesaurus

        Args:
            embeddings_path: Embedding text file
            thesaurus_path: Thesaurus TSV, optional
            vocab_path: Word list restricting the vocabulary, optional

        Returns:
            Tuple of (embedding table, thesaurus or None)
        """
        for path in (embeddings_path, thesaurus_path, vocab_path):
            if path is not None and not os.path.exists(path):
                raise FileNotFoundError(f"Input file not found: {path}")

        vocab = load_word_list(vocab_path) if vocab_path else None
        emb = load_embeddings(embeddings_path, vocab)
        thes = load_thesaurus(thesaurus_path) if thesaurus_path else None
        return emb, thes

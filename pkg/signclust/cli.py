#!/usr/bin/env python3
"""
Command-Line Interface

signclust <command> [options]

Commands: build-graph, cluster, evaluate, grid-search, synth, spectrum,
baseline. Data goes to stdout or --output; progress logs and errors go to
stderr, errors as one JSON object.
"""

import argparse
import json
import logging
import os
import sys
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .baselines import kmeans_partition, random_nne_null
from .config import RunConfig
from .construct import LexicalGraphBuilder
from .discrete import SignedSpectralClustering
from .errors import ConfigError, DimensionMismatch, SignedClusteringError
from .grid import run_grid_search, write_grid_csv
from .ingestion import (
    LexiconIngestion,
    load_gold_classes,
    load_graph,
    load_similarity_pairs,
    load_thesaurus,
    read_partition,
    save_graph,
    write_curve,
    write_embeddings,
    write_gold_classes,
    write_graph,
    write_json,
    write_partition,
    write_spectrum,
    write_thesaurus,
)
from .metrics import report
from .sgraph import Partition, SignedGraph
from .spectral import spectrum
from .synth import LexiconConfig, generate_lexicon, generate_planted, nne_ndc_curve

logger = logging.getLogger("signclust")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_logging(verbosity: int = 0) -> None:
    """Single stderr handler on the package logger; -v → DEBUG, -q → WARNING"""
    level = logging.INFO
    if verbosity > 0:
        level = logging.DEBUG
    elif verbosity < 0:
        level = logging.WARNING
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def _resolve(args: argparse.Namespace) -> RunConfig:
    return RunConfig.resolve(vars(args), args.config).validate()


def _is_file(dest: Optional[str]) -> bool:
    return dest not in (None, '-')


# --- commands ---------------------------------------------------------------

def cmd_build_graph(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    params = cfg.kernel_params()
    cfg.require('embeddings')

    emb, thes = LexiconIngestion().ingest(cfg.embeddings, cfg.thesaurus, cfg.vocab)
    graph, ingestion_report = LexicalGraphBuilder(params).build(emb, thes)

    if _is_file(args.output):
        save_graph(graph, args.output)
    else:
        write_graph(graph, sys.stdout)
    summary = ingestion_report.to_dict()
    logger.info(f"📋 Ingestion report: {json.dumps(summary, sort_keys=True)}")
    if args.report:
        write_json(summary, args.report)
    return 0


def _partition_labels(graph, kept: np.ndarray) -> List[str]:
    names = graph.node_names()
    return [names[i] for i in kept]


def cmd_cluster(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    opts = cfg.cluster_options()
    cfg.require('graph', 'K')

    full = load_graph(cfg.graph)
    graph, kept = full.drop_isolated() if args.drop_isolated else (full, np.arange(full.n))

    result = SignedSpectralClustering(cfg.K, cfg.seed, opts).fit(graph)
    metrics = report(graph, result.partition)
    metrics.extra.update({'restart': result.restart, 'lower_bound': result.relaxed.lower_bound()})

    write_partition(result.partition, _partition_labels(full, kept), args.output)
    if args.report:
        write_json(metrics.to_dict(), args.report)
    elif _is_file(args.output):
        write_json(metrics.to_dict(), sys.stdout)
    else:
        logger.info(f"📊 {json.dumps(metrics.to_dict(), sort_keys=True)}")
    return 0


def _align_to_graph(p: Partition, labels: List[str], graph: SignedGraph) -> Tuple[Partition, SignedGraph]:
    """Reorder p to the graph's nodes; a partition over a node subset scores the induced subgraph"""
    names = graph.node_names()
    position = {label: i for i, label in enumerate(labels)}
    if not set(position) <= set(names):
        raise DimensionMismatch("Partition labels do not match the graph's nodes",
                                {'partition': len(labels), 'graph': graph.n})
    if len(position) < graph.n:
        graph = graph.subgraph([i for i, name in enumerate(names) if name in position])
        names = graph.node_names()
        logger.info(f"✂️ Scoring the {graph.n}-node subgraph covered by the partition")
    assign = np.array([p.assign[position[name]] for name in names], dtype=np.int64)
    return Partition(assign, p.K), graph


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    cfg.require('partition')

    p, labels = read_partition(cfg.partition)
    thes = load_thesaurus(cfg.thesaurus) if cfg.thesaurus else None
    gold = load_gold_classes(cfg.gold) if cfg.gold else None
    pairs = load_similarity_pairs(cfg.simlex) if cfg.simlex else None
    graph = None
    if cfg.graph:
        graph = load_graph(cfg.graph)
        p, graph = _align_to_graph(p, labels, graph)
        labels = graph.node_names()

    metrics = report(graph, p, thes, gold=gold, pairs=pairs, labels=labels,
                     high_cut=cfg.high_cut, excess_ndc=not args.raw_ndc)
    if cfg.permutations and thes is not None:
        null = random_nne_null(p, thes, labels, permutations=cfg.permutations, seed=cfg.seed)
        metrics.extra.update(null.to_dict())
    write_json(metrics.to_dict(), args.output)
    return 0


def cmd_grid_search(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    grid = cfg.grid_spec()
    opts = cfg.cluster_options()
    cfg.require('embeddings', 'thesaurus')

    emb, thes = LexiconIngestion().ingest(cfg.embeddings, cfg.thesaurus, cfg.vocab)
    gold = load_gold_classes(cfg.gold) if cfg.gold else None
    results = run_grid_search(emb, thes, grid, gold=gold, seed=cfg.seed, opts=opts,
                              jobs=cfg.effective_jobs())
    write_grid_csv(results, args.output)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve(args)

    if args.lexicon_dir:
        lexicon = generate_lexicon(LexiconConfig(seed=cfg.seed))
        os.makedirs(args.lexicon_dir, exist_ok=True)
        write_embeddings(lexicon.embeddings, os.path.join(args.lexicon_dir, "embeddings.txt"))
        write_thesaurus(lexicon.thesaurus, os.path.join(args.lexicon_dir, "thesaurus.tsv"))
        write_gold_classes(lexicon.gold, os.path.join(args.lexicon_dir, "gold.tsv"))
        logger.info(f"💾 Synthetic lexicon written to {args.lexicon_dir}")
        return 0

    planted = generate_planted(cfg.planted_config())
    graph = planted.graph
    if _is_file(args.output):
        save_graph(graph, args.output)
    else:
        write_graph(graph, sys.stdout)
    if args.labels:
        write_partition(Partition(planted.labels, int(planted.labels.max()) + 1), graph.node_names(), args.labels)

    if args.curve:
        k_min = cfg.k_min if cfg.k_min is not None else 2
        k_max = cfg.k_max if cfg.k_max is not None else min(graph.n, 2 * planted.labels.max() + 2)
        if not 1 <= k_min <= k_max <= graph.n:
            raise ConfigError(f"Curve range must satisfy 1 <= k_min <= k_max <= n, got [{k_min}, {k_max}]")
        pruned, _ = graph.drop_isolated()
        k_max = min(k_max, pruned.n)
        rows = nne_ndc_curve(pruned, K_range=range(k_min, k_max + 1), seed=cfg.seed,
                             opts=cfg.cluster_options())
        write_curve(rows, args.curve)
    return 0


def cmd_spectrum(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    cfg.require('graph')
    graph = load_graph(cfg.graph)
    if args.drop_isolated:
        graph, _ = graph.drop_isolated()
    values = spectrum(graph, count=min(cfg.K or graph.n, graph.n), tol=cfg.eig_tol, seed=cfg.seed)
    write_spectrum(values, args.output)
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _resolve(args)
    cfg.require('embeddings', 'K')
    emb, _ = LexiconIngestion().ingest(cfg.embeddings, None, cfg.vocab)
    p = kmeans_partition(emb, cfg.K, seed=cfg.seed)
    write_partition(p, emb.words, args.output)
    return 0


# --- parser -----------------------------------------------------------------

def _float_list(text: str) -> List[float]:
    return [float(item) for item in text.split(',') if item.strip()]


def _int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(',') if item.strip()]


def _kernel_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--sigma', type=float, help="heat-kernel bandwidth (default 0.2)")
    parser.add_argument('--thresh', type=float, help="kernel sparsification cutoff (default 0.04)")
    parser.add_argument('--gamma', type=float, help="distributional weight (default 1)")
    parser.add_argument('--beta', type=float, help="synonym weight (default 1)")
    parser.add_argument('--beta-ant', type=float, help="antonym weight (default 1)")


def _lexicon_flags(parser: argparse.ArgumentParser, thesaurus: bool = True) -> None:
    parser.add_argument('--embeddings', help="embedding text file")
    if thesaurus:
        parser.add_argument('--thesaurus', help="thesaurus TSV (word1, word2, syn|ant)")
    parser.add_argument('--vocab', help="word list restricting the vocabulary")


def _cluster_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--restarts', type=int, help="discretization restarts (default 8)")
    parser.add_argument('--max-iter', type=int, help="sweeps per restart (default 100)")
    parser.add_argument('--tol', type=float, help="stop when φ drops by less (default 1e-7)")
    parser.add_argument('--eig-tol', type=float, help="eigenpair residual tolerance (default 1e-8)")


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--seed', type=int, help="random seed (default 0)")
    shared.add_argument('--jobs', type=int, help="worker processes (default: all cores)")
    shared.add_argument('--config', help="flat key=value config file")
    shared.add_argument('--output', '-o', help="output file (default stdout)")
    shared.add_argument('-v', '--verbose', action='count', default=0)
    shared.add_argument('-q', '--quiet', action='count', default=0)

    parser = argparse.ArgumentParser(prog='signclust', description="Signed spectral clustering of word graphs")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('build-graph', parents=[shared], help="build a signed graph from embeddings and a thesaurus")
    _lexicon_flags(p)
    _kernel_flags(p)
    p.add_argument('--report', help="write the ingestion report as JSON")
    p.set_defaults(handler=cmd_build_graph)

    p = sub.add_parser('cluster', parents=[shared], help="cluster a signed graph")
    p.add_argument('--graph', help="edge-list graph file")
    p.add_argument('--K', type=int, help="number of clusters")
    p.add_argument('--drop-isolated', action='store_true', help="remove zero-degree nodes first")
    p.add_argument('--report', help="write metrics JSON here")
    _cluster_flags(p)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser('evaluate', parents=[shared], help="score a partition")
    p.add_argument('--partition', help="partition TSV")
    p.add_argument('--thesaurus', help="thesaurus TSV")
    p.add_argument('--gold', help="gold classes TSV")
    p.add_argument('--simlex', help="rated word pairs TSV")
    p.add_argument('--graph', help="graph file for sNcut")
    p.add_argument('--high-cut', type=float, help="rating threshold for high-similarity pairs (default 8)")
    p.add_argument('--raw-ndc', action='store_true', help="count all synonym components, not the excess")
    p.add_argument('--permutations', type=int, help="random-relabeling NNE null samples")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser('grid-search', parents=[shared], help="rank parameter cells by error")
    _lexicon_flags(p)
    p.add_argument('--gold', help="gold classes TSV")
    for name in ('sigma', 'thresh', 'gamma', 'beta', 'beta-ant'):
        p.add_argument(f'--{name}-grid', type=_float_list, help=f"comma-separated {name} values")
    p.add_argument('--K-grid', type=_int_list, help="comma-separated cluster counts")
    _kernel_flags(p)
    p.add_argument('--K', type=int, help="cluster count when no K grid is given")
    _cluster_flags(p)
    p.set_defaults(handler=cmd_grid_search)

    p = sub.add_parser('synth', parents=[shared], help="planted signed graphs and synthetic lexicons")
    p.add_argument('--n', type=int, help="nodes (default 100)")
    p.add_argument('--K', type=int, help="planted clusters (default 5)")
    p.add_argument('--p-in', type=float, help="within-cluster edge probability (default 0.3)")
    p.add_argument('--p-out', type=float, help="cross-cluster edge probability (default 0.05)")
    p.add_argument('--frac-neg-out', type=float, help="share of negative cross edges (default 0.5)")
    p.add_argument('--w-low', type=float, help="smallest weight magnitude (default 0.5)")
    p.add_argument('--w-high', type=float, help="largest weight magnitude (default 1.0)")
    p.add_argument('--labels', help="write planted labels TSV here")
    p.add_argument('--curve', help="write the K,nne,ndc curve CSV here")
    p.add_argument('--k-min', type=int, help="smallest K of the curve (default 2)")
    p.add_argument('--k-max', type=int, help="largest K of the curve")
    p.add_argument('--lexicon-dir', help="write a synthetic lexicon to this directory instead")
    _cluster_flags(p)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser('spectrum', parents=[shared], help="smallest eigenvalues of the normalized signed Laplacian")
    p.add_argument('--graph', help="edge-list graph file")
    p.add_argument('--K', type=int, help="number of eigenvalues (default all)")
    p.add_argument('--eig-tol', type=float, help="eigenpair residual tolerance (default 1e-8)")
    p.add_argument('--drop-isolated', action='store_true', help="remove zero-degree nodes first")
    p.set_defaults(handler=cmd_spectrum)

    p = sub.add_parser('baseline', parents=[shared], help="K-means partition of the embeddings")
    _lexicon_flags(p, thesaurus=False)
    p.add_argument('--K', type=int, help="number of clusters")
    p.set_defaults(handler=cmd_baseline)

    return parser


def _emit_error(payload: Dict) -> None:
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose - args.quiet)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except SignedClusteringError as exc:
        _emit_error(exc.to_dict())
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _emit_error({'error': type(exc).__name__, 'message': str(exc)})
        return 2


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Grid Search Module

Evaluates every combination of kernel, overlay and cluster-count settings
on a lexicon: build the signed graph, drop isolated words, cluster, score.
Cells are independent and may run on a process pool; results are ranked by
error = (NNE + NDC) / |V| with failed cells last.
"""

import csv
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import List, NamedTuple, Optional

from .construct import EmbeddingTable, KernelParams, LexicalGraphBuilder, Thesaurus
from .discrete import ClusterOptions, cluster
from .errors import ConfigError, SignedClusteringError, ValidationError
from .indexing import IndexConfig
from .ingestion import Dest, open_output
from .metrics import GoldClasses, entropy, purity, report

logger = logging.getLogger(__name__)

COLUMNS = ('sigma', 'thresh', 'K', 'gamma', 'beta', 'beta_ant',
           'error', 'purity', 'entropy', 'nne', 'ndc', 'sncut', 'failure')


class GridCell(NamedTuple):
    sigma: float
    thresh: float
    K: int
    gamma: float
    beta: float
    beta_ant: float


@dataclass
class GridSpec:
    """Candidate values per parameter"""
    sigma: List[float] = field(default_factory=lambda: [0.2])
    thresh: List[float] = field(default_factory=lambda: [0.04])
    K: List[int] = field(default_factory=lambda: [2])
    gamma: List[float] = field(default_factory=lambda: [1.0])
    beta: List[float] = field(default_factory=lambda: [1.0])
    beta_ant: List[float] = field(default_factory=lambda: [1.0])

    def validate(self) -> "GridSpec":
        for name in GridCell._fields:
            if not getattr(self, name):
                raise ConfigError(f"Grid list '{name}' is empty")
        for K in self.K:
            if K < 2:
                raise ConfigError(f"Grid K values must be >= 2, got {K}")
        for cell in self.cells():
            KernelParams(cell.sigma, cell.thresh, cell.gamma, cell.beta, cell.beta_ant).validate()
        return self

    def cell_count(self) -> int:
        return math.prod(len(getattr(self, name)) for name in GridCell._fields)

    def cells(self) -> List[GridCell]:
        return [GridCell(*values) for values in itertools.product(
            self.sigma, self.thresh, self.K, self.gamma, self.beta, self.beta_ant)]


@dataclass
class CellResult:
    cell: GridCell
    error: float = math.nan
    purity: float = math.nan
    entropy: float = math.nan
    nne: Optional[int] = None
    ndc: Optional[int] = None
    sncut: float = math.nan
    failure: str = ""

    def sort_key(self):
        return (bool(self.failure), self.error if not self.failure else math.inf, tuple(self.cell))

    def row(self) -> List[str]:
        def _fmt(value):
            if value is None or (isinstance(value, float) and math.isnan(value)):
                return ""
            return repr(value) if isinstance(value, float) else str(value)
        values = list(self.cell) + [self.error, self.purity, self.entropy, self.nne, self.ndc, self.sncut]
        return [_fmt(v) for v in values] + [self.failure]


def run_cell(cell: GridCell, emb: EmbeddingTable, thes: Thesaurus, gold: Optional[GoldClasses] = None,
             seed: int = 0, opts: Optional[ClusterOptions] = None,
             index_config: Optional[IndexConfig] = None) -> CellResult:
    """Build, prune, cluster and score one cell; failures are recorded, not raised"""
    result = CellResult(cell)
    try:
        params = KernelParams(cell.sigma, cell.thresh, cell.gamma, cell.beta, cell.beta_ant)
        graph, _ = LexicalGraphBuilder(params, index_config).build(emb, thes)
        graph, _ = graph.drop_isolated()
        p, _ = cluster(graph, cell.K, seed=seed, opts=opts)
        metrics = report(graph, p, thes)
        result.error, result.nne, result.ndc, result.sncut = metrics.error, metrics.nne, metrics.ndc, metrics.sncut
        if gold is not None:
            labels = graph.node_names()
            result.purity = purity(p, gold, labels)
            result.entropy = entropy(p, gold, labels)
    except SignedClusteringError as exc:
        result.failure = f"{type(exc).__name__}: {exc.message}"
        logger.warning(f"⚠️ Cell {tuple(cell)} failed: {result.failure}")
    return result


def run_grid_search(emb: EmbeddingTable, thes: Thesaurus, grid: GridSpec,
                    gold: Optional[GoldClasses] = None, seed: int = 0,
                    opts: Optional[ClusterOptions] = None, jobs: int = 1,
                    index_config: Optional[IndexConfig] = None) -> List[CellResult]:
    """
    Evaluate every grid cell

    Args:
        emb: Embedding table
        thes: Thesaurus, needed for the error objective
        grid: Candidate values
        gold: Optional gold classes for purity and entropy
        seed: Clustering seed shared by every cell
        jobs: Worker processes; 1 runs in-process

    Returns:
        Cell results sorted by error, failures last, ties by cell values
    """
    if thes is None:
        raise ValidationError("Grid search needs a thesaurus to compute the error objective")
    grid.validate()
    cells = grid.cells()
    logger.info(f"🧮 Grid search over {grid.cell_count()} cells "
                f"({' × '.join(str(len(getattr(grid, name))) for name in GridCell._fields)}), jobs={jobs}")

    worker = partial(run_cell, emb=emb, thes=thes, gold=gold, seed=seed, opts=opts, index_config=index_config)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(worker, cells))
    else:
        results = [worker(cell) for cell in cells]

    results.sort(key=CellResult.sort_key)
    failed = sum(1 for r in results if r.failure)
    logger.info(f"✅ Grid search done: {len(results) - failed} cells scored, {failed} failed")
    return results


def write_grid_csv(results: List[CellResult], dest: Dest) -> None:
    with open_output(dest) as out:
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(COLUMNS)
        for result in results:
            writer.writerow(result.row())

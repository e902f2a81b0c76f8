import io

import pytest

from signclust.construct import KernelParams, LexicalGraphBuilder
from signclust.discrete import ClusterOptions, cluster
from signclust.errors import ConfigError, ValidationError
from signclust.grid import COLUMNS, GridCell, GridSpec, run_cell, run_grid_search, write_grid_csv
from signclust.ingestion import load_embeddings, load_gold_classes, load_thesaurus
from signclust.metrics import report
from signclust.synth import LexiconConfig, generate_lexicon


@pytest.fixture
def tiny(tiny_dir):
    return (load_embeddings(tiny_dir / "embeddings.txt"), load_thesaurus(tiny_dir / "thesaurus.tsv"),
            load_gold_classes(tiny_dir / "gold.tsv"))


class TestGridSpec:
    def test_cell_count(self):
        grid = GridSpec(sigma=[0.1, 0.2], thresh=[0.01, 0.02, 0.04], K=[2, 3])
        assert grid.cell_count() == 12
        assert len(grid.cells()) == 12
        assert grid.cells()[0] == GridCell(0.1, 0.01, 2, 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("kwargs", [{'K': []}, {'K': [1]}, {'sigma': [0.0]}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            GridSpec(**kwargs).validate()


class TestGridSearch:
    def test_single_cell_matches_direct_run(self, tiny):
        emb, thes, gold = tiny
        results = run_grid_search(emb, thes, GridSpec(), gold=gold)
        assert len(results) == 1
        graph, _ = LexicalGraphBuilder(KernelParams()).build(emb, thes)
        p, _ = cluster(graph, 2)
        expected = report(graph, p, thes, gold)
        cell = results[0]
        assert not cell.failure
        assert (cell.nne, cell.ndc) == (expected.nne, expected.ndc)
        assert cell.error == pytest.approx(expected.error)
        assert cell.purity == pytest.approx(expected.purity)
        assert cell.sncut == pytest.approx(expected.sncut)

    def test_failures_are_recorded_and_sorted_last(self, tiny):
        emb, thes, _ = tiny
        results = run_grid_search(emb, thes, GridSpec(K=[10, 2]))
        assert [r.cell.K for r in results] == [2, 10]
        assert results[1].failure.startswith("BadK")
        assert results[1].row()[6] == ""

    def test_sorted_by_error(self):
        lex = generate_lexicon(LexiconConfig(groups=2, per_group=12, dim=3, seed=1))
        grid = GridSpec(sigma=[4.0], thresh=[0.05], K=[2, 4], beta_ant=[0.0, 10.0])
        results = run_grid_search(lex.embeddings, lex.thesaurus, grid, opts=ClusterOptions(restarts=2))
        errors = [r.error for r in results if not r.failure]
        assert errors == sorted(errors)

    def test_parallel_matches_sequential(self):
        lex = generate_lexicon(LexiconConfig(groups=2, per_group=10, dim=3, seed=2))
        grid = GridSpec(sigma=[4.0], thresh=[0.05], K=[2, 3])
        opts = ClusterOptions(restarts=2)
        sequential = run_grid_search(lex.embeddings, lex.thesaurus, grid, opts=opts, jobs=1)
        parallel = run_grid_search(lex.embeddings, lex.thesaurus, grid, opts=opts, jobs=2)
        assert [r.row() for r in sequential] == [r.row() for r in parallel]

    def test_needs_thesaurus(self, tiny):
        with pytest.raises(ValidationError):
            run_grid_search(tiny[0], None, GridSpec())

    def test_run_cell_without_gold_leaves_purity_blank(self, tiny):
        emb, thes, _ = tiny
        result = run_cell(GridCell(0.2, 0.04, 2, 1.0, 1.0, 1.0), emb, thes)
        assert result.row()[7] == "" and result.row()[8] == ""


def test_csv_layout(tiny):
    emb, thes, gold = tiny
    out = io.StringIO()
    write_grid_csv(run_grid_search(emb, thes, GridSpec(K=[2, 10]), gold=gold), out)
    lines = out.getvalue().splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert len(lines) == 3
    assert lines[2].startswith("0.2,0.04,10,")

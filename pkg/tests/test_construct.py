import math

import numpy as np
import pytest
from scipy import sparse

from signclust.construct import (
    EmbeddingTable,
    KernelParams,
    LexicalGraphBuilder,
    Thesaurus,
    combine,
    heat_kernel_matrix,
    thesaurus_kernel,
    thesaurus_matrices,
)
from signclust.errors import ConfigError, ConflictError, DimensionMismatch, EmptyVocabulary, ValidationError
from signclust.indexing import IndexConfig, NeighborIndex
from signclust.ingestion import load_embeddings, load_thesaurus


def _table(vectors, words=None):
    vectors = np.asarray(vectors, dtype=float)
    words = words or [f"w{i}" for i in range(len(vectors))]
    return EmbeddingTable(tuple(words), vectors)


class TestEmbeddingTable:
    def test_rejects_duplicates(self):
        with pytest.raises(ConflictError):
            _table([[0.0], [1.0]], ["a", "a"])

    def test_rejects_empty(self):
        with pytest.raises(EmptyVocabulary):
            EmbeddingTable((), np.zeros((0, 2)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            _table([[0.0, np.nan]])

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            EmbeddingTable(("a", "b"), np.zeros((3, 2)))

    def test_subset_keeps_order(self):
        emb = _table([[0.0], [1.0], [2.0]], ["c", "a", "b"])
        assert emb.subset({"b", "c"}).words == ("c", "b")


class TestThesaurus:
    def test_pairs_are_unordered(self):
        thes = Thesaurus(frozenset({("cold", "hot")}), frozenset())
        assert thes.is_synonym("hot", "cold")

    def test_conflict(self):
        with pytest.raises(ConflictError):
            Thesaurus(frozenset({("a", "b")}), frozenset({("b", "a")}))

    def test_self_pair(self):
        with pytest.raises(ValidationError):
            Thesaurus(frozenset({("a", "a")}), frozenset())

    def test_restrict_counts_dropped(self):
        thes = Thesaurus(frozenset({("a", "b"), ("a", "z")}), frozenset({("b", "y")}))
        restricted, syn, ant = thes.restrict(["a", "b"])
        assert restricted.synonyms == {("a", "b")}
        assert (syn, ant) == (1, 1)


class TestKernelParams:
    def test_defaults(self):
        p = KernelParams()
        assert (p.sigma, p.thresh, p.gamma, p.beta, p.beta_ant) == (0.2, 0.04, 1.0, 1.0, 1.0)

    @pytest.mark.parametrize("kwargs", [{'sigma': 0.0}, {'sigma': -1.0}, {'thresh': -0.1},
                                        {'gamma': 0.0, 'beta': 0.0, 'beta_ant': 0.0}, {'beta': -1.0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            KernelParams(**kwargs).validate()


class TestHeatKernel:
    def test_identical_vectors_weight_one(self):
        g = heat_kernel_matrix(_table([[1.0, 2.0], [1.0, 2.0]]), sigma=0.5, thresh=0.0)
        assert g.dense()[0, 1] == pytest.approx(1.0)
        assert g.dense()[0, 0] == 0.0

    @pytest.mark.parametrize("thresh, kept", [(0.36, True), (0.37, False)])
    def test_bandwidth_distance(self, thresh, kept):
        sigma = 0.5
        emb = _table([[0.0, 0.0], [math.sqrt(sigma), 0.0]])
        g = heat_kernel_matrix(emb, sigma=sigma, thresh=thresh)
        if kept:
            assert g.dense()[0, 1] == pytest.approx(math.exp(-1.0))
        else:
            assert g.num_edges == 0

    def test_matches_double_loop(self, rng):
        vectors = rng.standard_normal((10, 3))
        sigma, thresh = 2.0, 0.1
        g = heat_kernel_matrix(_table(vectors), sigma, thresh)
        expected = np.zeros((10, 10))
        for i in range(10):
            for j in range(10):
                if i != j:
                    k = math.exp(-np.sum((vectors[i] - vectors[j]) ** 2) / sigma)
                    expected[i, j] = k if k >= thresh else 0.0
        np.testing.assert_allclose(g.dense(), expected, rtol=1e-12, atol=0)

    def test_entries_in_unit_interval_and_monotone(self, rng):
        emb = _table(rng.standard_normal((25, 4)))
        previous = None
        for thresh in (0.0, 0.05, 0.2, 0.5, 0.9, 1.5):
            g = heat_kernel_matrix(emb, 1.5, thresh)
            W = g.dense()
            assert W.min() >= 0.0 and W.max() <= 1.0
            edges = set((i, j) for i, j, _ in g.edges())
            if previous is not None:
                assert edges <= previous
            previous = edges
        assert previous == set()

    def test_rejects_bad_sigma(self):
        with pytest.raises(ConfigError):
            heat_kernel_matrix(_table([[0.0], [1.0]]), 0.0, 0.1)

    def test_labels_are_words(self):
        g = heat_kernel_matrix(_table([[0.0], [0.1]], ["x", "y"]), 1.0, 0.1)
        assert g.labels == ("x", "y")


class TestThesaurusMatrices:
    def test_single_antonym(self):
        T, T_ant = thesaurus_matrices(Thesaurus(antonyms=frozenset({("hot", "cold")})), ["hot", "cold"])
        np.testing.assert_array_equal(T.toarray(), [[0, -1], [-1, 0]])
        np.testing.assert_array_equal(T_ant.toarray(), T.toarray())

    def test_out_of_vocabulary_pair_ignored(self):
        T, T_ant = thesaurus_matrices(Thesaurus(frozenset({("a", "zzz")})), ["a", "b"])
        assert T.nnz == 0 and T_ant.nnz == 0

    def test_difference_is_synonyms_only(self):
        thes = Thesaurus(frozenset({("a", "b"), ("c", "d")}), frozenset({("a", "c"), ("b", "d")}))
        T, T_ant = thesaurus_matrices(thes, ["a", "b", "c", "d"])
        diff = (T - T_ant).toarray()
        assert set(np.unique(diff).tolist()) <= {0.0, 1.0}
        assert diff[0, 1] == 1.0 and diff[0, 2] == 0.0


class TestCombine:
    @pytest.fixture
    def inputs(self, rng):
        words = [f"w{i}" for i in range(6)]
        emb = _table(rng.standard_normal((6, 2)) * 0.5, words)
        thes = Thesaurus(frozenset({("w0", "w1"), ("w2", "w3")}), frozenset({("w0", "w4"), ("w1", "w5")}))
        Wk = heat_kernel_matrix(emb, 1.0, 0.05)
        T, T_ant = thesaurus_matrices(thes, words)
        K = thesaurus_kernel(emb, T, 1.0)
        return Wk, T, T_ant, K

    def test_identity_configuration(self, inputs):
        Wk, T, T_ant, K = inputs
        g = combine(Wk, T, T_ant, KernelParams(1.0, 0.05, gamma=1.0, beta=0.0, beta_ant=0.0), kernel=K)
        np.testing.assert_allclose(g.dense(), Wk.dense())
        assert g.labels == Wk.labels

    def test_synonyms_only_nonnegative(self, inputs):
        Wk, _, _, _ = inputs
        emb_words = list(Wk.labels)
        T, T_ant = thesaurus_matrices(Thesaurus(frozenset({("w0", "w1"), ("w2", "w3")})), emb_words)
        K = sparse.csr_matrix(np.abs(T.toarray()) * 0.7)
        g = combine(Wk, T, T_ant, KernelParams(gamma=0.0, beta=1.0, beta_ant=0.0), kernel=K)
        np.testing.assert_allclose(g.dense(), T.multiply(K).toarray())
        assert g.dense().min() >= 0.0

    def test_antonym_turns_negative(self):
        emb = _table([[0.0, 0.0], [0.2, 0.0]], ["hot", "cold"])
        Wk = heat_kernel_matrix(emb, 0.2, 0.04)
        k = Wk.dense()[0, 1]
        T, T_ant = thesaurus_matrices(Thesaurus(antonyms=frozenset({("hot", "cold")})), emb.words)
        g = combine(Wk, T, T_ant, KernelParams(gamma=1.0, beta=0.0, beta_ant=2.0),
                    kernel=thesaurus_kernel(emb, T, 0.2))
        assert g.dense()[0, 1] == pytest.approx(-k)

    def test_linear_in_parameters(self, inputs, rng):
        Wk, T, T_ant, K = inputs
        for _ in range(10):
            P = rng.uniform(0.1, 2.0, 3)
            Q = rng.uniform(0.1, 2.0, 3)
            a, b = rng.uniform(0.1, 2.0, 2)
            mix = combine(Wk, T, T_ant, KernelParams(1.0, 0.05, *(a * P + b * Q)), kernel=K).dense()
            left = combine(Wk, T, T_ant, KernelParams(1.0, 0.05, *P), kernel=K).dense()
            right = combine(Wk, T, T_ant, KernelParams(1.0, 0.05, *Q), kernel=K).dense()
            np.testing.assert_allclose(mix, a * left + b * right, rtol=1e-12, atol=1e-12)

    def test_synonym_pairs_never_negative(self, inputs, rng):
        Wk, T, T_ant, K = inputs
        for _ in range(5):
            g = combine(Wk, T, T_ant, KernelParams(1.0, 0.05, *rng.uniform(0.0, 3.0, 3) + 0.01), kernel=K)
            W = g.dense()
            assert W[0, 1] >= 0.0 and W[2, 3] >= 0.0

    def test_shape_mismatch(self, inputs):
        Wk, T, T_ant, _ = inputs
        with pytest.raises(DimensionMismatch):
            combine(Wk, sparse.csr_matrix((3, 3)), T_ant, KernelParams())


class TestLexicalGraphBuilder:
    def test_tiny_fixture_has_one_negative_edge(self, tiny_dir):
        emb = load_embeddings(tiny_dir / "embeddings.txt")
        thes = load_thesaurus(tiny_dir / "thesaurus.tsv")
        graph, rep = LexicalGraphBuilder().build(emb, thes)
        assert rep.negative_edge_count == 1
        assert rep.dropped_synonym_pairs == 1
        assert rep.dropped_antonym_pairs == 0
        assert rep.isolated_vertices == 0
        assert rep.vocab_size == 5
        hot, cold = emb.words.index("hot"), emb.words.index("cold")
        assert graph.dense()[hot, cold] == pytest.approx(-math.exp(-0.09 / 0.2))

    def test_no_thesaurus_is_nonnegative(self, tiny_dir):
        emb = load_embeddings(tiny_dir / "embeddings.txt")
        graph, rep = LexicalGraphBuilder().build(emb)
        assert rep.negative_edge_count == 0
        assert graph.dense().min() >= 0.0

    def test_distant_antonyms_survive_threshold(self):
        emb = _table([[0.0], [3.0]], ["up", "down"])
        thes = Thesaurus(antonyms=frozenset({("up", "down")}))
        graph, rep = LexicalGraphBuilder(KernelParams(sigma=1.0, thresh=0.5)).build(emb, thes)
        assert rep.negative_edge_count == 1
        assert graph.dense()[0, 1] == pytest.approx(-2.0 * math.exp(-9.0))


class TestNeighborIndex:
    def test_requires_build(self):
        with pytest.raises(RuntimeError):
            NeighborIndex().pairs_within(1.0)

    def test_matches_brute_force(self, rng):
        vectors = rng.standard_normal((60, 5))
        index = NeighborIndex(IndexConfig(batch_size=16))
        index.build_index(vectors)
        rows, cols = index.pairs_within(4.0)
        found = set(zip(rows.tolist(), cols.tolist()))
        d2 = ((vectors[:, None, :] - vectors[None, :, :]) ** 2).sum(axis=2)
        expected = {(i, j) for i in range(60) for j in range(i + 1, 60) if d2[i, j] <= 4.0}
        assert expected <= found
        assert all(i < j for i, j in found)
        assert index.get_index_stats()['total_vectors'] == 60

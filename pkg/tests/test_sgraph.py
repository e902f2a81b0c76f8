import itertools

import numpy as np
import pytest
from scipy import sparse

from conftest import random_signed_graph
from signclust.errors import (
    ConflictError,
    DimensionMismatch,
    EmptyClusterError,
    GraphValidationError,
    IsolatedVertexError,
    ZeroVolumeError,
)
from signclust.sgraph import (
    Partition,
    SignedGraph,
    cut,
    links_neg,
    links_pos,
    normalized_signed_laplacian,
    pairwise_quadratic_form,
    quadratic_form,
    signed_degree,
    signed_laplacian,
    sncut,
    sncut_rayleigh,
    vol,
)


def _pair(w):
    return SignedGraph.from_dense(np.array([[0.0, w], [w, 0.0]]))


def _dense_sncut(W, assign, K):
    """Per-cluster evaluation straight from a dense matrix"""
    total = 0.0
    d = np.abs(W).sum(axis=1)
    for j in range(K):
        inside = assign == j
        boundary = np.abs(W[np.ix_(inside, ~inside)]).sum()
        inner = W[np.ix_(inside, inside)]
        total += (boundary + 2.0 * -inner[inner < 0].sum()) / d[inside].sum()
    return total


class TestSignedGraph:
    def test_rejects_asymmetric_weights(self):
        with pytest.raises(GraphValidationError):
            SignedGraph.from_dense(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_rejects_self_loops(self):
        with pytest.raises(GraphValidationError):
            SignedGraph.from_dense(np.array([[1.0, 0.0], [0.0, 0.0]]))

    def test_drops_tiny_weights(self):
        g = SignedGraph.from_dense(np.array([[0.0, 1e-14], [1e-14, 0.0]]))
        assert g.num_edges == 0

    def test_from_edges_applies_symmetric_closure(self):
        g = SignedGraph.from_edges(3, [(0, 1, 2.0), (2, 0, -3.0)])
        assert g.dense()[1, 0] == 2.0
        assert g.dense()[0, 2] == -3.0
        assert list(g.edges()) == [(0, 1, 2.0), (0, 2, -3.0)]

    def test_from_edges_conflicting_duplicate(self):
        with pytest.raises(ConflictError):
            SignedGraph.from_edges(2, [(0, 1, 1.0), (1, 0, 2.0)])

    def test_label_count_must_match(self):
        with pytest.raises(DimensionMismatch):
            SignedGraph.from_dense(np.zeros((2, 2)), ["a"])

    def test_drop_isolated(self):
        g = SignedGraph.from_edges(4, [(0, 2, 1.0)], ["a", "b", "c", "d"])
        pruned, kept = g.drop_isolated()
        assert kept.tolist() == [0, 2]
        assert pruned.labels == ("a", "c")
        assert pruned.num_edges == 1


class TestDegreeAndLaplacian:
    def test_signed_degree_example(self):
        g = SignedGraph.from_edges(3, [(0, 1, 2.0), (0, 2, -3.0)])
        assert signed_degree(g).tolist() == [5.0, 2.0, 3.0]

    def test_signed_degree_empty(self):
        g = SignedGraph(sparse.csr_matrix((4, 4)))
        assert signed_degree(g).tolist() == [0.0] * 4

    def test_signed_degree_matches_dense(self, rng):
        g = random_signed_graph(8, rng)
        np.testing.assert_allclose(signed_degree(g), np.abs(g.dense()) @ np.ones(8))

    @pytest.mark.parametrize("w, expected", [(-1.0, [[1, 1], [1, 1]]), (1.0, [[1, -1], [-1, 1]])])
    def test_two_node_laplacians(self, w, expected):
        g = _pair(w)
        np.testing.assert_allclose(signed_laplacian(g).toarray(), expected)
        L_sym = normalized_signed_laplacian(g).toarray()
        np.testing.assert_allclose(L_sym, expected)
        np.testing.assert_allclose(np.linalg.eigvalsh(L_sym), [0.0, 2.0], atol=1e-12)

    def test_laplacian_is_psd(self, rng):
        g = random_signed_graph(10, rng)
        L = signed_laplacian(g).toarray()
        assert np.linalg.eigvalsh(L).min() >= -1e-10 * np.abs(L).sum(axis=0).max()

    def test_isolated_vertex_rejected(self):
        g = SignedGraph.from_edges(3, [(0, 1, 1.0)], ["a", "b", "lonely"])
        with pytest.raises(IsolatedVertexError) as info:
            normalized_signed_laplacian(g)
        assert info.value.context['nodes'] == ["lonely"]


class TestQuadraticForm:
    def test_examples(self):
        assert quadratic_form(_pair(1.0), [1.0, 1.0]) == pytest.approx(0.0)
        assert quadratic_form(_pair(-1.0), [1.0, 1.0]) == pytest.approx(4.0)

    def test_identity_and_psd(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 30))
            g = random_signed_graph(n, rng)
            x = rng.standard_normal(n)
            lhs = quadratic_form(g, x)
            rhs = pairwise_quadratic_form(g, x)
            assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-12)
            assert lhs >= -1e-9 * (x @ x)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            quadratic_form(_pair(1.0), [1.0, 2.0, 3.0])


class TestLinksAndCuts:
    def test_single_negative_link(self):
        g = _pair(-0.5)
        assert links_neg(g, [0], [1]) == pytest.approx(0.5)
        assert links_pos(g, [0], [1]) == 0.0

    def test_vol_of_everything(self, rng):
        g = random_signed_graph(6, rng)
        assert vol(g, range(6)) == pytest.approx(signed_degree(g).sum())

    def test_cut_splits_into_links(self, rng):
        g = random_signed_graph(6, rng)
        A = [0, 2, 5]
        complement = [1, 3, 4]
        assert cut(g, A) == pytest.approx(links_pos(g, A, complement) + links_neg(g, A, complement))

    def test_boolean_mask(self, rng):
        g = random_signed_graph(6, rng)
        mask = np.array([True, False, True, False, False, True])
        assert cut(g, mask) == pytest.approx(cut(g, [0, 2, 5]))


class TestSncut:
    def test_two_cliques_zero(self):
        g = SignedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)])
        assert sncut(g, Partition(np.array([0, 0, 1, 1]), 2)) == pytest.approx(0.0)

    def test_negative_bridge_example(self):
        g = SignedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 1.0), (0, 2, -0.5)])
        assert sncut(g, Partition(np.array([0, 0, 1, 1]), 2)) == pytest.approx(0.4)

    def test_internal_negative_counts_twice(self):
        g = SignedGraph.from_edges(3, [(0, 1, -1.0), (1, 2, 1.0)])
        # one cluster: no boundary, links⁻ inside = 2 (both orderings), vol = 4
        assert sncut(g, Partition(np.zeros(3, dtype=int), 1)) == pytest.approx(1.0)

    def test_empty_cluster(self):
        g = _pair(1.0)
        with pytest.raises(EmptyClusterError):
            sncut(g, Partition(np.array([0, 0]), 2))

    def test_zero_volume(self):
        g = SignedGraph.from_edges(3, [(0, 1, 1.0)])
        with pytest.raises(ZeroVolumeError):
            sncut(g, Partition(np.array([0, 0, 1]), 2))

    def test_matches_rayleigh_form_on_all_partitions(self, rng):
        for _ in range(5):
            g = random_signed_graph(6, rng)
            W = g.dense()
            for K in (2, 3):
                for assign in itertools.product(range(K), repeat=6):
                    assign = np.array(assign)
                    if len(set(assign.tolist())) < K:
                        continue
                    p = Partition(assign, K)
                    value = sncut(g, p)
                    assert value == pytest.approx(sncut_rayleigh(g, p.indicator()), rel=1e-10)
                    assert value == pytest.approx(_dense_sncut(W, assign, K), rel=1e-10)

    def test_rayleigh_scale_invariance(self, rng):
        g = random_signed_graph(7, rng)
        p = Partition(np.array([0, 1, 2, 0, 1, 2, 0]), 3)
        scales = rng.uniform(-3.0, 3.0, 3)
        scales[np.abs(scales) < 0.1] = 1.0
        assert sncut_rayleigh(g, p.indicator(scales)) == pytest.approx(sncut(g, p), rel=1e-10)

    def test_relabeling_invariance(self, rng):
        g = random_signed_graph(7, rng)
        assign = np.array([0, 1, 2, 0, 1, 2, 0])
        p = Partition(assign, 3)
        relabeled = Partition(np.array([2, 0, 1])[assign], 3)
        assert sncut(g, relabeled) == pytest.approx(sncut(g, p), rel=1e-12)

        order = rng.permutation(7)
        permuted = SignedGraph.from_dense(g.dense()[np.ix_(order, order)])
        assert sncut(permuted, Partition(assign[order], 3)) == pytest.approx(sncut(g, p), rel=1e-12)


class TestPartition:
    def test_from_labels_first_appearance(self):
        p = Partition.from_labels(["x", "y", "x", "z"])
        assert p.assign.tolist() == [0, 1, 0, 2]
        assert p.K == 3

    def test_indicator_amplitudes(self):
        p = Partition(np.array([0, 1, 1]), 2)
        X = p.indicator([2.0, 3.0])
        np.testing.assert_allclose(X, [[2, 0], [0, 3], [0, 3]])

    def test_equality_and_completeness(self):
        assert Partition(np.array([0, 1]), 2) == Partition(np.array([0, 1]), 2)
        assert not Partition(np.array([0, 0]), 2).is_complete()

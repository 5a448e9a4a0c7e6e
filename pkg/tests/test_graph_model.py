"""
Tests for graph construction and queries.

Covers the complete-like family (K_d plus pendant leaves), the d-partite
family and vertex label parsing.
"""
import numpy as np
import pytest

from app.core.exceptions import ConfigError
from app.modules.graph_model.models import GraphFamily, LeafAttachment, VertexId
from app.modules.graph_model.schemas import GraphSpec
from app.modules.graph_model.services import (
    build_complete_like,
    build_d_partite,
    build_from_spec,
    class_totals,
    describe,
    leaf_classes,
    leaf_totals,
    neighbors,
    observed_coordinates,
    parse_vertex,
    uniform_target,
)


class TestCompleteLike:
    """Test the complete-like builder"""

    def test_triangle_without_leaves(self, triangle):
        """Test that d=3 with no leaves is the triangle"""
        assert triangle.n_vertices == 3
        assert triangle.n_edges == 3
        assert triangle.is_triangle
        assert not triangle.has_leaves

    def test_leaf_attached_to_third_vertex(self, triangle_with_leaf):
        """Test that a single leaf hangs off interior vertex 3"""
        g = triangle_with_leaf
        assert g.n_vertices == 4
        assert g.n_edges == 4
        leaf = VertexId.leaf(3, 1)
        assert neighbors(g, leaf) == [VertexId.interior(3)]
        assert neighbors(g, VertexId.interior(3)) == [
            VertexId.interior(1), VertexId.interior(2), leaf,
        ]
        assert not g.is_triangle

    def test_interior_vertices_form_clique(self):
        """Test that every interior pair is an edge"""
        g = build_complete_like(5, [1, 0, 2, 0, 0])
        for i in range(5):
            interior_nbrs = [w for w in g.adjacency[i] if not g.is_leaf[w]]
            assert len(interior_nbrs) == 4
        assert g.n_edges == 10 + 3

    def test_csr_matches_adjacency(self):
        """Test that the CSR arrays reproduce the neighbor lists"""
        g = build_complete_like(4, [0, 1, 0, 1])
        for v in range(g.n_vertices):
            row = g.indices[g.indptr[v]:g.indptr[v + 1]]
            assert tuple(row) == g.adjacency[v]

    def test_d_two_is_accepted(self):
        """Test that the two-vertex graph builds"""
        g = build_complete_like(2, [0, 0])
        assert g.n_edges == 1

    @pytest.mark.parametrize("d,leaves", [(1, [0]), (3, [0, 0]), (3, [0, -1, 0])])
    def test_invalid_inputs(self, d, leaves):
        """Test that bad d or leaf counts are rejected"""
        with pytest.raises(ConfigError):
            build_complete_like(d, leaves)

    def test_uniform_target_zero_on_leaves(self, triangle_with_leaf):
        """Test that the target puts 1/d on interiors and 0 on leaves"""
        np.testing.assert_allclose(uniform_target(triangle_with_leaf), [1 / 3, 1 / 3, 1 / 3, 0.0])

    def test_totals(self, triangle_with_leaf):
        """Test class and leaf totals"""
        weights = np.array([4, 5, 6, 2], dtype=np.int64)
        assert list(class_totals(triangle_with_leaf, weights)) == [4, 5, 6]
        assert list(leaf_totals(triangle_with_leaf, weights)) == [0, 0, 2]
        assert list(observed_coordinates(triangle_with_leaf, weights)) == [4, 5, 6, 2]


class TestDPartite:
    """Test the d-partite builder"""

    def test_no_edge_inside_class(self):
        """Test that members of one class are not adjacent"""
        g = build_d_partite([2, 1, 1], [])
        a, b = g.interior_of_class(1)
        assert b not in g.adjacency[a]
        assert g.n_edges == 2 + 2 + 1

    def test_leaf_attached_to_one_class(self):
        """Test that a leaf can attach to several members of one class"""
        g = build_d_partite([2, 1, 1], [LeafAttachment(((1, 1), (1, 2)))])
        leaf = g.index_of(VertexId.leaf(1, 1))
        assert g.degree(leaf) == 2
        assert leaf_classes(g) == (0,)
        assert g.family == GraphFamily.D_PARTITE

    def test_leaf_across_classes_rejected(self):
        """Test that a leaf touching two classes is rejected"""
        with pytest.raises(ConfigError):
            build_d_partite([1, 1, 1], [LeafAttachment(((1, 1), (2, 1)))])

    def test_unknown_target_rejected(self):
        """Test that a leaf targeting a missing member is rejected"""
        with pytest.raises(ConfigError):
            build_d_partite([1, 1, 1], [LeafAttachment(((1, 2),))])

    def test_needs_three_classes(self):
        """Test that d < 3 is rejected"""
        with pytest.raises(ConfigError):
            build_d_partite([1, 1], [])

    def test_observed_coordinates_aggregate_classes(self):
        """Test that d-partite coordinates are class totals then leaf-class totals"""
        g = build_d_partite([2, 1, 1], [LeafAttachment(((2, 1),))])
        weights = np.array([1, 2, 3, 4, 5], dtype=np.int64)
        assert list(observed_coordinates(g, weights)) == [3, 3, 4, 5]
        assert len(uniform_target(g)) == 4


class TestSpecsAndLabels:
    """Test declarative specs and label parsing"""

    def test_spec_infers_d_from_leaves(self):
        """Test that d defaults to the length of the leaf list"""
        g = build_from_spec(GraphSpec(leaves=[0, 0, 1]))
        assert g.d == 3 and g.n_leaves == 1

    def test_spec_d_partite_shorthand(self):
        """Test the class/members leaf shorthand"""
        spec = GraphSpec.model_validate({
            "family": "d_partite",
            "classes": [2, 1, 1],
            "leaf_attachments": [{"class": 1, "members": [1, 2]}],
        })
        g = build_from_spec(spec)
        assert g.n_leaves == 1

    def test_describe_labels(self, triangle_with_leaf):
        """Test that describe lists labels and neighbors"""
        summary = describe(triangle_with_leaf)
        assert summary["labels"] == ["1", "2", "3", "l1@3"]
        assert summary["neighbors"]["l1@3"] == ["3"]

    @pytest.mark.parametrize("label,expected", [
        ("3", VertexId.interior(3)),
        ("1.2", VertexId.interior(1, 2)),
        ("l1@3", VertexId.leaf(3, 1)),
    ])
    def test_parse_vertex(self, label, expected):
        """Test the three label forms"""
        assert parse_vertex(label) == expected

    def test_parse_vertex_rejects_garbage(self):
        """Test that a malformed label raises ConfigError"""
        with pytest.raises(ConfigError):
            parse_vertex("x7")

    def test_unknown_vertex(self, triangle):
        """Test that querying a foreign vertex raises ConfigError"""
        with pytest.raises(ConfigError):
            neighbors(triangle, VertexId.interior(4))


SMALL_D_PARTITE = [
    ([1, 1, 1], []),
    ([2, 1, 1], [((1, 1), (1, 2))]),
    ([2, 2, 2], [((1, 1),), ((2, 1), (2, 2)), ((3, 2),)]),
    ([3, 2, 1, 1], [((4, 1),), ((1, 1), (1, 3))]),
    ([2, 2, 1, 1, 2], [((5, 1), (5, 2)), ((3, 1),), ((3, 1),)]),
]

SMALL_GRAPHS = [
    lambda: build_complete_like(3, [0, 0, 0]),
    lambda: build_complete_like(3, [0, 0, 1]),
    lambda: build_complete_like(4, [2, 0, 1, 0]),
    lambda: build_complete_like(5, [1, 1, 1, 1, 1]),
] + [
    (lambda sizes=sizes, leaves=leaves: build_d_partite(sizes, [LeafAttachment(t) for t in leaves]))
    for sizes, leaves in SMALL_D_PARTITE
]


class TestStructuralProperties:
    """Test adjacency invariants by exhaustive checks on small graphs"""

    @pytest.mark.parametrize("build", SMALL_GRAPHS)
    def test_neighbors_symmetric(self, build):
        """Test that v in neighbors(w) exactly when w in neighbors(v), with no self-loops"""
        g = build()
        for v in g.vertices:
            for w in neighbors(g, v):
                assert w != v
                assert v in neighbors(g, w)

    @pytest.mark.parametrize("build", SMALL_GRAPHS)
    def test_degree_sum(self, build):
        """Test that degrees sum to twice the number of distinct edges"""
        g = build()
        edges = {frozenset((v, w)) for v in range(g.n_vertices) for w in g.adjacency[v]}
        assert all(len(e) == 2 for e in edges)
        assert g.n_edges == len(edges)
        assert sum(g.degree(v) for v in range(g.n_vertices)) == 2 * len(edges)

    @pytest.mark.parametrize("build", SMALL_GRAPHS)
    def test_uniform_target_is_a_distribution(self, build):
        """Test that the target is nonnegative, zero on leaf coordinates and sums to 1"""
        g = build()
        target = uniform_target(g)
        assert target.sum() == pytest.approx(1.0, abs=1e-12)
        assert (target >= 0).all()
        np.testing.assert_allclose(target[:g.d], 1.0 / g.d)
        assert (target[g.d if g.family == GraphFamily.D_PARTITE else g.n_interior:] == 0).all()

    @pytest.mark.parametrize("sizes,leaves", SMALL_D_PARTITE)
    def test_d_partite_properties(self, sizes, leaves):
        """Test no edge inside a class, every cross-class interior pair adjacent, leaves on one class"""
        g = build_d_partite(sizes, [LeafAttachment(t) for t in leaves])
        assert g.n_vertices <= 12
        assert g.n_interior == sum(sizes)
        assert g.n_leaves == len(leaves)
        interior = [v for v in range(g.n_vertices) if not g.is_leaf[v]]
        for u in interior:
            for w in interior:
                if u == w:
                    continue
                adjacent = w in g.adjacency[u]
                if g.class_of[u] == g.class_of[w]:
                    assert not adjacent
                else:
                    assert adjacent

        expected_targets = {}
        for targets in leaves:
            i = targets[0][0]
            r = sum(1 for key in expected_targets if key.interior_index == i) + 1
            expected_targets[VertexId.leaf(i, r)] = {VertexId.interior(c, m) for c, m in targets}
        for leaf in (v for v in range(g.n_vertices) if g.is_leaf[v]):
            nbrs = g.adjacency[leaf]
            assert nbrs
            assert not any(g.is_leaf[w] for w in nbrs)
            assert {int(g.class_of[w]) for w in nbrs} == {int(g.class_of[leaf])}
            assert set(neighbors(g, g.vertices[leaf])) == expected_targets[g.vertices[leaf]]

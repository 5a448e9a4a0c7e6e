"""Construction, validation and queries for the walk's graphs"""
import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from app.core.exceptions import ConfigError
from app.modules.graph_model.schemas import GraphSpec
from app.modules.graph_model.models import (
    GraphFamily,
    GraphTopology,
    LeafAttachment,
    VertexId,
)

logger = logging.getLogger(__name__)


def _finalize(
    family: GraphFamily,
    d: int,
    class_sizes: Tuple[int, ...],
    leaf_counts: Tuple[int, ...],
    vertices: List[VertexId],
    adjacency: List[List[int]],
) -> GraphTopology:
    """Freeze vertex and neighbor lists into a GraphTopology"""
    neighbor_lists = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
    degrees = np.array([len(nbrs) for nbrs in neighbor_lists], dtype=np.int64)
    indptr = np.zeros(len(vertices) + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    indices = np.array([w for nbrs in neighbor_lists for w in nbrs], dtype=np.int64)
    class_of = np.array([v.interior_index - 1 for v in vertices], dtype=np.int64)
    is_leaf = np.array([v.is_leaf for v in vertices], dtype=bool)
    for array in (indptr, indices, class_of, is_leaf):
        array.setflags(write=False)

    return GraphTopology(
        family=family,
        d=d,
        class_sizes=class_sizes,
        leaf_counts=leaf_counts,
        vertices=tuple(vertices),
        adjacency=neighbor_lists,
        indptr=indptr,
        indices=indices,
        class_of=class_of,
        is_leaf=is_leaf,
        _index={v: idx for idx, v in enumerate(vertices)},
    )


def build_complete_like(d: int, leaf_counts: Sequence[int]) -> GraphTopology:
    """
    Build the complete-like graph G_d.

    The d interior vertices form a clique and interior vertex i carries
    ``leaf_counts[i-1]`` pendant leaves. With no leaves the result is K_d.
    d = 2 is accepted for the two-vertex experiments even though the
    convergence theorems need d >= 3.

    Raises:
        ConfigError: d < 2, negative leaf counts, or a length mismatch
    """
    if d < 2:
        raise ConfigError(f"complete-like graph needs d >= 2 interior vertices, got d={d}")
    leaf_counts = tuple(int(r) for r in leaf_counts)
    if len(leaf_counts) != d:
        raise ConfigError(f"leaf_counts has length {len(leaf_counts)}, expected d={d}")
    if any(r < 0 for r in leaf_counts):
        raise ConfigError(f"leaf counts must be >= 0, got {list(leaf_counts)}")

    vertices = [VertexId.interior(i) for i in range(1, d + 1)]
    adjacency: List[List[int]] = [[j for j in range(d) if j != i] for i in range(d)]
    for i, r_i in enumerate(leaf_counts, start=1):
        for r in range(1, r_i + 1):
            leaf_idx = len(vertices)
            vertices.append(VertexId.leaf(i, r))
            adjacency.append([i - 1])
            adjacency[i - 1].append(leaf_idx)

    if d == 2:
        logger.debug("Built d=2 complete-like graph; outside the d >= 3 theorems")
    return _finalize(
        GraphFamily.COMPLETE_LIKE, d, tuple([1] * d), leaf_counts, vertices, adjacency
    )


def build_d_partite(
    class_sizes: Sequence[int],
    leaf_attachments: Sequence[LeafAttachment],
) -> GraphTopology:
    """
    Build a d-partite graph with leaves.

    Properties enforced:
    (i) no edge inside a class; (ii) every cross-class interior pair is an
    edge; (iii) each leaf is adjacent to vertices of exactly one class.

    Args:
        class_sizes: |V_1|, ..., |V_d|, each >= 1, with d >= 3
        leaf_attachments: one entry per leaf listing its (class, member) targets

    Raises:
        ConfigError: empty class, d < 3, or an attachment breaking property (iii)
    """
    class_sizes = tuple(int(s) for s in class_sizes)
    d = len(class_sizes)
    if d < 3:
        raise ConfigError(f"d-partite graph needs d >= 3 classes, got {d}")
    if any(s < 1 for s in class_sizes):
        raise ConfigError(f"every class needs at least one vertex, got sizes {list(class_sizes)}")

    vertices: List[VertexId] = []
    member_index: Dict[Tuple[int, int], int] = {}
    for i, size in enumerate(class_sizes, start=1):
        for j in range(1, size + 1):
            member_index[(i, j)] = len(vertices)
            vertices.append(VertexId.interior(i, j))

    adjacency: List[List[int]] = [
        [w for w, other in enumerate(vertices) if other.interior_index != v.interior_index]
        for v in vertices
    ]

    per_class: Dict[int, List[Tuple[int, ...]]] = {i: [] for i in range(1, d + 1)}
    for n, attachment in enumerate(leaf_attachments, start=1):
        targets = tuple((int(c), int(m)) for c, m in attachment.targets)
        if not targets:
            raise ConfigError(f"leaf #{n} has no attachment targets")
        if len(set(targets)) != len(targets):
            raise ConfigError(f"leaf #{n} lists a target more than once: {list(targets)}")
        classes = {c for c, _ in targets}
        if len(classes) != 1:
            raise ConfigError(
                f"leaf #{n} attaches to classes {sorted(classes)}; "
                f"a leaf must attach to vertices of exactly one class"
            )
        for target in targets:
            if target not in member_index:
                raise ConfigError(f"leaf #{n} targets unknown vertex {target[0]}.{target[1]}")
        per_class[classes.pop()].append(tuple(member_index[t] for t in targets))

    leaf_counts = tuple(len(per_class[i]) for i in range(1, d + 1))
    for i in range(1, d + 1):
        for r, target_indices in enumerate(per_class[i], start=1):
            leaf_idx = len(vertices)
            vertices.append(VertexId.leaf(i, r))
            adjacency.append(list(target_indices))
            for x in target_indices:
                adjacency[x].append(leaf_idx)

    return _finalize(GraphFamily.D_PARTITE, d, class_sizes, leaf_counts, vertices, adjacency)


def neighbors(g: GraphTopology, v: VertexId) -> List[VertexId]:
    """
    Neighbors of ``v``: interiors ascending, then leaves ascending.

    Raises:
        ConfigError: v is not a vertex of g
    """
    return [g.vertices[w] for w in g.adjacency[g.index_of(v)]]


def leaf_classes(g: GraphTopology) -> Tuple[int, ...]:
    """0-based classes with at least one leaf, ascending"""
    return tuple(i for i, r in enumerate(g.leaf_counts) if r > 0)


def uniform_target(g: GraphTopology) -> np.ndarray:
    """
    Target occupation measure.

    Complete-like: length |V|, 1/d on interiors, 0 on leaves. d-partite: the
    class-aggregated layout of ``observed_coordinates`` (1/d per class, then
    0 per nonempty leaf class).
    """
    if g.family == GraphFamily.COMPLETE_LIKE:
        target = np.where(g.is_leaf, 0.0, 1.0 / g.d)
    else:
        target = np.concatenate([np.full(g.d, 1.0 / g.d), np.zeros(len(leaf_classes(g)))])
    return target


def class_totals(g: GraphTopology, weights: np.ndarray) -> np.ndarray:
    """Z'(t, i): total interior weight of each class (each interior vertex for complete-like)"""
    totals = np.zeros(g.d, dtype=np.int64)
    interior = ~g.is_leaf
    np.add.at(totals, g.class_of[interior], weights[interior])
    return totals


def leaf_totals(g: GraphTopology, weights: np.ndarray) -> np.ndarray:
    """L(t, i): total weight of the leaves attached to interior vertex (class) i"""
    totals = np.zeros(g.d, dtype=np.int64)
    np.add.at(totals, g.class_of[g.is_leaf], weights[g.is_leaf])
    return totals


def observed_coordinates(g: GraphTopology, weights: np.ndarray) -> np.ndarray:
    """
    Weight coordinates compared against ``uniform_target``.

    Complete-like graphs use every vertex; d-partite graphs use class totals
    followed by leaf-class totals for classes that have leaves.
    """
    if g.family == GraphFamily.COMPLETE_LIKE:
        return np.asarray(weights, dtype=np.int64)
    leaves = leaf_totals(g, weights)
    return np.concatenate([class_totals(g, weights), leaves[list(leaf_classes(g))]])


def describe(g: GraphTopology) -> Dict[str, Any]:
    """Summary of a topology for reports and API responses"""
    return {
        "family": g.family.value,
        "d": g.d,
        "class_sizes": list(g.class_sizes),
        "leaf_counts": list(g.leaf_counts),
        "n_vertices": g.n_vertices,
        "n_edges": g.n_edges,
        "labels": [v.label for v in g.vertices],
        "neighbors": {g.label(i): [g.label(w) for w in nbrs] for i, nbrs in enumerate(g.adjacency)},
        "uniform_target": [float(x) for x in uniform_target(g)],
    }


def build_from_spec(spec: GraphSpec) -> GraphTopology:
    """Build a topology from its declarative description"""
    if spec.family == GraphFamily.COMPLETE_LIKE:
        return build_complete_like(spec.d, spec.leaves)
    attachments = [LeafAttachment(tuple(tuple(t) for t in a.targets)) for a in spec.leaf_attachments]
    return build_d_partite(spec.classes, attachments)


def parse_vertex(label: str | int) -> VertexId:
    """
    Parse a vertex label: ``"3"`` (interior), ``"1.2"`` (class 1, member 2)
    or ``"l1@3"`` (leaf 1 of interior/class 3).

    Raises:
        ConfigError: malformed label
    """
    text = str(label).strip()
    try:
        if text.startswith("l"):
            leaf, _, owner = text[1:].partition("@")
            return VertexId.leaf(int(owner), int(leaf))
        if "." in text:
            cls, _, member = text.partition(".")
            return VertexId.interior(int(cls), int(member))
        return VertexId.interior(int(text))
    except ValueError:
        raise ConfigError(f"Cannot parse vertex label {label!r}; use '3', '1.2' or 'l1@3'")

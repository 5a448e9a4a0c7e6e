"""Graph topology models"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from app.core.exceptions import ConfigError


class GraphFamily(str, Enum):
    """Graph families the walk runs on"""
    COMPLETE_LIKE = "complete_like"
    D_PARTITE = "d_partite"


class VertexKind(str, Enum):
    """Interior vertex or leaf"""
    INTERIOR = "interior"
    LEAF = "leaf"


@dataclass(frozen=True, order=True)
class VertexId:
    """
    Identity of a vertex.

    ``interior_index`` is 1-based. For a complete-like leaf it is the
    interior vertex the leaf hangs on; for d-partite vertices (interior or
    leaf) it is the class index. ``leaf_index`` numbers leaves within their
    attachment group, ``class_member_index`` numbers members of a d-partite
    class.
    """
    kind: VertexKind
    interior_index: int
    leaf_index: Optional[int] = None
    class_member_index: Optional[int] = None

    @classmethod
    def interior(cls, i: int, member: Optional[int] = None) -> "VertexId":
        return cls(VertexKind.INTERIOR, i, None, member)

    @classmethod
    def leaf(cls, i: int, r: int) -> "VertexId":
        return cls(VertexKind.LEAF, i, r, None)

    @property
    def is_leaf(self) -> bool:
        return self.kind == VertexKind.LEAF

    @property
    def label(self) -> str:
        if self.is_leaf:
            return f"l{self.leaf_index}@{self.interior_index}"
        if self.class_member_index is not None:
            return f"{self.interior_index}.{self.class_member_index}"
        return str(self.interior_index)


@dataclass(frozen=True)
class LeafAttachment:
    """Interior vertices a d-partite leaf is adjacent to, as 1-based (class, member) pairs"""
    targets: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class GraphTopology:
    """
    Immutable arena of the walk.

    Vertices are indexed contiguously: interiors first (class-major for
    d-partite graphs), then leaves grouped by attachment, ascending.
    ``indptr``/``indices`` hold the neighbor lists in CSR form for the
    stepping kernels; ``adjacency`` holds the same lists as tuples.
    """
    family: GraphFamily
    d: int
    class_sizes: Tuple[int, ...]
    leaf_counts: Tuple[int, ...]
    vertices: Tuple[VertexId, ...]
    adjacency: Tuple[Tuple[int, ...], ...]
    indptr: np.ndarray
    indices: np.ndarray
    class_of: np.ndarray
    is_leaf: np.ndarray
    _index: Dict[VertexId, int] = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_interior(self) -> int:
        return int(sum(self.class_sizes))

    @property
    def n_leaves(self) -> int:
        return int(sum(self.leaf_counts))

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @property
    def has_leaves(self) -> bool:
        return self.n_leaves > 0

    @property
    def is_triangle(self) -> bool:
        return self.family == GraphFamily.COMPLETE_LIKE and self.d == 3 and not self.has_leaves

    def index_of(self, vertex: VertexId) -> int:
        try:
            return self._index[vertex]
        except KeyError:
            raise ConfigError(f"Vertex {vertex.label} does not belong to this graph")

    def label(self, index: int) -> str:
        return self.vertices[index].label

    def degree(self, index: int) -> int:
        return len(self.adjacency[index])

    def interior_of_class(self, i: int) -> Tuple[int, ...]:
        """Indices of interior vertices in class ``i`` (1-based)"""
        return tuple(
            idx for idx, v in enumerate(self.vertices)
            if not v.is_leaf and v.interior_index == i
        )

"""Graph specification schemas"""
from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, List, Optional, Tuple

from app.modules.graph_model.models import GraphFamily


class LeafAttachmentSpec(BaseModel):
    """
    One d-partite leaf.

    Either ``targets`` as [[class, member], ...] or the shorthand
    ``{"class": i, "members": [...]}``; both are 1-based.
    """
    model_config = ConfigDict(populate_by_name=True)

    targets: Optional[List[Tuple[int, int]]] = None
    class_index: Optional[int] = Field(None, alias="class", ge=1)
    members: Optional[List[int]] = None

    @model_validator(mode="after")
    def _normalize(self) -> "LeafAttachmentSpec":
        if self.targets is None:
            if self.class_index is None or not self.members:
                raise ValueError("leaf attachment needs 'targets' or 'class' with 'members'")
            self.targets = [(self.class_index, m) for m in self.members]
        return self


class GraphSpec(BaseModel):
    """
    Declarative graph description.

    ``{"family": "complete_like", "d": 3, "leaves": [0, 0, 1]}`` or
    ``{"family": "d_partite", "classes": [2, 1, 1], "leaf_attachments": [...]}``
    """
    family: GraphFamily = GraphFamily.COMPLETE_LIKE
    d: Optional[int] = Field(None, description="Number of interior vertices (complete-like)")
    leaves: Optional[List[int]] = Field(None, description="Leaf count per interior vertex")
    classes: Optional[List[int]] = Field(None, description="Class sizes (d-partite)")
    leaf_attachments: List[LeafAttachmentSpec] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_family_fields(self) -> "GraphSpec":
        if self.family == GraphFamily.COMPLETE_LIKE:
            if self.d is None:
                if self.leaves is None:
                    raise ValueError("complete_like graph needs 'd' or 'leaves'")
                self.d = len(self.leaves)
            if self.leaves is None:
                self.leaves = [0] * self.d
        elif self.classes is None:
            raise ValueError("d_partite graph needs 'classes'")
        return self


class GraphDescription(BaseModel):
    """Validated graph returned by the API"""
    family: str
    d: int
    class_sizes: List[int]
    leaf_counts: List[int]
    n_vertices: int
    n_edges: int
    labels: List[str]
    neighbors: Dict[str, List[str]]
    uniform_target: List[float]

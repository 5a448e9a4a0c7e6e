# Graph model module
from .models import GraphFamily, GraphTopology, LeafAttachment, VertexId, VertexKind
from .schemas import GraphSpec, LeafAttachmentSpec, GraphDescription

__all__ = [
    "GraphFamily",
    "GraphTopology",
    "LeafAttachment",
    "VertexId",
    "VertexKind",
    "GraphSpec",
    "LeafAttachmentSpec",
    "GraphDescription",
]

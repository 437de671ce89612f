import hashlib
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from uv_path_graphs.src.cycle_space import CycleSet, PlaneEmbedding, build_embedding, cycle_set
from uv_path_graphs.src.errors import GraphConstructionError, InvalidCycleError
from uv_path_graphs.src.graph_core import Graph, _validation_message, build_graph, edge_set, iter_bits

SCHEMA_VERSION = 1

Verdict = Literal["pass", "fail", "witness"]
MetricValue = Union[bool, int, float, str, None]


################################################
class GraphDocument(BaseModel):
    """Graph file: vertex count, edge list (edge k is the k-th pair) and optional labels"""
    n: int = Field(..., ge=0, description="Number of vertices, indexed 0..n-1")
    edges: List[Tuple[int, int]] = Field(default_factory=list, description="Edge list; the position is the edge index")
    labels: Optional[List[str]] = Field(None, description="Display label per vertex")

    @classmethod
    def from_graph(cls, G: Graph) -> "GraphDocument":
        return cls(n=G.vertex_count, edges=list(G.edges), labels=list(G.labels) or None)

    def to_graph(self) -> Graph:
        return build_graph(self.n, self.edges, self.labels)


class CycleSetDocument(BaseModel):
    """Cycle set file: each cycle as a list of edge indices"""
    cycles: List[List[int]] = Field(default_factory=list)

    @classmethod
    def from_cycle_set(cls, C: CycleSet) -> "CycleSetDocument":
        return cls(cycles=[c.edge_indices() for c in C.cycles])

    def to_cycle_set(self, G: Graph) -> CycleSet:
        return cycle_set(G, [edge_set(G, edges).mask for edges in self.cycles])


class EmbeddingDocument(BaseModel):
    """Rotation system file: clockwise incident edge indices per vertex, plus the outer face"""
    rotation: List[List[int]]
    outer: Optional[Tuple[int, Literal["fwd", "rev"]]] = Field(
        None,
        description="An outer-face edge and its traversal direction; default is the face of the first directed edge"
    )

    @classmethod
    def from_embedding(cls, emb: PlaneEmbedding) -> "EmbeddingDocument":
        return cls(rotation=[list(order) for order in emb.rotation], outer=emb.outer)

    def to_embedding(self, G: Graph) -> PlaneEmbedding:
        return build_embedding(G, self.rotation, self.outer)


def load_graph(text: str) -> Graph:
    try:
        document = GraphDocument.model_validate_json(text)
    except ValidationError as e:
        raise GraphConstructionError(_validation_message(e)) from e
    return document.to_graph()


def load_cycle_set(text: str, G: Graph) -> CycleSet:
    try:
        document = CycleSetDocument.model_validate_json(text)
    except ValidationError as e:
        raise InvalidCycleError(_validation_message(e)) from e
    return document.to_cycle_set(G)


def graph_hash(G: Graph) -> str:
    """sha256 of the canonical graph document"""
    return hashlib.sha256(GraphDocument.from_graph(G).model_dump_json().encode()).hexdigest()


def cycle_set_hash(C: CycleSet) -> str:
    """sha256 of the sorted cycle masks, so the hash ignores member order"""
    canonical = ",".join(str(mask) for mask in sorted(C.masks))
    return hashlib.sha256(canonical.encode()).hexdigest()


def edges_of(mask: int) -> List[int]:
    return list(iter_bits(mask))


################################################
class PathsOutput(BaseModel):
    u: int
    v: int
    count: int
    paths: List[List[int]]


class PathGraphEdge(BaseModel):
    """One path-graph edge and the edge indices of its exchange cycle"""
    source: int = Field(..., description="Index of the first path")
    target: int = Field(..., description="Index of the second path")
    cycle: List[int] = Field(..., description="Exchange cycle S Δ T as edge indices")


class PathGraphOutput(BaseModel):
    u: int
    v: int
    restricted: bool
    paths: List[List[int]]
    edges: List[PathGraphEdge]
    restricted_out: List[PathGraphEdge] = Field(default_factory=list)
    components: int


class ComponentsOutput(BaseModel):
    count: int
    connected: bool
    components: List[List[List[int]]] = Field(..., description="Per component, its paths as vertex sequences")


class DiameterOutput(BaseModel):
    diameter: Union[int, Literal["disconnected"]]
    distance_uv: int = Field(..., description="d_G(u, v)")
    bound: int = Field(..., description="2 d_G(u, v)")


class RouteOutput(BaseModel):
    walk: List[List[int]]
    length: int
    bound: int


class SpanCheckOutput(BaseModel):
    spans: bool
    rank: int
    dimension: int


class CyclesOutput(BaseModel):
    mode: Literal["all", "edge", "vertex", "faces"]
    count: int
    cycles: List[List[int]]


class WitnessDocument(BaseModel):
    """Per unicycle: the extra edge and the two cycles whose sum is sigma"""
    unicycle: List[int]
    e: int
    alpha: List[int]
    beta: List[int]
    connector: List[int] = Field(..., description="Vertex sequence of alpha ∩ beta")


class DeltaStarOutput(BaseModel):
    sigma: List[int]
    holds: bool
    witnesses: List[WitnessDocument] = Field(default_factory=list)
    failing_unicycle: Optional[List[int]] = None


class ClosureOutput(BaseModel):
    closure: List[List[int]]
    added: List[List[int]]
    all_cycles: int
    dense: bool


class InterpolateOutput(BaseModel):
    S: List[int]
    Q: List[int]
    T: List[int]
    steps: int
    cycles: List[List[int]] = Field(..., description="Exchange cycles of the steps")


################################################
class InstanceDescriptor(BaseModel):
    """Identifies the instance a report is about"""
    graph_hash: str
    n: int
    m: int
    u: Optional[int] = None
    v: Optional[int] = None
    cycle_set_hash: Optional[str] = None
    source: str = Field("", description="Corpus the instance came from")


class Counterexample(BaseModel):
    """Everything needed to replay a failing check"""
    graph: GraphDocument
    cycles: Optional[CycleSetDocument] = None
    paths: List[List[int]] = Field(default_factory=list)
    note: str = ""


class TheoremReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    theorem: str
    index: int = Field(..., ge=0, description="Position of the instance in the corpus")
    instance: InstanceDescriptor
    verdict: Verdict
    metrics: Dict[str, MetricValue] = Field(default_factory=dict)
    counterexample: Optional[Counterexample] = None
    duration: float = Field(0.0, ge=0.0, description="Seconds spent on the check")

    @model_validator(mode="after")
    def validate_counterexample(self):
        if self.verdict == "fail" and self.counterexample is None:
            raise ValueError(f"{self.theorem}: a fail verdict must carry a counterexample")
        return self


class CorpusSpec(BaseModel):
    """How a corpus was generated"""
    kind: Literal["exhaustive", "random", "plane", "fixture"]
    max_n: Optional[int] = None
    m: Optional[int] = Field(None, description="Edge count for random graphs, when fixed")
    seed: Optional[int] = None
    count: Optional[int] = None


class SuiteReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    seed: int
    theorems: List[str]
    corpora: Dict[str, CorpusSpec] = Field(default_factory=dict)
    reports: List[TheoremReport] = Field(default_factory=list)
    skipped: int = Field(0, ge=0, description="Instances skipped by an enumeration guard")

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.reports)

    def summary(self) -> Dict[str, Dict[str, int]]:
        counts: Dict[str, Dict[str, int]] = {}
        for r in self.reports:
            per = counts.setdefault(r.theorem, {"pass": 0, "fail": 0, "witness": 0})
            per[r.verdict] += 1
        return counts


class TightnessResult(BaseModel):
    """Best (G, u, v) found when maximising the path-graph diameter against 2 d_G(u, v)"""
    schema_version: int = SCHEMA_VERSION
    max_n: int
    graphs_scanned: int
    pairs_scanned: int
    diameter: Optional[int] = None
    distance: Optional[int] = None
    tight: bool = Field(False, description="diameter = 2 d_G(u, v) with d_G(u, v) >= 2")
    graph: Optional[GraphDocument] = None
    u: Optional[int] = None
    v: Optional[int] = None
    S: Optional[List[int]] = None
    T: Optional[List[int]] = None

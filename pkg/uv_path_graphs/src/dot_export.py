"""Graphviz DOT text for path graphs."""
import logging
from typing import List

from pydantic import BaseModel

from uv_path_graphs.src.graph_core import iter_bits
from uv_path_graphs.src.path_space import PathGraph

# Set up a logger for the module
logger = logging.getLogger(__name__)


class DotOptions(BaseModel):
    """
    Purpose
    -------
    Rendering switches for `export_dot`.

    Attributes
    ----------
    show_restricted : bool
        Also draw the adjacencies the restriction removed, dashed.
    edge_labels : bool
        Label every edge with the edge indices of its exchange cycle.
    name : str
        Graph name in the `graph <name> { ... }` header.
    """

    show_restricted: bool = False
    edge_labels: bool = False
    name: str = "path_graph"


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edge_line(PG: PathGraph, i: int, j: int, mask: int, options: DotOptions, dashed: bool) -> str:
    attrs = []
    if options.edge_labels:
        attrs.append("label=" + _quote(",".join(str(k) for k in iter_bits(mask))))
    if dashed:
        attrs.append("style=dashed")
    suffix = f" [{', '.join(attrs)}]" if attrs else ""
    return f"  {_quote(PG.paths[i].label())} -- {_quote(PG.paths[j].label())}{suffix};"


def export_dot(PG: PathGraph, options: DotOptions = DotOptions()) -> str:
    """
    Deterministic DOT text: one node per path labelled by its vertex sequence
    (vertex labels when the graph has them), edges in stored order.
    """
    lines: List[str] = [f"graph {_quote(options.name)} {{"]
    lines.extend(f"  {_quote(P.label())};" for P in PG.paths)
    lines.extend(_edge_line(PG, i, j, mask, options, dashed=False) for i, j, mask in PG.edges)
    if options.show_restricted:
        lines.extend(_edge_line(PG, i, j, mask, options, dashed=True) for i, j, mask in PG.restricted_out)
    lines.append("}")
    logger.debug("DOT export: %d nodes, %d edges", PG.size, len(PG.edges))
    return "\n".join(lines) + "\n"

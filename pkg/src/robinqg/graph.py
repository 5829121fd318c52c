"""Compact metric graphs with per-vertex Robin, standard or Dirichlet conditions."""

from __future__ import annotations

import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

ROBIN = "robin"
STANDARD = "standard"
DIRICHLET = "dirichlet"


class GraphError(ValueError):
    """Raised when a graph description is malformed or violates an invariant."""


@dataclass(frozen=True)
class VertexCondition:
    kind: str
    alpha: complex = 0j

    def __post_init__(self):
        if self.kind not in (ROBIN, STANDARD, DIRICHLET):
            raise GraphError(f"unknown vertex condition {self.kind!r}")
        object.__setattr__(self, "alpha", complex(self.alpha))
        if self.kind != ROBIN and self.alpha != 0:
            raise GraphError(f"{self.kind} condition carries no coupling")

    @classmethod
    def robin(cls, alpha) -> "VertexCondition":
        return cls(ROBIN, complex(alpha))

    @classmethod
    def standard(cls) -> "VertexCondition":
        return cls(STANDARD)

    @classmethod
    def dirichlet(cls) -> "VertexCondition":
        return cls(DIRICHLET)

    @property
    def coupling(self) -> complex:
        """Coupling entering the vertex row; standard vertices behave as Robin with 0."""
        return self.alpha if self.kind == ROBIN else 0j


@dataclass(frozen=True)
class Edge:
    u: str
    v: str
    length: float

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class GraphMetrics:
    """Derived lengths and degrees.

    ``min_robin_degree`` and ``robin_min_lengths`` are ``None``/empty when the
    graph has no Robin vertices.
    """

    min_length: float
    total_length: float
    min_robin_degree: int | None
    degrees: dict[str, int]
    robin_min_lengths: dict[str, float]


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """A finite metric graph.

    Vertices keep their input order; the Robin subset, in that order, fixes the
    row/column convention of every DtN matrix (Robin first, then standard).
    Construction does not enforce validity so that :func:`validate` can report
    every problem at once; numerical routines call :meth:`check`.
    """

    vertices: tuple[tuple[str, VertexCondition], ...]
    edges: tuple[Edge, ...]
    _index: dict[str, int] = field(init=False, repr=False)

    def __init__(self, vertices: Iterable, edges: Iterable):
        vs = []
        for item in vertices:
            vid, cond = item
            if not isinstance(cond, VertexCondition):
                cond = _parse_condition(cond)
            vs.append((str(vid), cond))
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                u, v, length = e
                e = Edge(str(u), str(v), float(length))
            es.append(e)
        object.__setattr__(self, "vertices", tuple(vs))
        object.__setattr__(self, "edges", tuple(es))
        object.__setattr__(self, "_index", {vid: i for i, (vid, _) in enumerate(vs)})

    def __eq__(self, other):
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"MetricGraph(n={len(self.vertices)}, m={len(self.edges)}, k={len(self.robin)})"

    # -- basic accessors -------------------------------------------------

    @property
    def vertex_ids(self) -> list[str]:
        return [vid for vid, _ in self.vertices]

    def condition(self, vid: str) -> VertexCondition:
        return self.vertices[self._index[vid]][1]

    @cached_property
    def degree(self) -> dict[str, int]:
        deg = {vid: 0 for vid, _ in self.vertices}
        for e in self.edges:
            for w in (e.u, e.v):
                if w in deg:
                    deg[w] += 1
        return deg

    @cached_property
    def robin(self) -> list[str]:
        return [vid for vid, c in self.vertices if c.kind == ROBIN]

    @cached_property
    def standard(self) -> list[str]:
        return [vid for vid, c in self.vertices if c.kind == STANDARD]

    @cached_property
    def dirichlet(self) -> list[str]:
        return [vid for vid, c in self.vertices if c.kind == DIRICHLET]

    @property
    def alpha(self) -> list[complex]:
        """Robin couplings in Robin-vertex order."""
        return [self.condition(v).alpha for v in self.robin]

    @cached_property
    def min_length(self) -> float:
        return min(e.length for e in self.edges)

    @cached_property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    @cached_property
    def incidence(self) -> dict[str, list[tuple[int, int]]]:
        """vertex id -> list of (edge index, end) with end 0 at ``u`` (x=0), 1 at ``v`` (x=length)."""
        inc: dict[str, list[tuple[int, int]]] = {vid: [] for vid, _ in self.vertices}
        for p, e in enumerate(self.edges):
            inc[e.u].append((p, 0))
            inc[e.v].append((p, 1))
        return inc

    @property
    def is_simple(self) -> bool:
        seen = set()
        for e in self.edges:
            if e.is_loop:
                return False
            key = frozenset((e.u, e.v))
            if key in seen:
                return False
            seen.add(key)
        return True

    # -- derived graphs --------------------------------------------------

    def with_alpha(self, alpha) -> "MetricGraph":
        """Return a copy with new Robin couplings.

        ``alpha`` is a scalar (applied to every Robin vertex), a sequence in
        Robin order, or a mapping from vertex id to coupling; a mapping may
        also promote standard vertices to Robin.
        """
        if isinstance(alpha, Mapping):
            unknown = set(alpha) - set(self._index)
            if unknown:
                raise GraphError(f"unknown vertex id(s) in alpha override: {sorted(unknown)}")
            new = {k: complex(a) for k, a in alpha.items()}
        elif isinstance(alpha, (int, float, complex)):
            new = {v: complex(alpha) for v in self.robin}
        else:
            alpha = list(alpha)
            if len(alpha) != len(self.robin):
                raise GraphError(f"expected {len(self.robin)} Robin couplings, got {len(alpha)}")
            new = {v: complex(a) for v, a in zip(self.robin, alpha)}
        vs = []
        for vid, cond in self.vertices:
            if vid in new:
                if cond.kind == DIRICHLET:
                    raise GraphError(f"vertex {vid!r} is Dirichlet; cannot assign a coupling")
                cond = VertexCondition.robin(new[vid])
            vs.append((vid, cond))
        return MetricGraph(vs, self.edges)

    def with_conditions(self, mapping: Mapping[str, VertexCondition]) -> "MetricGraph":
        vs = [(vid, mapping.get(vid, cond)) for vid, cond in self.vertices]
        return MetricGraph(vs, self.edges)

    def robin_as_dirichlet(self) -> "MetricGraph":
        return self.with_conditions({v: VertexCondition.dirichlet() for v in self.robin})

    def all_dirichlet(self) -> "MetricGraph":
        return self.with_conditions({v: VertexCondition.dirichlet() for v in self.vertex_ids})

    def check(self) -> "MetricGraph":
        report = validate(self)
        if not report.valid:
            raise GraphError("; ".join(report.violations))
        return self

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        verts = []
        for vid, c in self.vertices:
            if c.kind == ROBIN:
                cond = {"robin": [c.alpha.real, c.alpha.imag]}
            else:
                cond = c.kind
            verts.append({"id": vid, "condition": cond})
        edges = [{"from": e.u, "to": e.v, "length": e.length} for e in self.edges]
        return {"vertices": verts, "edges": edges}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data: Mapping) -> "MetricGraph":
        _reject_unknown(data, {"vertices", "edges"}, "graph")
        if "vertices" not in data or "edges" not in data:
            raise GraphError("graph needs 'vertices' and 'edges'")
        verts = []
        for item in data["vertices"]:
            if not isinstance(item, Mapping):
                raise GraphError("vertex entries must be objects")
            _reject_unknown(item, {"id", "condition"}, "vertex")
            if "id" not in item:
                raise GraphError("vertex without id")
            verts.append((str(item["id"]), _parse_condition(item.get("condition", STANDARD))))
        edges = []
        for item in data["edges"]:
            if not isinstance(item, Mapping):
                raise GraphError("edge entries must be objects")
            _reject_unknown(item, {"from", "to", "length"}, "edge")
            try:
                u, v, length = item["from"], item["to"], item["length"]
            except KeyError as exc:
                raise GraphError(f"edge missing key {exc}") from None
            if isinstance(length, bool) or not isinstance(length, (int, float)):
                raise GraphError(f"edge length must be a number, got {length!r}")
            if not math.isfinite(length):
                raise GraphError("edge length must be finite")
            edges.append(Edge(str(u), str(v), float(length)))
        return cls(verts, edges)

    @classmethod
    def from_json(cls, text: str) -> "MetricGraph":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"invalid JSON: {exc}") from None
        if not isinstance(data, Mapping):
            raise GraphError("graph file must hold a JSON object")
        return cls.from_dict(data)


def _reject_unknown(obj: Mapping, allowed: set, what: str):
    extra = set(obj) - allowed
    if extra:
        raise GraphError(f"unknown key(s) in {what}: {sorted(extra)}")


def _parse_condition(raw) -> VertexCondition:
    if isinstance(raw, VertexCondition):
        return raw
    if raw in (STANDARD, DIRICHLET):
        return VertexCondition(raw)
    if isinstance(raw, Mapping):
        _reject_unknown(raw, {ROBIN}, "condition")
        val = raw.get(ROBIN)
        if isinstance(val, (list, tuple)) and len(val) == 2:
            re, im = val
        elif isinstance(val, (int, float)) and not isinstance(val, bool):
            re, im = val, 0.0
        else:
            raise GraphError(f"robin coupling must be [re, im], got {val!r}")
        alpha = complex(float(re), float(im))
        if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
            raise GraphError("robin coupling must be finite")
        return VertexCondition.robin(alpha)
    raise GraphError(f"unknown vertex condition {raw!r}")


def load_graph(path) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return MetricGraph.from_json(fh.read())


def validate(graph: MetricGraph) -> ValidationReport:
    problems = []
    ids = [vid for vid, _ in graph.vertices]
    if not ids:
        problems.append("no vertices")
    dup = sorted({v for v in ids if ids.count(v) > 1})
    if dup:
        problems.append(f"duplicate vertex id(s): {dup}")
    if not graph.edges:
        problems.append("no edges")
    known = set(ids)
    for p, e in enumerate(graph.edges):
        if not (e.length > 0) or not math.isfinite(e.length):
            problems.append(f"nonpositive length on edge {p} ({e.u}-{e.v}): {e.length}")
        for w in (e.u, e.v):
            if w not in known:
                problems.append(f"edge {p} references unknown vertex {w!r}")
    if ids and not dup:
        deg = graph.degree
        isolated = [v for v in ids if deg[v] == 0]
        if isolated:
            problems.append(f"isolated vertex/vertices (degree 0): {isolated}")
        if not _connected(ids, graph.edges):
            problems.append("disconnected")
    return ValidationReport(tuple(problems))


def _connected(ids: Sequence[str], edges: Sequence[Edge]) -> bool:
    adj = defaultdict(set)
    for e in edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    seen = {ids[0]}
    queue = deque([ids[0]])
    while queue:
        w = queue.popleft()
        for x in adj[w]:
            if x not in seen:
                seen.add(x)
                queue.append(x)
    return seen >= set(ids)


def subdivide_special_edges(graph: MetricGraph) -> MetricGraph:
    """Split loops and parallel edges at their midpoints until the graph is simple.

    New vertices are standard (continuity + Kirchhoff), which leaves the
    operator unitarily equivalent.  A loop first becomes a parallel pair and
    is then split again, so a loop of length L ends up as four edges of L/4.
    """
    if graph.is_simple:
        return graph
    verts = list(graph.vertices)
    taken = {vid for vid, _ in verts}
    counter = 0

    def fresh():
        nonlocal counter
        while True:
            counter += 1
            name = f"_s{counter}"
            if name not in taken:
                taken.add(name)
                return name

    edges = list(graph.edges)
    while True:
        bundles = defaultdict(list)
        for p, e in enumerate(edges):
            bundles[frozenset((e.u, e.v))].append(p)
        special = set()
        for key, ps in bundles.items():
            if len(key) == 1 or len(ps) > 1:
                special.update(ps)
        if not special:
            break
        out = []
        for p, e in enumerate(edges):
            if p in special:
                w = fresh()
                verts.append((w, VertexCondition.standard()))
                half = e.length / 2
                out.append(Edge(e.u, w, half))
                out.append(Edge(w, e.v, half))
            else:
                out.append(e)
        edges = out
    return MetricGraph(verts, edges)


def graph_metrics(graph: MetricGraph) -> GraphMetrics:
    deg = graph.degree
    robin_len = {}
    for vid in graph.robin:
        robin_len[vid] = min(graph.edges[p].length for p, _ in graph.incidence[vid])
    return GraphMetrics(
        min_length=graph.min_length,
        total_length=graph.total_length,
        min_robin_degree=min((deg[v] for v in graph.robin), default=None),
        degrees=dict(deg),
        robin_min_lengths=robin_len,
    )


# -- builders ------------------------------------------------------------

def _cond(c) -> VertexCondition:
    if isinstance(c, VertexCondition):
        return c
    if c is None or c == STANDARD:
        return VertexCondition.standard()
    if c == DIRICHLET:
        return VertexCondition.dirichlet()
    return VertexCondition.robin(c)


def interval(length: float = 1.0, left=None, right=None) -> MetricGraph:
    """Interval ``a``-``b``; a condition of ``None`` means standard, a number means Robin."""
    return MetricGraph([("a", _cond(left)), ("b", _cond(right))], [("a", "b", length)])


def path_graph(lengths: Sequence[float], conditions: Sequence | None = None) -> MetricGraph:
    n = len(lengths) + 1
    conditions = list(conditions) if conditions is not None else [None] * n
    verts = [(f"v{i + 1}", _cond(c)) for i, c in enumerate(conditions)]
    edges = [(f"v{i + 1}", f"v{i + 2}", ell) for i, ell in enumerate(lengths)]
    return MetricGraph(verts, edges)


def star_graph(lengths: Sequence[float], center=None, leaves=None) -> MetricGraph:
    """Star with center ``c`` and leaves ``l1..lD``; ``leaves`` is one condition or a list."""
    d = len(lengths)
    if not isinstance(leaves, (list, tuple)):
        leaves = [leaves] * d
    verts = [("c", _cond(center))] + [(f"l{i + 1}", _cond(leaves[i])) for i in range(d)]
    edges = [("c", f"l{i + 1}", ell) for i, ell in enumerate(lengths)]
    return MetricGraph(verts, edges)

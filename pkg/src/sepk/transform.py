"""Graph transformations: multiresolution, canonical sequence, companion.

The multiresolution at a vertex u with groups C_u = [X_1, ..., X_k] adds one
new vertex v(x_1, ..., x_k) per tuple in X_1 x ... x X_k and, for each edge
x_i, one new arrow per tuple of companions, running from the tuple vertex to
s(x_i).  The new arrows with the same distinguished edge x form a new group
X(x) attached at s(x).

Iterating this on the range layer of a bipartite graph and keeping only the
fresh part yields the canonical sequence of bipartite graphs; the generated
vertices with at least two coordinates that are not first in their group make
up the W sets whose counts are the free ranks added to the K-theory of the
tame algebra.

Generated names are deterministic ("u|x1,...,xk" for vertices and
"a^x|companions" for arrows, with separator characters escaped) so repeated
runs serialize byte-identically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graph_model import (
    Edge,
    GroupKey,
    SeparatedGraph,
    ValidationReport,
    validate,
)

DEFAULT_BUDGET = 10**6


class ValidationError(Exception):
    """An operation received a graph that fails validate()."""

    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("graph fails validation:\n" + str(report))


class PreconditionError(Exception):
    """An operation's precondition is violated by otherwise valid input."""


class BudgetExceededError(Exception):
    """The generated-vertex budget would be exceeded by the next layer."""

    def __init__(self, message: str, last_layer: int):
        self.last_layer = last_layer
        super().__init__(message)


def ensure_valid(g: SeparatedGraph) -> SeparatedGraph:
    report = validate(g)
    if not report.ok:
        raise ValidationError(report)
    return g


# deterministic generated names ---------------------------------------------


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace("|", "\\|").replace(",", "\\,")


def generated_vertex_name(base: str, coords: tuple[str, ...]) -> str:
    return _esc(base) + "|" + ",".join(_esc(x) for x in coords)


def generated_edge_name(distinguished: str, companions: tuple[str, ...]) -> str:
    return "a^" + _esc(distinguished) + "|" + ",".join(_esc(x) for x in companions)


@dataclass(frozen=True)
class GeneratedVertex:
    """The vertex v(x_1, ..., x_k) over base u, one coordinate per group of C_u."""

    base: str
    coords: tuple[str, ...]

    @property
    def name(self) -> str:
        return generated_vertex_name(self.base, self.coords)


@dataclass(frozen=True)
class GeneratedEdge:
    """The arrow with distinguished edge x_i and the remaining coordinates.

    Runs from the tuple vertex v(x_1, ..., x_k) to s(x_i).
    """

    index: int  # position of the distinguished coordinate in the tuple
    distinguished: str
    companions: tuple[str, ...]  # coordinates other than index, in slot order
    source: str  # generated vertex name
    range: str  # s(distinguished)

    @property
    def name(self) -> str:
        return generated_edge_name(self.distinguished, self.companions)


@dataclass(frozen=True)
class MultiresolutionData:
    """A multiresolution together with its bookkeeping.

    group_of_edge maps each old edge x with range in the resolved set to the
    key of its new group X(x) in the output graph; w_vertices lists the
    generated vertices with at least two non-first coordinates.
    """

    graph: SeparatedGraph
    resolved: tuple[str, ...]
    generated: tuple[GeneratedVertex, ...]
    w_vertices: tuple[str, ...]
    group_of_edge: dict[str, GroupKey] = field(repr=False)


def _check_resolved_set(g: SeparatedGraph, vertex_set) -> tuple[str, ...]:
    vs = set(vertex_set)
    unknown = vs - set(g.vertices)
    if unknown:
        raise PreconditionError(f"unknown vertices in V: {sorted(unknown)}")
    ordered = tuple(v for v in g.vertices if v in vs)
    for u in ordered:
        if not g.groups_at(u):
            raise PreconditionError(
                f"vertex {u!r} has empty C_u; multiresolution needs at least one group"
            )
    for e in g.edges:
        if e.dst in vs and e.src in vs:
            raise PreconditionError(
                f"edge {e.id!r} runs between resolved vertices "
                f"({e.src!r} -> {e.dst!r}); V must span no edges"
            )
    return ordered


def _generate(g: SeparatedGraph, resolved: tuple[str, ...]):
    """Enumerate generated vertices and edges in canonical order.

    Vertices: resolved bases in their order, tuples in left-lexicographic
    product order.  Edges: grouped by source tuple, distinguished slot
    ascending, which is exactly the induced source-fiber order.
    """
    gen_vertices: list[GeneratedVertex] = []
    gen_edges: list[GeneratedEdge] = []
    w_names: list[str] = []
    for u in resolved:
        groups = g.groups_at(u)
        first = {grp[0] for grp in groups}
        for tup in itertools.product(*groups):
            gv = GeneratedVertex(u, tup)
            gen_vertices.append(gv)
            if sum(1 for x in tup if x not in first) >= 2:
                w_names.append(gv.name)
            for i, x in enumerate(tup):
                companions = tup[:i] + tup[i + 1 :]
                gen_edges.append(
                    GeneratedEdge(i, x, companions, gv.name, g.edge(x).src)
                )
    return gen_vertices, gen_edges, w_names


def _new_groups(g: SeparatedGraph, resolved: tuple[str, ...]):
    """The groups X(x), keyed by the old edge x, members in left-lex order."""
    vset = set(resolved)
    groups: dict[str, list[str]] = {}
    for u in resolved:
        gs = g.groups_at(u)
        for i, grp in enumerate(gs):
            others = gs[:i] + gs[i + 1 :]
            for x in grp:
                groups[x] = [
                    generated_edge_name(x, comps)
                    for comps in itertools.product(*others)
                ]
    # Attachment order at each vertex w: the order of x inside s^-1(w).
    per_vertex: dict[str, list[str]] = {}
    for e in g.edges:
        if e.dst in vset:
            per_vertex.setdefault(e.src, []).append(e.id)
    return groups, per_vertex


def _check_fresh_names(g: SeparatedGraph, vertices, edges):
    clash_v = set(vertices) & set(g.vertices)
    if clash_v:
        raise PreconditionError(f"generated vertex names collide: {sorted(clash_v)[:3]}")
    existing = {e.id for e in g.edges}
    clash_e = set(edges) & existing
    if clash_e:
        raise PreconditionError(f"generated edge names collide: {sorted(clash_e)[:3]}")


def multiresolution_data(g: SeparatedGraph, vertex_set) -> MultiresolutionData:
    """Multiresolution of g at a vertex set V, with provenance tables.

    Preconditions: g validates, every u in V has a nonempty C_u, and no edge
    runs between two elements of V.
    """
    ensure_valid(g)
    resolved = _check_resolved_set(g, vertex_set)
    gen_vertices, gen_edges, w_names = _generate(g, resolved)
    new_groups, per_vertex = _new_groups(g, resolved)

    _check_fresh_names(g, [gv.name for gv in gen_vertices], [ge.name for ge in gen_edges])

    vertices = list(g.vertices) + [gv.name for gv in gen_vertices]
    edges = list(g.edges) + [Edge(ge.name, ge.source, ge.range) for ge in gen_edges]
    separation: dict[str, list[list[str]]] = {
        v: [list(grp) for grp in g.groups_at(v)] for v in g.vertices
    }
    group_of_edge: dict[str, GroupKey] = {}
    for w, old_edges in per_vertex.items():
        for x in old_edges:
            group_of_edge[x] = (w, len(separation[w]))
            separation[w].append(new_groups[x])

    graph = SeparatedGraph.build(vertices, edges, separation)
    return MultiresolutionData(
        graph=graph,
        resolved=resolved,
        generated=tuple(gen_vertices),
        w_vertices=tuple(w_names),
        group_of_edge=group_of_edge,
    )


def multiresolution_at(g: SeparatedGraph, vertex_set) -> SeparatedGraph:
    return multiresolution_data(g, vertex_set).graph


def w_count_formula(g: SeparatedGraph, vertex_set) -> int:
    """Closed-form size of the W set: sum over u of (prod - sum + k - 1)."""
    total = 0
    for u in vertex_set:
        sizes = [len(grp) for grp in g.groups_at(u)]
        prod = 1
        for s in sizes:
            prod *= s
        total += prod - sum(sizes) + len(sizes) - 1
    return total


# canonical sequence ---------------------------------------------------------


@dataclass(frozen=True)
class StepData:
    """One step of the canonical sequence: the fresh bipartite layer only."""

    graph: SeparatedGraph
    generated: tuple[GeneratedVertex, ...]
    w_vertices: tuple[str, ...]
    root: dict[str, str] = field(repr=False)  # generated vertex -> base vertex
    group_of_edge: dict[str, GroupKey] = field(repr=False)  # old edge -> new group


def canonical_step_data(g: SeparatedGraph) -> StepData:
    """Resolve the range layer of a bipartite graph and keep the new layer.

    The output graph has layer0 equal to g.layer1 (same ordered vertex set),
    layer1 the generated tuple vertices, and one group X(x) per old edge x,
    attached at s(x) in source-fiber order.
    """
    ensure_valid(g)
    if g.bipartite is None:
        raise PreconditionError("canonical step requires a bipartite graph")
    resolved = g.layer0
    gen_vertices, gen_edges, w_names = _generate(g, resolved)
    new_groups, per_vertex = _new_groups(g, resolved)

    layer0 = list(g.layer1)
    gen_names = [gv.name for gv in gen_vertices]
    _check_fresh_names(g, gen_names, [ge.name for ge in gen_edges])

    separation: dict[str, list[list[str]]] = {}
    group_of_edge: dict[str, GroupKey] = {}
    for w in layer0:
        groups = []
        for x in per_vertex.get(w, []):
            group_of_edge[x] = (w, len(groups))
            groups.append(new_groups[x])
        separation[w] = groups

    graph = SeparatedGraph.build(
        vertices=layer0 + gen_names,
        edges=[Edge(ge.name, ge.source, ge.range) for ge in gen_edges],
        separation=separation,
        bipartite=(layer0, gen_names),
    )
    return StepData(
        graph=graph,
        generated=tuple(gen_vertices),
        w_vertices=tuple(w_names),
        root={gv.name: gv.base for gv in gen_vertices},
        group_of_edge=group_of_edge,
    )


def canonical_step(g: SeparatedGraph) -> SeparatedGraph:
    return canonical_step_data(g).graph


def projected_step_size(g: SeparatedGraph) -> int:
    """Number of vertices the next canonical step generates."""
    total = 0
    for u in g.layer0:
        prod = 1
        for grp in g.groups_at(u):
            prod *= len(grp)
        total += prod
    return total


@dataclass(frozen=True)
class CanonicalSequence:
    """Layers 0..depth of the canonical sequence plus W sets and root tables.

    The layer vertex sets are D_0 = layer0 of graph 0 and D_n = layer1 of
    graph n-1 for n >= 1; consecutive graphs share D_n as an ordered set.
    w_sets[k] lists the W vertices inside D_k, and root_tables[k] maps D_k
    onto D_{k-2} (a generated vertex to its base), for k = 2..depth+1.
    group_maps[n] maps each edge of layer n to the key of its group X(x) in
    layer n+1.
    """

    graphs: tuple[SeparatedGraph, ...]
    w_sets: dict[int, tuple[str, ...]]
    root_tables: dict[int, dict[str, str]]
    group_maps: dict[int, dict[str, GroupKey]]

    @property
    def depth(self) -> int:
        return len(self.graphs) - 1

    def layer_vertices(self, n: int) -> tuple[str, ...]:
        if n == 0:
            return self.graphs[0].layer0
        if 1 <= n <= self.depth + 1:
            return self.graphs[n - 1].layer1
        raise PreconditionError(f"layer {n} not computed (depth {self.depth})")

    def layer_of(self, v: str) -> int:
        for n in range(self.depth + 2):
            if v in set(self.layer_vertices(n)):
                return n
        raise PreconditionError(f"vertex {v!r} not found in any layer")

    def root_of(self, v: str, target_layer: int) -> str:
        n = self.layer_of(v)
        if target_layer > n:
            raise PreconditionError(f"target layer {target_layer} above layer {n} of {v!r}")
        if (n - target_layer) % 2:
            raise PreconditionError(
                f"parity mismatch: {v!r} lives in layer {n}, target {target_layer}"
            )
        while n > target_layer:
            v = self.root_tables[n][v]
            n -= 2
        return v

    def to_json_obj(self) -> dict:
        from .graph_model import to_obj

        return {
            "depth": self.depth,
            "layers": [to_obj(g) for g in self.graphs],
            "w_sets": {str(k): list(ws) for k, ws in sorted(self.w_sets.items())},
            "root_tables": {
                str(k): dict(sorted(t.items())) for k, t in sorted(self.root_tables.items())
            },
        }


def canonical_sequence(
    g: SeparatedGraph, depth: int, budget: int = DEFAULT_BUDGET
) -> CanonicalSequence:
    """Layers 0..depth of the canonical sequence of a bipartite graph.

    The sequence grows doubly exponentially; when the next layer would
    generate more than budget vertices, a BudgetExceededError reports the
    last completed layer.
    """
    ensure_valid(g)
    if g.bipartite is None:
        raise PreconditionError("canonical sequence requires a bipartite graph")
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    graphs = [g]
    w_sets: dict[int, tuple[str, ...]] = {}
    root_tables: dict[int, dict[str, str]] = {}
    group_maps: dict[int, dict[str, GroupKey]] = {}
    for n in range(depth):
        size = projected_step_size(graphs[n])
        if size > budget:
            raise BudgetExceededError(
                f"layer {n + 1} would generate {size} vertices "
                f"(budget {budget}); last completed layer is {n}",
                last_layer=n,
            )
        step = canonical_step_data(graphs[n])
        graphs.append(step.graph)
        w_sets[n + 2] = step.w_vertices
        root_tables[n + 2] = step.root
        group_maps[n] = step.group_of_edge
    return CanonicalSequence(tuple(graphs), w_sets, root_tables, group_maps)


def root_of(seq: CanonicalSequence, v: str, target_layer: int) -> str:
    """Iterated root of v down to the given layer (same parity, not above)."""
    return seq.root_of(v, target_layer)


# bipartite companion --------------------------------------------------------


def bipartite_companion(g: SeparatedGraph) -> SeparatedGraph:
    """The bipartite double of a separated graph.

    Two copies v|0, v|1 of every vertex; a connecting edge h|v from v|1 to
    v|0; a copy e|0 of every edge e running from s(e)|1 to r(e)|0.  The
    groups at v|0 are the copies of the groups of C_v followed by the
    singleton {h|v}.  The result is always a valid bipartite graph, and its
    K-theory agrees with that of g.
    """
    ensure_valid(g)
    v0 = {v: f"{_esc(v)}|0" for v in g.vertices}
    v1 = {v: f"{_esc(v)}|1" for v in g.vertices}
    h = {v: f"h|{_esc(v)}" for v in g.vertices}
    e0 = {e.id: f"{_esc(e.id)}|0" for e in g.edges}

    vertices = [v0[v] for v in g.vertices] + [v1[v] for v in g.vertices]
    edges = [Edge(e0[e.id], v1[e.src], v0[e.dst]) for e in g.edges] + [
        Edge(h[v], v1[v], v0[v]) for v in g.vertices
    ]
    separation = {
        v0[v]: [[e0[x] for x in grp] for grp in g.groups_at(v)] + [[h[v]]]
        for v in g.vertices
    }
    return SeparatedGraph.build(
        vertices,
        edges,
        separation,
        bipartite=([v0[v] for v in g.vertices], [v1[v] for v in g.vertices]),
    )

"""Schreier-coset graph construction over SL(2, Z_n), plus the full Cayley
graph for small n as a comparison and verification target.

Vertices of the Schreier graph are canonical representatives of the right
cosets H*g of the diagonal subgroup H, discovered by BFS from the identity
coset with a strict FIFO queue and fixed generator order. Both the vertex
indexing and the edge list are fully deterministic; downstream consumers
rely on that ordering ("first k rows" semantics).
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from .modular_group import (
    Mat2,
    check_modulus,
    coset_count,
    enumerate_group,
    group_order,
    mat_mul,
    units,
)

CAYLEY_GUARD = 12  # Cayley size is Theta(n^3); beyond this, use the Schreier graph

#: Generator labels pair up as mutual inverses: g1 = g0^-1 and g3 = g2^-1.
INVERSE_LABEL = {0: 1, 1: 0, 2: 3, 3: 2}

Edge = tuple[int, int, int]  # (src_index, generator_label, dst_index)


def generators(n: int) -> list[Mat2]:
    """The four labeled elementary generators, in label order 0..3.

    g0 = (1,1;0,1), g1 = (1,n-1;0,1), g2 = (1,0;1,1), g3 = (1,0;n-1,1).
    Kept as four labeled entries even when values coincide (n = 2).
    """
    check_modulus(n)
    return [
        Mat2(1, 1, 0, 1, n),
        Mat2(1, n - 1, 0, 1, n),
        Mat2(1, 0, 1, 1, n),
        Mat2(1, 0, n - 1, 1, n),
    ]


def subgroup(n: int) -> list[Mat2]:
    """The diagonal subgroup H = { diag(a, a^-1) : a a unit mod n }.

    Listed with a ascending; length is euler_phi(n).
    """
    return [Mat2(a, 0, 0, pow(a, -1, n), n) for a in units(n)]


def _unit_pairs(n: int) -> list[tuple[int, int]]:
    return [(a, pow(a, -1, n)) for a in units(n)]


def _canonical_tuple(
    t: tuple[int, int, int, int], pairs: list[tuple[int, int]], n: int
) -> tuple[int, int, int, int]:
    # h*M for h = diag(u, v) scales the first row by u and the second by v,
    # so each translate costs 4 multiplications instead of a full mat_mul.
    a, b, c, d = t
    return min((u * a % n, u * b % n, v * c % n, v * d % n) for u, v in pairs)


def canonicalize(m: Mat2, h: list[Mat2] | None = None) -> Mat2:
    """Canonical representative of the right coset H*m.

    Returns the lexicographic minimum of (a, b, c, d) over the translates
    h*m, h in H. Idempotent; two matrices agree iff they share a coset.
    """
    n = m.n
    if h is not None:
        for elem in h:
            if elem.n != n:
                raise ValueError(f"modulus mismatch: subgroup mod {elem.n}, matrix mod {n}")
            if elem.b != 0 or elem.c != 0:
                raise ValueError(f"subgroup element {elem.entries()} is not diagonal")
        pairs = [(elem.a, elem.d) for elem in h]
    else:
        pairs = _unit_pairs(n)
    return Mat2(*_canonical_tuple(m.entries(), pairs, n), n)


@dataclass(frozen=True)
class SchreierGraph:
    """Schreier-coset graph S_n: labeled directed 4-regular multigraph.

    vertices[i] is the canonical representative discovered i-th by BFS;
    rep_index inverts that. Self-loops and parallel edges are retained, so
    len(edges) == 4 * len(vertices) always.
    """

    n: int
    vertices: tuple[Mat2, ...]
    edges: tuple[Edge, ...]
    rep_index: dict[Mat2, int] = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CayleyGraph:
    """Cayley graph of SL(2, Z_n) on the same four generators.

    vertices are all group elements in lexicographic order; one edge
    (g, label, g*s_label) per element and label.
    """

    n: int
    vertices: tuple[Mat2, ...]
    edges: tuple[Edge, ...]
    rep_index: dict[Mat2, int] = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def enumerate_cosets(n: int) -> SchreierGraph:
    """Build S_n by BFS over the coset space, starting at the identity coset.

    For each dequeued representative M and each generator label in order
    0..3, the neighbor canonicalize(M * g_label) is indexed (new vertices
    get the next index) and the labeled edge is appended. Termination is
    guaranteed: the coset space is finite.
    """
    check_modulus(n)
    pairs = _unit_pairs(n)
    gen_tuples = [g.entries() for g in generators(n)]

    start = _canonical_tuple((1, 0, 0, 1), pairs, n)
    index: dict[tuple[int, int, int, int], int] = {start: 0}
    order: list[tuple[int, int, int, int]] = [start]
    edges: list[Edge] = []
    queue = deque([start])
    while queue:
        m = queue.popleft()
        src = index[m]
        ma, mb, mc, md = m
        for label, (ga, gb, gc, gd) in enumerate(gen_tuples):
            neighbor = _canonical_tuple(
                (
                    (ma * ga + mb * gc) % n,
                    (ma * gb + mb * gd) % n,
                    (mc * ga + md * gc) % n,
                    (mc * gb + md * gd) % n,
                ),
                pairs,
                n,
            )
            dst = index.get(neighbor)
            if dst is None:
                dst = len(order)
                index[neighbor] = dst
                order.append(neighbor)
                queue.append(neighbor)
            edges.append((src, label, dst))

    vertices = tuple(Mat2(*t, n) for t in order)
    rep_index = {v: i for i, v in enumerate(vertices)}
    graph = SchreierGraph(n=n, vertices=vertices, edges=tuple(edges), rep_index=rep_index)
    assert graph.vertex_count == coset_count(n), (
        f"BFS found {graph.vertex_count} cosets, formula says {coset_count(n)} (n={n})"
    )
    return graph


def build_cayley(n: int, guard: int = CAYLEY_GUARD) -> CayleyGraph:
    """Full Cayley graph Cay(SL(2, Z_n), S). Guarded: size is Theta(n^3)."""
    check_modulus(n)
    if n > guard:
        raise ValueError(
            f"build_cayley guard exceeded: n={n} > {guard} "
            f"({group_order(n)} vertices); use the Schreier graph instead"
        )
    vertices = tuple(enumerate_group(n, guard=guard))
    index = {v.entries(): i for i, v in enumerate(vertices)}
    gens = generators(n)
    edges = [
        (i, label, index[mat_mul(v, g).entries()])
        for i, v in enumerate(vertices)
        for label, g in enumerate(gens)
    ]
    rep_index = {v: i for i, v in enumerate(vertices)}
    return CayleyGraph(n=n, vertices=vertices, edges=tuple(edges), rep_index=rep_index)


def validate_schreier(graph: SchreierGraph) -> None:
    """Check every SchreierGraph invariant; raises ValueError on violation.

    Used when graphs re-enter the system from files, where corruption or
    hand edits are possible.
    """
    n = check_modulus(graph.n)
    expected = coset_count(n)
    if graph.vertex_count != expected:
        raise ValueError(f"vertex count {graph.vertex_count} != coset_count({n}) = {expected}")
    if graph.edge_count != 4 * graph.vertex_count:
        raise ValueError(f"edge count {graph.edge_count} != 4 * {graph.vertex_count}")
    pairs = _unit_pairs(n)
    if graph.vertices[0].entries() != _canonical_tuple((1, 0, 0, 1), pairs, n):
        raise ValueError("vertex 0 is not the canonical representative of the identity coset")
    seen = set()
    for v in graph.vertices:
        if v.n != n:
            raise ValueError("vertex modulus mismatch")
        t = v.entries()
        if _canonical_tuple(t, pairs, n) != t:
            raise ValueError(f"vertex {t} is not canonical")
        if t in seen:
            raise ValueError(f"duplicate vertex {t}")
        seen.add(t)
    _validate_edges(graph)


def validate_cayley(graph: CayleyGraph) -> None:
    """Check CayleyGraph invariants (counts, labels, group membership)."""
    n = check_modulus(graph.n)
    if graph.vertex_count != group_order(n):
        raise ValueError(f"vertex count {graph.vertex_count} != group_order({n})")
    if graph.edge_count != 4 * graph.vertex_count:
        raise ValueError(f"edge count {graph.edge_count} != 4 * {graph.vertex_count}")
    if list(graph.vertices) != sorted(graph.vertices, key=Mat2.entries):
        raise ValueError("Cayley vertices are not in lexicographic order")
    _validate_edges(graph)


def _validate_edges(graph: SchreierGraph | CayleyGraph) -> None:
    count = graph.vertex_count
    out_degree = [0] * count
    per_label_out = Counter()
    for src, label, dst in graph.edges:
        if not (0 <= src < count and 0 <= dst < count):
            raise ValueError(f"edge ({src}, {label}, {dst}) has an out-of-range endpoint")
        if label not in (0, 1, 2, 3):
            raise ValueError(f"edge label {label} not in 0..3")
        out_degree[src] += 1
        per_label_out[(src, label)] += 1
    if any(d != 4 for d in out_degree):
        bad = next(i for i, d in enumerate(out_degree) if d != 4)
        raise ValueError(f"vertex {bad} has out-degree {out_degree[bad]} != 4")
    if any(c != 1 for c in per_label_out.values()):
        raise ValueError("some (vertex, label) pair has multiplicity != 1")
    # Edge multiset must be symmetric under inverse-generator relabeling.
    forward = Counter((src, label, dst) for src, label, dst in graph.edges)
    for (src, label, dst), mult in forward.items():
        if forward[(dst, INVERSE_LABEL[label], src)] != mult:
            raise ValueError(
                f"edge ({src}, {label}, {dst}) lacks its inverse-labeled reverse"
            )

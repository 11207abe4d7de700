"""Structural and spectral diagnostics for Schreier and Cayley graphs.

Adjacency is always multiplicity-weighted: parallel edges add weight and a
self-loop adds 1 to the diagonal and 1 to the degree per occurrence, which
keeps the 4-regular row sums uniform. Degrees are directed out-degrees with
multiplicity (in-degrees match by the inverse-generator symmetry).

The reported expansion proxy is lambda_1, the second-smallest eigenvalue of
the normalized Laplacian L = D^{-1/2} (D - A) D^{-1/2}. Graphs with at most
``DENSE_THRESHOLD`` vertices go through a dense symmetric eigensolver; larger
ones use shifted power iteration on 2I - L with the known lambda_0
eigenvector (proportional to sqrt(degree)) deflated out.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, asdict
from fractions import Fraction
from typing import Protocol, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .coset_enum import CayleyGraph, SchreierGraph, canonicalize, subgroup
from .modular_group import euler_phi, group_order

DENSE_THRESHOLD = 2000
DIAMETER_THRESHOLD = 5000
POWER_ITERATION_CAP = 500_000
POWER_ITERATION_TOL = 1e-9
# Successive Rayleigh estimates must pass the tolerance this many times in a
# row before we accept convergence (guards against a single flat step).
POWER_ITERATION_STREAK = 3


class LabeledGraph(Protocol):
    """Anything with a vertex count and a (src, label, dst) edge list."""

    @property
    def vertex_count(self) -> int: ...

    @property
    def edges(self) -> Sequence[tuple[int, int, int]]: ...


class ConvergenceError(RuntimeError):
    """Power iteration failed to converge within the iteration cap."""


@dataclass(frozen=True)
class GraphReport:
    """Structural/spectral summary; serializes to JSON with these exact keys.

    compression_ratio is the exact rational cayley_vertex_count/vertex_count
    (always an integer for graphs built here, since |G| = phi(n) * |V_S|).
    parallel_edge_count counts directed edges in excess of the first between
    each ordered non-loop (src, dst) pair.
    """

    n: int
    vertex_count: int
    directed_edge_count: int
    self_loop_count: int
    parallel_edge_count: int
    is_connected: bool
    component_count: int
    min_degree: int
    max_degree: int
    lambda1: float | None
    diameter: int | None
    cayley_vertex_count: int
    compression_ratio: Fraction

    def to_json(self) -> str:
        d = asdict(self)
        ratio = self.compression_ratio
        d["compression_ratio"] = (
            int(ratio) if ratio.denominator == 1 else f"{ratio.numerator}/{ratio.denominator}"
        )
        return json.dumps(d, indent=2)


def _undirected_neighbors(graph: LabeledGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(graph.vertex_count)]
    for src, _label, dst in graph.edges:
        adj[src].add(dst)
        adj[dst].add(src)
    return adj


def connectivity(graph: LabeledGraph) -> tuple[bool, int]:
    """(is_connected, component_count) under undirected reachability."""
    count = graph.vertex_count
    if count < 1:
        raise ValueError("connectivity requires at least one vertex")
    adj = _undirected_neighbors(graph)
    seen = [False] * count
    components = 0
    for start in range(count):
        if seen[start]:
            continue
        components += 1
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return components == 1, components


def adjacency_matrix(graph: LabeledGraph) -> sp.csr_array:
    """Multiplicity-weighted adjacency; self-loops add 1 to the diagonal."""
    count = graph.vertex_count
    rows = [e[0] for e in graph.edges]
    cols = [e[2] for e in graph.edges]
    data = np.ones(len(rows), dtype=np.float64)
    return sp.csr_array((data, (rows, cols)), shape=(count, count))


def normalized_laplacian(graph: LabeledGraph) -> np.ndarray:
    """Dense normalized Laplacian D^{-1/2} (D - A) D^{-1/2}.

    Raises ValueError if any vertex is isolated (degree 0).
    """
    a = adjacency_matrix(graph).toarray()
    degrees = a.sum(axis=1)
    if np.any(degrees == 0):
        isolated = int(np.argmax(degrees == 0))
        raise ValueError(f"vertex {isolated} is isolated (degree 0)")
    inv_sqrt = 1.0 / np.sqrt(degrees)
    lap = (np.diag(degrees) - a) * inv_sqrt[:, None] * inv_sqrt[None, :]
    return lap


def _normalized_adjacency_sparse(graph: LabeledGraph) -> sp.csr_array:
    a = adjacency_matrix(graph)
    degrees = np.asarray(a.sum(axis=1)).ravel()
    if np.any(degrees == 0):
        isolated = int(np.argmax(degrees == 0))
        raise ValueError(f"vertex {isolated} is isolated (degree 0)")
    inv_sqrt = sp.diags_array(1.0 / np.sqrt(degrees), format="csr")
    return (inv_sqrt @ a @ inv_sqrt).tocsr()


def spectral_gap(graph: LabeledGraph, method: str = "auto") -> float:
    """Second-smallest eigenvalue of the normalized Laplacian.

    method: "auto" (dense up to DENSE_THRESHOLD vertices, then iterative),
    "dense", or "iterative".
    """
    if method not in ("auto", "dense", "iterative"):
        raise ValueError(f"unknown spectral method {method!r}")
    if graph.vertex_count < 2:
        raise ValueError("lambda_1 needs at least two vertices")
    if method == "auto":
        method = "dense" if graph.vertex_count <= DENSE_THRESHOLD else "iterative"
    if method == "dense":
        eigs = np.linalg.eigvalsh(normalized_laplacian(graph))
        return float(eigs[1])
    return _spectral_gap_power(graph)


def _spectral_gap_power(graph: LabeledGraph) -> float:
    """Shifted power iteration on M = 2I - L = I + D^{-1/2} A D^{-1/2}.

    The top eigenpair of M is (2, v0) with v0_i proportional to
    sqrt(degree(i)); deflating v0 makes the dominant eigenvalue of the
    remainder 2 - lambda_1.

    The Rayleigh sequence converges geometrically, so the limit is tracked
    with Aitken extrapolation; convergence requires POWER_ITERATION_STREAK
    consecutive steps where both the raw successive difference and the
    extrapolated remaining tail are below POWER_ITERATION_TOL.
    """
    norm_adj = _normalized_adjacency_sparse(graph)
    count = graph.vertex_count
    degrees = np.asarray(adjacency_matrix(graph).sum(axis=1)).ravel()
    v0 = np.sqrt(degrees)
    v0 /= np.linalg.norm(v0)

    rng = np.random.Generator(np.random.Philox(key=np.array([0x5C6F, count], dtype=np.uint64)))
    x = rng.uniform(-1.0, 1.0, size=count)
    x -= (v0 @ x) * v0
    norm = np.linalg.norm(x)
    if norm < 1e-12:  # start vector degenerate; graph has a single vertex
        return 0.0
    x /= norm

    estimates = []
    streak = 0
    for _ in range(POWER_ITERATION_CAP):
        y = x + norm_adj @ x  # M x = (I + N) x
        estimate = float(x @ y)
        y -= (v0 @ y) * v0
        norm = np.linalg.norm(y)
        if norm < 1e-30:
            # M x vanished off the deflated space: remaining spectrum is 0.
            return 2.0
        x = y / norm
        estimates.append(estimate)
        if len(estimates) >= 3:
            diff = abs(estimates[-1] - estimates[-2])
            limit, tail = _aitken_limit(estimates[-3], estimates[-2], estimates[-1])
            if diff < POWER_ITERATION_TOL and tail < POWER_ITERATION_TOL:
                streak += 1
                if streak >= POWER_ITERATION_STREAK:
                    return 2.0 - limit
            else:
                streak = 0
    raise ConvergenceError(
        f"power iteration did not converge within {POWER_ITERATION_CAP} iterations "
        f"(last estimate {estimates[-1] if estimates else None})"
    )


def _aitken_limit(e0: float, e1: float, e2: float) -> tuple[float, float]:
    """Aitken delta-squared limit of a geometric sequence and its tail size.

    Returns (extrapolated limit, |limit - e2|). Falls back to (e2, 0) when
    the differences are at floating-point noise level or non-geometric.
    """
    d1, d2 = e1 - e0, e2 - e1
    if abs(d2) < 1e-15 or abs(d1) <= abs(d2):
        return e2, 0.0 if abs(d2) < 1e-15 else abs(d2)
    ratio = d2 / d1
    tail = d2 * ratio / (1.0 - ratio)
    return e2 + tail, abs(tail)


def verify_quotient(
    cayley: CayleyGraph, schreier: SchreierGraph
) -> tuple[bool, list[str]]:
    """Check that the Schreier graph is the labeled quotient of the Cayley graph.

    (a) every Cayley edge (g, l, g*s_l) must map under the canonical
    representative function to a Schreier edge with the same label, and
    (b) every Schreier vertex's fiber must have exactly euler_phi(n)
    preimages. Violations are returned as data, not raised.
    """
    violations: list[str] = []
    if cayley.n != schreier.n:
        return False, [f"modulus mismatch: cayley n={cayley.n}, schreier n={schreier.n}"]
    n = cayley.n
    h = subgroup(n)

    projected: list[int | None] = []
    for g in cayley.vertices:
        rep = canonicalize(g, h)
        projected.append(schreier.rep_index.get(rep))
    schreier_edge = {(src, label): dst for src, label, dst in schreier.edges}

    fiber_sizes = Counter()
    for idx, image in enumerate(projected):
        if image is None:
            violations.append(
                f"group element {cayley.vertices[idx].entries()} maps outside the vertex set"
            )
        else:
            fiber_sizes[image] += 1

    for src, label, dst in cayley.edges:
        psi_src, psi_dst = projected[src], projected[dst]
        if psi_src is None or psi_dst is None:
            continue  # already reported above
        if schreier_edge.get((psi_src, label)) != psi_dst:
            violations.append(
                f"cayley edge ({src}, {label}, {dst}) maps to "
                f"({psi_src}, {label}, {psi_dst}) which is not a schreier edge"
            )

    phi = euler_phi(n)
    for v in range(schreier.vertex_count):
        size = fiber_sizes.get(v, 0)
        if size != phi:
            violations.append(f"fiber over schreier vertex {v} has size {size}, expected {phi}")

    return not violations, violations


def diameter(graph: LabeledGraph, batch: int = 256) -> int | None:
    """Exact diameter by all-pairs BFS; None if the graph is disconnected."""
    connected, _ = connectivity(graph)
    if not connected:
        return None
    a = adjacency_matrix(graph)
    sym = ((a + a.T) > 0).astype(np.float64)
    longest = 0.0
    for start in range(0, graph.vertex_count, batch):
        indices = np.arange(start, min(start + batch, graph.vertex_count))
        dist = dijkstra(sym, unweighted=True, indices=indices)
        longest = max(longest, float(dist.max()))
    return int(longest)


def analyze(
    graph: SchreierGraph | CayleyGraph,
    spectral: bool = False,
    with_diameter: bool = False,
) -> GraphReport:
    """Populate a GraphReport for a generated graph.

    lambda1 is computed only when spectral=True; the diameter only when
    with_diameter=True and the graph has at most DIAMETER_THRESHOLD
    vertices (else null).
    """
    count = graph.vertex_count
    self_loops = sum(1 for src, _label, dst in graph.edges if src == dst)
    pair_mult = Counter((src, dst) for src, _label, dst in graph.edges if src != dst)
    parallel = sum(mult - 1 for mult in pair_mult.values() if mult > 1)
    out_degree = Counter(src for src, _label, _dst in graph.edges)
    degrees = [out_degree.get(v, 0) for v in range(count)]
    connected, components = connectivity(graph)

    lambda1 = spectral_gap(graph) if spectral else None
    diam = None
    if with_diameter and count <= DIAMETER_THRESHOLD:
        diam = diameter(graph)

    cayley_count = group_order(graph.n)
    return GraphReport(
        n=graph.n,
        vertex_count=count,
        directed_edge_count=graph.edge_count,
        self_loop_count=self_loops,
        parallel_edge_count=parallel,
        is_connected=connected,
        component_count=components,
        min_degree=min(degrees),
        max_degree=max(degrees),
        lambda1=lambda1,
        diameter=diam,
        cayley_vertex_count=cayley_count,
        compression_ratio=Fraction(cayley_count, count),
    )


def generation_timing(build, sizes) -> list[tuple[int, int, float]]:
    """Wall-clock generation cost per modulus: (n, vertex_count, seconds).

    Measured, never asserted; callers may log-log fit the scaling themselves.
    """
    samples = []
    for n in sizes:
        start = time.perf_counter()
        graph = build(n)
        elapsed = time.perf_counter() - start
        samples.append((n, graph.vertex_count, elapsed))
    return samples

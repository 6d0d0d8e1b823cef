"""Directed acyclic multigraph model for two-unicast-Z problems.

Edges are identified by integer indices into :attr:`Network.edges`, which is
kept sorted by edge order (the order of the tail vertex, ties broken by
insertion order). Destinations are sets of edges, not vertices.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

GNS_EDGE_CAP = 24


class CycleError(ValueError):
    def __init__(self, edge_name: str, tail: str, head: str):
        super().__init__(f"graph has a cycle through edge {edge_name} ({tail} -> {head})")
        self.edge_name = edge_name


@dataclass(frozen=True)
class Edge:
    name: str
    tail: str
    head: str


@dataclass(frozen=True, eq=False)
class Network:
    """Two-unicast-Z instance on a DAG.

    Build with :meth:`build`, which sorts vertices and edges topologically.
    ``T1``/``T2`` hold edge indices.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    s1: str
    s2: str
    T1: frozenset[int]
    T2: frozenset[int]
    unreachable: frozenset[int] = field(default=frozenset())

    @classmethod
    def build(
        cls,
        vertices: Sequence[str],
        edges: Iterable[tuple[str, str, str]],
        s1: str,
        s2: str,
        T1: Iterable[str],
        T2: Iterable[str],
    ) -> Network:
        """Validate and topologically sort a network given by names."""
        vertices = list(vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex ids")
        raw = [Edge(*e) for e in edges]
        names = [e.name for e in raw]
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge ids")
        known = set(vertices)
        for e in raw:
            for v in (e.tail, e.head):
                if v not in known:
                    raise ValueError(f"edge {e.name} references unknown vertex {v!r}")
        for s in (s1, s2):
            if s not in known:
                raise ValueError(f"unknown source vertex {s!r}")
        vorder = _vertex_order(vertices, raw)
        pos = {v: k for k, v in enumerate(vorder)}
        ins = {e.name: k for k, e in enumerate(raw)}
        ordered = sorted(raw, key=lambda e: (pos[e.tail], ins[e.name]))
        index = {e.name: k for k, e in enumerate(ordered)}
        dest = []
        for label, T in (("T1", T1), ("T2", T2)):
            try:
                dest.append(frozenset(index[name] for name in T))
            except KeyError as exc:
                raise ValueError(f"{label} references unknown edge {exc.args[0]!r}") from None
        return cls(tuple(vorder), tuple(ordered), s1, s2, dest[0], dest[1])

    # -- structure ---------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def vertex_order(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def edge_order(self) -> tuple[int, ...]:
        """Ord_E(e) = Ord_V(tail(e)) for each edge index."""
        return tuple(self.vertex_order[e.tail] for e in self.edges)

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.name: k for k, e in enumerate(self.edges)}

    @cached_property
    def _in(self) -> dict[str, tuple[int, ...]]:
        d: dict[str, list[int]] = {v: [] for v in self.vertices}
        for k, e in enumerate(self.edges):
            d[e.head].append(k)
        return {v: tuple(ks) for v, ks in d.items()}

    @cached_property
    def _out(self) -> dict[str, tuple[int, ...]]:
        d: dict[str, list[int]] = {v: [] for v in self.vertices}
        for k, e in enumerate(self.edges):
            d[e.tail].append(k)
        return {v: tuple(ks) for v, ks in d.items()}

    def in_edges(self, v: str) -> tuple[int, ...]:
        return self._in[v]

    def out_edges(self, v: str) -> tuple[int, ...]:
        return self._out[v]

    @cached_property
    def source_edges(self) -> frozenset[int]:
        return frozenset(self._out[self.s1]) | frozenset(self._out[self.s2])

    def names(self, edge_ids: Iterable[int]) -> list[str]:
        return [self.edges[k].name for k in sorted(edge_ids)]

    def ids(self, names: Iterable[str]) -> frozenset[int]:
        return frozenset(self.edge_index[n] for n in names)

    # -- reachability ------------------------------------------------------

    @cached_property
    def _edge_reach(self) -> tuple[frozenset[int], ...]:
        """For each edge e, the edges f with e ~> f (reflexive)."""
        reach: list[frozenset[int]] = [frozenset()] * self.n_edges
        for k in reversed(range(self.n_edges)):
            acc = {k}
            for f in self._out[self.edges[k].head]:
                acc |= reach[f]
            reach[k] = frozenset(acc)
        return tuple(reach)

    def communicates(self, e: int, f: int) -> bool:
        """True iff ``e == f`` or there is a path from head(e) to tail(f)."""
        return f in self._edge_reach[e]

    def reaches_from(self, e: int) -> frozenset[int]:
        return self._edge_reach[e]

    def vertex_reaches(self, v: str, targets: Iterable[int], removed: frozenset[int] = frozenset()) -> bool:
        """True iff some edge of ``targets`` is reachable from vertex ``v`` avoiding ``removed``."""
        targets = set(targets) - removed
        if not targets:
            return False
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for k in self._out[u]:
                if k in removed:
                    continue
                if k in targets:
                    return True
                h = self.edges[k].head
                if h not in seen:
                    seen.add(h)
                    stack.append(h)
        return False

    def reachable_edges(self, v: str) -> frozenset[int]:
        """Edges lying on some path starting at vertex ``v``."""
        out: set[int] = set()
        for k in self._out[v]:
            out |= self._edge_reach[k]
        return frozenset(out)

    def with_destinations(self, T1: Iterable[int], T2: Iterable[int]) -> Network:
        return replace(self, T1=frozenset(T1), T2=frozenset(T2))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.name, "tail": e.tail, "head": e.head} for e in self.edges],
            "s1": self.s1,
            "s2": self.s2,
            "T1": self.names(self.T1),
            "T2": self.names(self.T2),
        }

    def __repr__(self) -> str:
        return (
            f"Network(|V|={len(self.vertices)}, |E|={self.n_edges}, s1={self.s1}, s2={self.s2}, "
            f"T1={self.names(self.T1)}, T2={self.names(self.T2)})"
        )


def _vertex_order(vertices: list[str], edges: list[Edge]) -> list[str]:
    """Kahn's algorithm, always releasing the earliest-listed ready vertex."""
    pos = {v: k for k, v in enumerate(vertices)}
    indeg = {v: 0 for v in vertices}
    succ: dict[str, list[str]] = {v: [] for v in vertices}
    for e in edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    heap = [pos[v] for v in vertices if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = vertices[heapq.heappop(heap)]
        order.append(v)
        for h in succ[v]:
            indeg[h] -= 1
            if indeg[h] == 0:
                heapq.heappush(heap, pos[h])
    if len(order) != len(vertices):
        left = {v for v in vertices if indeg[v] > 0}
        # an edge between two stuck vertices lies on or feeds a cycle; prefer one
        # closing back to an earlier-listed vertex
        stuck = [e for e in edges if e.tail in left and e.head in left]
        back = next((e for e in stuck if pos[e.head] <= pos[e.tail]), stuck[0])
        raise CycleError(back.name, back.tail, back.head)
    return order


def topological_orders(n: Network) -> tuple[dict[str, int], dict[str, int]]:
    """Vertex order and edge order keyed by name."""
    vo = dict(n.vertex_order)
    eo = {e.name: vo[e.tail] for e in n.edges}
    return vo, eo


def communicates(n: Network, e: str, f: str) -> bool:
    return n.communicates(n.edge_index[e], n.edge_index[f])


# -- cuts ------------------------------------------------------------------


def min_cut(n: Network, source: str, dests: Iterable[int], removed: Iterable[int] = ()) -> int:
    """Fewest edges whose removal cuts every path from ``source`` to ``dests``.

    Unit-capacity max-flow on the graph with every edge split through its own
    node; destination edge nodes drain into a super sink.
    """
    dests = frozenset(dests)
    if not dests:
        raise ValueError("destination set is empty")
    removed = frozenset(removed)
    g = nx.DiGraph()
    g.add_node(("v", source))
    g.add_node("sink")
    for k, e in enumerate(n.edges):
        if k in removed:
            continue
        g.add_edge(("v", e.tail), ("e", k), capacity=1)
        g.add_edge(("e", k), ("v", e.head))
        if k in dests:
            g.add_edge(("e", k), "sink")
    return int(nx.maximum_flow_value(g, ("v", source), "sink"))


def is_cut(n: Network, source: str, dests: Iterable[int], Q: frozenset[int]) -> bool:
    return not n.vertex_reaches(source, dests, Q)


def is_gns_cut(n: Network, Q: frozenset[int]) -> bool:
    return is_cut(n, n.s1, n.T1, Q) and is_cut(n, n.s2, n.T2, Q) and is_cut(n, n.s2, n.T1, Q)


@dataclass(frozen=True)
class CutReport:
    c11: int
    c21: int
    c22: int
    gns: int | str

    def to_json(self) -> dict:
        return {"c11": self.c11, "c21": self.c21, "c22": self.c22, "gns": self.gns}


def _min_cut_or_zero(n: Network, s: str, T: frozenset[int]) -> int:
    return min_cut(n, s, T) if T else 0


def gns_bound(n: Network) -> int | str:
    """Smallest GNS-cut set size by enumeration in increasing cardinality."""
    if n.n_edges > GNS_EDGE_CAP:
        raise ValueError(f"GNS enumeration capped at {GNS_EDGE_CAP} edges, got {n.n_edges}")
    lo = max(_min_cut_or_zero(n, n.s1, n.T1), _min_cut_or_zero(n, n.s2, n.T1), _min_cut_or_zero(n, n.s2, n.T2))
    # only edges on some source path can matter
    useful = sorted(n.reachable_edges(n.s1) | n.reachable_edges(n.s2))
    for size in range(lo, len(useful) + 1):
        for Q in itertools.combinations(useful, size):
            if is_gns_cut(n, frozenset(Q)):
                return size
    return "unbounded"


def cut_report(n: Network) -> CutReport:
    return CutReport(
        c11=_min_cut_or_zero(n, n.s1, n.T1),
        c21=_min_cut_or_zero(n, n.s2, n.T1),
        c22=_min_cut_or_zero(n, n.s2, n.T2),
        gns=gns_bound(n),
    )


def has_single_edge_gns(n: Network) -> int | None:
    """First edge (in edge order) that alone is a GNS-cut set."""
    if is_gns_cut(n, frozenset()):
        return None
    for k in range(n.n_edges):
        if is_gns_cut(n, frozenset({k})):
            return k
    return None


# -- transforms ------------------------------------------------------------


def prune_noncontributing(n: Network) -> Network:
    """Drop edges with no path to ``T1 | T2``; flag edges no source reaches."""
    dest = n.T1 | n.T2
    keep = [k for k in range(n.n_edges) if n.reaches_from(k) & dest]
    edges = [n.edges[k] for k in keep]
    pruned = Network.build(
        n.vertices,
        [(e.name, e.tail, e.head) for e in edges],
        n.s1,
        n.s2,
        n.names(n.T1),
        n.names(n.T2),
    )
    from_src = pruned.reachable_edges(pruned.s1) | pruned.reachable_edges(pruned.s2)
    return replace(pruned, unreachable=frozenset(range(pruned.n_edges)) - from_src)


def is_pruned(n: Network) -> bool:
    dest = n.T1 | n.T2
    return all(n.reaches_from(k) & dest for k in range(n.n_edges))


@dataclass(frozen=True)
class DagParams:
    n_vertices: int = 8
    max_in_degree: int = 3
    edge_density: float = 0.6
    seed: int = 0
    max_dest: int = 2
    budget: int = 100


class GenerationError(RuntimeError):
    pass


def random_dag(params: DagParams) -> Network:
    """Seeded random two-unicast-Z instance.

    Vertices ``v0..v{n-1}`` are listed in topological order; ``v0``/``v1`` are
    the sources and every other vertex gets at least one parent, so every edge
    is reachable from a source. Each ``T_i`` is drawn from the edges leaving
    the upper half of the order that ``s_i`` reaches. The instance is pruned
    before it is returned.
    """
    if params.n_vertices < 4:
        raise ValueError("need at least 4 vertices")
    rng = np.random.default_rng(params.seed)
    nv = params.n_vertices
    names = [f"v{k}" for k in range(nv)]
    for _ in range(params.budget):
        edges = []
        for j in range(2, nv):
            deg = 1 + int(rng.binomial(params.max_in_degree - 1, params.edge_density)) if params.max_in_degree > 1 else 1
            parents = rng.choice(j, size=min(deg, j), replace=False)
            for u in sorted(int(x) for x in parents):
                edges.append((f"e{len(edges) + 1}", names[u], names[j]))
        half = nv // 2
        draft = Network.build(names, edges, "v0", "v1", [], [])
        late = [k for k, e in enumerate(draft.edges) if int(e.tail[1:]) >= half]
        pools = [[k for k in late if k in draft.reachable_edges(s)] for s in ("v0", "v1")]
        if not all(pools):
            continue
        T = []
        for pool in pools:
            size = min(int(rng.integers(1, params.max_dest + 1)), len(pool))
            T.append(draft.names(int(k) for k in rng.choice(pool, size=size, replace=False)))
        net = Network.build(names, edges, "v0", "v1", T[0], T[1])
        return prune_noncontributing(net)
    raise GenerationError(f"no valid instance within {params.budget} draws (seed={params.seed})")


def validate(n: Network) -> list[str]:
    """Structural invariant violations, empty when the network is well formed."""
    problems = []
    order = n.edge_order
    for k in range(1, n.n_edges):
        if order[k] < order[k - 1]:
            problems.append(f"edge {n.edges[k].name} out of order")
    for k, e in enumerate(n.edges):
        if n.vertex_order[e.tail] >= n.vertex_order[e.head]:
            problems.append(f"edge {e.name} is not forward")
        for f in n.out_edges(e.head):
            if f <= k:
                problems.append(f"edge {n.edges[f].name} precedes its parent {e.name}")
    for label, T in (("T1", n.T1), ("T2", n.T2)):
        if not T:
            problems.append(f"{label} is empty")
        if any(k >= n.n_edges for k in T):
            problems.append(f"{label} holds an unknown edge")
    return problems

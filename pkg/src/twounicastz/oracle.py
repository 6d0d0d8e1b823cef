"""Brute-force cross-checks that share no code with the constructive coders.

Everything here enumerates: codes over GF(2)/GF(3), routing path packings, or
the completion block G1 in the rank characterisation of Grank.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .gf import FieldMatrix, rank
from .netgraph import Network, gns_bound

CODE_SEARCH_MAX_EDGES = 10
CODE_SEARCH_MAX_COEFFS = 12
ROUTING_MAX_EDGES = 16
G1_MAX_DIM = 3


def _rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return rank(FieldMatrix(a, p))


def _region(H1: np.ndarray, H2: np.ndarray, G2: np.ndarray, p: int) -> tuple[int, int, int]:
    r1 = _rank(H1, p)
    r2 = _rank(G2, p)
    rh2 = _rank(H2, p)
    g = _rank(np.vstack([H1, H2]), p) + _rank(np.hstack([H2, G2]), p) - rh2
    return r1, r2, g


@dataclass(frozen=True)
class SearchResult:
    r1_max: int
    r2_max: int
    grank: int
    codes_checked: int
    F: tuple[tuple[int, ...], ...]

    @property
    def has_one_one(self) -> bool:
        return self.r1_max >= 1 and self.r2_max >= 1 and self.grank >= 2

    def to_json(self) -> dict:
        return {"r1_max": self.r1_max, "r2_max": self.r2_max, "grank": self.grank, "codes_checked": self.codes_checked}


def _global_vectors(net: Network, F: np.ndarray, p: int) -> np.ndarray:
    """Global coding vectors by forward substitution, one column per edge."""
    n = net.n_edges
    M = np.zeros((n, n), dtype=np.int64)
    for e in range(n):
        M[e, e] = 1
        for k in net.in_edges(net.edges[e].tail):
            if F[k, e]:
                M[:, e] = (M[:, e] + F[k, e] * M[:, k]) % p
    return M


def exhaustive_code_search(net: Network, p: int = 2) -> SearchResult:
    """Best rate region over every adjacency-respecting code on GF(p).

    Codes are ranked by (Grank, min(r1, r2), r1 + r2).
    """
    if p not in (2, 3):
        raise ValueError("exhaustive search is limited to GF(2) and GF(3)")
    if net.n_edges > CODE_SEARCH_MAX_EDGES:
        raise ValueError(f"exhaustive search capped at {CODE_SEARCH_MAX_EDGES} edges")
    sources = net.source_edges
    slots = [(k, e) for e in range(net.n_edges) if e not in sources for k in net.in_edges(net.edges[e].tail)]
    if len(slots) > CODE_SEARCH_MAX_COEFFS:
        raise ValueError(f"{len(slots)} free coefficients exceed the cap of {CODE_SEARCH_MAX_COEFFS}")
    r1_rows = list(net.out_edges(net.s1))
    r2_rows = list(net.out_edges(net.s2))
    c1, c2 = sorted(net.T1), sorted(net.T2)
    best = None
    count = 0
    for values in itertools.product(range(p), repeat=len(slots)):
        F = np.zeros((net.n_edges, net.n_edges), dtype=np.int64)
        for (k, e), x in zip(slots, values):
            F[k, e] = x
        M = _global_vectors(net, F, p)
        H1 = M[np.ix_(r1_rows, c1)]
        H2 = M[np.ix_(r2_rows, c1)]
        G2 = M[np.ix_(r2_rows, c2)]
        r1, r2, g = _region(H1, H2, G2, p)
        count += 1
        key = (g, min(r1, r2), r1 + r2)
        if best is None or key > best[0]:
            best = (key, r1, r2, g, F)
    _, r1, r2, g, F = best
    return SearchResult(r1, r2, g, count, tuple(tuple(int(x) for x in row) for row in F))


def _paths(net: Network, src: str, dests: frozenset[int]) -> list[frozenset[int]]:
    """Edge sets of every path from ``src`` ending on a destination edge."""
    out: list[frozenset[int]] = []

    def walk(v: str, used: tuple[int, ...]) -> None:
        for k in net.out_edges(v):
            path = used + (k,)
            if k in dests:
                out.append(frozenset(path))
            walk(net.edges[k].head, path)

    walk(src, ())
    return out


@dataclass(frozen=True)
class RoutingResult:
    corners: tuple[tuple[int, int], ...]
    sum_rate: int

    def to_json(self) -> dict:
        return {"corners": [list(c) for c in self.corners], "sum_rate": self.sum_rate}


def integral_routing_best(net: Network) -> RoutingResult:
    """Pareto-maximal (R1, R2) over packings of edge-disjoint unit paths."""
    if net.n_edges > ROUTING_MAX_EDGES:
        raise ValueError(f"routing enumeration capped at {ROUTING_MAX_EDGES} edges")
    p1 = _paths(net, net.s1, net.T1)
    p2 = _paths(net, net.s2, net.T2)
    achievable: set[tuple[int, int]] = set()

    def pack(paths: list[frozenset[int]], used: frozenset[int], start: int, count: int, found: dict[frozenset[int], int]):
        # record the most paths packed for each distinct used-edge set
        if found.get(used, -1) < count:
            found[used] = count
        for k in range(start, len(paths)):
            if not paths[k] & used:
                pack(paths, used | paths[k], k + 1, count + 1, found)

    first: dict[frozenset[int], int] = {}
    pack(p1, frozenset(), 0, 0, first)
    for used, r1 in first.items():
        second: dict[frozenset[int], int] = {}
        pack(p2, used, 0, 0, second)
        r2 = max(second.values())
        achievable.add((r1, r2))
    pareto = sorted(
        pt for pt in achievable if not any(o != pt and o[0] >= pt[0] and o[1] >= pt[1] for o in achievable)
    )
    return RoutingResult(tuple(pareto), max(a + b for a, b in achievable))


def grank_via_g1_enumeration(H1: FieldMatrix, H2: FieldMatrix, G2: FieldMatrix, p: int | None = None) -> int:
    """min over every G1 of rank [[H1, G1], [H2, G2]]."""
    p = p or H1.p
    if p > 3:
        raise ValueError("G1 enumeration is limited to GF(2) and GF(3)")
    if max(H1.rows, H1.cols, H2.rows, G2.cols) > G1_MAX_DIM:
        raise ValueError(f"G1 enumeration is limited to dimensions <= {G1_MAX_DIM}")
    rows1, cols2 = H1.rows, G2.cols
    bottom = np.hstack([H2.array, G2.array])
    best = None
    for values in itertools.product(range(p), repeat=rows1 * cols2):
        G1 = np.array(values, dtype=np.int64).reshape(rows1, cols2)
        r = _rank(np.vstack([np.hstack([H1.array, G1]), bottom]), p)
        if best is None or r < best:
            best = r
    return best


@dataclass(frozen=True)
class GnsCheck:
    grank: int
    gns: int | str
    ok: bool

    def to_json(self) -> dict:
        return {"grank": self.grank, "gns": self.gns, "ok": self.ok}


def gns_vs_sumrate(net: Network, st) -> GnsCheck:
    """Sum-rate functional of a finished code (anything with a transfer matrix ``M``) against the GNS bound."""
    M = st.M.array
    p = st.M.p
    r1_rows = list(net.out_edges(net.s1))
    r2_rows = list(net.out_edges(net.s2))
    c1, c2 = sorted(net.T1), sorted(net.T2)
    H1 = M[np.ix_(r1_rows, c1)]
    H2 = M[np.ix_(r2_rows, c1)]
    G2 = M[np.ix_(r2_rows, c2)]
    _, _, g = _region(H1, H2, G2, p)
    bound = gns_bound(net)
    ok = bound == "unbounded" or g <= bound
    return GnsCheck(g, bound, ok)

"""Linear-algebraic max-flow min-cut for a single unicast session.

The transfer matrix of a strictly upper triangular local coding matrix factors
into one atomic matrix per edge. The recursive construction peels the
highest-ordered edge, solves the smaller problems, mixes their codes and
picks the peeled edge's coefficients at random.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf
from .coder import DEFAULT_RETRIES, RetryExhausted
from .gf import FieldConfig, FieldMatrix
from .netgraph import Network, min_cut


def atomic(u: FieldMatrix, i: int) -> FieldMatrix:
    """Identity plus the strictly-upper part of column ``i`` of ``u``."""
    a = np.eye(u.rows, dtype=np.int64)
    a[:i, i] = u.array[:i, i]
    return FieldMatrix(a, u.p)


def atomic_decompose(u: FieldMatrix) -> list[FieldMatrix]:
    """Atomic factors ``[U1, ..., Un]`` with ``U = Un @ ... @ U1``."""
    if not gf.is_unitriangular(u):
        raise ValueError("atomic decomposition needs an upper unitriangular matrix")
    return [atomic(u, i) for i in range(u.rows)]


def network_transfer_via_atomic(F: FieldMatrix) -> FieldMatrix:
    """Product of the edge matrices ``(I + F)^[i]`` in forward order."""
    if not gf.is_strictly_upper(F):
        raise ValueError("local coding matrix must be strictly upper triangular")
    E = gf.add(FieldMatrix.identity(F.rows, F.p), F)
    out = FieldMatrix.identity(F.rows, F.p)
    for i in range(F.rows):
        out = gf.mul(out, atomic(E, i))
    return out


def transfer(F: np.ndarray, p: int) -> np.ndarray:
    n = F.shape[0]
    return gf.inv_unitriangular(gf.sub(FieldMatrix.identity(n, p), FieldMatrix(F, p))).array


def transfer_rank(F: np.ndarray, p: int, rows: list[int], cols) -> int:
    cols = sorted(cols)
    if not rows or not cols:
        return 0
    M = transfer(F, p)
    return gf.rank(FieldMatrix(M[np.ix_(rows, cols)], p))


@dataclass(frozen=True)
class UnicastProblem:
    """Single session from vertex ``s`` to the edge set ``T``; the network's own destinations are ignored."""

    network: Network
    s: str
    T: frozenset[int]


@dataclass(frozen=True)
class CombineTarget:
    """Rank requirements for a mixed code: ``star`` must carry ``target - 1``, ``star | extra`` at least ``target``."""

    rows: tuple[int, ...]
    star: frozenset[int]
    extra: frozenset[int]
    target: int


def combination_ok(F: np.ndarray, sel: CombineTarget, p: int) -> bool:
    M = transfer(F, p)
    rows = list(sel.rows)

    def r(cols) -> int:
        cols = sorted(cols)
        if not rows or not cols:
            return 0
        return gf.rank(FieldMatrix(M[np.ix_(rows, cols)], p))

    return r(sel.star) >= sel.target - 1 and r(sel.star | sel.extra) >= sel.target


def combine_solutions(
    F_a: FieldMatrix,
    F_b: FieldMatrix,
    sel: CombineTarget,
    rng: np.random.Generator,
    retries: int = DEFAULT_RETRIES,
) -> tuple[int, int, FieldMatrix]:
    """Random ``p F_a + q F_b`` meeting both rank requirements of ``sel``."""
    prime = F_a.p
    for _ in range(retries):
        pc, qc = (int(x) for x in rng.integers(0, prime, size=2))
        F = gf.add(gf.scale(pc, F_a), gf.scale(qc, F_b))
        if combination_ok(F.array, sel, prime):
            return pc, qc, F
    raise RetryExhausted(f"no working mix of the two sub-codes in {retries} attempts")


@dataclass
class UnicastSolution:
    problem: UnicastProblem
    F: FieldMatrix
    rank: int
    min_cut: int
    retries_used: int = 0
    subproblems: int = 0


@dataclass
class _Solver:
    net: Network
    s: str
    p: int
    rng: np.random.Generator
    retries: int
    memo: dict = field(default_factory=dict)
    cuts: dict = field(default_factory=dict)
    retries_used: int = 0

    def __post_init__(self):
        self.rows = list(self.net.out_edges(self.s))

    def cut(self, n: int, T: frozenset[int]) -> int:
        """Min-cut from ``s`` to ``T`` using only the first ``n`` edges."""
        if not T:
            return 0
        key = (n, T)
        if key not in self.cuts:
            self.cuts[key] = min_cut(self.net, self.s, T, removed=range(n, self.net.n_edges))
        return self.cuts[key]

    def rank_of(self, F: np.ndarray, T) -> int:
        return transfer_rank(F, self.p, self.rows, T)

    def solve(self, n: int, T: frozenset[int]) -> np.ndarray:
        key = (n, T)
        if key in self.memo:
            return self.memo[key]
        F = self._solve(n, T)
        self.memo[key] = F
        return F

    def _solve(self, n: int, T: frozenset[int]) -> np.ndarray:
        size = self.net.n_edges
        if not T:
            return np.zeros((size, size), dtype=np.int64)
        e = n - 1
        if e not in T:
            return self.solve(n - 1, T)
        rest = T - {e}
        v = self.net.edges[e].tail
        if v == self.s:
            return self.solve(n - 1, rest)
        c = self.cut(n, T)
        if self.cut(n - 1, rest) == c:
            # e lies in no min-cut: leave its coefficients at zero
            return self.solve(n - 1, rest)
        parents = list(self.net.in_edges(v))
        F_a = FieldMatrix(self.solve(n - 1, rest | frozenset(parents)), self.p)
        F_b = FieldMatrix(self.solve(n - 1, rest), self.p)
        sel = CombineTarget(tuple(self.rows), rest, frozenset(parents), c)
        for attempt in range(self.retries):
            _, _, mixed = combine_solutions(F_a, F_b, sel, self.rng, self.retries)
            F = mixed.array.copy()
            F[parents, e] = self.rng.integers(0, self.p, size=len(parents), dtype=np.int64)
            if self.rank_of(F, T) == c:
                self.retries_used = max(self.retries_used, attempt)
                return F
        raise RetryExhausted(f"edge {self.net.edges[e].name}: rank stayed below min-cut {c}")


def single_unicast_code(
    problem: UnicastProblem,
    cfg: FieldConfig = FieldConfig(),
    rng: np.random.Generator | None = None,
    retries: int = DEFAULT_RETRIES,
) -> UnicastSolution:
    """Local coding matrix whose source-to-``T`` transfer rank equals the min-cut."""
    net = problem.network
    if rng is None:
        rng = np.random.default_rng()
    if not net.vertex_reaches(problem.s, problem.T):
        raise ValueError(f"source {problem.s} reaches no destination edge")
    solver = _Solver(net, problem.s, cfg.p, rng, retries)
    F = solver.solve(net.n_edges, frozenset(problem.T))
    c = solver.cut(net.n_edges, frozenset(problem.T))
    r = solver.rank_of(F, problem.T)
    return UnicastSolution(problem, FieldMatrix(F, cfg.p), r, c, solver.retries_used, len(solver.memo))


def lemma5_holds(net: Network, s: str, T: frozenset[int]) -> bool | None:
    """Min-cut relations after peeling the last edge, when it lies in a min-cut.

    Returns ``None`` when the last edge is not a destination edge from a
    non-source vertex or lies in no min-cut (nothing to check).
    """
    n = net.n_edges
    e = n - 1
    if e not in T or net.edges[e].tail == s:
        return None
    drop = range(n - 1, n)
    rest = T - {e}
    c = min_cut(net, s, T)
    c_star = min_cut(net, s, rest, removed=drop) if rest else 0
    if c_star == c:
        return None
    grown = rest | frozenset(net.in_edges(net.edges[e].tail))
    c_grown = min_cut(net, s, grown, removed=drop) if grown else 0
    return c_star == c - 1 and c_grown >= c

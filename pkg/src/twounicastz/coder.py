"""Grank, alignment vectors and the recursive stage-by-stage code construction."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import gf
from .gf import FieldConfig, FieldMatrix, hstack, in_colspan, rank, vstack
from .netgraph import Network
from .reduction import ReductionSequence

DEFAULT_RETRIES = 16


class RetryExhausted(RuntimeError):
    """A randomized step kept failing its rank check."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


# -- Grank -----------------------------------------------------------------


def grank(H1: FieldMatrix, H2: FieldMatrix, G2: FieldMatrix) -> int:
    """rank[H1; H2] + rank[H2 | G2] - rank(H2)."""
    if H1.cols != H2.cols:
        raise ValueError(f"H1 and H2 column counts differ: {H1.cols} vs {H2.cols}")
    if H2.rows != G2.rows:
        raise ValueError(f"H2 and G2 row counts differ: {H2.rows} vs {G2.rows}")
    return rank(vstack([H1, H2])) + rank(hstack([H2, G2])) - rank(H2)


def lemma2_alignable(H2: FieldMatrix, G2: FieldMatrix, B: FieldMatrix) -> bool:
    """colspan(B) within colspan[H2 | G2] but not within colspan(H2)."""
    return in_colspan(hstack([H2, G2]), B) and not in_colspan(H2, B)


def _draw_aligned(H2: FieldMatrix, B: FieldMatrix, rng: np.random.Generator) -> FieldMatrix | None:
    """Random nonzero null vector of [H2 | B], cut down to its last cols(B) entries."""
    p = B.p
    basis = gf.nullspace_basis(hstack([H2, B]))
    if basis.cols == 0:
        return None
    tail = basis.array[H2.cols :]
    if not tail.any():
        return None
    while True:
        coeff = rng.integers(0, p, size=(basis.cols, 1), dtype=np.int64)
        f = FieldMatrix(tail @ coeff, p)
        if not f.is_zero():
            return f


def alignment_vector(
    H1: FieldMatrix,
    H2: FieldMatrix,
    G2: FieldMatrix,
    A: FieldMatrix,
    B: FieldMatrix,
    rng: np.random.Generator,
    retries: int = DEFAULT_RETRIES,
) -> FieldMatrix:
    """Column ``f`` raising Grank by one when ``[A; B] f`` is appended to ``[H1; H2]``.

    If colspan(B) lies in colspan[H2 | G2] but not in colspan(H2), ``f`` comes
    from a random null vector of [H2 | B] so that ``B f`` aligns inside
    colspan(H2). Otherwise ``f`` is uniformly random.
    """
    if A.cols != B.cols or A.rows != H1.rows or B.rows != H2.rows:
        raise ValueError("A/B blocks do not conform to H1/H2")
    base = grank(H1, H2, G2)
    if grank(hstack([H1, A]), hstack([H2, B]), G2) <= base:
        raise ValueError("appending [A; B] cannot raise Grank; no alignment vector exists")
    aligned = lemma2_alignable(H2, G2, B)
    for _ in range(retries):
        f = _draw_aligned(H2, B, rng) if aligned else gf.random_column(A.cols, rng, A.p)
        if f is None:
            break
        if grank(hstack([H1, gf.mul(A, f)]), hstack([H2, gf.mul(B, f)]), G2) == base + 1:
            return f
    raise RetryExhausted(f"no Grank-raising vector after {retries} attempts (aligned={aligned})")


# -- coding state ----------------------------------------------------------


@dataclass(frozen=True)
class TransferTriple:
    H1: FieldMatrix
    H2: FieldMatrix
    G1: FieldMatrix
    G2: FieldMatrix


@dataclass(frozen=True)
class RateReport:
    r1_max: int
    r2_max: int
    grank: int
    sum_cap_alt: int
    region_corners: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "r1_max": self.r1_max,
            "r2_max": self.r2_max,
            "grank": self.grank,
            "sum_cap_alt": self.sum_cap_alt,
            "region_corners": [list(c) for c in self.region_corners],
        }


@dataclass(frozen=True)
class Alignment:
    stage: int
    vertex: str
    edge: str


@dataclass(frozen=True)
class CodingState:
    """Local coding matrix ``F`` with its transfer matrix ``M = (I - F)^-1``."""

    network: Network
    seq: ReductionSequence
    F: FieldMatrix
    M: FieldMatrix
    stage_cursor: int
    aligned_at: tuple[Alignment, ...] = ()
    violations: tuple[str, ...] = ()
    retries_used: int = 0

    @property
    def p(self) -> int:
        return self.F.p

    @property
    def coded(self) -> frozenset[int]:
        out: set[int] = set()
        for s in self.seq.stages[self.stage_cursor :]:
            out |= s.T1 | s.T2
        return frozenset(out)


def _block(M: np.ndarray, rows: Sequence[int], cols: Sequence[int], p: int) -> FieldMatrix:
    return FieldMatrix(M[np.ix_(list(rows), list(cols))].reshape(len(rows), len(cols)), p)


class _StageCoder:
    def __init__(self, seq: ReductionSequence, p: int, rng: np.random.Generator, retries: int):
        self.seq = seq
        self.net = seq.network
        self.p = p
        self.rng = rng
        self.retries = retries
        n = self.net.n_edges
        self.F = np.zeros((n, n), dtype=np.int64)
        self.M = np.eye(n, dtype=np.int64)
        self.r1 = list(self.net.out_edges(self.net.s1))
        self.r2 = list(self.net.out_edges(self.net.s2))
        self.aligned: list[Alignment] = []
        self.retries_used = 0

    # blocks of M restricted to source rows
    def H1(self, cols) -> FieldMatrix:
        return _block(self.M, self.r1, sorted(cols), self.p)

    def H2(self, cols) -> FieldMatrix:
        return _block(self.M, self.r2, sorted(cols), self.p)

    def G2(self, cols) -> FieldMatrix:
        return self.H2(cols)

    def triple_grank(self, hcols, gcols) -> int:
        return grank(self.H1(hcols), self.H2(hcols), self.G2(gcols))

    def set_local(self, parents: list[int], e: int, f: np.ndarray) -> None:
        self.F[parents, e] = f.ravel() % self.p
        col = np.zeros(self.net.n_edges, dtype=np.int64)
        col[e] = 1
        if parents:
            col = (col + self.M[:, parents] @ self.F[parents, e]) % self.p
        self.M[:, e] = col

    def _generic(self, base: FieldMatrix, new: FieldMatrix, pool: FieldMatrix) -> bool:
        """``new`` (drawn from span(pool)) adds as much rank to ``base`` as possible."""
        r = rank(base)
        return rank(hstack([base, new])) == min(r + new.cols, rank(hstack([base, pool])))

    def phase1(self, i: int) -> None:
        s = self.seq.stages[i]
        nxt = self.seq.stages[i + 1]
        # every in-edge of v is a next-stage destination, new or not
        I2 = sorted(self.net.in_edges(s.v))
        B2 = sorted(s.B2)
        base = hstack([self.H2(nxt.T1), self.G2(s.U2)])
        pool = self.G2(I2)
        stacked_pool = vstack([self.H1(I2), pool])
        for attempt in range(self.retries):
            block = self.rng.integers(0, self.p, size=(len(I2), len(B2)), dtype=np.int64)
            F = FieldMatrix(block, self.p)
            new = gf.mul(pool, F)
            ok = self._generic(base, new, pool) and self._generic(
                FieldMatrix.zeros(stacked_pool.rows, 0, self.p), gf.mul(stacked_pool, F), stacked_pool
            )
            if ok and not pool.is_zero():
                ok = all(not new.column(k).is_zero() for k in range(new.cols))
            if ok:
                break
        else:
            raise RetryExhausted(f"stage {i} phase 1 failed its rank checks {self.retries} times")
        self.retries_used = max(self.retries_used, attempt)
        for k, e in enumerate(B2):
            self.set_local(I2, e, block[:, k])

    def phase2(self, i: int) -> None:
        s = self.seq.stages[i]
        nxt = self.seq.stages[i + 1]
        target = self.triple_grank(nxt.T1, nxt.T2)
        I1 = sorted(self.net.in_edges(s.v))
        A = self.H1(I1)
        B = self.H2(I1)
        done: list[int] = []
        for e in sorted(s.O1):
            hcols = sorted(s.U1 | set(done))
            gcols = sorted(s.U2 | (set(done) & s.A2) | s.B2)
            H1, H2, G2 = self.H1(hcols), self.H2(hcols), self.G2(gcols)
            cur = grank(H1, H2, G2)
            gain = grank(hstack([H1, A]), hstack([H2, B]), G2) > cur
            align = target > cur and not in_colspan(H2, B) and in_colspan(hstack([H2, G2]), B)
            f = None
            if align:
                if gain:
                    f = alignment_vector(H1, H2, G2, A, B, self.rng, self.retries)
                else:
                    f = _draw_aligned(H2, B, self.rng)
            if f is not None:
                self.aligned.append(Alignment(i, s.v, self.net.edges[e].name))
            else:
                f = self._random_step(i, e, H1, H2, G2, A, B, cur, gain)
            self.set_local(I1, e, f.array)
            done.append(e)

    def _random_step(self, i, e, H1, H2, G2, A, B, cur, gain) -> FieldMatrix:
        stacked = vstack([H1, H2])
        AB = vstack([A, B])
        H2G2 = hstack([H2, G2])
        for attempt in range(self.retries):
            f = gf.random_column(A.cols, self.rng, self.p)
            Af, Bf = gf.mul(A, f), gf.mul(B, f)
            ABf = vstack([Af, Bf])
            ok = (
                self._generic(stacked, ABf, AB)
                and self._generic(H2, Bf, B)
                and self._generic(H2G2, Bf, B)
                and (not gain or grank(hstack([H1, Af]), hstack([H2, Bf]), G2) == cur + 1)
            )
            if ok:
                self.retries_used = max(self.retries_used, attempt)
                return f
        raise RetryExhausted(f"stage {i} edge {self.net.edges[e].name}: random step failed {self.retries} times")

    def run(self) -> CodingState:
        N = self.seq.N
        for i in range(N - 1, -1, -1):
            s = self.seq.stages[i]
            if s.B2:
                self.phase1(i)
            self.phase2(i)
        F = FieldMatrix(self.F, self.p)
        M = FieldMatrix(self.M, self.p)
        n = self.net.n_edges
        if not M == gf.inv_unitriangular(gf.sub(FieldMatrix.identity(n, self.p), F)):
            raise AssertionError("incremental transfer matrix drifted from (I - F)^-1")
        st = CodingState(
            network=self.net,
            seq=self.seq,
            F=F,
            M=M,
            stage_cursor=0,
            aligned_at=tuple(self.aligned),
            retries_used=self.retries_used,
        )
        return replace(st, violations=tuple(lemma_violations(st)))


def recursive_coding(
    seq: ReductionSequence,
    cfg: FieldConfig = FieldConfig(),
    rng: np.random.Generator | None = None,
    retries: int = DEFAULT_RETRIES,
) -> CodingState:
    """Code every stage from the sources down to the original destinations.

    Stage ``N`` is the identity on source edges. Each earlier stage first fills
    the edges feeding only destination 2 at random, then codes the destination-1
    edges one at a time, aligning when the Grank conditions call for it.
    """
    if rng is None:
        rng = np.random.default_rng()
    return _StageCoder(seq, cfg.p, rng, retries).run()


# -- reading results -------------------------------------------------------


def transfer_triple(st: CodingState, T1, T2) -> TransferTriple:
    T1, T2 = frozenset(T1), frozenset(T2)
    missing = (T1 | T2) - st.coded
    if missing:
        raise ValueError(f"edges not yet coded: {st.network.names(missing)}")
    net = st.network
    r1 = list(net.out_edges(net.s1))
    r2 = list(net.out_edges(net.s2))
    M = st.M.array
    c1, c2 = sorted(T1), sorted(T2)
    return TransferTriple(
        H1=_block(M, r1, c1, st.p),
        H2=_block(M, r2, c1, st.p),
        G1=_block(M, r1, c2, st.p),
        G2=_block(M, r2, c2, st.p),
    )


def final_triple(st: CodingState) -> TransferTriple:
    return transfer_triple(st, st.network.T1, st.network.T2)


def region_corners(r1: int, r2: int, total: int) -> tuple[tuple[int, int], ...]:
    """Vertices of {R1 <= r1, R2 <= r2, R1 + R2 <= total, R >= 0}."""
    a = min(r1, total)
    b = min(r2, total)
    pts = [(0, 0), (a, 0), (a, min(b, total - a)), (min(a, total - b), b), (0, b)]
    out: list[tuple[int, int]] = []
    for pt in pts:
        if pt not in out:
            out.append(pt)
    return tuple(out)


def rate_region(t: TransferTriple) -> RateReport:
    r1 = rank(t.H1)
    r2 = rank(t.G2)
    g = grank(t.H1, t.H2, t.G2)
    return RateReport(r1_max=r1, r2_max=r2, grank=g, sum_cap_alt=r1 + r2, region_corners=region_corners(r1, r2, g))


def contains_one_one(r: RateReport) -> bool:
    return r.r1_max >= 1 and r.r2_max >= 1 and r.grank >= 2


def stage_granks(st: CodingState) -> list[int]:
    """Grank of every stage's destination sets under the final code, index = stage."""
    out = []
    for s in st.seq.stages:
        t = transfer_triple(st, s.T1, s.T2)
        out.append(grank(t.H1, t.H2, t.G2))
    return out


@dataclass
class MonotoneReport:
    granks: list[int]
    ok: bool
    witness: tuple[int, int] | None = field(default=None)


def grank_monotone_suite(seq: ReductionSequence, st: CodingState) -> MonotoneReport:
    """Check Grank never grows when moving from stage ``N`` towards stage 0."""
    g = stage_granks(st)
    for i in range(len(g) - 1):
        if g[i] > g[i + 1]:
            return MonotoneReport(g, False, (i, i + 1))
    return MonotoneReport(g, True)


def lemma_violations(st: CodingState) -> list[str]:
    """Runtime checks on the finished code.

    * no stage's stacked [H1; H2] over T1 has an all-zero column (edges no
      source reaches are exempt);
    * after an alignment at stage k, G2 over T2 \\ T1 is nonzero at every
      stage i <= k.
    """
    net = st.network
    out = []
    live = net.reachable_edges(net.s1) | net.reachable_edges(net.s2)
    for s in st.seq.stages:
        t = transfer_triple(st, s.T1, s.T2)
        stacked = vstack([t.H1, t.H2]).array
        for k, e in enumerate(sorted(s.T1)):
            if e in live and not stacked[:, k].any():
                out.append(f"stage {s.i}: zero column for {net.edges[e].name} in stacked H")
    if st.aligned_at:
        k = max(a.stage for a in st.aligned_at)
        for s in st.seq.stages[: k + 1]:
            Q = s.T2 - s.T1
            if not Q or transfer_triple(st, s.T1, Q).G2.is_zero():
                out.append(f"stage {s.i}: G2 over T2 \\ T1 is zero after alignment at stage {k}")
    return out

"""Destination reduction: peel the highest-ordered destination edges back to the sources."""

from __future__ import annotations

from dataclasses import dataclass, field

from .netgraph import Network, is_cut, is_pruned


class ReductionError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionStage:
    """Destination sets of one problem plus the change sets towards the next.

    For the last stage ``v`` is ``None`` and every change set is empty.
    """

    i: int
    T1: frozenset[int]
    T2: frozenset[int]
    v: str | None = None
    U1: frozenset[int] = frozenset()
    U2: frozenset[int] = frozenset()
    I1: frozenset[int] = frozenset()
    I2: frozenset[int] = frozenset()
    O1: frozenset[int] = frozenset()
    O2: frozenset[int] = frozenset()
    A2: frozenset[int] = frozenset()
    B2: frozenset[int] = frozenset()

    def to_json(self, net: Network) -> dict:
        out: dict = {"i": self.i, "T1": net.names(self.T1), "T2": net.names(self.T2), "v": self.v}
        for key in ("U1", "U2", "I1", "I2", "O1", "A2", "B2"):
            out[key] = net.names(getattr(self, key))
        return out


def _stage(i: int, cur: tuple[frozenset[int], frozenset[int]], nxt: tuple[frozenset[int], frozenset[int]], v: str) -> ReductionStage:
    U = [cur[j] & nxt[j] for j in (0, 1)]
    I = [nxt[j] - U[j] for j in (0, 1)]
    O = [cur[j] - U[j] for j in (0, 1)]
    return ReductionStage(
        i=i,
        T1=cur[0],
        T2=cur[1],
        v=v,
        U1=U[0],
        U2=U[1],
        I1=I[0],
        I2=I[1],
        O1=O[0],
        O2=O[1],
        A2=O[1] & O[0],
        B2=O[1] - O[0],
    )


@dataclass(frozen=True)
class ReductionSequence:
    network: Network
    stages: tuple[ReductionStage, ...]

    @property
    def N(self) -> int:
        return len(self.stages) - 1

    def table(self) -> dict[str, list[list[str]]]:
        """Per-stage destination sets by edge name."""
        net = self.network
        return {
            "T1": [net.names(s.T1) for s in self.stages],
            "T2": [net.names(s.T2) for s in self.stages],
        }

    def trace(self) -> list[dict]:
        return [s.to_json(self.network) for s in self.stages]

    def coded_at(self, i: int) -> frozenset[int]:
        """Edges first given coefficients when stage ``i`` is coded."""
        s = self.stages[i]
        return s.O1 | s.B2


def reduce(n: Network) -> ReductionSequence:
    """Run destination reduction until every destination edge leaves a source."""
    if not is_pruned(n):
        dead = [n.edges[k].name for k in range(n.n_edges) if not (n.reaches_from(k) & (n.T1 | n.T2))]
        raise ReductionError(f"network is not pruned; edges reaching no destination: {dead}")
    S = n.source_edges
    T = (n.T1, n.T2)
    raw: list[tuple[tuple[frozenset[int], frozenset[int]], str | None]] = []
    while not (T[0] | T[1]) <= S:
        union = T[0] | T[1]
        top = max(n.edge_order[k] for k in union)
        E = frozenset(k for k in union if n.edge_order[k] == top)
        v = n.edges[next(iter(E))].tail
        inv = frozenset(n.in_edges(v))
        nxt = tuple((T[j] - E) | inv if T[j] & E else T[j] for j in (0, 1))
        raw.append((T, v))
        T = nxt
    raw.append((T, None))
    stages = []
    for i, (cur, v) in enumerate(raw[:-1]):
        stages.append(_stage(i, cur, raw[i + 1][0], v))
    stages.append(ReductionStage(i=len(raw) - 1, T1=T[0], T2=T[1]))
    return ReductionSequence(network=n, stages=tuple(stages))


def stage_sets(seq: ReductionSequence, i: int) -> ReductionStage:
    if not 0 <= i < seq.N:
        raise IndexError(f"stage index {i} outside [0, {seq.N})")
    return seq.stages[i]


@dataclass
class PropertyReport:
    results: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, list[str]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.results.values())

    def fail(self, name: str, witness: str) -> None:
        self.results[name] = False
        self.witnesses.setdefault(name, []).append(witness)

    def to_json(self) -> dict:
        return {"ok": self.ok, "results": self.results, "witnesses": self.witnesses}


def validate_properties(seq: ReductionSequence) -> PropertyReport:
    """Check the five structural properties of a reduction sequence.

    Property (i) is checked in the form the algorithm guarantees: the removed
    edges share the tail ``v`` and the added edges are exactly the in-edges of
    ``v`` not already present.
    """
    net = seq.network
    st = seq.stages
    N = seq.N
    rep = PropertyReport({k: True for k in ("i", "ii", "iii", "iv", "v")})

    for i in range(N):
        s, t = st[i], st[i + 1]
        inv = frozenset(net.in_edges(s.v))
        for j, (cur, nxt) in enumerate(((s.T1, t.T1), (s.T2, t.T2)), start=1):
            gone, added = cur - nxt, nxt - cur
            if any(net.edges[k].tail != s.v for k in gone):
                rep.fail("i", f"stage {i} T{j}: removed edges do not share tail {s.v}")
            if gone and added != inv - cur:
                rep.fail("i", f"stage {i} T{j}: added {net.names(added)} != In({s.v}) \\ T{j}")
            if not gone and added:
                rep.fail("i", f"stage {i} T{j}: edges added without a removal")

    last_seen: list[dict[int, int]] = [{}, {}]
    for s in st:
        for j, T in enumerate((s.T1, s.T2)):
            for k in T:
                last_seen[j][k] = s.i
    for k in range(net.n_edges):
        hits = [bool(net.reaches_from(k) & T) for T in (net.T1, net.T2)]
        for j in (0, 1):
            if hits[j] and k not in last_seen[j]:
                rep.fail("ii", f"edge {net.edges[k].name} reaches T{j + 1} but never appears in it")
        if all(hits) and k in last_seen[0] and k in last_seen[1] and last_seen[0][k] != last_seen[1][k]:
            rep.fail("ii", f"edge {net.edges[k].name}: last stages differ {last_seen[0][k]} vs {last_seen[1][k]}")

    for i in range(N):
        level = net.vertex_order[st[i].v]
        lower = frozenset(k for k in range(net.n_edges) if net.edge_order[k] < level)
        later = frozenset().union(*(s.T1 | s.T2 for s in st[i + 1 :]))
        if lower != later:
            rep.fail("iii", f"stage {i}: lower-ordered {net.names(lower)} != later destinations {net.names(later)}")

    final = st[N].T1 | st[N].T2
    S = net.source_edges
    if not final <= S:
        rep.fail("iv", f"final destinations {net.names(final - S)} are not source edges")
    elif final != S and all(net.reaches_from(k) & (net.T1 | net.T2) for k in S):
        rep.fail("iv", f"source edges {net.names(S - final)} missing from the final stage")

    for s in st:
        for j, (Tj, orig) in enumerate(((s.T1, net.T1), (s.T2, net.T2)), start=1):
            for src in (net.s1, net.s2):
                if not is_cut(net, src, orig, Tj):
                    rep.fail("v", f"stage {s.i}: T{j} does not cut {src} from the original T{j}")
    return rep

"""Command line: parse networks, run the coders and sweeps, print JSON reports."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .coder import (
    DEFAULT_RETRIES,
    RetryExhausted,
    contains_one_one,
    final_triple,
    grank_monotone_suite,
    rate_region,
    recursive_coding,
)
from .gf import FieldConfig
from .mfmc import UnicastProblem, single_unicast_code
from .netgraph import (
    GNS_EDGE_CAP,
    CycleError,
    DagParams,
    Network,
    cut_report,
    gns_bound,
    has_single_edge_gns,
    is_pruned,
    prune_noncontributing,
    random_dag,
)
from .reduction import ReductionError, reduce

BUILTIN = {"fig5": "fig5.json", **{f"regress{k}": f"regress{k}.json" for k in range(1, 6)}}


def package_version() -> str:
    try:
        return version("twounicastz")
    except PackageNotFoundError:
        return "0+unknown"


# -- ingestion -------------------------------------------------------------


class NetworkParseError(ValueError):
    """Invalid network document; ``pointer`` is a JSON pointer to the culprit."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


def _require(doc: dict, key: str, kind: type, pointer: str = ""):
    if key not in doc:
        raise NetworkParseError(f"{pointer}/{key}", "missing")
    value = doc[key]
    if not isinstance(value, kind):
        raise NetworkParseError(f"{pointer}/{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def parse_network(doc: Any, strict: bool = False, warn: Callable[[str], None] | None = None) -> Network:
    """Validated network from a decoded JSON document.

    Unreachable destinations (``s_i`` cannot reach ``T_i``) are reported through
    ``warn``, or raised when ``strict``.
    """
    if not isinstance(doc, dict):
        raise NetworkParseError("", "document must be an object")
    vertices = _require(doc, "vertices", list)
    for k, v in enumerate(vertices):
        if not isinstance(v, str):
            raise NetworkParseError(f"/vertices/{k}", "vertex ids must be strings")
    seen_v: set[str] = set()
    for k, v in enumerate(vertices):
        if v in seen_v:
            raise NetworkParseError(f"/vertices/{k}", f"duplicate vertex {v!r}")
        seen_v.add(v)
    edges = _require(doc, "edges", list)
    triples = []
    seen_e: dict[str, int] = {}
    for k, e in enumerate(edges):
        ptr = f"/edges/{k}"
        if not isinstance(e, dict):
            raise NetworkParseError(ptr, "edge must be an object")
        name = _require(e, "id", str, ptr)
        tail = _require(e, "tail", str, ptr)
        head = _require(e, "head", str, ptr)
        if name in seen_e:
            raise NetworkParseError(f"{ptr}/id", f"duplicate edge id {name!r}")
        seen_e[name] = k
        for key, v in (("tail", tail), ("head", head)):
            if v not in seen_v:
                raise NetworkParseError(f"{ptr}/{key}", f"unknown vertex {v!r}")
        triples.append((name, tail, head))
    for key in ("s1", "s2"):
        if _require(doc, key, str) not in seen_v:
            raise NetworkParseError(f"/{key}", f"unknown vertex {doc[key]!r}")
    for key in ("T1", "T2"):
        T = _require(doc, key, list)
        if not T:
            raise NetworkParseError(f"/{key}", "destination set is empty")
        for k, name in enumerate(T):
            if name not in seen_e:
                raise NetworkParseError(f"/{key}/{k}", f"unknown edge {name!r}")
    try:
        net = Network.build(vertices, triples, doc["s1"], doc["s2"], doc["T1"], doc["T2"])
    except CycleError as exc:
        raise NetworkParseError(f"/edges/{seen_e[exc.edge_name]}", str(exc)) from None
    if doc.get("prune", False):
        net = prune_noncontributing(net)
    for j, (s, T) in enumerate(((net.s1, net.T1), (net.s2, net.T2)), start=1):
        if not net.vertex_reaches(s, T):
            msg = f"source {s} cannot reach T{j}"
            if strict:
                raise NetworkParseError(f"/T{j}", msg)
            if warn is not None:
                warn(msg)
    return net


def load_network(source: str, strict: bool = False, warn: Callable[[str], None] | None = None) -> Network:
    """Network from a file path, ``-`` for stdin, or a built-in fixture name."""
    if source in BUILTIN:
        text = resources.files("twounicastz.fixtures").joinpath(BUILTIN[source]).read_text()
    elif source == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise NetworkParseError("", f"cannot read {source}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkParseError("", f"invalid JSON: {exc}") from None
    return parse_network(doc, strict=strict, warn=warn)


# -- reports ---------------------------------------------------------------


def emit_report(body: dict, seed: int | None, field_p: int) -> str:
    """Body keys in their given order followed by provenance."""
    out = dict(body)
    out["seed"] = seed
    out["field_p"] = field_p
    out["version"] = package_version()
    return json.dumps(out, indent=2)


def _rng(seed: int, attempt: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, attempt]))


def code_report(net: Network, seed: int, cfg: FieldConfig, retries: int, trace: bool = False) -> dict:
    """Reduce, code and summarise one network."""
    if not is_pruned(net):
        net = prune_noncontributing(net)
    seq = reduce(net)
    st = recursive_coding(seq, cfg, _rng(seed), retries)
    rep = rate_region(final_triple(st))
    cuts = cut_report(net)
    body = rep.to_json()
    body["gns"] = cuts.gns
    body["mincuts"] = {"s1_T1": cuts.c11, "s2_T1": cuts.c21, "s2_T2": cuts.c22}
    body["aligned_at"] = [{"stage": a.stage, "vertex": a.vertex, "edge": a.edge} for a in st.aligned_at]
    if trace:
        body["stage_granks"] = grank_monotone_suite(seq, st).granks
        body["stages"] = seq.trace()
    return body


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class Theorem1Trial:
    seed: int
    n_edges: int
    gns: int | str | None
    grank: int
    first_ok: bool
    ok: bool
    attempts: int
    single_edge_gns: bool
    converse_ok: bool
    dominance_ok: bool | None
    monotone_ok: bool
    violations: tuple[str, ...]

    @property
    def eligible(self) -> bool:
        """Counts towards the (1,1) claim: a GNS bound of at least 2."""
        return self.gns == "unbounded" or (isinstance(self.gns, int) and self.gns >= 2)

    @property
    def passed(self) -> bool:
        return (
            (self.ok or not self.eligible)
            and self.converse_ok
            and self.dominance_ok is not False
            and self.monotone_ok
            and not self.violations
        )


def theorem1_params(seed: int, max_vertices: int = 12) -> DagParams:
    """Instance shape for seed ``seed``: 6 to ``max_vertices`` vertices, in-degree at most 4."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    return DagParams(
        n_vertices=int(rng.integers(6, max_vertices + 1)),
        max_in_degree=4,
        edge_density=0.35,
        seed=seed,
    )


def theorem1_trial(seed: int, p: int = 65521, retries: int = DEFAULT_RETRIES, max_vertices: int = 12) -> Theorem1Trial:
    net = random_dag(theorem1_params(seed, max_vertices))
    seq = reduce(net)
    cfg = FieldConfig(p)
    gns = gns_bound(net) if net.n_edges <= GNS_EDGE_CAP else None
    first = None
    st = rep = None
    attempts = 0
    ok = False
    for attempt in range(retries):
        attempts = attempt + 1
        try:
            st = recursive_coding(seq, cfg, _rng(seed, attempt), retries)
        except RetryExhausted:
            if first is None:
                first = False
            continue
        rep = rate_region(final_triple(st))
        ok = contains_one_one(rep)
        if first is None:
            first = ok
        if ok or gns is None or (isinstance(gns, int) and gns < 2):
            break
    if st is None:
        raise RetryExhausted(f"seed {seed}: coding failed in every attempt")
    single = has_single_edge_gns(net) is not None
    return Theorem1Trial(
        seed=seed,
        n_edges=net.n_edges,
        gns=gns,
        grank=rep.grank,
        first_ok=bool(first),
        ok=ok,
        attempts=attempts,
        single_edge_gns=single,
        converse_ok=not single or rep.grank <= 1,
        dominance_ok=None if gns is None or gns == "unbounded" else rep.grank <= gns,
        monotone_ok=grank_monotone_suite(seq, st).ok,
        violations=st.violations,
    )


@dataclass(frozen=True)
class MfmcTrial:
    seed: int
    n_edges: int
    rank: int
    min_cut: int
    retries_used: int

    @property
    def passed(self) -> bool:
        return self.rank == self.min_cut


def mfmc_instance(seed: int, max_vertices: int = 10) -> UnicastProblem:
    """Random single-unicast problem: a source and 1 to 4 destination edges it reaches."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    params = DagParams(
        n_vertices=int(rng.integers(5, max_vertices + 1)),
        max_in_degree=4,
        edge_density=float(rng.uniform(0.3, 0.8)),
        seed=seed,
    )
    net = random_dag(params)
    s = net.s1 if rng.integers(2) == 0 else net.s2
    pool = sorted(net.reachable_edges(s) - frozenset(net.out_edges(s))) or sorted(net.reachable_edges(s))
    k = int(rng.integers(1, min(4, len(pool)) + 1))
    T = frozenset(int(x) for x in rng.choice(pool, size=k, replace=False))
    return UnicastProblem(net, s, T)


def mfmc_trial(seed: int, p: int = 65521, retries: int = DEFAULT_RETRIES, max_vertices: int = 10) -> MfmcTrial:
    prob = mfmc_instance(seed, max_vertices)
    sol = single_unicast_code(prob, FieldConfig(p), _rng(seed), retries)
    return MfmcTrial(seed, prob.network.n_edges, sol.rank, sol.min_cut, sol.retries_used)


def run_trials(fn: Callable, seeds: list[int], workers: int = 1, **kwargs) -> list:
    """Apply ``fn`` to every seed, optionally in worker processes; results sorted by seed."""
    if workers <= 1:
        out = [fn(s, **kwargs) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_call, [(fn, s, kwargs) for s in seeds]))
    return sorted(out, key=lambda t: t.seed)


def _call(args):
    fn, seed, kwargs = args
    return fn(seed, **kwargs)


def sweep_summary(trials: list) -> dict:
    fails = [t.seed for t in trials if not t.passed]
    return {"trials": len(trials), "pass": len(trials) - len(fails), "fail": len(fails), "fail_seeds": fails}


# -- command surface -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field-prime", type=int, default=FieldConfig().p, metavar="P")
    common.add_argument("--seed", type=int, default=0, metavar="S")
    common.add_argument("--retries", type=int, default=DEFAULT_RETRIES, metavar="R")
    common.add_argument("--trace", action="store_true", help="append per-stage details")
    common.add_argument("--strict", action="store_true", help="treat unreachable destinations as errors")

    parser = _Parser(prog="twounicastz", description="Two-unicast-Z linear network coding workbench.")
    parser.add_argument("--version", action="version", version=package_version())
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, text in (
        ("code", "reduce and code a network, report the rate region"),
        ("rates", "rate region of the constructed code"),
        ("gns", "smallest GNS-cut set size"),
        ("reduce", "destination reduction stage table"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("network", help="network JSON path, '-' for stdin, or 'fig5'")
    for name, text in (
        ("verify-mfmc", "rank vs min-cut on random single-unicast instances"),
        ("sweep-theorem1", "(1,1) achievability on random two-unicast-Z instances"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--trials", type=int, default=100, metavar="K")
        p.add_argument("--workers", type=int, default=1, metavar="W")
    p = sub.add_parser("gen", parents=[common], help="print a random network")
    p.add_argument("--vertices", type=int, default=8, metavar="V")
    p.add_argument("--in-degree", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    def warn(msg: str) -> None:
        print(f"warning: {msg}", file=sys.stderr)

    try:
        cfg = FieldConfig(args.field_prime)
        out = _dispatch(args, cfg, warn)
    except RetryExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ReductionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


def _dispatch(args, cfg: FieldConfig, warn) -> str:
    cmd = args.command
    if cmd == "gen":
        net = random_dag(DagParams(n_vertices=args.vertices, max_in_degree=args.in_degree, seed=args.seed))
        return json.dumps(net.to_json(), indent=2)
    if cmd == "verify-mfmc":
        trials = run_trials(mfmc_trial, [args.seed + k for k in range(args.trials)], args.workers, p=cfg.p, retries=args.retries)
        body = {
            "instances": len(trials),
            "failures": sum(not t.passed for t in trials),
            "max_retries_used": max((t.retries_used for t in trials), default=0),
        }
        return emit_report(body, args.seed, cfg.p)
    if cmd == "sweep-theorem1":
        trials = run_trials(theorem1_trial, [args.seed + k for k in range(args.trials)], args.workers, p=cfg.p, retries=args.retries)
        body = sweep_summary(trials)
        eligible = [t for t in trials if t.eligible]
        body["eligible"] = len(eligible)
        body["first_attempt_ok"] = sum(t.first_ok for t in eligible)
        return emit_report(body, args.seed, cfg.p)

    net = load_network(args.network, strict=args.strict, warn=warn)
    if cmd == "reduce":
        seq = reduce(net if is_pruned(net) else prune_noncontributing(net))
        body = {"N": seq.N, **seq.table()}
        if args.trace:
            body["stages"] = seq.trace()
        return emit_report(body, None, cfg.p)
    if cmd == "gns":
        return emit_report(cut_report(net).to_json(), None, cfg.p)
    body = code_report(net, args.seed, cfg, args.retries, trace=args.trace)
    if cmd == "rates":
        keep = ("r1_max", "r2_max", "grank", "sum_cap_alt", "region_corners")
        body = {k: body[k] for k in keep} | ({"stage_granks": body["stage_granks"]} if args.trace else {})
    return emit_report(body, args.seed, cfg.p)


if __name__ == "__main__":
    sys.exit(main())

from __future__ import annotations

import pytest

from twounicastz.cli import load_network
from twounicastz.netgraph import Network


@pytest.fixture(scope="session")
def fig5() -> Network:
    return load_network("fig5")


def chain(n_edges: int, T1=None, T2=None) -> Network:
    """s -> x1 -> ... with both sessions starting at ``s``."""
    vs = ["s"] + [f"x{k}" for k in range(1, n_edges + 1)]
    edges = [(f"e{k}", vs[k - 1], vs[k]) for k in range(1, n_edges + 1)]
    last = [f"e{n_edges}"]
    return Network.build(vs, edges, "s", "s", T1 or last, T2 or last)


def two_chains() -> Network:
    """Disjoint paths s1 -> a -> t1 and s2 -> b -> t2."""
    return Network.build(
        ["s1", "s2", "a", "b", "t1", "t2"],
        [("e1", "s1", "a"), ("e2", "s2", "b"), ("e3", "a", "t1"), ("e4", "b", "t2")],
        "s1",
        "s2",
        ["e3"],
        ["e4"],
    )

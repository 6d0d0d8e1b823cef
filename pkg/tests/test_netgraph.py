from __future__ import annotations

import pytest

from twounicastz.netgraph import (
    CycleError,
    DagParams,
    Network,
    communicates,
    gns_bound,
    has_single_edge_gns,
    is_gns_cut,
    min_cut,
    prune_noncontributing,
    random_dag,
    topological_orders,
    validate,
)

from conftest import chain


def test_chain_orders():
    net = chain(2)
    vo, _ = topological_orders(net)
    assert vo["s"] < vo["x1"] < vo["x2"]


def test_edges_sharing_a_tail_share_an_order():
    net = Network.build(
        ["s", "a", "b"], [("e1", "s", "a"), ("e2", "s", "b"), ("e3", "a", "b")], "s", "s", ["e3"], ["e2"]
    )
    _, eo = topological_orders(net)
    assert eo["e1"] == eo["e2"] < eo["e3"]


def test_fig5_edge_order(fig5):
    _, eo = topological_orders(fig5)
    assert eo["e7"] < eo["e8"]


def test_fig5_shape(fig5):
    assert len(fig5.vertices) == 8 and fig5.n_edges == 8
    assert validate(fig5) == []


def test_build_sorts_edges_topologically():
    net = Network.build(["s", "a", "b"], [("late", "a", "b"), ("early", "s", "a")], "s", "s", ["late"], ["late"])
    assert [e.name for e in net.edges] == ["early", "late"]


def test_build_rejects_cycles_naming_the_back_edge():
    with pytest.raises(CycleError) as exc:
        Network.build(["s", "a", "b"], [("e1", "s", "a"), ("e2", "a", "b"), ("e3", "b", "a")], "s", "s", ["e2"], ["e2"])
    assert exc.value.edge_name == "e3"


def test_build_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        Network.build(["s"], [("e1", "s", "zz")], "s", "s", ["e1"], ["e1"])


def test_parallel_edges_are_distinct():
    net = Network.build(["s", "t"], [("e1", "s", "t"), ("e2", "s", "t")], "s", "s", ["e1", "e2"], ["e1"])
    assert net.n_edges == 2
    assert min_cut(net, "s", net.T1) == 2


def test_communicates(fig5):
    assert communicates(fig5, "e3", "e3")
    assert communicates(fig5, "e2", "e8")
    assert not communicates(fig5, "e8", "e2")
    net = Network.build(
        ["a", "b", "c", "d"], [("e1", "a", "b"), ("e2", "c", "d")], "a", "c", ["e1"], ["e2"]
    )
    assert not communicates(net, "e1", "e2")


def test_min_cut_examples(fig5):
    assert min_cut(chain(3), "s", chain(3).T1) == 1
    diamond = Network.build(
        ["s", "a", "b", "t"],
        [("e1", "s", "a"), ("e2", "s", "b"), ("e3", "a", "t"), ("e4", "b", "t")],
        "s",
        "s",
        ["e3", "e4"],
        ["e3"],
    )
    assert min_cut(diamond, "s", diamond.T1) == 2
    # s2 has the single out-edge e2, so one edge separates it from e8
    assert min_cut(fig5, "s2", fig5.ids(["e8"])) == 1


def test_min_cut_empty_destinations_rejected(fig5):
    with pytest.raises(ValueError):
        min_cut(fig5, "s1", [])


def test_gns_bound_examples(fig5):
    assert gns_bound(chain(3)) == 1
    assert gns_bound(fig5) == 2
    assert is_gns_cut(fig5, fig5.ids(["e4", "e5"]))


def test_gns_bound_with_isolated_s2():
    net = Network.build(
        ["s1", "s2", "a", "b"],
        [("e1", "s1", "a"), ("e2", "s1", "a"), ("e3", "a", "b")],
        "s1",
        "s2",
        ["e1", "e2"],
        ["e3"],
    )
    assert gns_bound(net) == min_cut(net, "s1", net.T1) == 2


def test_single_edge_gns(fig5):
    assert has_single_edge_gns(fig5) is None
    net = chain(3)
    assert net.edges[has_single_edge_gns(net)].name == "e1"


def test_single_edge_gns_vacuous():
    net = Network.build(["s1", "s2", "a"], [("e1", "s1", "a")], "s1", "s2", ["e1"], [])
    # the empty set already cuts s2 from everything; only (s1, T1) remains
    assert has_single_edge_gns(net) is not None
    net = Network.build(["s1", "s2", "a"], [("e1", "s1", "a")], "s1", "s2", [], [])
    assert has_single_edge_gns(net) is None


def test_prune_examples(fig5):
    assert prune_noncontributing(fig5).to_json() == fig5.to_json()
    net = Network.build(
        ["s", "a", "b", "c"], [("e1", "s", "a"), ("e2", "a", "b"), ("e3", "a", "c")], "s", "s", ["e2"], ["e1"]
    )
    pruned = prune_noncontributing(net)
    assert [e.name for e in pruned.edges] == ["e1", "e2"]


def test_prune_flags_edges_no_source_reaches():
    net = Network.build(
        ["s1", "s2", "x", "t"], [("e1", "s1", "t"), ("e2", "x", "t")], "s1", "s1", ["e1", "e2"], ["e1"]
    )
    pruned = prune_noncontributing(net)
    assert pruned.names(pruned.unreachable) == ["e2"]


def test_random_dag_deterministic():
    a = random_dag(DagParams(seed=11))
    b = random_dag(DagParams(seed=11))
    assert a.to_json() == b.to_json()


def test_random_dag_in_degree_one_gives_paths():
    net = random_dag(DagParams(max_in_degree=1, seed=3))
    for v in net.vertices:
        assert len(net.in_edges(v)) <= 1


def test_random_dag_samples_are_valid():
    for seed in range(1000):
        net = random_dag(DagParams(seed=seed))
        assert validate(net) == []
        assert net.vertex_reaches(net.s1, net.T1) and net.vertex_reaches(net.s2, net.T2)

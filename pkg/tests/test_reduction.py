from __future__ import annotations

import pytest

from twounicastz.netgraph import DagParams, Network, random_dag
from twounicastz.reduction import ReductionError, reduce, stage_sets, validate_properties

from conftest import chain

FIG5_T1 = [["e8"], ["e4", "e6"], ["e4", "e5"], ["e1", "e3", "e4"], ["e1", "e2"]]
FIG5_T2 = [["e7"], ["e7"], ["e5"], ["e1", "e3"], ["e1", "e2"]]


def test_fig5_table(fig5):
    seq = reduce(fig5)
    assert seq.N == 4
    assert seq.table() == {"T1": FIG5_T1, "T2": FIG5_T2}


def test_fig5_stage_one_sets(fig5):
    s = stage_sets(reduce(fig5), 1)
    names = fig5.names
    assert names(s.O1) == ["e6"] and names(s.I1) == ["e5"] and names(s.U1) == ["e4"]
    assert names(s.O2) == ["e7"] and names(s.I2) == ["e5"] and names(s.U2) == []
    assert names(s.A2) == [] and names(s.B2) == ["e7"]


def test_fig5_stage_zero_sets(fig5):
    s = stage_sets(reduce(fig5), 0)
    names = fig5.names
    assert s.v == "v5"
    assert names(s.U1) == [] and names(s.O1) == ["e8"] and names(s.I1) == ["e4", "e6"]
    assert names(s.O2) == [] and names(s.I2) == [] and names(s.U2) == ["e7"]


def test_unchanged_destination_set_has_empty_change_sets(fig5):
    seq = reduce(fig5)
    for s in seq.stages[:-1]:
        nxt = seq.stages[s.i + 1]
        for T, nT, U, I, O in ((s.T1, nxt.T1, s.U1, s.I1, s.O1), (s.T2, nxt.T2, s.U2, s.I2, s.O2)):
            if T == nT:
                assert not O and not I and U == T


def test_stage_sets_index_bounds(fig5):
    seq = reduce(fig5)
    with pytest.raises(IndexError):
        stage_sets(seq, seq.N)
    with pytest.raises(IndexError):
        stage_sets(seq, -1)


def test_source_edge_destinations_give_a_single_stage():
    net = Network.build(["s", "t"], [("e1", "s", "t")], "s", "s", ["e1"], ["e1"])
    seq = reduce(net)
    assert seq.N == 0 and len(seq.stages) == 1
    assert validate_properties(seq).ok


def test_chain_peels_one_edge_per_stage():
    seq = reduce(chain(4))
    assert seq.table()["T1"] == [["e4"], ["e3"], ["e2"], ["e1"]]
    assert seq.table()["T1"] == seq.table()["T2"]


def test_unpruned_network_rejected():
    net = Network.build(["s", "a", "b"], [("e1", "s", "a"), ("e2", "a", "b")], "s", "s", ["e1"], ["e1"])
    with pytest.raises(ReductionError):
        reduce(net)


def test_fig5_properties(fig5):
    rep = validate_properties(reduce(fig5))
    assert rep.ok, rep.witnesses


def test_random_dag_properties():
    for seed in range(100):
        net = random_dag(DagParams(n_vertices=9, max_in_degree=3, seed=seed))
        rep = validate_properties(reduce(net))
        assert rep.ok, (seed, rep.witnesses)


def test_validator_detects_a_broken_sequence(fig5):
    from dataclasses import replace

    seq = reduce(fig5)
    broken = replace(seq, stages=(replace(seq.stages[0], T1=fig5.ids(["e7"])),) + seq.stages[1:])
    assert not validate_properties(broken).ok

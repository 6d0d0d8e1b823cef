"""Brute-force oracles; expected values are frozen from hand derivations."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from twounicastz.coder import grank, recursive_coding
from twounicastz.gf import FieldMatrix
from twounicastz.netgraph import Network
from twounicastz.oracle import (
    exhaustive_code_search,
    gns_vs_sumrate,
    grank_via_g1_enumeration,
    integral_routing_best,
)
from twounicastz.reduction import reduce

from conftest import chain, two_chains


def _fm(rows, p=2):
    return FieldMatrix(np.array(rows, dtype=np.int64), p)


def test_g1_enumeration_trivial_cases():
    assert grank_via_g1_enumeration(_fm([[0]]), _fm([[0]]), _fm([[0]])) == 0
    assert grank_via_g1_enumeration(_fm([[1]]), _fm([[0]]), _fm([[1]])) == 2


def test_g1_enumeration_matches_grank_on_every_2x2_gf2_triple():
    mismatches = 0
    for bits in itertools.product(range(2), repeat=12):
        a = np.array(bits).reshape(3, 2, 2)
        H1, H2, G2 = (FieldMatrix(x, 2) for x in a)
        mismatches += grank(H1, H2, G2) != grank_via_g1_enumeration(H1, H2, G2)
    assert mismatches == 0


def test_g1_enumeration_refuses_large_fields():
    with pytest.raises(ValueError):
        grank_via_g1_enumeration(_fm([[1]], 5), _fm([[0]], 5), _fm([[1]], 5))


def test_code_search_fig5_has_one_one(fig5):
    res = exhaustive_code_search(fig5, 2)
    assert res.has_one_one
    assert (res.r1_max, res.r2_max, res.grank) == (1, 1, 2)
    # 8 free coefficients over GF(2)
    assert res.codes_checked == 256


def test_code_search_chain_best_grank_is_one():
    res = exhaustive_code_search(chain(3), 2)
    assert res.grank == 1


def test_code_search_butterfly_matches_coder():
    # two sources merge on a bottleneck b -> c; s1 also feeds t2 side information directly
    net = Network.build(
        ["s1", "s2", "b", "c", "t1", "t2"],
        [
            ("e1", "s1", "b"),
            ("e2", "s2", "b"),
            ("e3", "s1", "t2"),
            ("e4", "b", "c"),
            ("e5", "c", "t1"),
            ("e6", "c", "t2"),
        ],
        "s1",
        "s2",
        ["e5"],
        ["e6", "e3"],
    )
    res = exhaustive_code_search(net, 2)
    st = recursive_coding(reduce(net), rng=np.random.default_rng(0))
    check = gns_vs_sumrate(net, st)
    assert res.grank == check.grank


def test_routing_fig5_sum_rate_one(fig5):
    r = integral_routing_best(fig5)
    assert r.sum_rate == 1
    assert r.corners == ((0, 1), (1, 0))


def test_routing_two_chains():
    r = integral_routing_best(two_chains())
    assert r.corners == ((1, 1),)
    assert r.sum_rate == 2


def test_fig5_coding_beats_routing(fig5):
    st = recursive_coding(reduce(fig5), rng=np.random.default_rng(0))
    check = gns_vs_sumrate(fig5, st)
    assert check.grank == 2 > integral_routing_best(fig5).sum_rate


def test_gns_vs_sumrate_fig5(fig5):
    st = recursive_coding(reduce(fig5), rng=np.random.default_rng(1))
    check = gns_vs_sumrate(fig5, st)
    assert (check.grank, check.gns, check.ok) == (2, 2, True)


def test_gns_vs_sumrate_single_edge_gns():
    net = chain(3)
    st = recursive_coding(reduce(net), rng=np.random.default_rng(0))
    check = gns_vs_sumrate(net, st)
    assert check.gns == 1 and check.grank <= 1 and check.ok
